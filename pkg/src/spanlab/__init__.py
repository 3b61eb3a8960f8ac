"""spanlab: geometric-network workbench.

Constructs spanner-style road networks on point configurations, measures
stretch and normalized length exactly (road crossings count as junctions),
and evaluates analytic bounds on the stretch-length tradeoff.
"""

__all__ = ["analytic", "configs", "geom", "metrics", "mc", "nets"]
__version__ = "0.1.0"
