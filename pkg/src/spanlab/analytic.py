"""Closed-form quantities and bounds for the stretch-length tradeoff.

Worst-case theta-graph stretch bounds s_m, mean theta-graph length L_m,
cone-road mean length L_k, the line-pattern upper bound Psi*, the
crossing-model machinery behind the small-excess lower bound, and fixed
reference constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import dblquad, quad
from scipy.optimize import brentq

# truncate infinite domains where the exponential factor drops below this
# fraction of its peak; the tail is far below quadrature tolerance
_TAIL = 1e-14


@dataclass
class BoundEntry:
    name: str
    params: dict
    value: float
    tag: str


@dataclass
class BoundTable:
    entries: list[BoundEntry] = field(default_factory=list)

    def add(self, name: str, params: dict, value: float, tag: str):
        self.entries.append(BoundEntry(name, params, value, tag))

    def value(self, name: str) -> float:
        for e in self.entries:
            if e.name == name:
                return e.value
        raise KeyError(name)

    def to_csv(self) -> str:
        import json

        lines = ["name,param,value,tag,schema_version"]
        for e in self.entries:
            lines.append(
                f"{e.name},\"{json.dumps(e.params)}\",{e.value:.17g},{e.tag},1"
            )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# theta-graphs
# ---------------------------------------------------------------------------


def s_m_bound(m: int) -> float:
    """Best known worst-case stretch of the theta-graph with m cones (m >= 6)."""
    if m < 6 or int(m) != m:
        raise ValueError("m must be an integer >= 6")
    t = 2.0 * math.pi / m
    if m % 4 == 0:
        return 1.0 + 2.0 * math.sin(t / 2) / (math.cos(t / 2) - math.sin(t / 2))
    if m % 4 == 2:
        return 1.0 + 2.0 * math.sin(t / 2)
    # m odd
    return math.cos(t / 4) / (math.cos(t / 2) - math.sin(3 * t / 4))


def _theta_alpha(m: int) -> float:
    half = math.pi / m  # half the cone angle
    return math.cos(half) / (4.0 * math.sin(half))


def theta_mean_length(m: int, tol: float = 1e-6, method: str = "rl") -> float:
    """Mean length per unit area L_m of the theta-graph on a rate-1 Poisson
    process, for even m >= 6.

    An edge from a typical city to the point z in one of its m cones exists
    iff a triangle of area alpha*l(z)^2 is empty; the edge is mutual iff a
    further region of area alpha*(r^2 + (l-r)^2) is also empty, where r and
    l - r are the vertical distances from z to the cone boundaries (bisector
    drawn horizontal).  Mutual edges are counted half to avoid
    double-counting.

    Two independent integration paths are provided: the (r, l) strip
    parametrization (``method="rl"``, with Jacobian dz = dl dr / (2 tan))
    and raw Cartesian quadrature over the cone (``method="cartesian"``).
    """
    if m < 6 or m % 2 != 0:
        raise ValueError("m must be an even integer >= 6")
    half = math.pi / m
    tan_half = math.tan(half)
    alpha = _theta_alpha(m)
    l_max = math.sqrt(math.log(1.0 / _TAIL) / alpha)

    def weight(l, r):
        return math.exp(-alpha * l * l) - 0.5 * math.exp(
            -alpha * (l * l + r * r + (l - r) ** 2)
        )

    if method == "rl":
        def integrand(r, l):
            x = l / (2.0 * tan_half)
            y = r - l / 2.0
            return math.hypot(x, y) * weight(l, r)

        val, _err = dblquad(integrand, 0.0, l_max, 0.0, lambda l: l,
                            epsabs=tol * tan_half / m, epsrel=1e-10)
        return m * val / (2.0 * tan_half)

    if method == "cartesian":
        x_max = l_max / (2.0 * tan_half)

        def integrand(y, x):
            l = 2.0 * x * tan_half
            r = y + x * tan_half
            return math.hypot(x, y) * weight(l, r)

        val, _err = dblquad(integrand, 0.0, x_max,
                            lambda x: -x * tan_half, lambda x: x * tan_half,
                            epsabs=tol / m, epsrel=1e-10)
        return m * val

    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# cone-road networks
# ---------------------------------------------------------------------------


def _cone_area_factor(omega: float, k: int) -> float:
    """Exponent coefficient: area of the mutual-exclusion region over r^2."""
    return (math.pi / k - math.cos(omega) * math.sin(omega)
            + math.sin(omega) ** 2 * (math.cos(math.pi / k) / math.sin(math.pi / k)))


def cone_Lk(k: int, tol: float = 1e-8) -> float:
    """Mean length per unit area L_k of one direction-pair of cone roads.

    Every city is linked to its Euclidean-nearest city in an angle-pi/k cone
    and in the opposite cone; L_k is the resulting mean length per unit area
    over a rate-1 Poisson process.
    """
    if k < 2 or int(k) != k:
        raise ValueError("k must be an integer >= 2")

    def integrand(omega):
        return _cone_area_factor(omega, k) ** (-1.5)

    val, _err = quad(integrand, 0.0, math.pi / k, epsabs=tol, epsrel=1e-12, limit=200)
    return math.sqrt(2.0 * k) - 0.25 * math.sqrt(math.pi) * val


def cone_Lk_2d(k: int, tol: float = 1e-8) -> float:
    """L_k via the pre-integrated (r, omega) form: quadrature of
    r^2 [2 p(r, omega) - p1(r, omega)] over the cone, as a cross-check of
    :func:`cone_Lk`."""
    if k < 2 or int(k) != k:
        raise ValueError("k must be an integer >= 2")
    a0 = math.pi / (2.0 * k)
    r_max = math.sqrt(math.log(1.0 / _TAIL) / a0)

    def integrand(omega, r):
        p = math.exp(-a0 * r * r)
        p1 = math.exp(-r * r * _cone_area_factor(omega, k))
        return r * r * (2.0 * p - p1)

    val, _err = dblquad(integrand, 0.0, r_max, 0.0, math.pi / k,
                        epsabs=tol, epsrel=1e-10)
    return val


# ---------------------------------------------------------------------------
# line-pattern upper bound
# ---------------------------------------------------------------------------


def psi_star(s: float) -> float:
    """Worst-case length upper bound achievable by periodic line patterns,
    defined for 1 < s < 2."""
    if not 1.0 < s < 2.0:
        raise ValueError(f"psi_star requires 1 < s < 2, got {s}")
    phi = math.pi / 2.0 - math.asin(1.0 / s)
    n_dirs = math.ceil(math.pi / phi)
    dup = math.ceil(1.0 / (s - 1.0))
    return 2.0 * n_dirs * math.sqrt((1.0 + dup) * math.tan(phi)) / math.sin(phi)


# ---------------------------------------------------------------------------
# crossing model for the small-excess lower bound
# ---------------------------------------------------------------------------


def g_of_delta(delta: float) -> float:
    """Excess stretch forced on a route whose axis-crossing is displaced by
    delta (in units of the strip half-height); g(delta) ~ delta^2/8 near 0."""
    return (
        math.sqrt(1.0 + (1.0 + delta) ** 2) + math.sqrt(1.0 + (1.0 - delta) ** 2)
    ) / (2.0 * math.sqrt(2.0)) - 1.0


def g_inverse(s: float) -> float:
    """Inverse of g on [0, 64] by bracketed root search (tolerance 1e-12)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return 0.0
    hi = 64.0
    if s > g_of_delta(hi):
        raise ValueError(f"s={s} out of inversion range (0, {g_of_delta(hi)}]")
    return brentq(lambda d: g_of_delta(d) - s, 0.0, hi, xtol=1e-12, rtol=8.9e-16)


def delta_hs(h: float, s: float) -> float:
    """Maximum displacement between the straight crossing position and the
    route crossing position, for friends in a half-height-h strip under
    stretch excess s."""
    if h <= 0 or s <= 0:
        raise ValueError("h and s must be positive")
    return h * g_inverse(s)


def expected_crossings(h: float, L: float) -> float:
    """Mean number of virtual crossing positions in [0, L]: 2 h^3 L."""
    if h < 0 or L < 0:
        raise ValueError("h and L must be nonnegative")
    return 2.0 * h ** 3 * L


def area_A(x0: float, y0: float, h: float, L: float) -> float:
    """Area of friend positions of the point (x0, -y0) whose virtual
    crossing lands in [0, L]; piecewise by region, assuming h > L/2.
    """
    if h <= L / 2.0:
        raise ValueError("area_A requires h > L/2")
    if not 0.0 < y0 < h:
        raise ValueError("point outside region: need 0 < y0 < h")
    if not -y0 < x0 < L + y0:
        raise ValueError("point outside region: need dist(x0, [0, L]) < y0")
    base = (h + y0) ** 2 - y0 ** 2
    if y0 <= x0 <= L - y0:
        return base  # crossing interval fully inside [0, L]
    if L - y0 <= x0 <= y0:
        return (L / (2.0 * y0)) * base  # crossing interval covers [0, L]
    if x0 > L / 2.0:
        return 0.5 * (1.0 + (L - x0) / y0) * base  # right trapezoid case
    return 0.5 * (1.0 + x0 / y0) * base  # left case, mirror x0 -> L - x0


def second_moment_upper(h: float, L: float) -> float:
    """Closed-form upper bound on the second moment of the virtual-crossing
    count N(h, L), valid for h > L/2.

    E N^2 splits into the diagonal (E N), ordered pairs of crossings with
    four distinct endpoints ((E N)^2, exact by the Mecke formula), and
    ordered pairs of crossings sharing an endpoint.  The shared-endpoint
    term is bounded by replacing the friend-region area at depth y0 with
    its maximum over horizontal position, ((h+y0)^2 - y0^2) min(1, L/2y0);
    the two closed forms below are that integral split at y0 = L/2, and the
    leading factor 2 counts the two orders of each shared pair (verified
    against a direct Monte Carlo oracle).
    """
    if h <= L / 2.0:
        raise ValueError("second_moment_upper requires h > L/2")
    mean = expected_crossings(h, L)
    near = 0.75 * h**4 * L**2 + (5.0 / 6.0) * h**3 * L**3 + (7.0 / 24.0) * h**2 * L**4
    far = (
        3.5 * h**4 * L**2
        - 0.25 * h**3 * L**3
        - 0.75 * h**2 * L**4
        + (0.5 * L**2 * h**4 + L**3 * h**3) * math.log(2.0 * h / L)
    )
    return mean + mean ** 2 + 2.0 * (near + far)


def prop38_lower_bound(s: float, grid: int = 64, refine_rounds: int = 3):
    """Small-excess lower bound on achievable normalized length at stretch
    1 + s, maximized over the crossing-model parameters (h, L).

    Searches a log-spaced grid h in [s^-1/16, s^-1/4], L in [s^1/2, s^1/4]
    seeded with the schedule h = s^-1/8, L = s^3/8, then refines locally.
    Returns (value, best_h, best_L).
    """
    if not 0.0 < s < 0.1:
        raise ValueError("prop38_lower_bound requires 0 < s < 0.1")
    ginv = g_inverse(s)

    def objective(h, L):
        if h <= L / 2.0:
            return -math.inf
        mean = expected_crossings(h, L)
        prob = mean ** 2 / second_moment_upper(h, L)
        return prob / (L + 2.0 * h * ginv)

    hs = np.geomspace(s ** (-1.0 / 16.0), s ** (-0.25), grid)
    ls = np.geomspace(math.sqrt(s), s ** 0.25, grid)
    best = (objective(s ** (-0.125), s ** 0.375), s ** (-0.125), s ** 0.375)
    for h in hs:
        for L in ls:
            v = objective(h, L)
            if v > best[0]:
                best = (v, h, L)
    # local refinement around the best cell
    span = max(hs[1] / hs[0], ls[1] / ls[0])
    for _ in range(refine_rounds):
        h0, l0 = best[1], best[2]
        for h in np.geomspace(h0 / span, h0 * span, 9):
            for L in np.geomspace(l0 / span, l0 * span, 9):
                v = objective(h, L)
                if v > best[0]:
                    best = (v, h, L)
        span = span ** 0.4
    return (math.pi / 2.0) * best[0], best[1], best[2]


# ---------------------------------------------------------------------------
# reference constants
# ---------------------------------------------------------------------------


def reference_constants() -> BoundTable:
    """Fixed table of reference constants and exponents."""
    table = BoundTable()
    table.add("steiner_constant_worst_lower", {}, (3.0 / 4.0) ** 0.25,
              "hexagonal-steiner-ratio")
    table.add("steiner_constant_worst_upper", {}, 0.995, "chung-graham-bound")
    table.add("delaunay_stretch", {}, 2.0 * math.pi / (3.0 * math.cos(math.pi / 6.0)),
              "delaunay-spanner-bound")
    table.add("delaunay_length", {}, 32.0 / (3.0 * math.pi), "delaunay-mean-length")
    table.add("graph_spanner_exponent_worst", {}, 4.0, "mst-based-spanner")
    table.add("line_pattern_exponent_worst", {}, 1.25, "line-pattern-upper")
    table.add("theta_graph_exponent_ave", {}, 1.5, "theta-graph-upper")
    table.add("cone_road_exponent_ave", {}, 0.75, "cone-road-upper")
    table.add("cone_road_prefactor_ave", {}, 2.0 ** (-0.25) * math.pi ** 1.5,
              "cone-road-upper")
    table.add("lower_bound_exponent_ave", {}, 3.0 / 8.0, "crossing-rate-lower")
    return table
