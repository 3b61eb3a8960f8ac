"""Network measurements: stretch, normalized length, intersection rate.

Stretch is measured either in "steiner" mode (the planar arrangement, so
routes may switch roads at crossings) or "graph" mode (crossings carry no
junction; routes change roads only at shared endpoints).  Lengths are
clipped exactly to an inner window to control boundary effects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from spanlab.configs import rng_from_seed
from spanlab.geom import build_arrangement
from spanlab.nets import Network, unwrap

DEFAULT_MARGIN = 0.1
EXACT_PAIR_LIMIT = 400  # all-pairs below this many filtered cities
TORUS_BUFFER_FRACTION = 0.2


@dataclass
class StretchReport:
    mode: str
    max_ratio: float
    argmax_pair: tuple[int, int]
    percentiles: dict[str, float]
    pair_filter: str
    n_cities: int
    n_pairs: int
    exact: bool

    def to_json(self) -> str:
        doc = dict(self.__dict__)
        doc["argmax_pair"] = list(self.argmax_pair)
        doc["schema_version"] = 1
        return json.dumps(doc)

    def csv_row(self) -> str:
        header = "mode,max_ratio,argmax_i,argmax_j,p50,p90,p99,pair_filter,n_cities,n_pairs,exact"
        row = (f"{self.mode},{self.max_ratio:.17g},{self.argmax_pair[0]},"
               f"{self.argmax_pair[1]},{self.percentiles['p50']:.17g},"
               f"{self.percentiles['p90']:.17g},{self.percentiles['p99']:.17g},"
               f"{self.pair_filter},{self.n_cities},{self.n_pairs},{self.exact}")
        return header + "\n" + row + "\n"


def _planar_view(net: Network) -> Network:
    if net.config.torus:
        return unwrap(net, TORUS_BUFFER_FRACTION * net.config.window.width)
    return net


def _interior_mask(net: Network, margin_fraction: float) -> np.ndarray:
    inner = net.config.window.inner(margin_fraction)
    return inner.contains(net.config.points)


def routing_graph(net: Network, mode: str = "steiner"):
    """Arrangement of a network under steiner or graph semantics."""
    if mode not in ("steiner", "graph"):
        raise ValueError(f"unknown mode {mode!r}")
    planar = _planar_view(net)
    snap = 1e-9 * max(planar.config.window.diameter, 1.0)
    return build_arrangement(planar.segment_tuples(), planar.config.points,
                             snap_eps=snap, junctions=(mode == "steiner"))


def stretch(
    net: Network,
    mode: str = "steiner",
    pair_filter: str = "interior",
    margin_fraction: float = DEFAULT_MARGIN,
    max_pairs: int = 200_000,
    seed: int = 0,
) -> StretchReport:
    """Max over city pairs of route length / Euclidean distance.

    Exact over all filtered pairs when the filtered city count is at most
    400; otherwise a seeded random subset of source cities is used and the
    sampled pair count is reported.  A disconnected pair reports +inf.
    """
    if pair_filter == "interior":
        mask = _interior_mask(net, margin_fraction)
    elif pair_filter == "all":
        mask = np.ones(net.config.n, dtype=bool)
    else:
        raise ValueError(f"unknown pair_filter {pair_filter!r}")
    cities = np.flatnonzero(mask)
    if len(cities) < 2:
        raise ValueError("need at least two filtered cities")

    g = routing_graph(net, mode)
    pts = net.config.points

    n = len(cities)
    exact = n <= EXACT_PAIR_LIMIT
    if exact:
        sources = cities
    else:
        n_src = max(2, min(n, max_pairs // n))
        rng = rng_from_seed(seed)
        sources = rng.choice(cities, size=n_src, replace=False)

    best = (-math.inf, (-1, -1))
    ratios = []
    node_xy = g.nodes
    for src in sources:
        dist, _ = g.distances_from(int(src))
        route = dist[g.city_nodes[cities]]
        eucl = np.hypot(pts[cities, 0] - pts[src, 0], pts[cities, 1] - pts[src, 1])
        ok = (cities != src) & (eucl > 0)
        r = route[ok] / eucl[ok]
        ratios.append(r)
        if len(r):
            imax = int(np.argmax(r))
            if r[imax] > best[0]:
                best = (float(r[imax]), (int(src), int(cities[ok][imax])))
    ratios = np.concatenate(ratios) if ratios else np.empty(0)
    n_pairs = len(ratios) // 2 if exact else len(ratios)
    finite = ratios[np.isfinite(ratios)]
    if len(finite) == 0:
        pct = {"p50": math.inf, "p90": math.inf, "p99": math.inf}
    else:
        pct = {f"p{q}": float(np.percentile(finite, q)) for q in (50, 90, 99)}
    return StretchReport(
        mode=mode,
        max_ratio=best[0],
        argmax_pair=best[1],
        percentiles=pct,
        pair_filter=pair_filter,
        n_cities=n,
        n_pairs=int(n_pairs),
        exact=exact,
    )


def local_stretch(
    net: Network,
    neighbor_rule: str = "unit-distance",
    margin_fraction: float = DEFAULT_MARGIN,
) -> float:
    """Max route/distance ratio over nearest-neighbor pairs (steiner mode).

    neighbor_rule "unit-distance" pairs cities at Euclidean distance 1;
    "mutual-nearest" pairs each city with its nearest neighbor when the
    relation is symmetric.  Only pairs with both cities in the inner window
    are scored.
    """
    pts = net.config.points
    tree = cKDTree(pts)
    tol = 1e-9
    if neighbor_rule == "unit-distance":
        pairs = tree.query_pairs(r=1.0 + tol)
        pairs = {(i, j) for i, j in pairs
                 if abs(np.hypot(*(pts[i] - pts[j])) - 1.0) <= tol}
    elif neighbor_rule == "mutual-nearest":
        d, idx = tree.query(pts, k=2)
        nn_dist = d[:, 1]
        pairs = set()
        for i in range(len(pts)):
            cand = tree.query_ball_point(pts[i], nn_dist[i] * (1 + tol))
            for j in cand:
                if j != i and nn_dist[j] * (1 + tol) >= np.hypot(*(pts[i] - pts[j])):
                    pairs.add((min(i, j), max(i, j)))
    else:
        raise ValueError(f"unknown neighbor_rule {neighbor_rule!r}")

    mask = _interior_mask(net, margin_fraction)
    pairs = [(i, j) for i, j in pairs if mask[i] and mask[j]]
    if not pairs:
        raise ValueError("no neighbor pairs inside the inner window")
    g = routing_graph(net, "steiner")
    best = -math.inf
    by_src: dict[int, list[int]] = {}
    for i, j in pairs:
        by_src.setdefault(i, []).append(j)
    for i, targets in by_src.items():
        dist, _ = g.distances_from(i)
        for j in targets:
            d_ij = float(np.hypot(*(pts[i] - pts[j])))
            best = max(best, float(dist[g.city_nodes[j]]) / d_ij)
    return best


def _clip_lengths(segments: np.ndarray, win) -> np.ndarray:
    """Exact lengths of segments clipped to a rectangular window."""
    x1, y1, x2, y2 = segments[:, 0], segments[:, 1], segments[:, 2], segments[:, 3]
    dx, dy = x2 - x1, y2 - y1
    t0 = np.zeros(len(segments))
    t1 = np.ones(len(segments))
    for p, d, lo, hi in ((x1, dx, win.x0, win.x1), (y1, dy, win.y0, win.y1)):
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = np.where(d != 0, (lo - p) / d, np.where(p >= lo, -np.inf, np.inf))
            tb = np.where(d != 0, (hi - p) / d, np.where(p <= hi, np.inf, -np.inf))
        t0 = np.maximum(t0, np.minimum(ta, tb))
        t1 = np.minimum(t1, np.maximum(ta, tb))
    frac = np.clip(t1 - t0, 0.0, 1.0)
    return frac * np.hypot(dx, dy)


def normalized_length(net: Network, margin_fraction: float = DEFAULT_MARGIN) -> float:
    """Total network length inside the inner window, per unit inner area.

    Segments are clipped exactly; toroidal networks are unrolled first so
    wrapped road pieces land back inside the window.
    """
    if not 0 <= margin_fraction < 0.5:
        raise ValueError("margin_fraction must be in [0, 0.5)")
    if net.config.torus:
        net = unwrap(net, 0.0)
    inner = net.config.window.inner(margin_fraction)
    if inner.area <= 0:
        raise ValueError("empty inner window")
    if len(net.segments) == 0:
        return 0.0
    return float(_clip_lengths(net.segments, inner).sum()) / inner.area


def intersection_rate(
    net: Network,
    n_lines: int = 10_000,
    seed: int = 0,
    margin_fraction: float = DEFAULT_MARGIN,
) -> tuple[float, float]:
    """Monte Carlo mean crossings of network edges per unit length of an
    isotropic random test line through the inner window.

    Returns (rate, standard error).  For an isotropic network the identity
    normalized length = (pi/2) * rate holds; sampling line angles uniformly
    supplies the isotropy on average for any fixed network.
    """
    if n_lines < 1:
        raise ValueError("n_lines must be >= 1")
    if net.config.torus:
        net = unwrap(net, 0.0)
    inner = net.config.window.inner(margin_fraction)
    rng = rng_from_seed(seed)
    cx = 0.5 * (inner.x0 + inner.x1)
    cy = 0.5 * (inner.y0 + inner.y1)
    R = 0.5 * math.hypot(inner.width, inner.height)

    segs = net.segments
    ax, ay = segs[:, 0], segs[:, 1]
    bx, by = segs[:, 2], segs[:, 3]

    phi = rng.uniform(0.0, math.pi, n_lines)
    off = rng.uniform(-R, R, n_lines)
    counts = np.zeros(n_lines)
    chords = np.zeros(n_lines)
    block = max(1, 2_000_000 // max(len(segs), 1))
    for lo in range(0, n_lines, block):
        hi = min(lo + block, n_lines)
        c, s = np.cos(phi[lo:hi])[:, None], np.sin(phi[lo:hi])[:, None]
        nx, ny = -s, c
        px = cx + off[lo:hi][:, None] * nx
        py = cy + off[lo:hi][:, None] * ny
        # chord of the line inside the inner window
        t0 = np.full(px.shape, -np.inf)
        t1 = np.full(px.shape, np.inf)
        for p, d, lo_w, hi_w in ((px, c, inner.x0, inner.x1),
                                 (py, s, inner.y0, inner.y1)):
            with np.errstate(divide="ignore", invalid="ignore"):
                ta = np.where(d != 0, (lo_w - p) / d,
                              np.where(p >= lo_w, -np.inf, np.inf))
                tb = np.where(d != 0, (hi_w - p) / d,
                              np.where(p <= hi_w, np.inf, -np.inf))
            t0 = np.maximum(t0, np.minimum(ta, tb))
            t1 = np.minimum(t1, np.maximum(ta, tb))
        chord = np.clip(t1 - t0, 0.0, None)[:, 0]
        chords[lo:hi] = chord
        # signed distances of segment endpoints to each line
        sa = nx * (ax - px) + ny * (ay - py)
        sb = nx * (bx - px) + ny * (by - py)
        crossing = (sa > 0) != (sb > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = sa / (sa - sb)
        ix = ax + u * (bx - ax)
        iy = ay + u * (by - ay)
        t = c * (ix - px) + s * (iy - py)
        inside = crossing & (t >= t0) & (t <= t1)
        counts[lo:hi] = inside.sum(axis=1)
    total_len = chords.sum()
    if total_len == 0:
        raise ValueError("no test line hit the inner window")
    rate = counts.sum() / total_len
    # batch the lines to estimate the SE of the ratio estimator
    n_batches = min(20, n_lines)
    batch_rates = []
    for b in range(n_batches):
        sl = slice(b, None, n_batches)
        if chords[sl].sum() > 0:
            batch_rates.append(counts[sl].sum() / chords[sl].sum())
    batch_rates = np.array(batch_rates)
    se = float(batch_rates.std(ddof=1) / math.sqrt(len(batch_rates)))
    return float(rate), se
