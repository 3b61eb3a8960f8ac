"""Tests for stretch, normalized length, and intersection-rate measures."""

import json
import math

import numpy as np
import pytest

from spanlab import metrics, nets
from spanlab.configs import (PointConfig, Window, hex_config, square_grid,
                             tri_config, uniform_n)
from spanlab.geom import shortest_route


def _net(points, segments, side=10.0, x0=0.0, y0=0.0):
    cfg = PointConfig(np.asarray(points, dtype=float),
                      Window(x0, y0, x0 + side, y0 + side))
    return nets.Network(cfg, np.asarray(segments, dtype=float), "custom")


class TestStretch:
    def test_direct_edge_is_one(self):
        net = _net([[2, 2], [5, 6]], [[2, 2, 5, 6]])
        rep = metrics.stretch(net, pair_filter="all")
        assert rep.max_ratio == pytest.approx(1.0)
        assert rep.exact and rep.n_pairs == 1

    def test_right_angle_detour(self):
        net = _net([[2, 2], [5, 5]], [[2, 2, 5, 2], [5, 2, 5, 5]])
        rep = metrics.stretch(net, pair_filter="all")
        assert rep.max_ratio == pytest.approx(math.sqrt(2.0))
        assert tuple(sorted(rep.argmax_pair)) == (0, 1)

    def test_disconnected_pair_reports_inf(self):
        net = _net([[1, 1], [2, 2], [8, 8], [9, 9]],
                   [[1, 1, 2, 2], [8, 8, 9, 9]])
        rep = metrics.stretch(net, pair_filter="all")
        assert math.isinf(rep.max_ratio)

    def test_graph_mode_exceeds_steiner_on_crossing_instance(self):
        # brute-force-found 4-point instance where the theta-graph route
        # between cities 0 and 1 must detour unless crossings are junctions
        pts = np.array([[9.88, 4.15], [1.83, 7.82], [2.72, 5.66], [6.46, 2.0]])
        cfg = PointConfig(pts, Window(-5.0, -5.0, 15.0, 15.0))
        net = nets.theta_graph(cfg, 6)
        d = math.hypot(*(pts[0] - pts[1]))
        g = metrics.routing_graph(net, "graph")
        s = metrics.routing_graph(net, "steiner")
        ratio_g = shortest_route(g, 0, 1)[0] / d
        ratio_s = shortest_route(s, 0, 1)[0] / d
        assert ratio_g == pytest.approx(1.0911655975073984, rel=1e-9)
        assert ratio_s == pytest.approx(1.0544256177298095, rel=1e-9)
        assert ratio_g > ratio_s

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_mode_dominance(self, seed):
        cfg = uniform_n(30, Window.square(10), seed=seed)
        net = nets.theta_graph(cfg, 6)
        st = metrics.stretch(net, "steiner", pair_filter="all")
        gr = metrics.stretch(net, "graph", pair_filter="all")
        assert st.max_ratio <= gr.max_ratio + 1e-9
        assert st.max_ratio >= 1.0

    def test_scale_invariance(self):
        cfg = uniform_n(25, Window.square(10), seed=5)
        net = nets.theta_graph(cfg, 6)
        rep = metrics.stretch(net, pair_filter="all")
        c = 3.7
        scaled_cfg = PointConfig(cfg.points * c, Window.square(10 * c))
        scaled = nets.Network(scaled_cfg, net.segments * c, "theta", {"m": 6})
        rep_c = metrics.stretch(scaled, pair_filter="all")
        assert rep_c.max_ratio == pytest.approx(rep.max_ratio, rel=1e-9)
        assert metrics.normalized_length(scaled) == pytest.approx(
            metrics.normalized_length(net) / c, rel=1e-9)

    def test_bad_mode_and_filter_rejected(self):
        net = _net([[1, 1], [2, 2]], [[1, 1, 2, 2]])
        with pytest.raises(ValueError):
            metrics.stretch(net, mode="warp")
        with pytest.raises(ValueError):
            metrics.stretch(net, pair_filter="everything")

    def test_report_serialization(self):
        net = _net([[2, 2], [5, 6]], [[2, 2, 5, 6]])
        rep = metrics.stretch(net, pair_filter="all")
        doc = json.loads(rep.to_json())
        assert doc["schema_version"] == 1
        assert doc["mode"] == "steiner"
        csv = rep.csv_row().splitlines()
        assert csv[0].startswith("mode,max_ratio")
        assert len(csv) == 2


class TestLocalStretch:
    def test_hex_lattice_direct_edges(self):
        net = nets.lattice_edges(hex_config(Window.square(10)))
        ratio = metrics.local_stretch(net, "mutual-nearest")
        assert ratio == pytest.approx(1.0)
        assert ratio <= math.sqrt(3.0)

    def test_tri_lattice_direct_edges(self):
        net = nets.lattice_edges(tri_config(Window.square(10)))
        ratio = metrics.local_stretch(net, "mutual-nearest")
        assert ratio == pytest.approx(1.0)
        assert ratio <= 0.5 + math.sqrt(0.75)

    def test_alternate_diagonals_unit_pairs(self):
        net = nets.alternate_diagonals(Window.square(10))
        ratio = metrics.local_stretch(net, "unit-distance")
        assert ratio == pytest.approx(math.sqrt(2.0), abs=1e-9)

    def test_bad_rule_rejected(self):
        net = nets.lattice_edges(square_grid(Window.square(6)))
        with pytest.raises(ValueError):
            metrics.local_stretch(net, "adjacent")


class TestNormalizedLength:
    def test_square_lattice_period_aligned(self):
        # margin chosen so the inner window boundary falls between lattice
        # rows and spans a whole number of unit cells: exactly 2
        net = nets.lattice_edges(square_grid(Window.square(40)))
        assert metrics.normalized_length(net, 3.5 / 40.0) == pytest.approx(
            2.0, abs=1e-12)

    def test_alternate_diagonals_exact(self):
        net = nets.alternate_diagonals(Window.square(40))
        assert metrics.normalized_length(net, 0.1) == pytest.approx(
            math.sqrt(2.0), abs=1e-9)

    def test_empty_network(self):
        cfg = PointConfig(np.empty((0, 2)), Window.square(5))
        net = nets.Network(cfg, np.empty((0, 4)), "custom")
        assert metrics.normalized_length(net) == 0.0

    def test_bad_margin_rejected(self):
        net = _net([[1, 1], [2, 2]], [[1, 1, 2, 2]])
        with pytest.raises(ValueError):
            metrics.normalized_length(net, 0.5)

    def test_torus_counts_wrapped_parts(self):
        cfg = uniform_n(20, Window.square(6), seed=3, torus=True)
        net = nets.theta_graph(cfg, 6)
        # minimal-image segments may stick out of the window; on the torus
        # the protruding part wraps back in, so nothing is lost
        assert metrics.normalized_length(net, 0.0) == pytest.approx(
            net.total_length / 36.0, rel=1e-9)

    def test_clipping_is_exact(self):
        net = _net([[4, 4], [6, 6]], [[-10.0, 5.0, 20.0, 5.0]])
        # the inner window [1, 9]^2 sees exactly 8 units of that line
        assert metrics.normalized_length(net, 0.1) == pytest.approx(8.0 / 64.0)


class TestIntersectionRate:
    def test_vertical_grating(self):
        # unit-spacing vertical lines: length density 1, rate 2/pi
        segs = [[float(x), -5.0, float(x), 15.0] for x in range(-5, 16)]
        net = _net([[4, 4], [6, 6]], segs)
        rate, se = metrics.intersection_rate(net, n_lines=4000, seed=1)
        assert se > 0
        assert abs(rate - 2.0 / math.pi) <= 3 * se + 0.01

    def test_identity_alternate_diagonals(self):
        net = nets.alternate_diagonals(Window.square(20))
        rate, se = metrics.intersection_rate(net, n_lines=6000, seed=2)
        L = metrics.normalized_length(net, 0.1)
        assert abs(L - (math.pi / 2.0) * rate) <= 3 * (math.pi / 2.0) * se

    def test_determinism(self):
        net = nets.alternate_diagonals(Window.square(10))
        a = metrics.intersection_rate(net, n_lines=500, seed=9)
        b = metrics.intersection_rate(net, n_lines=500, seed=9)
        assert a == b

    def test_bad_line_count_rejected(self):
        net = _net([[1, 1], [2, 2]], [[1, 1, 2, 2]])
        with pytest.raises(ValueError):
            metrics.intersection_rate(net, n_lines=0)
