"""Tests for point-configuration generators."""

import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from spanlab.configs import (HEX_SPACING, TRI_SPACING, PointConfig, Window,
                             hex_config, poisson, square_grid, substreams,
                             tri_config, uniform_n)


class TestWindow:
    def test_geometry(self):
        w = Window(1.0, 2.0, 5.0, 8.0)
        assert w.width == 4.0 and w.height == 6.0
        assert w.area == 24.0
        assert w.diameter == pytest.approx(math.hypot(4, 6))

    def test_inner(self):
        w = Window.square(10.0).inner(0.1)
        assert (w.x0, w.y0, w.x1, w.y1) == (1.0, 1.0, 9.0, 9.0)

    def test_contains(self):
        w = Window.square(2.0)
        mask = w.contains(np.array([[1.0, 1.0], [3.0, 0.5]]))
        assert mask.tolist() == [True, False]


class TestRandomGenerators:
    def test_poisson_determinism(self):
        a = poisson(Window.square(10), seed=42)
        b = poisson(Window.square(10), seed=42)
        assert np.array_equal(a.points, b.points)

    def test_poisson_count_mean(self):
        # mean count over many draws approaches rate * area
        counts = [poisson(Window.square(10), rate=2.0, seed=s).n
                  for s in range(200)]
        mean = np.mean(counts)
        assert abs(mean - 200.0) < 4 * math.sqrt(200.0 / 200)

    def test_uniform_n(self):
        cfg = uniform_n(37, Window.square(5), seed=1)
        assert cfg.n == 37
        assert Window.square(5).contains(cfg.points).all()

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            poisson(Window.square(10), rate=-1.0)

    def test_torus_requires_square(self):
        with pytest.raises(ValueError):
            poisson(Window(0, 0, 10, 20), torus=True)

    def test_substreams_differ(self):
        rngs = substreams(7, 3)
        draws = [r.uniform() for r in rngs]
        assert len(set(draws)) == 3

    def test_substreams_reproducible(self):
        a = [r.uniform() for r in substreams(7, 3)]
        b = [r.uniform() for r in substreams(7, 3)]
        assert a == b


class TestLattices:
    def test_square_grid_count(self):
        cfg = square_grid(Window.square(3.0))
        assert cfg.n == 16  # 4 x 4 integer points in [0, 3]^2

    def test_spacing_constants(self):
        # each spacing solves (points per unit area) = 1 for its lattice
        assert 4.0 * 3.0 ** (-1.5) / HEX_SPACING ** 2 == pytest.approx(1.0)
        assert 2.0 / math.sqrt(3.0) / TRI_SPACING ** 2 == pytest.approx(1.0)

    @pytest.mark.parametrize("side", [10.0, 20.0, 30.0])
    def test_density_converges(self, side):
        for make in (hex_config, tri_config):
            cfg = make(Window.square(side))
            assert abs(cfg.density - 1.0) <= 3.0 / math.sqrt(side * side)

    def test_hex_interior_degree(self):
        cfg = hex_config(Window.square(12))
        tree = cKDTree(cfg.points)
        interior = cfg.window.inner(0.2).contains(cfg.points)
        for i in np.flatnonzero(interior):
            nbrs = tree.query_ball_point(cfg.points[i], HEX_SPACING * 1.001)
            assert len(nbrs) - 1 == 3

    def test_tri_interior_degree(self):
        cfg = tri_config(Window.square(12))
        tree = cKDTree(cfg.points)
        interior = cfg.window.inner(0.2).contains(cfg.points)
        for i in np.flatnonzero(interior):
            nbrs = tree.query_ball_point(cfg.points[i], TRI_SPACING * 1.001)
            assert len(nbrs) - 1 == 6

    def test_too_small_window_rejected(self):
        with pytest.raises(ValueError):
            hex_config(Window.square(1.0))


class TestSerialization:
    def test_round_trip(self):
        cfg = poisson(Window.square(8), seed=3, torus=True)
        back = PointConfig.from_json(cfg.to_json())
        assert np.array_equal(back.points, cfg.points)
        assert back.torus and back.kind == "poisson"
        assert back.window == cfg.window

    def test_schema_version_present(self):
        import json

        doc = json.loads(uniform_n(4, Window.square(3)).to_json())
        assert doc["schema_version"] == 1
