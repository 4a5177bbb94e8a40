"""Grids and eps-ball neighborhoods.

Frozen lattice counts come from an exact-rational count over the m x m grid
(scripts/oracle_values.py); neighborhood structure is cross-checked against a
brute-force O(n^2) pass that never touches the KD-tree path.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lle_spectra.sampling import (
    Domain,
    IsolatedPointError,
    grid_disc,
    grid_interval,
    neighborhoods,
    supercriticality,
)


class TestGridInterval:
    def test_two_points_are_the_endpoints(self):
        cloud = grid_interval(2)
        assert cloud.points.tolist() == [[0.0], [1.0]]
        assert cloud.spacing == 1.0

    def test_five_points_quarter_spacing(self):
        cloud = grid_interval(5)
        assert cloud.points[:, 0].tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert cloud.spacing == 0.25
        assert cloud.domain is Domain.INTERVAL

    def test_shape_and_count(self):
        cloud = grid_interval(1000)
        assert cloud.points.shape == (1000, 1)
        assert cloud.n == 1000

    def test_rejects_degenerate_grid(self):
        with pytest.raises(ValueError):
            grid_interval(1)


class TestGridDisc:
    # Counts frozen from the Fraction-exact lattice oracle.
    @pytest.mark.parametrize("m, count", [(3, 5), (41, 1257), (401, 125629)])
    def test_lattice_counts(self, m, count):
        assert grid_disc(m).n == count

    def test_m3_keeps_axis_points_drops_corners(self):
        pts = grid_disc(3).points
        expected = {(-1.0, 0.0), (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0)}
        assert {tuple(p) for p in pts} == expected

    def test_count_tracks_disc_area(self):
        m = 401
        ratio = grid_disc(m).n / (np.pi / 4.0 * m * m)
        assert abs(ratio - 1.0) < 0.01

    def test_boundary_lattice_points_kept(self):
        # m=5 puts (+-1, 0) and (0, +-1) exactly on the circle.
        pts = grid_disc(5).points
        norms = np.linalg.norm(pts, axis=1)
        assert np.count_nonzero(np.isclose(norms, 1.0)) == 4

    def test_spacing(self):
        assert grid_disc(41).spacing == pytest.approx(2.0 / 40.0)

    def test_corners_only_grid_is_empty(self):
        assert grid_disc(2).n == 0

    def test_rejects_degenerate_grid(self):
        with pytest.raises(ValueError):
            grid_disc(1)


def brute_force_neighbors(points, eps):
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.linalg.norm(diffs, axis=-1)
    close = (dist < eps) & ~np.eye(len(points), dtype=bool)
    return [np.flatnonzero(row) for row in close]


class TestNeighborhoods:
    def test_matches_brute_force_on_disc(self):
        cloud = grid_disc(41)
        idx = neighborhoods(cloud, 0.12)
        expected = brute_force_neighbors(cloud.points, 0.12)
        assert len(idx.neighbors) == cloud.n
        for got, want in zip(idx.neighbors, expected):
            assert got.tolist() == want.tolist()

    def test_interior_degree_on_interval(self):
        # h=0.01, eps=0.053: interior points see offsets +-h..+-5h, 10 total.
        cloud = grid_interval(101)
        deg = neighborhoods(cloud, 0.053).degree()
        assert deg[50] == 10
        assert deg[0] == 5

    def test_ties_at_radius_are_excluded(self):
        cloud = grid_interval(11)
        idx = neighborhoods(cloud, 0.1 + 1e-12)
        # spacing is exactly 0.1 in floating point here, so the ball keeps it
        assert idx.degree()[5] == 2
        with pytest.raises(IsolatedPointError):
            neighborhoods(cloud, 0.1)

    def test_isolated_point_raises(self):
        with pytest.raises(IsolatedPointError):
            neighborhoods(grid_interval(3), 0.4)

    def test_radius_must_be_positive(self):
        with pytest.raises(ValueError):
            neighborhoods(grid_interval(5), 0.0)

    def test_empty_cloud_rejected(self):
        with pytest.raises(ValueError):
            neighborhoods(grid_disc(2), 0.5)

    @settings(max_examples=25, deadline=None)
    @given(m=st.integers(min_value=7, max_value=25), scale=st.integers(min_value=2, max_value=6))
    def test_symmetry_and_strictness(self, m, scale):
        cloud = grid_disc(m)
        eps = scale * cloud.spacing * 1.001
        idx = neighborhoods(cloud, eps)
        for i, nb in enumerate(idx.neighbors):
            assert i not in nb
            d = np.linalg.norm(cloud.points[nb] - cloud.points[i], axis=1)
            assert (d < eps).all()
            for j in nb:
                assert i in idx.neighbors[j]

    @settings(max_examples=10, deadline=None)
    @given(n=st.integers(min_value=20, max_value=200))
    def test_deterministic(self, n):
        cloud = grid_interval(n)
        eps = 3.5 / (n - 1)
        a = neighborhoods(cloud, eps)
        b = neighborhoods(cloud, eps)
        for x, y in zip(a.neighbors, b.neighbors):
            assert np.array_equal(x, y)


class TestSupercriticality:
    def test_interval_scaling(self):
        assert supercriticality(grid_interval(2000), 0.05) == pytest.approx(100.0)

    def test_disc_scaling(self):
        cloud = grid_disc(41)
        assert supercriticality(cloud, 0.1) == pytest.approx(cloud.n * 0.01)
