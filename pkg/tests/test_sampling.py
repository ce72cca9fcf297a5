import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lio.errors import ExhaustedCandidatesError, InvalidArgumentError, ResourceLimitError
from lio.gp_core import Dataset, Domain
from lio.sampling import exclude_observed, grid_sample, min_sample_count, monte_carlo_sample


def min_sample_count_by_iteration(eps, delta):
    n, p = 0, 1.0
    while p > delta:
        n += 1
        p *= 1.0 - eps
    return max(n, 1)


class TestGrid:
    def test_sinc_grid_size(self):
        g = grid_sample(Domain([0.1], [3.9]), 0.01)
        assert len(g) == 381
        assert g.points[0, 0] == 0.1 and g.points[-1, 0] == 3.9

    def test_two_d_sizes(self):
        assert len(grid_sample(Domain([-2, -2], [2, 2]), 0.05)) == 6561
        assert len(grid_sample(Domain([-5, 0], [10, 15]), 0.2)) == 76 * 76

    def test_unit_step_on_unit_interval(self):
        g = grid_sample(Domain([0.0], [1.0]), 1.0)
        assert g.points.ravel().tolist() == [0.0, 1.0]

    def test_row_major_order(self):
        g = grid_sample(Domain([0, 0], [1, 1]), 0.5)
        assert g.points[:3].tolist() == [[0, 0], [0, 0.5], [0, 1]]

    def test_uneven_step_clamps_last_tick(self):
        g = grid_sample(Domain([0.0], [1.0]), 0.3)
        assert g.points.ravel() == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])

    def test_invalid_step(self):
        with pytest.raises(InvalidArgumentError):
            grid_sample(Domain([0.0], [1.0]), 0.0)
        with pytest.raises(InvalidArgumentError):
            grid_sample(Domain([0.0], [1.0]), 2.0)

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            grid_sample(Domain([0, 0], [1, 1]), 1e-4)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.01, 1.0))
    def test_grid_inside_domain_and_covers_bounds(self, lo, width, frac):
        dom = Domain([lo], [lo + width])
        g = grid_sample(dom, frac * width)
        pts = g.points.ravel()
        assert pts[0] == lo and pts[-1] == pytest.approx(lo + width)
        assert np.all(np.diff(pts) > 0)
        assert np.all(np.diff(pts) <= frac * width * (1 + 1e-9))


class TestMonteCarlo:
    def test_reproducible(self):
        dom = Domain([0, -1], [1, 1])
        a = monte_carlo_sample(dom, 50, 7).points
        assert np.array_equal(a, monte_carlo_sample(dom, 50, 7).points)
        assert not np.array_equal(a, monte_carlo_sample(dom, 50, 8).points)

    def test_inside_domain(self):
        dom = Domain([0, -1], [1, 1])
        pts = monte_carlo_sample(dom, 1000, 0).points
        assert np.all(pts >= dom.lower) and np.all(pts <= dom.upper)

    def test_invalid_count(self):
        with pytest.raises(InvalidArgumentError):
            monte_carlo_sample(Domain([0.0], [1.0]), 0, 0)


class TestMinSampleCount:
    @pytest.mark.parametrize(
        "eps, delta, n", [(0.05, 0.05, 59), (0.01, 0.01, 459), (0.5, 0.5, 1), (0.1, 0.1, 22)]
    )
    def test_known_values(self, eps, delta, n):
        assert min_sample_count(eps, delta) == n

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.001, 0.9), st.floats(0.001, 0.9))
    def test_matches_iteration(self, eps, delta):
        assert min_sample_count(eps, delta) == min_sample_count_by_iteration(eps, delta)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.001, 0.9), st.floats(0.001, 0.9))
    def test_minimality(self, eps, delta):
        n = min_sample_count(eps, delta)
        assert (1 - eps) ** n <= delta
        assert n == 1 or (1 - eps) ** (n - 1) > delta

    def test_monotone(self):
        assert min_sample_count(0.05, 0.1) > min_sample_count(0.1, 0.1)
        assert min_sample_count(0.1, 0.01) > min_sample_count(0.1, 0.1)

    @pytest.mark.parametrize("eps, delta", [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1), (-0.1, 0.5)])
    def test_invalid(self, eps, delta):
        with pytest.raises(InvalidArgumentError):
            min_sample_count(eps, delta)


class TestExcludeObserved:
    def test_drops_observed_and_keeps_order(self):
        g = grid_sample(Domain([0.0], [1.0]), 0.25)
        data = Dataset.from_points([[0.5], [0.0]], [1.0, 2.0])
        out = exclude_observed(g, data)
        assert out.points.ravel().tolist() == [0.25, 0.75, 1.0]

    def test_no_data_is_identity(self):
        g = grid_sample(Domain([0.0], [1.0]), 0.25)
        assert np.array_equal(exclude_observed(g, Dataset.empty(1)).points, g.points)

    def test_exhausted(self):
        g = grid_sample(Domain([0.0], [1.0]), 1.0)
        with pytest.raises(ExhaustedCandidatesError):
            exclude_observed(g, Dataset.from_points([[0.0], [1.0]], [0.0, 0.0]))

    def test_tolerance(self):
        g = grid_sample(Domain([0.0], [1.0]), 0.5)
        data = Dataset.from_points([[0.5 + 1e-12]], [0.0])
        assert len(exclude_observed(g, data)) == 2
        assert len(exclude_observed(g, data, tol=0.0)) == 3
