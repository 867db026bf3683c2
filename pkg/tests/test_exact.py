"""Exact transport solvers: closed-form cases, the dual-route agreement
between the univariate formula and the LP/assignment solver, and metric
properties."""

import numpy as np
import pytest

from wtest.errors import CapacityError, DimensionError
from wtest.exact import wasserstein1_1d_exact, wasserstein1_lp_exact
from wtest.samples import Sample


def s(values):
    return Sample(np.asarray(values, dtype=np.float64))


class TestUnivariate:
    def test_two_point_masses(self):
        assert wasserstein1_1d_exact(s([[0.0]]), s([[1.0]])) == 1.0

    def test_identical_samples(self):
        x = s(np.random.default_rng(0).normal(size=(17, 1)))
        assert wasserstein1_1d_exact(x, x) == 0.0

    def test_sorted_matching(self):
        assert wasserstein1_1d_exact(s([[0.0], [1.0]]), s([[0.5], [0.5]])) == 0.5

    def test_unequal_sizes_against_equal_size_refinement(self):
        # duplicating each point k times leaves the empirical measure
        # unchanged, so the equal-size fast path is an oracle for the
        # merged-CDF general path
        rng = np.random.default_rng(4)
        x = rng.normal(size=6)
        y = rng.normal(size=9)
        coarse = wasserstein1_1d_exact(s(x.reshape(-1, 1)), s(y.reshape(-1, 1)))
        fine = wasserstein1_1d_exact(
            s(np.repeat(x, 3).reshape(-1, 1)), s(np.repeat(y, 2).reshape(-1, 1))
        )
        assert coarse == pytest.approx(fine, abs=1e-12)

    def test_rejects_multivariate(self):
        with pytest.raises(DimensionError):
            wasserstein1_1d_exact(s([[0.0, 1.0]]), s([[1.0, 0.0]]))


class TestTransportLp:
    def test_identical_samples_zero(self):
        x = s(np.random.default_rng(1).uniform(size=(12, 3)))
        assert wasserstein1_lp_exact(x, x) == pytest.approx(0.0, abs=1e-12)

    def test_single_euclidean_pair(self):
        assert wasserstein1_lp_exact(s([[0.0, 0.0]]), s([[3.0, 4.0]])) == pytest.approx(5.0)

    @pytest.mark.parametrize("seed", range(20))
    def test_univariate_route_agreement(self, seed):
        rng = np.random.default_rng(seed)
        n, m = rng.integers(1, 51, size=2)
        x = s(rng.normal(size=(n, 1)))
        y = s(rng.normal(scale=1.5, size=(m, 1)))
        lp = wasserstein1_lp_exact(x, y)
        oracle = wasserstein1_1d_exact(x, y)
        assert abs(lp - oracle) <= 1e-9

    def test_budget_exceeded(self):
        x = s(np.zeros((30, 2)))
        y = s(np.ones((30, 2)))
        with pytest.raises(CapacityError):
            wasserstein1_lp_exact(x, y, max_cost_entries=100)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            wasserstein1_lp_exact(s([[0.0]]), s([[0.0, 1.0]]))

    @pytest.mark.parametrize("seed", range(8))
    def test_symmetry(self, seed):
        rng = np.random.default_rng(100 + seed)
        x = s(rng.uniform(size=(rng.integers(2, 25), 2)))
        y = s(rng.uniform(size=(rng.integers(2, 25), 2)))
        assert abs(wasserstein1_lp_exact(x, y) - wasserstein1_lp_exact(y, x)) <= 1e-9

    @pytest.mark.parametrize("seed", range(8))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(200 + seed)
        d = int(rng.integers(1, 4))
        x = s(rng.uniform(size=(rng.integers(2, 31), d)))
        y = s(rng.uniform(size=(rng.integers(2, 31), d)))
        z = s(rng.uniform(size=(rng.integers(2, 31), d)))
        xy = wasserstein1_lp_exact(x, y)
        yz = wasserstein1_lp_exact(y, z)
        xz = wasserstein1_lp_exact(x, z)
        assert xz <= xy + yz + 1e-7

    def test_nonnegative_and_zero_iff_same_measure(self):
        rng = np.random.default_rng(3)
        x = s(rng.uniform(size=(10, 2)))
        shuffled = Sample(x.data[rng.permutation(10)])
        assert wasserstein1_lp_exact(x, shuffled) == pytest.approx(0.0, abs=1e-12)
        y = s(rng.uniform(size=(10, 2)))
        assert wasserstein1_lp_exact(x, y) > 0.0
