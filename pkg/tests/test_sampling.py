"""Probe sampling: inverse CDFs, dimension subsets, stream discipline."""
import numpy as np
import pytest
import scipy.integrate
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

import zcore
from zcore import DistributionKind, draw_dim_subset, draw_probe
from zcore.diagnostics import ks_statistic, triangular_cdf
from zcore.errors import ConfigError, DomainError
from zcore.rng import iteration_stream
from zcore.sampling import (_fill_subset_and_probe, _normal_quantile,
                            sample_triangular, triangular_inverse_cdf)
from zcore.embedding_store import compute_dim_stats

from conftest import random_matrix


def triangular_density(x, lo, mode, hi):
    span = hi - lo
    if lo <= x < mode:
        return 2.0 * (x - lo) / (span * (mode - lo))
    if mode <= x <= hi:
        return 2.0 * (hi - x) / (span * (hi - mode))
    return 0.0


class TestTriangularInverseCdf:
    def test_apex_at_center_maps_half_to_mode(self):
        assert triangular_inverse_cdf(0.5, 0.0, 1.0, 2.0) == 1.0

    def test_closed_form_against_quadrature(self):
        # independent check: integrate the density up to the returned point
        for u in (0.125, 0.3, 0.77, 0.97):
            x = triangular_inverse_cdf(u, 0.0, 1.0, 2.0)
            mass, _ = scipy.integrate.quad(triangular_density, 0.0, x,
                                           args=(0.0, 1.0, 2.0), points=[1.0])
            assert mass == pytest.approx(u, abs=1e-9)
        assert triangular_inverse_cdf(0.125, 0.0, 1.0, 2.0) == pytest.approx(0.5, abs=1e-12)

    def test_degenerate_interval_returns_constant(self):
        assert triangular_inverse_cdf(0.7, 3.0, 3.0, 3.0) == 3.0

    def test_mode_at_edges(self):
        # apex at lo: pure decreasing density; apex at hi: pure increasing
        assert triangular_inverse_cdf(0.0, 0.0, 0.0, 1.0) == 0.0
        x = triangular_inverse_cdf(0.36, 0.0, 1.0, 1.0)
        assert x == pytest.approx(0.6, abs=1e-12)  # F(x) = x^2 when mode == hi

    def test_u_outside_unit_interval_is_domain_error(self):
        with pytest.raises(DomainError):
            triangular_inverse_cdf(1.5, 0.0, 1.0, 2.0)
        with pytest.raises(DomainError):
            triangular_inverse_cdf(-0.1, 0.0, 1.0, 2.0)

    def test_unordered_params_rejected(self):
        with pytest.raises(DomainError):
            triangular_inverse_cdf(0.5, 2.0, 1.0, 0.0)

    @given(st.floats(0.0, 1.0), st.floats(-50, 50), st.floats(0, 10),
           st.floats(0, 10))
    @settings(max_examples=300, deadline=None)
    def test_output_in_support_and_monotone(self, u, lo, d1, d2):
        mode, hi = lo + d1, lo + d1 + d2
        x = triangular_inverse_cdf(u, lo, mode, hi)
        assert lo <= x <= hi
        x2 = triangular_inverse_cdf(min(1.0, u + 0.05), lo, mode, hi)
        assert x2 >= x


class TestTriangularSampling:
    @pytest.mark.parametrize("params", [(0.0, 1.0, 2.0), (0.0, 0.25, 1.0)])
    def test_ks_against_analytic_cdf(self, params):
        lo, mode, hi = params
        draws = sample_triangular(lo, mode, hi, 100_000, seed=123)
        ks = ks_statistic(draws, lambda x: triangular_cdf(x, lo, mode, hi))
        assert ks < 0.01

    def test_mass_below_mode_matches_cdf_at_apex(self):
        draws = sample_triangular(0.0, 1.0, 2.0, 100_000, seed=5)
        assert abs(np.mean(draws < 1.0) - 0.5) < 0.005
        draws = sample_triangular(0.0, 0.25, 1.0, 100_000, seed=6)
        assert abs(np.mean(draws < 0.25) - 0.25) < 0.005

    def test_same_seed_same_draws(self):
        a = sample_triangular(0.0, 1.0, 2.0, 1000, seed=9)
        b = sample_triangular(0.0, 1.0, 2.0, 1000, seed=9)
        assert np.array_equal(a, b)
        c = sample_triangular(0.0, 1.0, 2.0, 1000, seed=10)
        assert not np.array_equal(a, c)


class TestNormalQuantile:
    def test_against_scipy_ppf(self):
        us = np.concatenate([np.linspace(1e-9, 1 - 1e-9, 2001),
                             [1e-12, 0.02425, 0.97575, 1 - 1e-12]])
        ours = np.array([_normal_quantile(u) for u in us])
        ref = scipy.stats.norm.ppf(us)
        assert np.max(np.abs(ours - ref)) < 1e-11

    def test_symmetry(self):
        assert _normal_quantile(0.5) == pytest.approx(0.0, abs=1e-9)
        assert _normal_quantile(0.1) == pytest.approx(-_normal_quantile(0.9), abs=1e-9)


class TestDimSubset:
    def test_two_of_two_is_the_whole_set(self):
        subset = draw_dim_subset(2, 2, iteration_stream(0, 0))
        assert sorted(subset.tolist()) == [0, 1]

    def test_high_dim_draws_are_distinct(self):
        for t in range(50):
            subset = draw_dim_subset(1280, 2, iteration_stream(3, t))
            assert len(set(subset.tolist())) == 2
            assert all(0 <= d < 1280 for d in subset)

    def test_m_larger_than_dims_is_config_error(self):
        with pytest.raises(ConfigError):
            draw_dim_subset(5, 6, iteration_stream(0, 0))

    def test_index_frequencies_are_uniform(self):
        counts = np.zeros(10)
        trials = 100_000
        for t in range(trials):
            for d in draw_dim_subset(10, 2, iteration_stream(77, t)):
                counts[d] += 1
        freq = counts / trials
        assert np.all(np.abs(freq - 0.2) < 0.01)


class TestDrawProbe:
    @pytest.mark.parametrize("kind", list(DistributionKind))
    def test_degenerate_dimension_returns_constant(self, kind):
        mat = np.full((5, 3), 2.5, dtype=np.float32)
        stats = compute_dim_stats(mat)
        probe = draw_probe(stats, np.array([0, 2]), kind, iteration_stream(1, 0))
        assert probe.tolist() == [2.5, 2.5]

    def test_uniform_empirical_mean(self):
        mat = np.array([[0.0], [2.0]], dtype=np.float32)
        stats = compute_dim_stats(mat)
        total, n = 0.0, 100_000
        for t in range(n):
            total += draw_probe(stats, np.array([0]), DistributionKind.UNIFORM,
                                iteration_stream(2, t))[0]
        # U[0,2]: sd = 2/sqrt(12); 3 sigma of the mean estimate ~ 0.0055
        assert abs(total / n - 1.0) < 0.02

    def test_triangular_and_uniform_stay_in_range(self):
        mat = random_matrix(40, 5, seed=11)
        stats = compute_dim_stats(mat)
        for kind in (DistributionKind.TRIANGULAR, DistributionKind.UNIFORM):
            for t in range(200):
                subset = draw_dim_subset(5, 3, iteration_stream(4, t))
                probe = draw_probe(stats, subset,
                                   kind, iteration_stream(4, t + 1000))
                for j, d in enumerate(subset):
                    assert stats.mins[d] <= probe[j] <= stats.maxs[d]

    def test_gaussian_moments_match_column(self):
        mat = random_matrix(500, 1, seed=12)
        stats = compute_dim_stats(mat)
        draws = np.array([
            draw_probe(stats, np.array([0]), DistributionKind.GAUSSIAN,
                       iteration_stream(5, t))[0]
            for t in range(20_000)])
        assert draws.mean() == pytest.approx(stats.means[0], abs=0.03)
        assert draws.std(ddof=1) == pytest.approx(stats.stds[0], rel=0.03)
        # tails are not truncated to the observed [min, max]
        assert (draws < stats.mins[0]).any() or (draws > stats.maxs[0]).any()


class TestStreamDiscipline:
    """The python sampling path and the fused kernel consume identical draws."""

    @pytest.mark.parametrize("kind", list(DistributionKind))
    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_kernel_and_python_paths_agree(self, kind, m):
        mat = random_matrix(30, 6, seed=13)
        stats = compute_dim_stats(mat)
        for t in range(25):
            subset_k = np.empty(m, dtype=np.int64)
            probe_k = np.empty(m, dtype=np.float64)
            _fill_subset_and_probe(21, t, 6, m, int(kind), stats.mins,
                                   stats.medians, stats.maxs, stats.means,
                                   stats.stds, subset_k, probe_k)
            rng = iteration_stream(21, t)
            subset_p = draw_dim_subset(6, m, rng)
            probe_p = draw_probe(stats, subset_p, kind, rng)
            assert np.array_equal(subset_k, subset_p)
            assert np.array_equal(probe_k, probe_p)
