import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from fiegarch_mcmc import credibility_interval, density_estimate, quantile, summarize_draws
from fiegarch_mcmc.summary import histogram_data, silverman_bandwidth


def quantile_scan_oracle(sample, alpha):
    """Exhaustive scan over order statistics for the smallest value with
    P(X <= q) >= alpha and P(X >= q) >= 1 - alpha."""
    s = sorted(sample)
    n = len(s)
    for v in s:
        count_le = sum(1 for u in s if u <= v)
        count_ge = sum(1 for u in s if u >= v)
        if count_le / n >= alpha and count_ge / n >= 1.0 - alpha:
            return v
    raise AssertionError("no order statistic satisfied the definition")


class TestQuantile:
    def test_median_of_four(self):
        assert quantile(np.array([1.0, 2.0, 3.0, 4.0]), 0.5) == 2.0

    def test_boundary_levels(self):
        x = np.array([3.0, -1.0, 7.0, 2.0])
        assert quantile(x, 0.0) == -1.0
        assert quantile(x, 1.0) == 7.0

    def test_matches_scan_oracle_on_uniform_draws(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(size=500)
        assert quantile(x, 0.025) == quantile_scan_oracle(x, 0.025)

    @given(
        st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=1, max_size=50),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_matches_scan_oracle_property(self, values, alpha):
        x = np.array(values)
        assert quantile(x, alpha) == quantile_scan_oracle(x, alpha)

    @given(
        st.lists(st.floats(min_value=-50.0, max_value=50.0), min_size=2, max_size=60),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_monotone_in_level(self, values, a1, a2):
        x = np.array(values)
        lo, hi = sorted((a1, a2))
        assert quantile(x, lo) <= quantile(x, hi)

    def test_empty_and_bad_level(self):
        with pytest.raises(ValueError):
            quantile(np.array([]), 0.5)
        with pytest.raises(ValueError):
            quantile(np.array([1.0]), 1.5)


class TestCredibilityInterval:
    def test_symmetric_five_point_sample(self):
        # hand scan: q(0.2) = -2; for q(0.8) the fourth order statistic (1)
        # already satisfies both inequalities, so the interval is (-2, 1)
        x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        assert quantile_scan_oracle(x, 0.2) == -2.0
        assert quantile_scan_oracle(x, 0.8) == 1.0
        assert credibility_interval(x, 0.4) == (-2.0, 1.0)

    def test_constant_sample(self):
        x = np.full(9, 3.25)
        assert credibility_interval(x, 0.05) == (3.25, 3.25)

    def test_equal_tailed_composition(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=801)
        lo, hi = credibility_interval(x, 0.05)
        assert lo == quantile(x, 0.025)
        assert hi == quantile(x, 0.975)

    def test_level_validation(self):
        with pytest.raises(ValueError):
            credibility_interval(np.array([1.0]), 0.0)

    def test_coverage_under_resampling(self):
        # average true-probability content of the 95% interval over many
        # resamples stays within 2 percentage points of the nominal level
        rng = np.random.default_rng(3)
        content = []
        for _ in range(1000):
            x = rng.normal(size=400)
            lo, hi = credibility_interval(x, 0.05)
            content.append(stats.norm.cdf(hi) - stats.norm.cdf(lo))
        assert abs(np.mean(content) - 0.95) < 0.02


class TestSummarize:
    def test_constant_chain(self):
        s = summarize_draws(np.full(100, 0.42), "d", truth=0.42)
        assert s.mean == pytest.approx(0.42, abs=1e-15)
        assert s.sd == pytest.approx(0.0, abs=1e-15)
        assert s.bias == pytest.approx(0.0, abs=1e-15)
        assert s.ape == pytest.approx(0.0, abs=1e-14)
        assert (s.ci_lower, s.ci_upper) == (0.42, 0.42)

    def test_two_point_arithmetic(self):
        s = summarize_draws(np.array([0.2, 0.3]), "d", truth=0.25)
        assert s.mean == pytest.approx(0.25, abs=1e-15)
        assert s.bias == pytest.approx(0.0, abs=1e-15)
        assert s.sd == pytest.approx(0.05, rel=1e-12)  # population 1/M divisor

    def test_population_divisor(self):
        x = np.array([1.0, 2.0, 3.0, 6.0])
        s = summarize_draws(x, "omega")
        assert s.sd == pytest.approx(float(np.std(x, ddof=0)), rel=1e-14)
        assert s.sd != pytest.approx(float(np.std(x, ddof=1)), rel=1e-6)

    def test_ape_sign_invariance(self):
        a = summarize_draws(np.array([-0.1, -0.2]), "theta", truth=-0.15)
        b = summarize_draws(np.array([0.1, 0.2]), "theta", truth=0.15)
        assert a.ape == pytest.approx(b.ape, abs=1e-14)
        assert a.ape == pytest.approx(0.0, abs=1e-14)
        c = summarize_draws(np.array([-0.1, -0.15]), "theta", truth=-0.15)
        assert c.ape == pytest.approx(abs((c.mean - c.truth) / c.truth), rel=1e-14)
        assert c.ape > 0.0

    def test_no_truth_no_error_metrics(self):
        s = summarize_draws(np.array([1.0, 2.0]), "nu")
        assert s.bias is None and s.ape is None and s.truth_in_ci is None

    def test_matches_naive_single_pass_reference(self):
        rng = np.random.default_rng(4)
        for size in (11, 1000, 1_000_000):
            x = rng.normal(loc=0.2, scale=1.3, size=size)
            s = summarize_draws(x, "omega")
            mean = math.fsum(x) / size
            sd = math.sqrt(math.fsum((v - mean) ** 2 for v in x) / size)
            assert s.mean == pytest.approx(mean, abs=1e-12)
            assert s.sd == pytest.approx(sd, abs=1e-12)
            assert s.ci_lower == quantile_scan_oracle_fast(x, 0.025)
            assert s.ci_upper == quantile_scan_oracle_fast(x, 0.975)


def quantile_scan_oracle_fast(sample, alpha):
    """Scan oracle usable on large samples (sorted counts, same comparisons)."""
    s = np.sort(np.asarray(sample))
    n = s.size
    for k in range(n):
        count_le = np.searchsorted(s, s[k], side="right")
        count_ge = n - np.searchsorted(s, s[k], side="left")
        if count_le / n >= alpha and count_ge / n >= 1.0 - alpha:
            return s[k]
    raise AssertionError


class TestDensityEstimate:
    def test_single_point_peak(self):
        h = 0.3
        got = density_estimate(np.array([0.0]), np.array([0.0]), bandwidth=h)
        assert got[0] == pytest.approx(1.0 / (h * math.sqrt(2.0 * math.pi)), rel=1e-12)

    def test_normal_sample_peak_height(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=100_000)
        got = density_estimate(x, np.array([0.0]))
        assert abs(got[0] - 1.0 / math.sqrt(2.0 * math.pi)) < 0.1 / math.sqrt(2.0 * math.pi)

    def test_uniform_sample_mass_stays_near_support(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0.0, 0.5, size=50_000)
        grid = np.linspace(-1.0, 1.5, 2501)
        dens = density_estimate(x, grid)
        total = np.trapezoid(dens, grid)
        inside = (grid >= -0.1) & (grid <= 0.6)
        outside_mass = np.trapezoid(np.where(inside, 0.0, dens), grid)
        assert total == pytest.approx(1.0, abs=0.02)
        assert outside_mass / total < 0.01

    def test_bandwidth_validation(self):
        with pytest.raises(ValueError):
            density_estimate(np.array([1.0]), np.array([0.0]), bandwidth=0.0)

    def test_silverman_positive(self):
        rng = np.random.default_rng(7)
        assert silverman_bandwidth(rng.normal(size=500)) > 0.0
        assert silverman_bandwidth(np.full(10, 2.0)) > 0.0

    def test_histogram_density_normalized(self):
        rng = np.random.default_rng(8)
        edges, counts, density = histogram_data(rng.normal(size=2000), bins=30)
        widths = np.diff(edges)
        assert counts.sum() == 2000
        assert float(np.sum(density * widths)) == pytest.approx(1.0, rel=1e-12)
