import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtool.trend import binomial_tail, fit_trend, slope_test, t_sf

mpmath.mp.dps = 50


def mp_t_sf(t, df):
    """High-precision P(T >= t) via the regularized incomplete beta, computed
    with mpmath; independent of the scipy implementation path."""
    t = mpmath.mpf(t)
    df = mpmath.mpf(df)
    x = df / (df + t * t)
    half = mpmath.betainc(df / 2, mpmath.mpf(1) / 2, 0, x, regularized=True) / 2
    return half if t > 0 else 1 - half if t < 0 else mpmath.mpf("0.5")


class TestSlopeTest:
    def test_exact_line(self):
        fit = slope_test([1, 2, 3], [2, 1, 0], "negative")
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(3.0, abs=1e-12)
        assert fit.stderr == 0.0
        assert fit.degenerate
        assert fit.p_one_tailed == 0.0

    def test_t_zero_gives_half(self):
        # symmetric y independent of x: slope 0, p exactly 0.5
        x = [1.0, 2.0, 3.0, 4.0]
        y = [1.0, -1.0, -1.0, 1.0]
        fit = slope_test(x, y, "positive")
        assert fit.t_stat == pytest.approx(0.0, abs=1e-14)
        assert fit.p_one_tailed == pytest.approx(0.5, abs=1e-14)

    def test_against_high_precision_oracle(self):
        x = [1.0, 2.0, 3.0, 4.0]
        y = [1.0, 2.0, 3.0, 4.1]
        fit = slope_test(x, y, "positive")
        # oracle: exact least squares in 50-digit arithmetic
        xm = mpmath.mpf(sum(x)) / 4
        ym = mpmath.mpf(sum(map(mpmath.mpf, map(str, y)))) / 4
        sxx = sum((mpmath.mpf(v) - xm) ** 2 for v in x)
        sxy = sum((mpmath.mpf(a) - xm) * (mpmath.mpf(str(b)) - ym) for a, b in zip(x, y))
        slope = sxy / sxx
        resid = [
            mpmath.mpf(str(b)) - (ym - slope * xm) - slope * a for a, b in zip(x, y)
        ]
        rss = sum(r * r for r in resid)
        se = mpmath.sqrt(rss / 2 / sxx)
        t = slope / se
        assert fit.slope == pytest.approx(float(slope), abs=1e-12)
        assert fit.t_stat == pytest.approx(float(t), abs=1e-9)
        assert fit.p_one_tailed == pytest.approx(float(mp_t_sf(t, 2)), abs=1e-10)

    def test_p_matches_oracle_on_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(4, 30))
            x = rng.normal(0, 2, n)
            y = 0.3 * x + rng.normal(0, 1.0, n)
            fit = slope_test(x, y, "positive")
            want = float(mp_t_sf(fit.t_stat, n - 2))
            assert fit.p_one_tailed == pytest.approx(want, abs=1e-10)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(12)
        x = rng.normal(0, 1, 12)
        y = rng.normal(0, 1, 12)
        base = slope_test(x, y, "positive")
        for c in (3.0, 0.001, 250.0):
            scaled = slope_test(x, c * y, "positive")
            assert scaled.slope == pytest.approx(c * base.slope, rel=1e-12)
            assert scaled.stderr == pytest.approx(c * base.stderr, rel=1e-12)
            assert scaled.t_stat == pytest.approx(base.t_stat, abs=1e-12)
            assert scaled.p_one_tailed == pytest.approx(base.p_one_tailed, abs=1e-12)

    def test_direction_flip(self):
        x = [1, 2, 3, 4, 5]
        y = [1.1, 1.9, 3.2, 3.8, 5.1]
        up = slope_test(x, y, "positive")
        down = slope_test(x, y, "negative")
        assert up.p_one_tailed + down.p_one_tailed == pytest.approx(1.0, abs=1e-12)
        assert up.p_one_tailed < 0.05

    def test_constant_x_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            slope_test([2, 2, 2], [1, 2, 3], "positive")

    def test_n2_returns_slope_without_inference(self):
        fit = slope_test([0, 1], [3, 5], "positive")
        assert fit.slope == pytest.approx(2.0)
        assert math.isnan(fit.p_one_tailed)

    def test_t_cdf_at_zero_is_half_for_any_df(self):
        for df in (1, 2, 5, 17, 100):
            assert t_sf(0.0, df) == 0.5


class TestBinomialTail:
    def test_k_zero_certain(self):
        assert binomial_tail(0, 6, 0.05) == 1.0

    def test_all_successes(self):
        assert binomial_tail(6, 6, 0.05) == pytest.approx(0.05**6, rel=1e-12)

    def test_five_of_six(self):
        # two-term sum: C(6,5) p^5 (1-p) + p^6 = 115/64,000,000 exactly
        assert binomial_tail(5, 6, 0.05) == pytest.approx(115 / 64_000_000, rel=1e-12)
        assert binomial_tail(5, 6, 0.05) == pytest.approx(1.7971875e-6, abs=1e-9)

    def test_nonincreasing_in_k(self):
        vals = [binomial_tail(k, 9, 0.3) for k in range(10)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_complement_identity(self):
        # independent summation of the lower tail
        for k in range(1, 8):
            lower = sum(
                math.comb(7, i) * 0.2**i * 0.8 ** (7 - i) for i in range(0, k)
            )
            assert binomial_tail(k, 7, 0.2) == pytest.approx(1 - lower, abs=1e-12)

    @given(
        n=st.integers(min_value=1, max_value=40),
        k=st.integers(min_value=0, max_value=40),
        p0=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    @settings(max_examples=150, deadline=None)
    def test_complement_identity_property(self, n, k, p0):
        k = min(k, n)
        lower = sum(
            math.comb(n, i) * p0**i * (1.0 - p0) ** (n - i) for i in range(0, k)
        )
        assert binomial_tail(k, n, p0) == pytest.approx(1 - lower, abs=1e-10)

    def test_bad_k_rejected(self):
        with pytest.raises(ValueError):
            binomial_tail(8, 6, 0.1)


class TestFitTrend:
    def test_monotone_increasing_metric(self):
        pairs = [(math.exp(1), 1.0), (math.exp(2), 2.1), (math.exp(3), 2.9)]
        fit = fit_trend(pairs, "dll")
        assert fit.slope > 0
        assert fit.p_one_tailed < 0.5

    def test_duplicated_variants_flagged_degenerate(self):
        pairs = [(10.0, 1.0), (10.0001, 1.0), (20.0, 2.0), (20.0001, 2.0)]
        fit = fit_trend([(10.0, 1.0), (10.0, 1.0), (20.0, 2.0), (20.0, 2.0)], "dll")
        assert fit.degenerate

    def test_planted_slope_recovered(self):
        rng = np.random.default_rng(77)
        lnppl = np.linspace(1.0, 3.0, 5)
        y = 2.0 * lnppl + rng.normal(0, 0.01, 5)
        pairs = list(zip(np.exp(lnppl), y))
        fit = fit_trend(pairs, "dll")
        assert 1.9 <= fit.slope <= 2.1

    def test_mse_uses_negative_direction(self):
        lnppl = np.array([1.0, 2.0, 3.0, 4.0])
        mse = 1.0 - 0.2 * lnppl
        fit = fit_trend(list(zip(np.exp(lnppl), mse)), "mse")
        assert fit.direction == "negative"
        assert fit.slope < 0
        assert fit.p_one_tailed < 0.05

    def test_too_few_variants_rejected(self):
        with pytest.raises(ValueError, match="2 variants"):
            fit_trend([(10.0, 1.0)], "dll")

    def test_unknown_metric_rejected(self):
        with pytest.raises(ValueError, match="metric"):
            fit_trend([(10.0, 1.0), (20.0, 2.0)], "r2")
