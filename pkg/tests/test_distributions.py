import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from pretestlab.distributions import (
    Exponential,
    Normal,
    ShiftedT,
    SkewNormal,
    moments,
    sample,
    skew_normal_params,
)
from pretestlab.errors import DomainError
from pretestlab.rng import RngStream

N_BIG = 10**6


def skew_normal_density(x, xi, omega, alpha):
    z = (x - xi) / omega
    return 2.0 / omega * stats.norm.pdf(z) * stats.norm.cdf(alpha * z)


def integrated_moments(xi, omega, alpha):
    mean = integrate.quad(lambda x: x * skew_normal_density(x, xi, omega, alpha), -np.inf, np.inf)[0]
    var = integrate.quad(lambda x: (x - mean) ** 2 * skew_normal_density(x, xi, omega, alpha), -np.inf, np.inf)[0]
    return mean, var


class TestSkewNormalParams:
    def test_alpha_zero_is_standard_normal(self):
        p = skew_normal_params(0.0, 0.0, 1.0)
        assert p.xi == 0.0
        assert p.omega == 1.0

    def test_alpha_three(self):
        p = skew_normal_params(3.0, 1.0, 1.0)
        delta = 3 / math.sqrt(10)
        assert p.delta == pytest.approx(delta, abs=1e-15)
        assert p.omega == pytest.approx(1.53027, abs=2e-5)
        assert p.xi == pytest.approx(1 - 1.15833, abs=2e-5)
        mean, var = integrated_moments(p.xi, p.omega, p.alpha)
        assert mean == pytest.approx(1.0, abs=1e-8)
        assert var == pytest.approx(1.0, abs=1e-8)

    def test_location_equivariance(self):
        a = skew_normal_params(3.0, 1.0, 1.0)
        b = skew_normal_params(3.0, 2.0, 1.0)
        assert b.omega == a.omega
        assert b.xi == pytest.approx(a.xi + 1.0, abs=1e-15)

    @pytest.mark.parametrize("var", [0.0, -1.0])
    def test_bad_variance(self, var):
        with pytest.raises(DomainError):
            skew_normal_params(3.0, 0.0, var)

    @given(st.floats(-20, 20), st.floats(-5, 5), st.floats(0.01, 10))
    def test_closed_form_moments(self, alpha, mean, var):
        p = skew_normal_params(alpha, mean, var)
        assert p.mean() == pytest.approx(mean, abs=1e-12)
        assert p.variance() == pytest.approx(var, rel=1e-12)


class TestMoments:
    def test_normal(self):
        assert moments(Normal(mu=1, sigma=1)) == (1, 1)

    def test_exponential(self):
        assert moments(Exponential(mu=2)) == (2, 4)

    def test_t3_against_integration(self):
        mean, var = moments(ShiftedT(mu=1, df=3))
        integrated = integrate.quad(lambda x: x * x * stats.t.pdf(x, 3), -np.inf, np.inf)[0]
        assert (mean, var) == (1, 3)
        assert var == pytest.approx(integrated, rel=1e-8)

    def test_skew_normal_mean_exact(self):
        mean, var = moments(SkewNormal(mu=2.0, alpha=3.0))
        assert mean == pytest.approx(2.0, abs=1e-12)
        assert var == pytest.approx(1.0, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(DomainError):
            Exponential(mu=0)
        with pytest.raises(DomainError):
            ShiftedT(mu=0, df=2)
        with pytest.raises(DomainError):
            Normal(mu=0, sigma=0)


SPECS = [Normal(1.0, 1.0), ShiftedT(1.0, 3.0), Exponential(1.0), SkewNormal(1.0, 3.0, 1.0), ShiftedT(0.0, 4.5)]


@pytest.fixture(scope="module")
def big_samples():
    return {spec: sample(spec, N_BIG, RngStream(11, "big", i)) for i, spec in enumerate(SPECS)}


class TestSampling:
    def test_normal_mean(self, big_samples):
        x = big_samples[SPECS[0]]
        assert abs(x.mean() - 1.0) <= 4 / math.sqrt(N_BIG)

    def test_exponential_variance(self, big_samples):
        x = big_samples[SPECS[2]]
        # SE of the sample variance: sqrt((mu4 - sigma^4) / n) with mu4 = 9 for Exp(1)
        assert abs(x.var() - 1.0) <= 5 * math.sqrt((9 - 1) / N_BIG)

    @pytest.mark.parametrize("idx", range(len(SPECS)))
    def test_moment_match(self, big_samples, idx):
        spec = SPECS[idx]
        x = big_samples[spec]
        mean, var = moments(spec)
        n = x.size
        assert abs(x.mean() - mean) <= 5 * math.sqrt(var / n)
        # empirical fourth moment: the t3 population value is infinite
        m4 = float(((x - x.mean()) ** 4).mean())
        assert abs(x.var() - var) <= 5 * math.sqrt((m4 - x.var() ** 2) / n)

    def test_skew_positive(self, big_samples):
        assert stats.skew(big_samples[SPECS[3]]) > 0

    def test_skew_normal_matches_reference_distribution(self, big_samples):
        p = SPECS[3].shape_params
        ks = stats.kstest(big_samples[SPECS[3]][:20000], stats.skewnorm(p.alpha, p.xi, p.omega).cdf)
        assert ks.pvalue > 1e-3

    def test_t_matches_reference_distribution(self, big_samples):
        ks = stats.kstest(big_samples[SPECS[1]][:20000] - 1.0, stats.t(3).cdf)
        assert ks.pvalue > 1e-3

    @pytest.mark.parametrize("spec", SPECS)
    def test_same_seed_same_values(self, spec):
        a = sample(spec, 5, RngStream(3, "rep", 0))
        b = sample(spec, 5, RngStream(3, "rep", 0))
        assert a.tobytes() == b.tobytes()

    def test_distinct_keys_distinct_values(self):
        a = sample(Normal(0), 5, RngStream(3, "rep", 0))
        b = sample(Normal(0), 5, RngStream(3, "rep", 1))
        assert not np.array_equal(a, b)

    def test_stream_advances(self):
        s = RngStream(3)
        assert not np.array_equal(sample(Normal(0), 4, s), sample(Normal(0), 4, s))

    @given(st.integers(0, 2**32), st.integers(1, 40), st.sampled_from(SPECS))
    def test_reproducible(self, seed, n, spec):
        a = sample(spec, n, RngStream(seed, "x"))
        b = sample(spec, n, RngStream(seed).child("x"))
        assert a.shape == (n,)
        assert a.tobytes() == b.tobytes()

    def test_odd_length_box_muller(self):
        assert sample(Normal(0), 7, RngStream(1)).shape == (7,)

    def test_nonpositive_n(self):
        with pytest.raises(DomainError):
            sample(Normal(0), 0, RngStream(1))
