import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pretestlab.errors import DomainError
from pretestlab.stat_kernels import (
    normal_cdf,
    normal_quantile,
    regularized_incomplete_beta,
    student_t_cdf,
    student_t_two_sided_p,
)

mpmath.mp.dps = 30


def quad_normal_cdf(x):
    density = lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi)  # noqa: E731
    return float(mpmath.quad(density, [-mpmath.inf, 0, x]))


def quad_t_cdf(x, df):
    c = mpmath.gamma((df + 1) / 2) / (mpmath.sqrt(df * mpmath.pi) * mpmath.gamma(df / 2))
    density = lambda t: c * (1 + t * t / df) ** (-(df + 1) / 2)  # noqa: E731
    return float(mpmath.quad(density, [-mpmath.inf, 0, x]))


def mp_betainc(a, b, x):
    return float(mpmath.betainc(a, b, 0, x, regularized=True))


class TestNormal:
    def test_center(self):
        assert normal_cdf(0.0) == 0.5

    def test_quantile_975_against_quadrature(self):
        assert normal_cdf(1.959964) == pytest.approx(quad_normal_cdf(1.959964), abs=1e-12)
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)

    @pytest.mark.parametrize("x", [-6.0, -2.5, -0.3, 0.7, 1.5, 3.2, 5.0])
    def test_against_quadrature(self, x):
        assert normal_cdf(x) == pytest.approx(quad_normal_cdf(x), abs=1e-12)

    @given(st.floats(-30, 30))
    def test_symmetry(self, x):
        assert normal_cdf(x) + normal_cdf(-x) == pytest.approx(1.0, abs=1e-15)

    def test_quantile_values(self):
        assert normal_quantile(0.5) == 0.0
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-5)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            normal_quantile(p)

    @given(st.floats(1e-9, 1 - 1e-9))
    def test_quantile_roundtrip(self, p):
        assert abs(normal_cdf(normal_quantile(p)) - p) <= 1e-10

    @given(st.floats(1e-6, 0.5))
    def test_quantile_antisymmetric(self, p):
        assert normal_quantile(p) == pytest.approx(-normal_quantile(1 - p), abs=1e-9)

    def test_roundtrip_grid(self):
        for p in np.linspace(0.001, 0.999, 999):
            assert abs(normal_cdf(normal_quantile(p)) - p) <= 1e-8

    def test_monotone(self):
        xs = np.linspace(-8, 8, 4001)
        values = [normal_cdf(x) for x in xs]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestIncompleteBeta:
    def test_uniform(self):
        assert regularized_incomplete_beta(1, 1, 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_symmetric_half(self):
        assert regularized_incomplete_beta(2.5, 2.5, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_polynomial_case(self):
        x = 0.25
        closed = 6 * x**2 - 8 * x**3 + 3 * x**4
        assert closed == 0.26171875
        assert regularized_incomplete_beta(2, 3, x) == pytest.approx(closed, abs=1e-12)

    @pytest.mark.parametrize(
        "a,b,x",
        [(0.5, 0.5, 0.1), (3.0, 7.5, 0.42), (10.0, 0.5, 0.97), (24.0, 0.5, 0.6), (1.5, 40.0, 0.02), (60.0, 80.0, 0.44)],
    )
    def test_against_arbitrary_precision(self, a, b, x):
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(mp_betainc(a, b, x), abs=1e-12)

    def test_endpoints(self):
        assert regularized_incomplete_beta(2, 3, 0.0) == 0.0
        assert regularized_incomplete_beta(2, 3, 1.0) == 1.0

    @pytest.mark.parametrize("a,b,x", [(1, 1, -0.1), (1, 1, 1.1), (0, 1, 0.5), (1, -2, 0.5)])
    def test_domain(self, a, b, x):
        with pytest.raises(DomainError):
            regularized_incomplete_beta(a, b, x)

    @given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(1e-3, 1 - 1e-3))
    def test_reflection(self, a, b, x):
        lhs = regularized_incomplete_beta(a, b, x)
        rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
        assert lhs == pytest.approx(rhs, abs=1e-11)


class TestStudentT:
    @pytest.mark.parametrize("df", [0.5, 1.0, 2.94, 48.0, 1e6])
    def test_center(self, df):
        assert student_t_cdf(0.0, df) == 0.5

    def test_cauchy(self):
        assert student_t_cdf(1.0, 1.0) == pytest.approx(0.5 + math.atan(1.0) / math.pi, abs=1e-12)

    def test_normal_limit_value(self):
        assert student_t_cdf(1.96, 1e6) == pytest.approx(normal_cdf(1.96), abs=1e-4)
        assert student_t_cdf(1.96, 1e6) == pytest.approx(0.975, abs=1e-4)

    def test_normal_limit_sup(self):
        worst = max(abs(student_t_cdf(x, 1e6) - normal_cdf(x)) for x in np.linspace(-5, 5, 1001))
        assert worst <= 1e-4

    @pytest.mark.parametrize("x,df", [(-2.3, 2.94118), (1.1, 3.0), (0.4, 17.3), (-4.0, 48.0), (2.0, 7.5)])
    def test_against_quadrature(self, x, df):
        assert student_t_cdf(x, df) == pytest.approx(quad_t_cdf(x, df), abs=1e-10)

    @given(st.floats(-50, 50), st.floats(0.5, 500))
    def test_two_sided_consistent(self, t, df):
        p = student_t_two_sided_p(t, df)
        assert p == pytest.approx(2 * min(student_t_cdf(t, df), 1 - student_t_cdf(t, df)), abs=1e-12)

    @pytest.mark.parametrize("df", [1.0, 2.94, 30.0])
    def test_monotone(self, df):
        values = [student_t_cdf(x, df) for x in np.linspace(-20, 20, 2001)]
        assert all(b >= a for a, b in zip(values, values[1:]))
