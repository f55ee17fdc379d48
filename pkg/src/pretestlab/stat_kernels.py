"""Special functions backing the hypothesis tests.

Normal CDF and quantile come from the standard library (``math.erfc`` and
``statistics.NormalDist``, the latter being Wichura's AS241). The regularized
incomplete beta function and the Student t CDF are evaluated here with a
modified-Lentz continued fraction.
"""

from __future__ import annotations

import math
from statistics import NormalDist

from .errors import ConvergenceError, DomainError

__all__ = [
    "normal_cdf",
    "normal_sf",
    "normal_quantile",
    "regularized_incomplete_beta",
    "student_t_cdf",
    "student_t_two_sided_p",
]

_STD_NORMAL = NormalDist()
_SQRT2 = math.sqrt(2.0)

CF_MAX_ITER = 300
CF_REL_TOL = 1e-15
_TINY = 1e-300


def normal_cdf(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_sf(x: float) -> float:
    """Upper tail ``1 - normal_cdf(x)`` without cancellation."""
    return 0.5 * math.erfc(x / _SQRT2)


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf` on the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    return _STD_NORMAL.inv_cdf(p)


def _beta_cf(a: float, b: float, x: float) -> float:
    # Continued fraction for I_x(a, b) (Numerical Recipes ``betacf``),
    # evaluated with the modified Lentz method.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_REL_TOL:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge in {CF_MAX_ITER} "
        f"iterations (a={a!r}, b={b!r}, x={x!r})"
    )


def _betainc(a: float, b: float, x: float, y: float) -> float:
    """I_x(a, b) with ``y = 1 - x`` supplied by the caller for accuracy."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (
        a * math.log(x)
        + b * math.log(y)
        + math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, y) / b


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Raises DomainError unless ``a > 0``, ``b > 0`` and ``0 <= x <= 1``, and
    ConvergenceError if the continued fraction fails to converge.
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"incomplete beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete beta requires 0 <= x <= 1, got {x!r}")
    return _betainc(a, b, x, 1.0 - x)


def _t_lower_tail(t: float, df: float) -> float:
    # P(T <= -|t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2
    t2 = t * t
    denom = df + t2
    return 0.5 * _betainc(0.5 * df, 0.5, df / denom, t2 / denom)


def student_t_cdf(x: float, df: float) -> float:
    """CDF of Student's t with real-valued ``df > 0``."""
    if not df > 0.0:
        raise DomainError(f"student_t_cdf requires df > 0, got {df!r}")
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    tail = _t_lower_tail(x, df)
    return tail if x < 0 else 1.0 - tail


def student_t_two_sided_p(t: float, df: float) -> float:
    """``P(|T| >= |t|)`` computed directly from the lower tail."""
    if not df > 0.0:
        raise DomainError(f"student t requires df > 0, got {df!r}")
    if math.isinf(t):
        return 0.0
    return min(1.0, 2.0 * _t_lower_tail(t, df))
