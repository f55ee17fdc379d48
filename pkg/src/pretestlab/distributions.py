"""Data-generating distributions with moment-matched parameterizations.

All samplers consume only uniform doubles from an :class:`RngStream`:

* normal: Box-Muller, both outputs of each pair used (cos first, then sin);
* shifted t: ``Z / sqrt(chi2 / df)`` with the chi-square built as a sum of
  ``df`` squared normals when ``df`` is an integer (gamma draw otherwise);
* exponential: inverse CDF, ``-mu * log(1 - U)``;
* skew normal: ``xi + omega * (delta * |Z0| + sqrt(1 - delta^2) * Z1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .rng import RngStream

__all__ = [
    "Normal",
    "ShiftedT",
    "Exponential",
    "SkewNormal",
    "SkewNormalParams",
    "DistributionSpec",
    "skew_normal_params",
    "moments",
    "sample",
    "standard_normals",
]

_TWO_PI = 2.0 * math.pi
_MAX_INTEGER_DF = 64


def standard_normals(n: int, stream: RngStream) -> np.ndarray:
    """``n`` standard normal draws via Box-Muller."""
    pairs = (n + 1) // 2
    u = stream.uniform(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[:pairs]))
    angle = _TWO_PI * u[pairs:]
    return np.concatenate((radius * np.cos(angle), radius * np.sin(angle)))[:n]


@dataclass(frozen=True)
class SkewNormalParams:
    xi: float
    omega: float
    alpha: float

    @property
    def delta(self) -> float:
        return self.alpha / math.sqrt(1.0 + self.alpha * self.alpha)

    def mean(self) -> float:
        return self.xi + self.omega * self.delta * math.sqrt(2.0 / math.pi)

    def variance(self) -> float:
        return self.omega**2 * (1.0 - 2.0 * self.delta**2 / math.pi)


def skew_normal_params(alpha: float, target_mean: float, target_var: float) -> SkewNormalParams:
    """Location and scale giving a skew normal with shape ``alpha`` the target moments."""
    if not target_var > 0.0:
        raise DomainError(f"target variance must be positive, got {target_var!r}")
    delta = alpha / math.sqrt(1.0 + alpha * alpha)
    omega = math.sqrt(target_var / (1.0 - 2.0 * delta * delta / math.pi))
    xi = target_mean - omega * delta * math.sqrt(2.0 / math.pi)
    return SkewNormalParams(xi=xi, omega=omega, alpha=alpha)


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float = 1.0
    kind = "normal"

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError(f"normal sigma must be positive, got {self.sigma!r}")

    def moments(self) -> tuple[float, float]:
        return self.mu, self.sigma**2

    def sample(self, n: int, stream: RngStream) -> np.ndarray:
        return self.mu + self.sigma * standard_normals(n, stream)

    def params(self) -> dict[str, float]:
        return {"mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class ShiftedT:
    """Student t with ``df`` degrees of freedom shifted to mean ``mu`` (unit scale)."""

    mu: float
    df: float = 3.0
    kind = "shifted_t"

    def __post_init__(self):
        if not self.df > 2.0:
            raise DomainError(f"shifted t needs df > 2 for a finite variance, got {self.df!r}")

    def moments(self) -> tuple[float, float]:
        return self.mu, self.df / (self.df - 2.0)

    def sample(self, n: int, stream: RngStream) -> np.ndarray:
        df = self.df
        if df == int(df) and df <= _MAX_INTEGER_DF:
            k = int(df)
            draws = standard_normals(n * (k + 1), stream).reshape(n, k + 1)
            z = draws[:, 0]
            chi2 = (draws[:, 1:] ** 2).sum(axis=1)
        else:
            z = standard_normals(n, stream)
            chi2 = 2.0 * stream.generator.standard_gamma(df / 2.0, n)
        return self.mu + z / np.sqrt(chi2 / df)

    def params(self) -> dict[str, float]:
        return {"df": self.df, "mu": self.mu}


@dataclass(frozen=True)
class Exponential:
    mu: float
    kind = "exponential"

    def __post_init__(self):
        if not self.mu > 0.0:
            raise DomainError(f"exponential mean must be positive, got {self.mu!r}")

    def moments(self) -> tuple[float, float]:
        return self.mu, self.mu**2

    def sample(self, n: int, stream: RngStream) -> np.ndarray:
        return -self.mu * np.log1p(-stream.uniform(n))

    def params(self) -> dict[str, float]:
        return {"mu": self.mu}


@dataclass(frozen=True)
class SkewNormal:
    """Skew normal with shape ``alpha`` and the given mean and variance."""

    mu: float
    alpha: float = 3.0
    target_var: float = 1.0
    kind = "skew_normal"

    def __post_init__(self):
        if not self.target_var > 0.0:
            raise DomainError(f"skew normal variance must be positive, got {self.target_var!r}")

    @property
    def shape_params(self) -> SkewNormalParams:
        return skew_normal_params(self.alpha, self.mu, self.target_var)

    def moments(self) -> tuple[float, float]:
        p = self.shape_params
        return p.mean(), p.variance()

    def sample(self, n: int, stream: RngStream) -> np.ndarray:
        p = self.shape_params
        delta = p.delta
        z = standard_normals(2 * n, stream)
        return p.xi + p.omega * (delta * np.abs(z[:n]) + math.sqrt(1.0 - delta * delta) * z[n:])

    def params(self) -> dict[str, float]:
        return {"alpha": self.alpha, "mu": self.mu, "target_var": self.target_var}


DistributionSpec = Union[Normal, ShiftedT, Exponential, SkewNormal]

KINDS: dict[str, type] = {cls.kind: cls for cls in (Normal, ShiftedT, Exponential, SkewNormal)}


def moments(spec: DistributionSpec) -> tuple[float, float]:
    """Closed-form ``(mean, variance)``."""
    return spec.moments()


def sample(spec: DistributionSpec, n: int, stream: RngStream) -> np.ndarray:
    """``n`` independent draws, fully determined by the stream's seed and keys."""
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    return spec.sample(n, stream)
