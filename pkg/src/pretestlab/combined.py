"""The combined procedure: a misspecification pretest picks the main test.

If the pretest passes, the model-constrained (MC) test decides; if it
rejects, the assumption-unconstrained (AU) test decides. The shipped triple is
Shapiro-Wilk on pooled residuals / Welch t / Wilcoxon-Mann-Whitney, but any
kernels with the signature ``kernel(data, level, stream) -> TestOutcome`` can
be plugged in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError
from .hypothesis_tests import (
    TestOutcome,
    TwoSampleData,
    pooled_residuals,
    shapiro_wilk,
    welch_t_test,
    wmw_test,
)
from .rng import RngStream

Kernel = Callable[[TwoSampleData, float, "RngStream | None"], TestOutcome]


def sw_on_residuals(data: TwoSampleData, level: float, stream: RngStream | None = None) -> TestOutcome:
    return shapiro_wilk(pooled_residuals(data), level)


def welch(data: TwoSampleData, level: float, stream: RngStream | None = None) -> TestOutcome:
    return welch_t_test(data, level)


def wmw(data: TwoSampleData, level: float, stream: RngStream | None = None) -> TestOutcome:
    return wmw_test(data, level)


class Branch(str, enum.Enum):
    MC = "MC"
    AU = "AU"


@dataclass(frozen=True)
class ProcedureConfig:
    alpha_ms: float = 0.05
    alpha: float = 0.05
    ms_test: Kernel = sw_on_residuals
    mc_test: Kernel = welch
    au_test: Kernel = wmw

    def __post_init__(self):
        for name in ("alpha_ms", "alpha"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {value!r}")

    @property
    def is_default_triple(self) -> bool:
        return (self.ms_test, self.mc_test, self.au_test) == (sw_on_residuals, welch, wmw)


@dataclass(frozen=True)
class CombinedOutcome:
    ms: TestOutcome
    branch: Branch
    main: TestOutcome

    @property
    def reject(self) -> bool:
        return self.main.reject


def choose(ms: TestOutcome, mc: TestOutcome, au: TestOutcome) -> CombinedOutcome:
    """Assemble the combined decision from already evaluated kernels."""
    if ms.reject:
        return CombinedOutcome(ms, Branch.AU, au)
    return CombinedOutcome(ms, Branch.MC, mc)


def run_combined(
    data: TwoSampleData,
    config: ProcedureConfig = ProcedureConfig(),
    stream: RngStream | None = None,
) -> CombinedOutcome:
    """Run the pretest, then only the main test it selects."""
    ms = config.ms_test(data, config.alpha_ms, stream)
    if ms.reject:
        return CombinedOutcome(ms, Branch.AU, config.au_test(data, config.alpha, stream))
    return CombinedOutcome(ms, Branch.MC, config.mc_test(data, config.alpha, stream))
