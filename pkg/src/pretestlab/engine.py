"""Replicated Monte Carlo estimation of rejection rates.

Each replicate ``r`` of a scenario draws its data from the substream
``(master_seed, scenario_id, r)`` and evaluates every procedure on that same
dataset. Replicates are split into contiguous blocks which may run in worker
processes; blocks are reassembled in order, so results depend only on the
configuration and seed, never on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .combined import ProcedureConfig, choose
from .distributions import DistributionSpec, sample
from .errors import DegenerateDataError, DegenerateThresholdError, DomainError
from .hypothesis_tests import TwoSampleData, permutation_mean_test
from .rng import RngStream
from .stat_kernels import normal_sf, regularized_incomplete_beta

__all__ = [
    "PROCEDURES",
    "ScenarioConfig",
    "ProcedureStats",
    "ScenarioResult",
    "simulate_scenario",
    "evaluate_block",
    "draw_data",
    "binomial_level_test",
    "convex_combination",
    "resolve_workers",
    "WORKERS_ENV",
    "DEGENERATE_FRACTION_LIMIT",
]

PROCEDURES = ("welch", "wmw", "combined", "permutation")
# columns of the per-replicate decision matrix
MS, MC, AU, COMBINED, PERMUTATION = range(5)
_PROC_COLUMN = {"welch": MC, "wmw": AU, "combined": COMBINED, "permutation": PERMUTATION}

WORKERS_ENV = "PRETESTLAB_WORKERS"
DEGENERATE_FRACTION_LIMIT = 0.001
_BLOCK = 500


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str
    dist1: DistributionSpec
    dist2: DistributionSpec
    n1: int = 20
    n2: int = 30
    replicates: int = 20000
    master_seed: int = 0
    procedure: ProcedureConfig = field(default_factory=ProcedureConfig)
    permutation_B: int = 999
    label: str = ""
    hypothesis: str = "null"

    def __post_init__(self):
        if self.replicates < 1:
            raise DomainError(f"replicates must be at least 1, got {self.replicates}")
        if self.n1 < 3 or self.n2 < 3:
            raise DomainError(f"group sizes must be at least 3, got n1={self.n1}, n2={self.n2}")
        if self.permutation_B < 1:
            raise DomainError(f"permutation_B must be at least 1, got {self.permutation_B}")
        if self.hypothesis not in ("null", "alt"):
            raise DomainError(f"hypothesis must be 'null' or 'alt', got {self.hypothesis!r}")
        if self.master_seed < 0:
            raise DomainError(f"master_seed must be non-negative, got {self.master_seed}")


def draw_data(config: ScenarioConfig, replicate: int) -> tuple[TwoSampleData, RngStream]:
    """Dataset of one replicate plus the replicate's stream for randomized tests."""
    stream = RngStream(config.master_seed, config.scenario_id, replicate)
    x = sample(config.dist1, config.n1, stream.child("x"))
    y = sample(config.dist2, config.n2, stream.child("y"))
    return TwoSampleData(x, y), stream


def evaluate_block(
    config: ScenarioConfig, start: int, stop: int, with_permutation: bool = True
) -> np.ndarray:
    """Decision matrix for replicates ``start..stop-1``.

    Columns are (MS, MC, AU, combined, permutation) reject flags as 0/1; a
    row of -1 marks a degenerate replicate. The permutation column is 0 when
    ``with_permutation`` is false.
    """
    proc = config.procedure
    out = np.zeros((stop - start, 5), dtype=np.int8)
    for i, r in enumerate(range(start, stop)):
        data, stream = draw_data(config, r)
        try:
            ms = proc.ms_test(data, proc.alpha_ms, stream.child("ms"))
            mc = proc.mc_test(data, proc.alpha, stream.child("mc"))
            au = proc.au_test(data, proc.alpha, stream.child("au"))
            perm = (
                permutation_mean_test(data, proc.alpha, config.permutation_B, stream.child("perm")).reject
                if with_permutation
                else False
            )
        except DegenerateDataError:
            out[i] = -1
            continue
        out[i] = (ms.reject, mc.reject, au.reject, choose(ms, mc, au).reject, perm)
    return out


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise DomainError(f"worker count must be at least 1, got {workers}")
    return workers


def _blocks(n: int, size: int = _BLOCK) -> list[tuple[int, int]]:
    return [(s, min(s + size, n)) for s in range(0, n, size)]


def _evaluate_block_args(args):
    return evaluate_block(*args)


def run_blocks(
    config: ScenarioConfig,
    replicates: int,
    workers: int | None = None,
    with_permutation: bool = True,
) -> np.ndarray:
    """Decision matrix for replicates ``0..replicates-1``, computed in parallel."""
    workers = resolve_workers(workers)
    jobs = [(config, s, e, with_permutation) for s, e in _blocks(replicates)]
    if workers == 1 or len(jobs) == 1:
        parts = [_evaluate_block_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_block_args, jobs))
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class ProcedureStats:
    rejections: int
    rejections_ms_pass: int
    rejections_ms_reject: int


def _ratio(num: int, den: int) -> float:
    return num / den if den else math.nan


@dataclass(frozen=True)
class ScenarioResult:
    scenario_id: str
    label: str
    hypothesis: str
    master_seed: int
    replicates: int
    replicates_used: int
    degenerate: int
    ms_rejections: int
    stats: Mapping[str, ProcedureStats]

    @classmethod
    def from_decisions(cls, config: ScenarioConfig, decisions: np.ndarray) -> "ScenarioResult":
        ok = decisions[:, 0] >= 0
        d = decisions[ok].astype(bool)
        ms = d[:, MS]
        stats = {}
        for name, col in _PROC_COLUMN.items():
            flags = d[:, col]
            stats[name] = ProcedureStats(
                rejections=int(flags.sum()),
                rejections_ms_pass=int((flags & ~ms).sum()),
                rejections_ms_reject=int((flags & ms).sum()),
            )
        return cls(
            scenario_id=config.scenario_id,
            label=config.label or config.scenario_id,
            hypothesis=config.hypothesis,
            master_seed=config.master_seed,
            replicates=int(decisions.shape[0]),
            replicates_used=int(ok.sum()),
            degenerate=int((~ok).sum()),
            ms_rejections=int(ms.sum()),
            stats=stats,
        )

    @property
    def procedures(self) -> tuple[str, ...]:
        return tuple(self.stats)

    def rate(self, procedure: str) -> float:
        return _ratio(self.stats[procedure].rejections, self.replicates_used)

    def se(self, procedure: str) -> float:
        r = self.rate(procedure)
        return math.sqrt(r * (1.0 - r) / self.replicates_used)

    @property
    def ms_rate(self) -> float:
        return _ratio(self.ms_rejections, self.replicates_used)

    def rate_given_pass(self, procedure: str) -> float:
        return _ratio(self.stats[procedure].rejections_ms_pass, self.replicates_used - self.ms_rejections)

    def rate_given_reject(self, procedure: str) -> float:
        return _ratio(self.stats[procedure].rejections_ms_reject, self.ms_rejections)

    def type2(self, procedure: str) -> float:
        return 1.0 - self.rate(procedure)

    def rates(self) -> dict[str, tuple[float, float]]:
        return {p: (self.rate(p), self.se(p)) for p in self.stats}


def simulate_scenario(config: ScenarioConfig, workers: int | None = None) -> ScenarioResult:
    """Estimate rejection rates of all four procedures for one scenario.

    Raises DegenerateThresholdError when more than 0.1% of the replicates
    yield data on which some test is undefined.
    """
    decisions = run_blocks(config, config.replicates, workers)
    result = ScenarioResult.from_decisions(config, decisions)
    if result.degenerate > DEGENERATE_FRACTION_LIMIT * config.replicates:
        raise DegenerateThresholdError(
            f"scenario {config.scenario_id!r}: {result.degenerate} of {config.replicates} "
            "replicates were degenerate"
        )
    return result


# Above this many trials the tail is taken from the normal approximation.
BINOMIAL_EXACT_MAX_N = 100_000


def binomial_level_test(rejections: int, n: int, p0: float, side: str = "greater") -> float:
    """One-sided binomial p-value for H0: true rate equals ``p0``.

    ``side="greater"`` returns P(X >= rejections), ``"less"`` P(X <= rejections).
    The tail is exact (via the incomplete beta function) for
    ``n <= BINOMIAL_EXACT_MAX_N`` and a continuity-corrected normal
    approximation beyond that.
    """
    if not 0 <= rejections <= n:
        raise DomainError(f"need 0 <= rejections <= n, got {rejections}, {n}")
    if not 0.0 < p0 < 1.0:
        raise DomainError(f"p0 must lie in (0, 1), got {p0!r}")
    if side not in ("greater", "less"):
        raise DomainError(f"side must be 'greater' or 'less', got {side!r}")
    k = rejections
    if n > BINOMIAL_EXACT_MAX_N:
        sd = math.sqrt(n * p0 * (1.0 - p0))
        if side == "greater":
            return normal_sf((k - 0.5 - n * p0) / sd)
        return normal_sf((n * p0 - k - 0.5) / sd)
    if side == "greater":
        return 1.0 if k == 0 else regularized_incomplete_beta(k, n - k + 1, p0)
    return 1.0 if k == n else regularized_incomplete_beta(n - k, k + 1, 1.0 - p0)


RateSource = ScenarioResult | Mapping[str, "float | tuple[float, float]"]


def _rates_of(source: RateSource) -> dict[str, tuple[float, float]]:
    if isinstance(source, ScenarioResult):
        return source.rates()
    out = {}
    for proc, value in source.items():
        if isinstance(value, tuple):
            out[proc] = (float(value[0]), float(value[1]))
        else:
            out[proc] = (float(value), 0.0)
    return out


def convex_combination(
    results: Iterable[tuple[RateSource, float]], tol: float = 1e-12
) -> dict[str, tuple[float, float]]:
    """Weighted average of per-procedure rates with propagated standard errors.

    ``results`` pairs a ScenarioResult (or a mapping procedure -> rate or
    (rate, se)) with its weight. Returns procedure -> (rate, se) for the
    procedures common to all inputs.
    """
    pairs: Sequence[tuple[RateSource, float]] = list(results)
    if not pairs:
        raise DomainError("convex combination of nothing")
    weights = [float(w) for _, w in pairs]
    if any(w < 0 for w in weights) or abs(math.fsum(weights) - 1.0) > tol:
        raise DomainError(f"weights must be non-negative and sum to 1, got {weights}")
    tables = [_rates_of(src) for src, _ in pairs]
    common = [p for p in tables[0] if all(p in t for t in tables[1:])]
    combined = {}
    for proc in common:
        rate = math.fsum(w * t[proc][0] for t, w in zip(tables, weights))
        se = math.sqrt(math.fsum((w * t[proc][1]) ** 2 for t, w in zip(tables, weights)))
        combined[proc] = (rate, se)
    return combined
