"""Dataset-level mixtures of a model-conforming and a model-violating world.

With probability ``lambda`` a whole dataset comes from the conforming pair of
distributions ("theta" world), otherwise from the violating pair ("q"
world). Powers of every procedure are then linear in ``lambda``; the combined
procedure beats both main tests near the crossing point of their power lines
when the pretest discriminates between the worlds and its decision is
independent of the main tests' decisions.

Simulation uses common random numbers: replicate ``r`` evaluates one theta
dataset and one q dataset (the same datasets :func:`simulate_scenario` would
draw for those scenarios), and a per-lambda selector stream decides which of
the two the replicate uses at each grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .combined import ProcedureConfig
from .engine import AU, MC, MS, ScenarioConfig, run_blocks
from .errors import AssumptionViolation, DomainError
from .rng import RngStream

__all__ = [
    "LemmaInputs",
    "MixtureSpec",
    "MixtureSweep",
    "BernoulliWorlds",
    "IndependenceDiagnostics",
    "LemmaReport",
    "DEFAULT_GRID",
    "simulate_mixture",
    "world_decisions",
    "lambda_star",
    "analytic_power",
    "analytic_combined_power",
    "lemma_gain",
    "verify_lemma",
    "independence_diagnostics",
    "gaps_from_decisions",
    "scenario_gaps",
]

DEFAULT_GRID = tuple(i / 10 for i in range(11))
MIXTURE_PROCEDURES = ("mc", "au", "combined")
MIN_BRANCH_REPLICATES = 100


# ---------------------------------------------------------------- analytic side


@dataclass(frozen=True)
class LemmaInputs:
    """Rejection rates in the two worlds (powers for MC/AU, pretest rates for MS).

    Fields accept floats or :class:`fractions.Fraction`; all formulas below
    use only field arithmetic so Fractions give exact results.
    """

    p_mc_theta: float
    p_au_theta: float
    p_mc_q: float
    p_au_q: float
    alpha_ms: float
    alpha_ms_star: float

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def delta_theta(self):
        return self.p_mc_theta - self.p_au_theta

    @property
    def delta_q(self):
        return self.p_au_q - self.p_mc_q

    def failed_assumptions(self) -> list[str]:
        failed = []
        if not self.delta_theta > 0:
            failed.append("I")
        if not self.delta_q > 0:
            failed.append("II")
        if not self.alpha_ms_star > self.alpha_ms:
            failed.append("III")
        return failed

    def check(self, which: Sequence[str] = ("I", "II", "III")) -> None:
        messages = {
            "I": f"MC power must exceed AU power in the theta world (difference {self.delta_theta})",
            "II": f"AU power must exceed MC power in the q world (difference {self.delta_q})",
            "III": (
                f"pretest must reject more often in the q world "
                f"({self.alpha_ms_star} vs {self.alpha_ms})"
            ),
        }
        for name in self.failed_assumptions():
            if name in which:
                raise AssumptionViolation(name, messages[name])


def lambda_star(inputs: LemmaInputs):
    """Mixing weight at which the MC and AU power lines cross."""
    inputs.check(("I", "II"))
    return inputs.delta_q / (inputs.delta_theta + inputs.delta_q)


def analytic_power(inputs: LemmaInputs, lam, procedure: str):
    """Power of ``procedure`` in the lambda-mixture.

    MC and AU are exact chords between the worlds; the combined power
    assumes the pretest decision is independent of both main tests.
    """
    if procedure == "mc":
        return lam * inputs.p_mc_theta + (1 - lam) * inputs.p_mc_q
    if procedure == "au":
        return lam * inputs.p_au_theta + (1 - lam) * inputs.p_au_q
    if procedure == "combined":
        return analytic_combined_power(inputs, lam)
    raise DomainError(f"unknown procedure {procedure!r}")


def analytic_combined_power(inputs: LemmaInputs, lam):
    a, a_star = inputs.alpha_ms, inputs.alpha_ms_star
    theta = a * inputs.p_au_theta + (1 - a) * inputs.p_mc_theta
    q = a_star * inputs.p_au_q + (1 - a_star) * inputs.p_mc_q
    return lam * theta + (1 - lam) * q


def lemma_gain(inputs: LemmaInputs):
    """Excess of the combined power over both main tests at the crossing point."""
    inputs.check()
    dt, dq = inputs.delta_theta, inputs.delta_q
    return dt * dq / (dt + dq) * (inputs.alpha_ms_star - inputs.alpha_ms)


@dataclass
class LemmaReport:
    inputs: LemmaInputs
    failed_assumptions: list[str]
    lambda_star: float | None
    gain: float | None
    gain_check_error: float | None
    superior_interval: tuple[float, float] | None
    grid: tuple[float, ...]
    curves: dict[str, list[float]]

    @property
    def ok(self) -> bool:
        return not self.failed_assumptions

    def as_dict(self) -> dict:
        return {
            "inputs": {k: float(getattr(self.inputs, k)) for k in self.inputs.__dataclass_fields__},
            "failed_assumptions": self.failed_assumptions,
            "lambda_star": _maybe_float(self.lambda_star),
            "gain": _maybe_float(self.gain),
            "gain_check_error": _maybe_float(self.gain_check_error),
            "superior_interval": (
                None if self.superior_interval is None else [float(v) for v in self.superior_interval]
            ),
            "grid": [float(v) for v in self.grid],
            "curves": {k: [float(v) for v in vs] for k, vs in self.curves.items()},
        }


def _maybe_float(v):
    return None if v is None else float(v)


def _superior_interval(inputs: LemmaInputs):
    # combined - MC = -lam*a*dt + (1-lam)*a*dq and
    # combined - AU = lam*(1-a)*dt - (1-lam)*(1-a*)*dq are linear in lam,
    # so the set where both are positive is an open interval.
    a, a_star = inputs.alpha_ms, inputs.alpha_ms_star
    dt, dq = inputs.delta_theta, inputs.delta_q
    upper = a_star * dq / (a_star * dq + a * dt) if a_star * dq + a * dt > 0 else 1
    lower_den = (1 - a_star) * dq + (1 - a) * dt
    lower = (1 - a_star) * dq / lower_den if lower_den > 0 else 0
    return (lower, upper) if lower < upper else None


def verify_lemma(inputs: LemmaInputs, grid: Sequence[float] = DEFAULT_GRID) -> LemmaReport:
    """Check the assumptions, compute the crossing point, gain and power curves.

    Never raises on violated assumptions; they are listed in the report.
    """
    failed = inputs.failed_assumptions()
    curves = {p: [analytic_power(inputs, lam, p) for lam in grid] for p in MIXTURE_PROCEDURES}
    lam_star = gain = check = interval = None
    if not {"I", "II"} & set(failed):
        lam_star = lambda_star(inputs)
        at_star = analytic_combined_power(inputs, lam_star)
        best_main = max(analytic_power(inputs, lam_star, "mc"), analytic_power(inputs, lam_star, "au"))
        if not failed:
            gain = lemma_gain(inputs)
            check = abs((at_star - best_main) - gain)
            interval = _superior_interval(inputs)
    return LemmaReport(inputs, failed, lam_star, gain, check, interval, tuple(grid), curves)


# ---------------------------------------------------------------- simulation side


@dataclass(frozen=True)
class BernoulliWorlds:
    """Synthetic decisions: independent Bernoulli flags with the rates in ``inputs``."""

    inputs: LemmaInputs
    master_seed: int = 0

    def decisions(self, world: str, replicates: int) -> np.ndarray:
        i = self.inputs
        if world == "theta":
            rates = (i.alpha_ms, i.p_mc_theta, i.p_au_theta)
        else:
            rates = (i.alpha_ms_star, i.p_mc_q, i.p_au_q)
        u = RngStream(self.master_seed, "bernoulli", world).uniform((replicates, 3))
        return (u < np.asarray(rates, dtype=float)).astype(np.int8)


@dataclass(frozen=True)
class MixtureSpec:
    mixture_id: str
    p_theta: ScenarioConfig
    q: ScenarioConfig
    lambda_grid: tuple[float, ...] = DEFAULT_GRID
    replicates: int = 20000
    master_seed: int = 0

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        object.__setattr__(self, "lambda_grid", grid)
        if len(grid) < 2:
            raise DomainError("lambda_grid needs at least the endpoints 0 and 1")
        if any(not 0.0 <= v <= 1.0 for v in grid):
            raise DomainError(f"lambda_grid values must lie in [0, 1], got {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError(f"lambda_grid must be strictly increasing, got {grid}")
        if grid[0] != 0.0 or grid[-1] != 1.0:
            raise DomainError(f"lambda_grid must include the endpoints 0 and 1, got {grid}")
        if self.replicates < 1:
            raise DomainError(f"replicates must be at least 1, got {self.replicates}")
        if self.master_seed < 0:
            raise DomainError(f"master_seed must be non-negative, got {self.master_seed}")

    @property
    def procedure(self) -> ProcedureConfig:
        return self.p_theta.procedure

    def world(self, name: str) -> ScenarioConfig:
        base = self.p_theta if name == "theta" else self.q
        return replace(base, master_seed=self.master_seed, replicates=self.replicates)


def world_decisions(
    spec: MixtureSpec, world: str, workers: int | None = None, synthetic: BernoulliWorlds | None = None
) -> np.ndarray:
    """(replicates, 3) matrix of (MS, MC, AU) flags for one world; -1 rows are degenerate."""
    if synthetic is not None:
        return synthetic.decisions(world, spec.replicates)
    config = spec.world(world)
    flags = run_blocks(config, spec.replicates, workers, with_permutation=False)
    return flags[:, [MS, MC, AU]]


@dataclass
class MixtureSweep:
    mixture_id: str
    lambdas: tuple[float, ...]
    power: dict[str, np.ndarray]
    se: dict[str, np.ndarray]
    analytic: dict[str, np.ndarray] | None
    endpoint_inputs: LemmaInputs | None
    lambda_star: float | None
    gain: float | None
    replicates: int
    diagnostics: "IndependenceDiagnostics | None" = None

    @property
    def procedures(self) -> tuple[str, ...]:
        return tuple(self.power)

    def select(self, procedures: Sequence[str]) -> "MixtureSweep":
        pick = lambda d: None if d is None else {p: d[p] for p in procedures}  # noqa: E731
        return MixtureSweep(
            self.mixture_id,
            self.lambdas,
            pick(self.power),
            pick(self.se),
            pick(self.analytic),
            self.endpoint_inputs,
            self.lambda_star,
            self.gain,
            self.replicates,
            self.diagnostics,
        )

    def chord_deviation(self, procedure: str) -> tuple[np.ndarray, np.ndarray]:
        """Deviation of each power estimate from the endpoint chord, with its SE."""
        lam = np.asarray(self.lambdas)
        p, s = self.power[procedure], self.se[procedure]
        chord = lam * p[-1] + (1 - lam) * p[0]
        chord_se = np.sqrt(s**2 + (lam * s[-1]) ** 2 + ((1 - lam) * s[0]) ** 2)
        return p - chord, chord_se


def _rate_and_se(flags: np.ndarray) -> tuple[float, float]:
    n = flags.size
    r = float(flags.sum()) / n
    return r, math.sqrt(r * (1 - r) / n)


def simulate_mixture(
    spec: MixtureSpec, workers: int | None = None, synthetic: BernoulliWorlds | None = None
) -> MixtureSweep:
    """Power of MC, AU and combined at every grid lambda.

    ``synthetic`` replaces the real kernels with independent Bernoulli
    decisions, for which the analytic combined power is exact.
    """
    theta = world_decisions(spec, "theta", workers, synthetic)
    q = world_decisions(spec, "q", workers, synthetic)
    ok = (theta[:, 0] >= 0) & (q[:, 0] >= 0)
    theta, q = theta[ok].astype(bool), q[ok].astype(bool)
    n = theta.shape[0]

    power = {p: np.empty(len(spec.lambda_grid)) for p in MIXTURE_PROCEDURES}
    se = {p: np.empty(len(spec.lambda_grid)) for p in MIXTURE_PROCEDURES}
    for k, lam in enumerate(spec.lambda_grid):
        u = RngStream(spec.master_seed, spec.mixture_id, "selector", k).uniform(spec.replicates)[ok]
        pick = (u < lam)[:, None]
        d = np.where(pick, theta, q)
        combined = np.where(d[:, 0], d[:, 2], d[:, 1])
        for name, flags in (("mc", d[:, 1]), ("au", d[:, 2]), ("combined", combined)):
            power[name][k], se[name][k] = _rate_and_se(flags)

    inputs = LemmaInputs(
        p_mc_theta=float(theta[:, 1].mean()),
        p_au_theta=float(theta[:, 2].mean()),
        p_mc_q=float(q[:, 1].mean()),
        p_au_q=float(q[:, 2].mean()),
        alpha_ms=float(theta[:, 0].mean()),
        alpha_ms_star=float(q[:, 0].mean()),
    )
    analytic = {
        p: np.array([analytic_power(inputs, lam, p) for lam in spec.lambda_grid]) for p in MIXTURE_PROCEDURES
    }
    report = verify_lemma(inputs, spec.lambda_grid)
    return MixtureSweep(
        mixture_id=spec.mixture_id,
        lambdas=spec.lambda_grid,
        power=power,
        se=se,
        analytic=analytic,
        endpoint_inputs=inputs,
        lambda_star=None if report.lambda_star is None else float(report.lambda_star),
        gain=None if report.gain is None else float(report.gain),
        replicates=n,
        diagnostics=_diagnostics(theta, q),
    )


# ---------------------------------------------------------------- independence


@dataclass(frozen=True)
class Gap:
    value: float  # nan when undetermined
    se: float
    n_ms_reject: int
    n_ms_pass: int

    @property
    def determined(self) -> bool:
        return not math.isnan(self.value)


@dataclass(frozen=True)
class IndependenceDiagnostics:
    """|P(main rejects | MS rejects) - P(main rejects | MS passes)| per world and main test."""

    mc_theta: Gap
    au_theta: Gap
    mc_q: Gap
    au_q: Gap

    @property
    def gaps(self) -> dict[str, Gap]:
        return {"mc_theta": self.mc_theta, "au_theta": self.au_theta, "mc_q": self.mc_q, "au_q": self.au_q}

    @property
    def delta_max(self) -> float:
        values = [g.value for g in self.gaps.values() if g.determined]
        return max(values) if values else math.nan


def gaps_from_decisions(ms: np.ndarray, main: np.ndarray, min_branch: int = MIN_BRANCH_REPLICATES) -> Gap:
    ms = np.asarray(ms, dtype=bool)
    main = np.asarray(main, dtype=bool)
    n_rej, n_pass = int(ms.sum()), int((~ms).sum())
    if n_rej < min_branch or n_pass < min_branch:
        return Gap(math.nan, math.nan, n_rej, n_pass)
    p1 = float(main[ms].mean())
    p0 = float(main[~ms].mean())
    se = math.sqrt(p1 * (1 - p1) / n_rej + p0 * (1 - p0) / n_pass)
    return Gap(abs(p1 - p0), se, n_rej, n_pass)


def _diagnostics(theta: np.ndarray, q: np.ndarray) -> IndependenceDiagnostics:
    return IndependenceDiagnostics(
        mc_theta=gaps_from_decisions(theta[:, 0], theta[:, 1]),
        au_theta=gaps_from_decisions(theta[:, 0], theta[:, 2]),
        mc_q=gaps_from_decisions(q[:, 0], q[:, 1]),
        au_q=gaps_from_decisions(q[:, 0], q[:, 2]),
    )


def independence_diagnostics(
    spec: MixtureSpec, workers: int | None = None, synthetic: BernoulliWorlds | None = None
) -> IndependenceDiagnostics:
    """Estimate the four conditional-rate gaps by simulating both worlds."""
    theta = world_decisions(spec, "theta", workers, synthetic)
    q = world_decisions(spec, "q", workers, synthetic)
    theta = theta[theta[:, 0] >= 0].astype(bool)
    q = q[q[:, 0] >= 0].astype(bool)
    return _diagnostics(theta, q)


def scenario_gaps(config: ScenarioConfig, workers: int | None = None) -> dict[str, Gap]:
    """MC and AU conditional-rate gaps for a single scenario."""
    flags = run_blocks(config, config.replicates, workers, with_permutation=False)
    flags = flags[flags[:, 0] >= 0].astype(bool)
    return {
        "mc": gaps_from_decisions(flags[:, MS], flags[:, MC]),
        "au": gaps_from_decisions(flags[:, MS], flags[:, AU]),
    }
