"""Monte Carlo laboratory for pretest-then-test ("combined") procedures."""

__version__ = "0.1.0"

from .combined import Branch, CombinedOutcome, ProcedureConfig, run_combined
from .distributions import Exponential, Normal, ShiftedT, SkewNormal, moments, sample, skew_normal_params
from .engine import ScenarioConfig, ScenarioResult, binomial_level_test, convex_combination, simulate_scenario
from .hypothesis_tests import (
    TestOutcome,
    TwoSampleData,
    permutation_mean_test,
    pooled_residuals,
    shapiro_wilk,
    welch_t_test,
    wmw_test,
)
from .lambda_lab import (
    BernoulliWorlds,
    LemmaInputs,
    MixtureSpec,
    analytic_combined_power,
    independence_diagnostics,
    lambda_star,
    lemma_gain,
    simulate_mixture,
    verify_lemma,
)
from .rng import RngStream
