import math

import numpy as np
import pytest
from scipy import stats

from pretestlab.combined import ProcedureConfig
from pretestlab.distributions import Exponential, Normal, ShiftedT
from pretestlab.engine import (
    PROCEDURES,
    ScenarioConfig,
    binomial_level_test,
    convex_combination,
    draw_data,
    evaluate_block,
    resolve_workers,
    simulate_scenario,
)
from pretestlab.errors import DegenerateDataError, DegenerateThresholdError, DomainError

# printed type 2 rates (Welch, WMW, combined, permutation) for the
# normal, t3 and skew normal alternatives
PRINTED_TYPE2 = {
    "normal": {"welch": 0.0785, "wmw": 0.0924, "combined": 0.0782, "permutation": 0.0778},
    "t3": {"welch": 0.4127, "wmw": 0.2585, "combined": 0.2700, "permutation": 0.4142},
    "skewnormal": {"welch": 0.0868, "wmw": 0.0778, "combined": 0.0735, "permutation": 0.0777},
}


def small(**kw):
    base = dict(scenario_id="s", dist1=Normal(1.0), dist2=Normal(1.0), replicates=600, master_seed=7)
    base.update(kw)
    return ScenarioConfig(**base)


@pytest.fixture(scope="module")
def normal_null():
    return simulate_scenario(small(replicates=1200))


class TestScenarioConfig:
    @pytest.mark.parametrize(
        "kw", [dict(replicates=0), dict(n1=2), dict(n2=1), dict(hypothesis="both"), dict(permutation_B=0)]
    )
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            small(**kw)


class TestSimulate:
    def test_single_replicate_deterministic(self):
        c = small(replicates=1)
        a, b = simulate_scenario(c), simulate_scenario(c)
        assert a == b
        for p in PROCEDURES:
            assert a.rate(p) in (0.0, 1.0)

    def test_worker_invariance(self):
        c = small(replicates=1100, dist2=ShiftedT(1.6))
        assert simulate_scenario(c, workers=1) == simulate_scenario(c, workers=2)

    def test_block_boundaries_do_not_matter(self):
        c = small(replicates=30)
        whole = evaluate_block(c, 0, 30)
        parts = np.concatenate([evaluate_block(c, 0, 7), evaluate_block(c, 7, 30)])
        assert whole.tobytes() == parts.tobytes()

    def test_same_dataset_for_all_procedures(self):
        c = small()
        data, stream = draw_data(c, 3)
        again, _ = draw_data(c, 3)
        assert data.x.tobytes() == again.x.tobytes()
        assert stream.keys == ("s", 3)

    def test_law_of_total_probability(self, normal_null):
        r = normal_null
        share = r.ms_rejections / r.replicates_used
        for p in PROCEDURES:
            total = (1 - share) * r.rate_given_pass(p) + share * r.rate_given_reject(p)
            assert abs(r.rate(p) - total) <= 1e-12

    def test_combined_matches_branch_rates(self, normal_null):
        s = normal_null.stats
        assert s["combined"].rejections_ms_pass == s["welch"].rejections_ms_pass
        assert s["combined"].rejections_ms_reject == s["wmw"].rejections_ms_reject

    def test_se_formula(self, normal_null):
        r = normal_null.rate("welch")
        assert normal_null.se("welch") == math.sqrt(r * (1 - r) / normal_null.replicates_used)

    def test_rates_in_unit_interval(self, normal_null):
        for p in PROCEDURES:
            assert 0.0 <= normal_null.rate(p) <= 1.0

    def test_exponential_alternative_has_power(self):
        r = simulate_scenario(small(dist1=Exponential(1.0), dist2=Exponential(2.0), replicates=300))
        assert r.rate("welch") > 0.55

    def test_env_workers(self, monkeypatch):
        monkeypatch.setenv("PRETESTLAB_WORKERS", "3")
        assert resolve_workers() == 3
        assert resolve_workers(2) == 2
        with pytest.raises(DomainError):
            resolve_workers(0)


class TestDegenerate:
    def test_over_threshold_fails(self):
        c = small(replicates=200, procedure=ProcedureConfig(ms_test=_raise_low), permutation_B=9)
        with pytest.raises(DegenerateThresholdError):
            simulate_scenario(c)

    def test_counted_rows(self):
        c = small(replicates=40, procedure=ProcedureConfig(ms_test=_raise_low), permutation_B=9)
        flags = evaluate_block(c, 0, 40)
        bad = (flags == -1).all(axis=1)
        assert bad.any() and not bad.all()


def _raise_low(data, level, stream=None):
    from pretestlab.combined import sw_on_residuals

    if data.x[0] < 1.0:
        raise DegenerateDataError("forced")
    return sw_on_residuals(data, level)


class TestBinomial:
    def test_half(self):
        p = binomial_level_test(5000, 100_000, 0.05, "greater")
        assert p == pytest.approx(stats.binom.sf(4999, 100_000, 0.05), abs=1e-9)
        assert p == pytest.approx(0.502026, abs=1e-6)

    def test_combined_normal_printed_rate(self):
        p = binomial_level_test(5120, 100_000, 0.05, "greater")
        assert 0.01 < p < 0.05

    def test_zero_less(self):
        assert binomial_level_test(0, 10, 0.05, "less") == pytest.approx(0.95**10, abs=1e-12)
        assert 0.95**10 == pytest.approx(0.5987, abs=1e-4)

    @pytest.mark.parametrize("k,n,p0", [(3, 20, 0.05), (60, 1000, 0.05), (1064, 20000, 0.05), (12, 12, 0.3)])
    def test_against_reference(self, k, n, p0):
        assert binomial_level_test(k, n, p0, "greater") == pytest.approx(stats.binom.sf(k - 1, n, p0), abs=1e-10)
        assert binomial_level_test(k, n, p0, "less") == pytest.approx(stats.binom.cdf(k, n, p0), abs=1e-10)

    def test_normal_switch(self):
        n = 200_000
        p = binomial_level_test(10_250, n, 0.05, "greater")
        assert p == pytest.approx(stats.binom.sf(10_249, n, 0.05), abs=2e-3)

    @pytest.mark.parametrize("args", [(11, 10, 0.05, "less"), (1, 10, 0.0, "less"), (1, 10, 0.5, "two")])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            binomial_level_test(*args)


class TestConvexCombination:
    def test_printed_example(self):
        out = convex_combination(
            [(PRINTED_TYPE2["normal"], 0.5), (PRINTED_TYPE2["t3"], 0.25), (PRINTED_TYPE2["skewnormal"], 0.25)]
        )
        # exact weighted sums of the printed four-digit rates
        expected = {"welch": 0.164125, "wmw": 0.130275, "combined": 0.124975, "permutation": 0.161875}
        printed = {"welch": 0.1641, "wmw": 0.1303, "combined": 0.1250, "permutation": 0.1619}
        for p, value in expected.items():
            assert out[p][0] == pytest.approx(value, abs=1e-12)
            assert out[p][0] == pytest.approx(printed[p], abs=1e-4)

    def test_identity(self, normal_null):
        out = convex_combination([(normal_null, 1.0)])
        assert out == normal_null.rates()

    def test_identical_pair(self, normal_null):
        out = convex_combination([(normal_null, 0.3), (normal_null, 0.7)])
        for p, (rate, se) in out.items():
            assert rate == pytest.approx(normal_null.rate(p), abs=1e-15)
            assert se == pytest.approx(math.sqrt(0.58) * normal_null.se(p), abs=1e-15)

    @pytest.mark.parametrize("weights", [(0.5, 0.4), (1.2, -0.2), (0.5, 0.5 + 1e-9)])
    def test_bad_weights(self, weights):
        with pytest.raises(DomainError):
            convex_combination([({"welch": 0.1}, weights[0]), ({"welch": 0.2}, weights[1])])

    def test_empty(self):
        with pytest.raises(DomainError):
            convex_combination([])
