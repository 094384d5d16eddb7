import math

import pytest

from zeno_eraser.cqze_engine import CqzeParams
from zeno_eraser.eraser_experiment import ExperimentResult, Scenario, run_scenario
from zeno_eraser.stochastic_audit import (
    DETECTORS,
    ShotConfig,
    compare_frequencies,
    counterfactual_audit,
    exceedance_rates,
    sample_outcomes,
)

REFERENCE_SEED = 0
P_D2_2_4 = 0.66856267996919876
P_DB_2_4 = 0.29254635683071702


@pytest.fixture(scope="module")
def blocked_2_4():
    return run_scenario(Scenario.ERASE_BLOCKED, CqzeParams(2, 4))


def test_shot_config_validation():
    with pytest.raises(ValueError):
        ShotConfig(0)
    with pytest.raises(ValueError):
        ShotConfig(10, seed=-1)
    with pytest.raises(ValueError):
        ShotConfig(10, seed=2**64)


@pytest.mark.parametrize("seed", [0, 1, 2**64 - 1])
def test_degenerate_distribution(seed):
    counts = sample_outcomes(run_scenario(Scenario.BASELINE_NO_TAG), ShotConfig(1000, seed))
    assert counts == {"D1": 0, "D2": 1000, "D3": 0, "DB": 0}


def test_tagged_baseline_is_balanced():
    counts = sample_outcomes(run_scenario(Scenario.BASELINE_TAGGED), ShotConfig(10**6, 1))
    assert abs(counts["D1"] - 500_000) < 3 * 500
    assert abs(counts["D2"] - 500_000) < 3 * 500
    assert counts["D1"] + counts["D2"] == 10**6


def test_blocked_d2_count(blocked_2_4):
    counts = sample_outcomes(blocked_2_4, ShotConfig(10**6, REFERENCE_SEED))
    sigma = math.sqrt(10**6 * P_D2_2_4 * (1 - P_D2_2_4))
    assert abs(counts["D2"] - 10**6 * P_D2_2_4) < 3 * sigma
    assert sum(counts.values()) == 10**6


def test_sampling_is_deterministic(blocked_2_4):
    config = ShotConfig(12345, 99)
    assert sample_outcomes(blocked_2_4, config) == sample_outcomes(blocked_2_4, config)
    assert sample_outcomes(blocked_2_4, config) != sample_outcomes(blocked_2_4, ShotConfig(12345, 100))


def test_streams_differ_by_params():
    config = ShotConfig(10**5, 7)
    a = sample_outcomes(run_scenario(Scenario.ERASE_BLOCKED, CqzeParams(2, 4)), config)
    b = sample_outcomes(run_scenario(Scenario.ERASE_BLOCKED, CqzeParams(2, 5)), config)
    assert a != b


def test_invalid_probabilities_rejected():
    bad = ExperimentResult(Scenario.BASELINE_NO_TAG, 0.5, 0.6, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError, match="invalid probability"):
        sample_outcomes(bad, ShotConfig(10))
    negative = ExperimentResult(Scenario.BASELINE_NO_TAG, -0.1, 1.1, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        sample_outcomes(negative, ShotConfig(10))


# --- compare_frequencies


def test_z_zero_on_exact_match():
    result = run_scenario(Scenario.BASELINE_TAGGED)
    z = compare_frequencies({"D1": 500, "D2": 500, "D3": 0, "DB": 0}, result)
    assert z["D1"] == pytest.approx(0, abs=1e-9)
    assert z["D3"] == 0


def test_z_flags_miss_on_certain_port():
    result = run_scenario(Scenario.BASELINE_NO_TAG)
    z = compare_frequencies({"D1": 1, "D2": 999, "D3": 0, "DB": 0}, result)
    assert z["D2"] == -math.inf
    assert z["D1"] == math.inf


def test_z_formula():
    result = ExperimentResult(Scenario.BASELINE_TAGGED, 0.25, 0.75, 0.0, 0.0, 0.5)
    z = compare_frequencies({"D1": 30, "D2": 70}, result)
    assert z["D1"] == pytest.approx((30 - 25) / math.sqrt(100 * 0.25 * 0.75))


def test_z_needs_shots():
    with pytest.raises(ValueError):
        compare_frequencies({}, run_scenario(Scenario.BASELINE_TAGGED))


def test_reference_seed_all_within_3_sigma(blocked_2_4):
    z = compare_frequencies(sample_outcomes(blocked_2_4, ShotConfig(10**6, REFERENCE_SEED)), blocked_2_4)
    assert all(abs(v) < 3 for v in z.values()), z


def test_exceedance_per_detector(blocked_2_4):
    rates = exceedance_rates(blocked_2_4, 10**6, range(1000))
    assert all(rate < 0.02 for rate in rates.values()), rates


# --- counterfactual_audit


def test_audit_blocked_2_4():
    report = counterfactual_audit(Scenario.ERASE_BLOCKED, CqzeParams(2, 4))
    assert report.tagged_mass_d1 == 0 and report.tagged_mass_d2 == 0
    assert report.tagged_mass_lost == pytest.approx(P_DB_2_4, abs=1e-12)
    assert report.total_mass == pytest.approx(1, abs=1e-12)
    assert report.counts == {}


def test_audit_blocked_degenerate():
    report = counterfactual_audit(Scenario.ERASE_BLOCKED, CqzeParams(1, 1))
    assert report.tagged_mass_d1 == report.tagged_mass_d2 == 0
    assert report.tagged_mass_lost == pytest.approx(report.mass_lost, abs=1e-15)
    # only the ARM_A half survives
    assert report.mass_d1 + report.mass_d2 == pytest.approx(0.5, abs=1e-15)


def test_audit_open_conserves():
    report = counterfactual_audit(Scenario.NO_ERASE_OPEN, CqzeParams(2, 4))
    assert report.mass_d1 + report.mass_d2 + report.mass_lost == pytest.approx(1, abs=1e-12)
    assert report.total_mass == pytest.approx(1, abs=1e-12)
    assert 0 <= report.tagged_mass_lost <= report.mass_lost


def test_audit_rejects_baselines():
    with pytest.raises(ValueError, match="audit undefined without channel"):
        counterfactual_audit(Scenario.BASELINE_TAGGED, CqzeParams(2, 4))


def test_audit_with_shots():
    report = counterfactual_audit(Scenario.ERASE_BLOCKED, CqzeParams(2, 4), ShotConfig(10**5, 3))
    assert sum(report.counts.values()) == 10**5
    assert set(report.z_scores) == set(DETECTORS)


def test_blocked_counterfactuality_on_grid():
    for M in range(1, 11):
        for N in range(1, 51):
            report = counterfactual_audit(Scenario.ERASE_BLOCKED, CqzeParams(M, N))
            assert report.tagged_mass_d1 == 0.0 and report.tagged_mass_d2 == 0.0, (M, N)
            assert abs(report.total_mass - 1) < 1e-12
