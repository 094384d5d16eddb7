"""Shot sampling of detector clicks and the channel-tag audit.

Each run draws from its own Philox stream keyed by ``(seed, scenario, M, N)``, so
runs are reproducible and independent of the order they are evaluated in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .cqze_engine import CqzeParams
from .eraser_experiment import ExperimentResult, Scenario, propagate, run_scenario, scenario_params
from .optics_core import Mode, norm_sq

DETECTORS = ("D1", "D2", "D3", "DB")
_SCENARIO_CODES = {s: i for i, s in enumerate(Scenario)}


@dataclass(frozen=True)
class ShotConfig:
    shots: int
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.shots, bool) or not isinstance(self.shots, int) or self.shots < 1:
            raise ValueError(f"shots must be an integer >= 1, got {self.shots!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


def run_stream(seed: int, scenario: Scenario, params: CqzeParams | None) -> np.random.Generator:
    key = (_SCENARIO_CODES[Scenario(scenario)], params.M if params else 0, params.N if params else 0)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def sample_outcomes(result: ExperimentResult, config: ShotConfig) -> dict[str, int]:
    """Multinomial click counts for ``config.shots`` photons."""
    probs = np.array([result.probabilities()[d] for d in DETECTORS], dtype=float)
    if not np.all(np.isfinite(probs)) or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
        raise ValueError(f"invalid probability set: {dict(zip(DETECTORS, probs))}")
    probs /= probs.sum()
    rng = run_stream(config.seed, result.scenario, result.params)
    counts = rng.multinomial(config.shots, probs)
    return {d: int(c) for d, c in zip(DETECTORS, counts)}


def compare_frequencies(counts: dict[str, int], result: ExperimentResult) -> dict[str, float]:
    """Per-detector z-score of the observed counts against the analytic probabilities.

    Certain (p = 1) and impossible (p = 0) outcomes have no spread; any deviation
    there is reported as an infinite z.
    """
    shots = sum(counts.values())
    if shots <= 0:
        raise ValueError("no shots to compare")
    probs = result.probabilities()
    z = {}
    for d in DETECTORS:
        p, k = probs[d], counts.get(d, 0)
        expected = shots * p
        if p <= 0 or p >= 1:
            expected = shots * min(max(p, 0.0), 1.0)
            z[d] = 0.0 if k == expected else math.copysign(math.inf, k - expected)
        else:
            z[d] = (k - expected) / math.sqrt(shots * p * (1 - p))
    return z


@dataclass
class AuditReport:
    scenario: Scenario
    params: CqzeParams
    tagged_mass_d1: float
    tagged_mass_d2: float
    tagged_mass_lost: float
    mass_d1: float
    mass_d2: float
    mass_lost: float
    total_mass: float
    counts: dict[str, int] = field(default_factory=dict)
    z_scores: dict[str, float] = field(default_factory=dict)


def counterfactual_audit(
    scenario: Scenario, params: CqzeParams, config: ShotConfig | None = None
) -> AuditReport:
    """Run the circuit with channel tagging on and report where tagged probability ends up.

    With Bob blocking, every tagged component is absorbed at D_B in the cycle it was
    tagged, so nothing tagged can reach D1 or D2.  For an open channel the numbers
    are reported as computed.  With ``config`` the report also carries shot counts.
    """
    scenario = Scenario(scenario)
    if not scenario.uses_cqze:
        raise ValueError("audit undefined without channel")
    params = scenario_params(scenario, params)
    state = propagate(scenario, params, track_tags=True)
    report = AuditReport(
        scenario=scenario,
        params=params,
        tagged_mass_d1=state.mode_prob(Mode.OUT_D1, tag=True),
        tagged_mass_d2=state.mode_prob(Mode.OUT_D2, tag=True),
        tagged_mass_lost=state.tagged_loss(),
        mass_d1=state.mode_prob(Mode.OUT_D1),
        mass_d2=state.mode_prob(Mode.OUT_D2),
        mass_lost=state.ledger_total(),
        total_mass=norm_sq(state) + state.ledger_total(),
    )
    if config is not None:
        result = run_scenario(scenario, params)
        report.counts = sample_outcomes(result, config)
        report.z_scores = compare_frequencies(report.counts, result)
    return report


def exceedance_rates(
    result: ExperimentResult, shots: int, seeds: Iterable[int], threshold: float = 3.0
) -> dict[str, float]:
    """Fraction of seeds for which each detector's |z| exceeds ``threshold``."""
    seeds = list(seeds)
    hits = dict.fromkeys(DETECTORS, 0)
    for seed in seeds:
        z = compare_frequencies(sample_outcomes(result, ShotConfig(shots, seed)), result)
        for d in DETECTORS:
            hits[d] += abs(z[d]) > threshold
    return {d: hits[d] / len(seeds) for d in DETECTORS}
