"""Single-photon simulator of a counterfactual quantum eraser driven by the chained Zeno effect."""

from .cqze_engine import CqzeOutcome, CqzeParams, Policy, closed_form_blocked, closed_form_open, run_cqze
from .eraser_experiment import (
    ExperimentResult,
    Scenario,
    VisibilityGrid,
    baseline_probabilities,
    run_scenario,
    sweep_visibility,
    visibility,
)
from .optics_core import Mode, PhotonState, Pol
from .stochastic_audit import AuditReport, ShotConfig, compare_frequencies, counterfactual_audit, sample_outcomes

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "CqzeOutcome",
    "CqzeParams",
    "ExperimentResult",
    "Mode",
    "PhotonState",
    "Pol",
    "Policy",
    "Scenario",
    "ShotConfig",
    "VisibilityGrid",
    "baseline_probabilities",
    "closed_form_blocked",
    "closed_form_open",
    "compare_frequencies",
    "counterfactual_audit",
    "run_cqze",
    "run_scenario",
    "sample_outcomes",
    "sweep_visibility",
    "visibility",
]
