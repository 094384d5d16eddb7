"""The Michelson eraser, with and without the Zeno module in Bob's arm.

Detector convention: D2 sits on the bright port of the 50/50 splitter and D1,
reached through the circulator, on the dark port.  Detectors do not resolve
polarization, so a click probability sums H and V at the port.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .cqze_engine import CqzeParams, Policy, closed_form_blocked, run_cycles
from .optics_core import HALF_PI, Mode, PhotonState, Pol, apply_bs, apply_rotation


class Scenario(str, Enum):
    BASELINE_NO_TAG = "baseline-no-tag"
    BASELINE_TAGGED = "baseline-tagged"
    ERASE_BLOCKED = "erase-blocked"
    NO_ERASE_OPEN = "no-erase-open"

    @property
    def uses_cqze(self) -> bool:
        return self in (Scenario.ERASE_BLOCKED, Scenario.NO_ERASE_OPEN)

    @property
    def policy(self) -> Policy | None:
        return {Scenario.ERASE_BLOCKED: Policy.BLOCKED, Scenario.NO_ERASE_OPEN: Policy.OPEN}.get(self)


@dataclass
class ExperimentResult:
    scenario: Scenario
    p_d1: float
    p_d2: float
    p_d3: float
    p_db: float
    visibility: float
    params: CqzeParams | None = None

    def probabilities(self) -> dict[str, float]:
        return {"D1": self.p_d1, "D2": self.p_d2, "D3": self.p_d3, "DB": self.p_db}

    @property
    def total(self) -> float:
        return math.fsum(self.probabilities().values())


def _port_visibility(p_d1: float, p_d2: float) -> float:
    total = p_d1 + p_d2
    return (p_d2 - p_d1) / total if total > 0 else 0.0


def scenario_params(scenario: Scenario, params: CqzeParams | None) -> CqzeParams | None:
    """Parameters actually used: None for baselines, Bob's policy forced for the rest."""
    if not scenario.uses_cqze:
        return None
    if params is None:
        raise ValueError("scenario requires CQZE parameters")
    return CqzeParams(params.M, params.N, scenario.policy, params.angle_offset)


def propagate(scenario: Scenario, params: CqzeParams | None = None, *, track_tags: bool = False) -> PhotonState:
    """Final photon state (detector ports plus loss ledger) for one scenario."""
    scenario = Scenario(scenario)
    params = scenario_params(scenario, params)

    state = PhotonState.single(Mode.SOURCE, Pol.H)
    # the D2-side port of BS carries vacuum on the way in
    state = apply_bs(state, Mode.SOURCE, Mode.OUT_D2, out_bright=Mode.ARM_B, out_dark=Mode.ARM_A)
    if scenario is not Scenario.BASELINE_NO_TAG:
        state = apply_rotation(state, Mode.ARM_A, HALF_PI)
    if scenario.uses_cqze:
        state = run_cycles(state, params, track_tags=track_tags)
    return apply_bs(state, Mode.ARM_A, Mode.ARM_B, out_bright=Mode.OUT_D2, out_dark=Mode.OUT_D1)


def _click(state: PhotonState, port: Mode) -> float:
    # rounding can push a certain click a few ulp above 1
    return min(1.0, state.mode_prob(port))


def run_scenario(scenario: Scenario, params: CqzeParams | None = None) -> ExperimentResult:
    scenario = Scenario(scenario)
    params = scenario_params(scenario, params)
    state = propagate(scenario, params)
    p_d1, p_d2 = _click(state, Mode.OUT_D1), _click(state, Mode.OUT_D2)
    return ExperimentResult(
        scenario=scenario,
        p_d1=p_d1,
        p_d2=p_d2,
        p_d3=state.ledger_total(Mode.SINK_D3),
        p_db=state.ledger_total(Mode.SINK_DB),
        visibility=_port_visibility(p_d1, p_d2),
        params=params,
    )


def baseline_probabilities(spr_on: bool) -> ExperimentResult:
    return run_scenario(Scenario.BASELINE_TAGGED if spr_on else Scenario.BASELINE_NO_TAG)


def visibility(X: float, Y: float) -> float:
    """Fringe visibility 2Y / (X^2 + Y^2 + 1) from the blocked-channel output amplitudes."""
    if X * X + Y * Y > 1 + 1e-9:
        raise ValueError(f"amplitudes ({X}, {Y}) exceed unit norm")
    return 2 * Y / (X * X + Y * Y + 1)


def blocked_port_probabilities(X: float, Y: float) -> tuple[float, float, float]:
    """(p_d1, p_d2, p_db) when Bob blocks, from the Zeno module's exit amplitudes."""
    p_d1 = ((1 - Y) ** 2 + X * X) / 4
    p_d2 = ((1 + Y) ** 2 + X * X) / 4
    p_db = (1 - X * X - Y * Y) / 2
    return p_d1, p_d2, p_db


@dataclass(frozen=True)
class GridRow:
    M: int
    N: int
    X: float
    Y: float
    p_d1: float
    p_d2: float
    p_loss: float
    visibility: float


@dataclass
class VisibilityGrid:
    rows: list[GridRow]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def row(self, M: int, N: int) -> GridRow:
        for r in self.rows:
            if r.M == M and r.N == N:
                return r
        raise KeyError((M, N))


def sweep_visibility(M_max: int, N_max: int) -> VisibilityGrid:
    """Blocked-channel visibility over M in 1..M_max, N in 1..N_max, M-major."""
    if M_max < 1 or N_max < 1:
        raise ValueError("sweep bounds must be >= 1")
    rows = []
    for M in range(1, M_max + 1):
        for N in range(1, N_max + 1):
            X, Y = closed_form_blocked(M, N)
            p_d1, p_d2, p_loss = blocked_port_probabilities(X, Y)
            rows.append(GridRow(M, N, X, Y, p_d1, p_d2, p_loss, visibility(X, Y)))
    return VisibilityGrid(rows)
