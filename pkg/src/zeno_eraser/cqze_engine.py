"""Chained quantum Zeno effect: M outer cycles, each wrapping N inner cycles.

The element-level engine (:func:`inner_cycle`, :func:`outer_cycle`, :func:`run_cqze`)
pushes a :class:`~zeno_eraser.optics_core.PhotonState` through rotators and
polarizing beam splitters.  :func:`closed_form_blocked` and :func:`closed_form_open`
are the scalar recursions it must agree with; they share no code with the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .optics_core import (
    Mode,
    PhotonState,
    Pol,
    absorb,
    apply_pbs,
    apply_rotation,
    mark_channel_tag,
    recombine_pbs,
)


class Policy(str, Enum):
    BLOCKED = "blocked"
    OPEN = "open"


@dataclass(frozen=True)
class CqzeParams:
    M: int
    N: int
    policy: Policy = Policy.BLOCKED
    # test hook: added to every rotation angle; the closed forms ignore it
    angle_offset: float = 0.0

    def __post_init__(self):
        for name in ("M", "N"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        object.__setattr__(self, "policy", Policy(self.policy))

    @property
    def outer_angle(self) -> float:
        return math.pi / (2 * self.M) + self.angle_offset

    @property
    def inner_angle(self) -> float:
        return math.pi / (2 * self.N) + self.angle_offset


@dataclass
class CqzeOutcome:
    out_h: float
    out_v: float
    ledger: dict
    state: PhotonState

    @property
    def ledger_total(self) -> float:
        return math.fsum(self.ledger.values())


def inner_cycle(
    state: PhotonState, params: CqzeParams, m: int, n: int, *, track_tags: bool = False
) -> PhotonState:
    """One pass of the inner interferometer (SPR2, PBS2, Bob's side, PBS2 again).

    With a blocked channel the H part sent to Bob is absorbed at D_B, so INNER keeps
    only V scaled by cos(pi/2N).  With an open channel it returns from Bob's mirror
    and recombines, leaving a pure rotation by pi/2N.

    ``track_tags`` labels whatever enters the channel with ``(m, n)``.  For an open
    channel that label is which-path information, so the inner rotation no longer
    composes coherently; use it for auditing only.
    """
    if not 1 <= n <= params.N:
        raise ValueError(f"inner cycle index {n} outside 1..{params.N}")
    state = apply_rotation(state, Mode.INNER, params.inner_angle)
    state = apply_pbs(state, Mode.INNER, h_out=Mode.CHANNEL, v_out=Mode.INNER_ARM)
    if track_tags:
        state = mark_channel_tag(state, Mode.CHANNEL, (m, n))
    if params.policy is Policy.BLOCKED:
        state = absorb(state, Mode.CHANNEL, Mode.SINK_DB, (m, n))
    # Bob's mirror and the optical delays are identities on amplitude
    return recombine_pbs(state, h_in=Mode.CHANNEL, v_in=Mode.INNER_ARM, out=Mode.INNER, other=Mode.CHANNEL)


def outer_cycle(state: PhotonState, params: CqzeParams, m: int, *, track_tags: bool = False) -> PhotonState:
    """SPR1 on ARM_B, PBS1 sends V into the inner loop, N inner cycles, then exit.

    Blocked: the surviving V rejoins ARM_B through PBS1 (any H would leave toward D3).
    Open: the inner content, rotated to H, is caught by D3.
    """
    if not 1 <= m <= params.M:
        raise ValueError(f"outer cycle index {m} outside 1..{params.M}")
    state = apply_rotation(state, Mode.ARM_B, params.outer_angle)
    state = apply_pbs(state, Mode.ARM_B, h_out=Mode.OUTER, v_out=Mode.INNER)
    for n in range(1, params.N + 1):
        state = inner_cycle(state, params, m, n, track_tags=track_tags)
    if params.policy is Policy.OPEN:
        state = absorb(state, Mode.INNER, Mode.SINK_D3, m)
    state = recombine_pbs(state, h_in=Mode.OUTER, v_in=Mode.INNER, out=Mode.ARM_B, other=Mode.D3_PATH)
    return absorb(state, Mode.D3_PATH, Mode.SINK_D3, m)


def run_cycles(state: PhotonState, params: CqzeParams, *, track_tags: bool = False) -> PhotonState:
    """Run all M outer cycles on whatever ARM_B holds in ``state``."""
    for m in range(1, params.M + 1):
        state = outer_cycle(state, params, m, track_tags=track_tags)
    return state


def run_cqze(params: CqzeParams, in_amp: float = 1.0, *, track_tags: bool = False) -> CqzeOutcome:
    if not abs(in_amp) <= 1:
        raise ValueError(f"input amplitude must satisfy |in_amp| <= 1, got {in_amp!r}")
    state = PhotonState.single(Mode.ARM_B, Pol.H, in_amp)
    state = run_cycles(state, params, track_tags=track_tags)
    return CqzeOutcome(
        out_h=state.amp(Mode.ARM_B, Pol.H).real,
        out_v=state.amp(Mode.ARM_B, Pol.V).real,
        ledger=dict(state.ledger),
        state=state,
    )


def _cos_sin_step(k: int) -> tuple[float, float]:
    """cos and sin of pi/(2k); exact for k = 1."""
    if k == 1:
        return 0.0, 1.0
    return math.cos(math.pi / (2 * k)), math.sin(math.pi / (2 * k))


def closed_form_blocked(M: int, N: int) -> tuple[float, float]:
    """(X[M], Y[M]) from the blocked-channel recursion, starting at X=1, Y=0."""
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    c, s = _cos_sin_step(M)
    survive = _cos_sin_step(N)[0] ** N
    x, y = 1.0, 0.0
    for _ in range(M):
        x, y = c * x - s * y, (s * x + c * y) * survive
    return x, y


def closed_form_open(M: int) -> float:
    """H survival amplitude cos(pi/2M)**M for an open channel."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return _cos_sin_step(M)[0] ** M
