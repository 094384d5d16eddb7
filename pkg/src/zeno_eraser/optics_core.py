"""Sparse single-photon polarization states and the optical elements acting on them.

A :class:`PhotonState` maps ``(mode, polarization, tag)`` to a complex amplitude and
keeps a loss ledger of probability absorbed at sink detectors.  Elements are pure:
each returns a new state and leaves its argument untouched.

The tag records whether a component has been in the Alice-Bob channel.  It is
``False`` for untagged components and otherwise a truthy label (``True``, or the
cycle in which the component first entered the channel).  Distinct labels keep
marking injective, so components tagged at different times never merge and
probability is conserved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable

INV_SQRT2 = math.sqrt(0.5)
HALF_PI = math.pi / 2

# cos/sin on the quarter turns, so a polarization flip leaves no 6e-17 residue
_QUARTER_TURNS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


class OpticsError(ValueError):
    pass


class Pol(str, Enum):
    H = "H"
    V = "V"


class Mode(str, Enum):
    SOURCE = "SOURCE"
    ARM_A = "ARM_A"
    ARM_B = "ARM_B"
    # H arm of an outer CQZE cycle (Alice's side, behind the optical delay)
    OUTER = "OUTER"
    INNER = "INNER"
    # V arm of the inner interferometer (Alice's side of PBS2)
    INNER_ARM = "INNER_ARM"
    CHANNEL = "CHANNEL"
    # free port of PBS1 leading to D3
    D3_PATH = "D3_PATH"
    OUT_D1 = "OUT_D1"
    OUT_D2 = "OUT_D2"
    SINK_D3 = "SINK_D3"
    SINK_DB = "SINK_DB"

    @property
    def is_sink(self) -> bool:
        return self in SINKS


SINKS = frozenset({Mode.SINK_D3, Mode.SINK_DB})

Key = tuple[Mode, Pol, Hashable]
LedgerKey = tuple[Mode, Hashable]


@dataclass
class PhotonState:
    """Photon superposition plus the probability already lost to sinks.

    ``ledger`` maps ``(sink, cycle_index)`` to absorbed probability and
    ``tagged_ledger`` records the share of each entry that carried the channel tag.
    Elements share ledger dicts between states, so never mutate them in place.
    """

    amplitudes: dict[Key, complex] = field(default_factory=dict)
    ledger: dict[LedgerKey, float] = field(default_factory=dict)
    tagged_ledger: dict[LedgerKey, float] = field(default_factory=dict)

    @classmethod
    def single(cls, mode: Mode, pol: Pol, amp: complex = 1.0) -> PhotonState:
        return cls({(Mode(mode), Pol(pol), False): complex(amp)})

    def copy(self) -> PhotonState:
        return PhotonState(dict(self.amplitudes), dict(self.ledger), dict(self.tagged_ledger))

    def amp(self, mode: Mode, pol: Pol, tag: bool | None = None) -> complex:
        """Summed amplitude at ``(mode, pol)``, over all tags or only tagged/untagged ones."""
        return sum(
            (a for (m, p, t), a in self.amplitudes.items() if m == mode and p == pol and _tag_matches(t, tag)),
            0j,
        )

    def modes(self) -> set[Mode]:
        return {m for m, _, _ in self.amplitudes}

    def mode_prob(self, mode: Mode, tag: bool | None = None) -> float:
        return math.fsum(
            abs(a) ** 2 for (m, _, t), a in self.amplitudes.items() if m == mode and _tag_matches(t, tag)
        )

    def ledger_total(self, sink: Mode | None = None) -> float:
        return math.fsum(p for (s, _), p in self.ledger.items() if sink is None or s == sink)

    def tagged_loss(self, sink: Mode | None = None) -> float:
        return math.fsum(p for (s, _), p in self.tagged_ledger.items() if sink is None or s == sink)

    def tagged_mass(self) -> float:
        return math.fsum(abs(a) ** 2 for (_, _, t), a in self.amplitudes.items() if t)

    def is_real(self) -> bool:
        return all(a.imag == 0.0 for a in self.amplitudes.values())


def _tag_matches(tag, wanted: bool | None) -> bool:
    return wanted is None or bool(tag) == wanted


def _tags(taken: dict[Key, complex]) -> list:
    return list(dict.fromkeys(t for _, _, t in taken))


def norm_sq(state: PhotonState) -> float:
    return math.fsum(abs(a) ** 2 for a in state.amplitudes.values())


def _check_mode(mode: Mode) -> Mode:
    if type(mode) is Mode and mode not in SINKS:
        return mode
    try:
        mode = Mode(mode)
    except ValueError:
        raise OpticsError(f"no such mode: {mode!r}") from None
    if mode.is_sink:
        raise OpticsError(f"element on sink: {mode.value}")
    return mode


def _put(amps: dict[Key, complex], key: Key, value: complex) -> None:
    if value == 0:
        return
    if not cmath.isfinite(value):
        raise OpticsError(f"non-finite amplitude at {key}")
    if key in amps:
        raise OpticsError(f"mode collision at {key[0].value}/{key[1].value}")
    amps[key] = value


def _take(state: PhotonState, *modes: Mode) -> tuple[dict[Key, complex], dict[Key, complex]]:
    """Split amplitudes into (those on ``modes``, the rest)."""
    taken, rest = {}, {}
    for key, a in state.amplitudes.items():
        (taken if key[0] in modes else rest)[key] = a
    return taken, rest


def cos_sin(theta: float) -> tuple[float, float]:
    if not math.isfinite(theta):
        raise OpticsError(f"non-finite rotation angle {theta!r}")
    k = round(theta / HALF_PI)
    if theta == k * HALF_PI:
        return _QUARTER_TURNS[k % 4]
    return math.cos(theta), math.sin(theta)


def apply_rotation(state: PhotonState, mode: Mode, theta: float) -> PhotonState:
    """Rotate polarization on ``mode``: H -> cH + sV, V -> -sH + cV, for both tags."""
    mode = _check_mode(mode)
    c, s = cos_sin(theta)
    taken, amps = _take(state, mode)
    for tag in _tags(taken):
        h = taken.get((mode, Pol.H, tag), 0j)
        v = taken.get((mode, Pol.V, tag), 0j)
        _put(amps, (mode, Pol.H, tag), c * h - s * v)
        _put(amps, (mode, Pol.V, tag), s * h + c * v)
    return PhotonState(amps, state.ledger, state.tagged_ledger)


def apply_pbs(state: PhotonState, in_mode: Mode, h_out: Mode, v_out: Mode) -> PhotonState:
    """Polarizing beam splitter: H on ``in_mode`` transmits to ``h_out``, V reflects to ``v_out``."""
    in_mode = _check_mode(in_mode)
    h_out, v_out = _check_mode(h_out), _check_mode(v_out)
    if h_out == v_out:
        raise OpticsError("PBS outputs must differ")
    taken, amps = _take(state, in_mode)
    for (_, pol, tag), a in taken.items():
        _put(amps, (h_out if pol is Pol.H else v_out, pol, tag), a)
    return PhotonState(amps, state.ledger, state.tagged_ledger)


def recombine_pbs(state: PhotonState, h_in: Mode, v_in: Mode, out: Mode, other: Mode) -> PhotonState:
    """The same PBS run backwards.

    H arriving on ``h_in`` and V arriving on ``v_in`` merge into ``out``; the
    orthogonal components (V on ``h_in``, H on ``v_in``) leave by ``other``.
    """
    h_in, v_in = _check_mode(h_in), _check_mode(v_in)
    out, other = _check_mode(out), _check_mode(other)
    if h_in == v_in or out == other:
        raise OpticsError("PBS ports must differ")
    taken, amps = _take(state, h_in, v_in)
    for (mode, pol, tag), a in taken.items():
        straight = (mode == h_in) == (pol is Pol.H)
        _put(amps, (out if straight else other, pol, tag), a)
    return PhotonState(amps, state.ledger, state.tagged_ledger)


def apply_bs(state: PhotonState, mode_a: Mode, mode_b: Mode, out_bright: Mode, out_dark: Mode) -> PhotonState:
    """Real symmetric 50/50 splitter: bright = (a + b)/sqrt2, dark = (a - b)/sqrt2."""
    mode_a, mode_b = _check_mode(mode_a), _check_mode(mode_b)
    out_bright, out_dark = _check_mode(out_bright), _check_mode(out_dark)
    if mode_a == mode_b or out_bright == out_dark:
        raise OpticsError("beam splitter ports must differ")
    taken, amps = _take(state, mode_a, mode_b)
    for pol in Pol:
        for tag in _tags(taken):
            a = taken.get((mode_a, pol, tag), 0j)
            b = taken.get((mode_b, pol, tag), 0j)
            _put(amps, (out_bright, pol, tag), (a + b) * INV_SQRT2)
            _put(amps, (out_dark, pol, tag), (a - b) * INV_SQRT2)
    return PhotonState(amps, state.ledger, state.tagged_ledger)


def absorb(state: PhotonState, mode: Mode, sink: Mode, cycle_index: Hashable) -> PhotonState:
    """Move all probability on ``mode`` into ``ledger[sink, cycle_index]``."""
    mode = _check_mode(mode)
    if Mode(sink) not in SINKS:
        raise OpticsError(f"{sink!r} is not a sink")
    taken, amps = _take(state, mode)
    lost = math.fsum(abs(a) ** 2 for a in taken.values())
    lost_tagged = math.fsum(abs(a) ** 2 for (_, _, t), a in taken.items() if t)
    ledger, tagged = dict(state.ledger), dict(state.tagged_ledger)
    key = (Mode(sink), cycle_index)
    if lost or key in ledger:
        ledger[key] = ledger.get(key, 0.0) + lost
        tagged[key] = tagged.get(key, 0.0) + lost_tagged
    return PhotonState(amps, ledger, tagged)


def mark_channel_tag(state: PhotonState, mode: Mode, label: Hashable = True) -> PhotonState:
    """Tag every untagged component on ``mode`` with ``label``; tagged ones keep theirs."""
    if not label:
        raise OpticsError("tag label must be truthy")
    amps: dict[Key, complex] = {}
    for (m, pol, tag), a in state.amplitudes.items():
        _put(amps, (m, pol, label if m == mode and not tag else tag), a)
    return PhotonState(amps, state.ledger, state.tagged_ledger)
