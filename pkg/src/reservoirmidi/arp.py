"""Arpeggiator: softmax note selection over the network readout.

Each tick steps the reservoir with the previous choice fed back one-hot,
softmaxes the first n readout rows under the confidence beta, and draws the
next note index from the resulting categorical. With no keys held the
reservoir still steps (zero feedback) so the dynamics stay warm.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .reservoir import (
    EngineFault,
    Network,
    NetworkConfig,
    ReservoirState,
    Scales,
    init_network,
    reset_state,
    step,
)

BETA_CAP = 1e6  # exact-infinity confidence is not representable
DEFAULT_BETA = 2.0
DEFAULT_GATE = 0.8
DEFAULT_VELOCITY = 100
DEFAULT_HISTORY_LEN = 512


class CapacityError(ValueError):
    """More distinct pitches than the session's fixed key capacity m."""


@dataclass
class NoteEvent:
    t: int
    index: int
    pitch: int
    velocity: int
    duration_steps: float


def softmax_confidence(y: np.ndarray, beta: float) -> np.ndarray:
    """Softmax of ``beta * y`` with max-subtraction for stability.

    beta is clamped to [0, 1e6]; the result is strictly positive and sums
    to 1 for any finite input.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y must be a non-empty 1-D vector")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite logits")
    if not beta >= 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    z = min(beta, BETA_CAP) * y
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def one_hot(index: int, m: int) -> np.ndarray:
    """Standard basis vector e_index in m dimensions."""
    if not 0 <= index < m:
        raise ValueError(f"index {index} out of range for length {m}")
    v = np.zeros(m)
    v[index] = 1.0
    return v


def sample_index(p: np.ndarray, rng: np.random.Generator) -> int:
    """Categorical draw by inverse CDF on a single uniform variate."""
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(idx, p.size - 1)


class ArpSession:
    """One arpeggiator: an m-output network, held notes, and the draw RNG.

    m (the key capacity) is fixed by the network's output dimension at
    creation; the note stream is fully determined by (network seed,
    rng_seed, parameter timeline, held-note timeline).
    """

    def __init__(
        self,
        net: Network,
        rng_seed: int = 0,
        beta: float = DEFAULT_BETA,
        gate: float = DEFAULT_GATE,
        velocity: int = DEFAULT_VELOCITY,
        history_len: int = DEFAULT_HISTORY_LEN,
    ) -> None:
        m = net.config.output_dim
        if net.config.feedback_dim != m:
            raise ValueError("arp network needs feedback_dim == output_dim")
        if not beta >= 0:
            raise ValueError(f"beta must be >= 0, got {beta}")
        if not 0.0 < gate <= 1.0:
            raise ValueError(f"gate must be in (0, 1], got {gate}")
        if not 1 <= velocity <= 127:
            raise ValueError(f"velocity must be in [1, 127], got {velocity}")
        self.net = net
        self.state: ReservoirState = reset_state(net)
        self.rng_seed = int(rng_seed)
        self.rng = np.random.default_rng(rng_seed)
        self.beta = float(beta)
        self.gate = float(gate)
        self.velocity = int(velocity)
        self.held_notes: list[int] = []
        self.last_one_hot: np.ndarray = np.zeros(m)
        self.last_y: np.ndarray | None = None
        self.history: deque[np.ndarray] = deque(maxlen=history_len)
        self.history_labels: deque[int | None] = deque(maxlen=history_len)

    @property
    def m(self) -> int:
        return self.net.config.output_dim

    @property
    def n(self) -> int:
        return len(self.held_notes)

    def set_scales(self, scales: Scales) -> None:
        self.net = self.net.with_scales(scales)

    def reset(self) -> None:
        self.state = reset_state(self.net)
        self.last_one_hot = np.zeros(self.m)
        self.last_y = None

    def set_held_notes(self, pitches) -> None:
        set_held_notes(self, pitches)

    def tick(self) -> NoteEvent | None:
        return arp_tick(self)

    def history_snapshot(self) -> tuple[np.ndarray, list[int | None]]:
        if not self.history:
            return np.empty((0, self.net.config.neurons)), []
        return np.stack(list(self.history)), list(self.history_labels)


def set_held_notes(session: ArpSession, pitches) -> None:
    """Replace the held-note set (sorted, deduplicated).

    The reservoir state is kept so dynamics continue across chord changes;
    only a now-invalid one-hot index is cleared.
    """
    uniq = sorted(set(int(p) for p in pitches))
    for p in uniq:
        if not 0 <= p <= 127:
            raise ValueError(f"pitch {p} outside MIDI range 0..127")
    if len(uniq) > session.m:
        raise CapacityError(
            f"{len(uniq)} distinct pitches exceed capacity m={session.m}"
        )
    session.held_notes = uniq
    hot = np.flatnonzero(session.last_one_hot)
    if hot.size and hot[0] >= len(uniq):
        session.last_one_hot = np.zeros(session.m)


def arp_tick(session: ArpSession) -> NoteEvent | None:
    """Advance one tick; returns the chosen note, or None with no keys held."""
    t = session.state.t
    state, y = step(session.net, session.state, None, session.last_one_hot)
    if not np.all(np.isfinite(y)):
        raise EngineFault("non-finite readout; reset the session")
    session.state = state
    session.last_y = y
    n = session.n
    if n == 0:
        session.history.append(state.s)
        session.history_labels.append(None)
        return None
    p = softmax_confidence(y[:n], session.beta)
    theta = sample_index(p, session.rng)
    session.last_one_hot = one_hot(theta, session.m)
    session.history.append(state.s)
    session.history_labels.append(theta)
    return NoteEvent(
        t=t,
        index=theta,
        pitch=session.held_notes[theta],
        velocity=session.velocity,
        duration_steps=session.gate,
    )


def render_arp(
    config: NetworkConfig,
    scales: Scales,
    seed: int | None = None,
    rng_seed: int = 0,
    pitches=(),
    beta: float = DEFAULT_BETA,
    steps: int = 1,
    gate: float = DEFAULT_GATE,
    velocity: int = DEFAULT_VELOCITY,
) -> list[NoteEvent]:
    """Offline arpeggio from a fresh session; pure in its arguments."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if seed is not None:
        config = replace(config, seed=seed)
    net = init_network(config, scales=scales)
    session = ArpSession(net, rng_seed=rng_seed, beta=beta, gate=gate, velocity=velocity, history_len=1)
    session.set_held_notes(pitches)
    events = []
    for _ in range(steps):
        ev = session.tick()
        if ev is not None:
            events.append(ev)
    return events


def events_to_jsonl(events: list[NoteEvent]) -> str:
    """One JSON object per line: t, index, pitch, velocity, duration_steps."""
    lines = []
    for ev in events:
        lines.append(
            json.dumps(
                {
                    "t": ev.t,
                    "index": ev.index,
                    "pitch": ev.pitch,
                    "velocity": ev.velocity,
                    "duration_steps": ev.duration_steps,
                }
            )
        )
    return "".join(line + "\n" for line in lines)


def note_counts(events: list[NoteEvent]) -> dict[int, int]:
    """Events per pitch, ascending by pitch."""
    counts: dict[int, int] = {}
    for ev in events:
        counts[ev.pitch] = counts.get(ev.pitch, 0) + 1
    return dict(sorted(counts.items()))
