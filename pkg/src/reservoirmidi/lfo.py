"""Low-frequency oscillator built on a one-output network.

Each tick steps the reservoir with the previous sigmoid output fed back,
squashes the readout through a sigmoid into (0, 1), and maps it to a MIDI CC
value. No training, no wall-clock coupling: the tick rate is a session
attribute used by the service layer, not by the math.
"""

from __future__ import annotations

import math
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

DEFAULT_TICK_RATE_HZ = 200.0
DEFAULT_CAPTURE_LEN = 4096
DEFAULT_HISTORY_LEN = 512


def sigmoid(v: float) -> float:
    """Numerically stable logistic function, clamped to open (0, 1).

    The clamp only engages where float64 saturates (|v| > ~745), keeping the
    strict-range invariant without touching representable values.
    """
    if v >= 0:
        out = 1.0 / (1.0 + math.exp(-v))
    else:
        e = math.exp(v)
        out = e / (1.0 + e)
    tiny = np.nextafter(0.0, 1.0)
    return min(max(out, tiny), np.nextafter(1.0, 0.0))


def value_to_cc(value: float) -> int:
    """Map a (0, 1) sample to 0..127, rounding half away from zero."""
    return int(math.floor(127.0 * value + 0.5))


@dataclass(frozen=True)
class PulseInput:
    """Optional rhythmic pulse on the input channel: amplitude for one tick
    every ``period_ticks``, zero otherwise."""

    period_ticks: int
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.period_ticks < 1:
            raise ValueError(f"period_ticks must be >= 1, got {self.period_ticks}")


@dataclass
class LfoSample:
    t: int
    value: float
    cc: int


class LfoSession:
    """One oscillator: a 1-output network, its state, and capture buffers.

    Owned by a single ticking loop; cross-thread readers use the snapshot
    methods on copies handed out by the owner.
    """

    def __init__(
        self,
        net: Network,
        tick_rate_hz: float = DEFAULT_TICK_RATE_HZ,
        capture_len: int = DEFAULT_CAPTURE_LEN,
        history_len: int = DEFAULT_HISTORY_LEN,
        pulse: PulseInput | None = None,
    ) -> None:
        if net.config.output_dim != 1 or net.config.feedback_dim != 1:
            raise ValueError("LFO network needs output_dim == feedback_dim == 1")
        if pulse is not None and net.config.input_dim != 1:
            raise ValueError("pulse input needs a network with input_dim == 1")
        if not tick_rate_hz > 0:
            raise ValueError(f"tick_rate_hz must be > 0, got {tick_rate_hz}")
        self.net = net
        self.state: ReservoirState = reset_state(net)
        # sigmoid of the zero-state readout: the y' a step at t=0 would see
        self.last_y_prime: float = 0.5
        self.tick_rate_hz = float(tick_rate_hz)
        self.pulse = pulse
        self.capture: deque[LfoSample] = deque(maxlen=capture_len)
        self.history: deque[np.ndarray] = deque(maxlen=history_len)

    def set_scales(self, scales: Scales) -> None:
        self.net = self.net.with_scales(scales)

    def reset(self) -> None:
        self.state = reset_state(self.net)
        self.last_y_prime = 0.5

    def tick(self) -> LfoSample:
        return lfo_tick(self)

    def capture_snapshot(self) -> list[LfoSample]:
        return list(self.capture)

    def history_snapshot(self) -> np.ndarray:
        if not self.history:
            return np.empty((0, self.net.config.neurons))
        return np.stack(list(self.history))


def lfo_tick(session: LfoSession) -> LfoSample:
    """Advance the oscillator one tick and append the sample to capture."""
    t = session.state.t
    x = None
    if session.pulse is not None:
        amp = session.pulse.amplitude if t % session.pulse.period_ticks == 0 else 0.0
        x = np.array([amp])
    elif session.net.config.input_dim > 0:
        x = np.zeros(session.net.config.input_dim)
    state, y = step(session.net, session.state, x, np.array([session.last_y_prime]))
    yv = float(y[0])
    if not math.isfinite(yv):
        raise EngineFault("non-finite readout; reset the session")
    value = sigmoid(yv)
    session.state = state
    session.last_y_prime = value
    session.history.append(state.s)
    sample = LfoSample(t=t, value=value, cc=value_to_cc(value))
    session.capture.append(sample)
    return sample


def render_lfo(
    config: NetworkConfig,
    scales: Scales,
    seed: int | None = None,
    steps: int = 1,
    pulse: PulseInput | None = None,
) -> np.ndarray:
    """Offline batch of ticks from a fresh zero state; pure in its arguments.

    ``seed`` overrides ``config.seed`` when given.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if seed is not None:
        config = replace(config, seed=seed)
    net = init_network(config, scales=scales)
    session = LfoSession(net, capture_len=1, history_len=1, pulse=pulse)
    out = np.empty(steps)
    for i in range(steps):
        out[i] = lfo_tick(session).value
    return out


def dominant_period(waveform: np.ndarray) -> int | None:
    """Autocorrelation-peak period of a waveform, in steps.

    Returns None for near-constant signals (variance < 1e-10) and for
    signals whose normalized autocorrelation never exceeds 0.9 at any lag
    in [2, len/2]. Inputs shorter than 16 samples are rejected.
    """
    x = np.asarray(waveform, dtype=float)
    if x.ndim != 1 or x.size < 16:
        raise ValueError("waveform must be a 1-D vector of at least 16 samples")
    n = x.size
    x = x - x.mean()
    if x.var() < 1e-10:
        return None
    # linear autocorrelation via zero-padded FFT; biased normalization
    # tapers long lags so the fundamental beats its multiples
    m = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(x, m)
    acf = np.fft.irfft(spectrum * np.conj(spectrum), m)[: n // 2 + 2]
    acf /= acf[0]
    # candidate periods are local maxima of the acf; a smooth signal
    # correlates highly at tiny lags without peaking there
    lags = np.arange(2, n // 2 + 1)
    if lags.size == 0:
        return None
    peaks = lags[(acf[lags] >= acf[lags - 1]) & (acf[lags] >= acf[lags + 1])]
    if peaks.size == 0:
        return None
    best = int(peaks[np.argmax(acf[peaks])])
    if acf[best] <= 0.9:
        return None
    return best


def write_waveform_csv(waveform: np.ndarray, path) -> None:
    """One value per line, 9 decimal places (9 significant digits for the
    unit-range signals produced here)."""
    with open(path, "w") as f:
        for v in np.asarray(waveform, dtype=float):
            f.write(f"{v:.9f}\n")


def write_waveform_bin(waveform: np.ndarray, path) -> None:
    """Headerless little-endian float64."""
    with open(path, "wb") as f:
        f.write(np.asarray(waveform, dtype="<f8").tobytes())


def search_waveforms(
    max_trials: int = 200,
    steps: int = 2048,
    neurons: int = 60,
    search_seed: int = 0,
    min_peak_to_peak: float = 0.2,
):
    """Random search for settings whose output is non-constant and periodic.

    Desk-scale exploration helper: tries up to ``max_trials`` (seed, scales)
    draws and yields ``(config, scales, waveform, period)`` for every hit,
    where a hit swings more than ``min_peak_to_peak`` and has a dominant
    period. Deterministic for a given ``search_seed``.
    """
    rng = np.random.default_rng(search_seed)
    for _ in range(max_trials):
        config = NetworkConfig(neurons=neurons, seed=int(rng.integers(2**63)))
        scales = Scales(
            input_scale=0.0,
            spectral_radius=float(rng.uniform(0.9, 1.5)),
            feedback_scale=float(rng.uniform(0.0, 1.0)),
            bias_scale=float(rng.uniform(0.0, 0.6)),
            leak_rate=float(rng.uniform(0.02, 0.5)),
        )
        waveform = render_lfo(config, scales, steps=steps)
        if waveform.max() - waveform.min() <= min_peak_to_peak:
            continue
        period = dominant_period(waveform)
        if period is not None:
            yield config, scales, waveform, period
