"""Fixed-weight echo state network core.

Networks are drawn once from a seed and never trained. All live tuning is
multiplicative rescaling of the immutable base matrices, so a (config,
scales) pair always denotes the same effective network. The state update is
the classic leaky-integrator ESN:

    h = tanh(W_in x + W s_prev + W_fb y_fb + b)
    s = (1 - alpha) s_prev + alpha h
    y = W_out s

Note the recurrence reads the leaky state ``s``, not ``h``, and the readout
also taps ``s``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np


class ConfigError(ValueError):
    """Raised for invalid network configuration values."""


class EngineFault(RuntimeError):
    """Raised when a session's numeric state is no longer finite."""


# Substream labels for the per-matrix generators. Each matrix gets its own
# stream so e.g. changing input_dim never perturbs the recurrent draw.
_MATRIX_LABELS = ("w_in", "w", "w_fb", "w_out", "b")


def _substream(seed: int, label: str) -> np.random.Generator:
    """Deterministic generator for one named substream of a 64-bit seed."""
    key = int(seed).to_bytes(8, "little")
    digest = hashlib.blake2b(label.encode("ascii"), digest_size=16, key=key).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable dimensions and seed of a network.

    ``output_dim`` is 1 for LFO use and the maximum key count m for
    arpeggiator use; ``feedback_dim`` matches the fed-back signal (1 or m).
    """

    neurons: int
    input_dim: int = 0
    feedback_dim: int = 1
    output_dim: int = 1
    recurrent_density: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.neurons < 1:
            raise ConfigError(f"neurons must be >= 1, got {self.neurons}")
        if self.input_dim < 0:
            raise ConfigError(f"input_dim must be >= 0, got {self.input_dim}")
        if self.feedback_dim < 1:
            raise ConfigError(f"feedback_dim must be >= 1, got {self.feedback_dim}")
        if self.output_dim < 1:
            raise ConfigError(f"output_dim must be >= 1, got {self.output_dim}")
        if not 0.0 < self.recurrent_density <= 1.0:
            raise ConfigError(
                f"recurrent_density must be in (0, 1], got {self.recurrent_density}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class Scales:
    """Live multipliers applied to the base matrices, plus the leak rate."""

    input_scale: float = 0.0
    spectral_radius: float = 0.95
    feedback_scale: float = 1.0
    bias_scale: float = 0.2
    leak_rate: float = 0.1

    def __post_init__(self) -> None:
        for name in ("input_scale", "spectral_radius", "feedback_scale", "bias_scale"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be a finite value >= 0, got {v}")
        if not np.isfinite(self.leak_rate) or not 0.0 <= self.leak_rate <= 1.0:
            raise ConfigError(f"leak_rate must be in [0, 1], got {self.leak_rate}")


@dataclass(frozen=True)
class Network:
    """A fixed random network plus its live scale factors.

    Base matrices are drawn once from the config seed and frozen
    (write-protected); the effective matrices used by :func:`step` are pure
    functions of (base, scales).
    """

    config: NetworkConfig
    scales: Scales
    base_w_in: np.ndarray
    base_w: np.ndarray
    base_w_fb: np.ndarray
    base_w_out: np.ndarray
    base_b: np.ndarray
    base_spectral_radius: float

    def with_scales(self, scales: Scales) -> "Network":
        """Same base weights under different live scales."""
        return replace(self, scales=scales)


@dataclass
class ReservoirState:
    """Leaky state vector ``s``, last pre-leak activation ``h``, step count."""

    s: np.ndarray
    h: np.ndarray
    t: int = 0


def spectral_radius_estimate(
    w: np.ndarray, iters: int = 200, tol: float = 1e-9, block: int = 16
) -> float:
    """Largest eigenvalue magnitude of ``w`` by block orthogonal iteration.

    A small subspace with Ritz extraction is iterated instead of a single
    vector: random matrices routinely have a complex leading pair or a
    cluster of near-equal magnitudes at the edge, which one vector cannot
    resolve. The first basis column is the all-ones vector; the rest come
    from a fixed-seed generator, so the estimate is deterministic.
    """
    n = w.shape[0]
    if not np.any(w):
        return 0.0
    b = min(block, n)
    basis = np.empty((n, b))
    basis[:, 0] = 1.0
    if b > 1:
        basis[:, 1:] = np.random.default_rng(0x51DE).standard_normal((n, b - 1))
    q, _ = np.linalg.qr(basis)
    rho_prev = 0.0
    rho = 0.0
    for _ in range(iters):
        z = w @ q
        q, _ = np.linalg.qr(z)
        ritz = np.linalg.eigvals(q.T @ (w @ q))
        rho = float(np.max(np.abs(ritz)))
        if abs(rho - rho_prev) <= tol * max(rho, 1.0):
            break
        rho_prev = rho
    return rho


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def init_network(config: NetworkConfig, scales: Scales | None = None) -> Network:
    """Draw a fixed random network from ``config.seed``.

    All matrices are i.i.d. uniform on [-1, 1], each from its own named
    substream. Recurrent entries are independently zeroed with probability
    ``1 - recurrent_density`` (no mask is drawn at density 1).
    """
    n = config.neurons
    w_in = _substream(config.seed, "w_in").uniform(-1.0, 1.0, (n, config.input_dim))
    w_stream = _substream(config.seed, "w")
    w = w_stream.uniform(-1.0, 1.0, (n, n))
    if config.recurrent_density < 1.0:
        w *= w_stream.random((n, n)) < config.recurrent_density
    w_fb = _substream(config.seed, "w_fb").uniform(-1.0, 1.0, (n, config.feedback_dim))
    w_out = _substream(config.seed, "w_out").uniform(-1.0, 1.0, (config.output_dim, n))
    b = _substream(config.seed, "b").uniform(-1.0, 1.0, n)
    return Network(
        config=config,
        scales=scales if scales is not None else Scales(),
        base_w_in=_freeze(w_in),
        base_w=_freeze(w),
        base_w_fb=_freeze(w_fb),
        base_w_out=_freeze(w_out),
        base_b=_freeze(b),
        base_spectral_radius=spectral_radius_estimate(w),
    )


def network_from_matrices(
    w_in: np.ndarray,
    w: np.ndarray,
    w_fb: np.ndarray,
    w_out: np.ndarray,
    b: np.ndarray,
    scales: Scales | None = None,
    seed: int = 0,
) -> Network:
    """Wrap hand-set matrices as a Network (mainly for tests and probes).

    Without an explicit ``scales``, identity scaling is used: unit
    multipliers and a spectral-radius target equal to the measured base
    radius, so the effective matrices equal the given ones.
    """
    w_in = np.ascontiguousarray(w_in, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    w_fb = np.ascontiguousarray(w_fb, dtype=float)
    w_out = np.ascontiguousarray(w_out, dtype=float)
    b = np.ascontiguousarray(b, dtype=float).reshape(-1)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ConfigError(f"recurrent matrix must be square, got {w.shape}")
    config = NetworkConfig(
        neurons=n,
        input_dim=w_in.shape[1],
        feedback_dim=w_fb.shape[1],
        output_dim=w_out.shape[0],
        seed=seed,
    )
    base_rho = spectral_radius_estimate(w)
    if scales is None:
        scales = Scales(
            input_scale=1.0,
            spectral_radius=base_rho,
            feedback_scale=1.0,
            bias_scale=1.0,
            leak_rate=1.0,
        )
    return Network(
        config=config,
        scales=scales,
        base_w_in=_freeze(w_in),
        base_w=_freeze(w),
        base_w_fb=_freeze(w_fb),
        base_w_out=_freeze(w_out),
        base_b=_freeze(b),
        base_spectral_radius=base_rho,
    )


def effective_matrices(
    net: Network,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Scaled matrices ``(W_in, W, W_fb, W_out, b)`` actually used by step.

    Pure in (base, scales); memoized per Network instance since both are
    immutable. The recurrent matrix is the zero matrix when the base radius
    is zero.
    """
    cached = getattr(net, "_eff", None)
    if cached is not None:
        return cached
    s = net.scales
    if net.base_spectral_radius > 0.0:
        w = (s.spectral_radius / net.base_spectral_radius) * net.base_w
    else:
        w = np.zeros_like(net.base_w)
    eff = (
        _freeze(s.input_scale * net.base_w_in),
        _freeze(w),
        _freeze(s.feedback_scale * net.base_w_fb),
        net.base_w_out,
        _freeze(s.bias_scale * net.base_b),
    )
    object.__setattr__(net, "_eff", eff)
    return eff


def reset_state(net: Network) -> ReservoirState:
    """All-zeros state for ``net``."""
    n = net.config.neurons
    return ReservoirState(s=np.zeros(n), h=np.zeros(n), t=0)


def step(
    net: Network,
    state: ReservoirState,
    x: np.ndarray | None = None,
    y_fb: np.ndarray | None = None,
) -> tuple[ReservoirState, np.ndarray]:
    """Advance one tick; returns the new state and the readout ``y``.

    ``x`` may be omitted when ``input_dim`` is 0 and ``y_fb`` defaults to
    zeros. Dimension mismatches and non-finite inputs raise ValueError.
    """
    cfg = net.config
    w_in, w, w_fb, w_out, b = effective_matrices(net)

    if x is None:
        if cfg.input_dim != 0:
            raise ValueError(f"input of dim {cfg.input_dim} required, got none")
        pre = np.zeros(cfg.neurons)
    else:
        x = np.asarray(x, dtype=float)
        if x.shape != (cfg.input_dim,):
            raise ValueError(f"input shape {x.shape} != ({cfg.input_dim},)")
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite input")
        pre = w_in @ x

    if y_fb is None:
        y_fb = np.zeros(cfg.feedback_dim)
    else:
        y_fb = np.asarray(y_fb, dtype=float)
        if y_fb.shape != (cfg.feedback_dim,):
            raise ValueError(f"feedback shape {y_fb.shape} != ({cfg.feedback_dim},)")
        if not np.all(np.isfinite(y_fb)):
            raise ValueError("non-finite feedback")

    if state.s.shape != (cfg.neurons,):
        raise ValueError(f"state length {state.s.shape} != ({cfg.neurons},)")
    if not np.all(np.isfinite(state.s)):
        raise ValueError("non-finite state")

    alpha = net.scales.leak_rate
    h = np.tanh(pre + w @ state.s + w_fb @ y_fb + b)
    s = (1.0 - alpha) * state.s + alpha * h
    y = w_out @ s
    return ReservoirState(s=s, h=h, t=state.t + 1), y


def reseed(net: Network, new_seed: int, new_neurons: int) -> Network:
    """Redraw all weights from a new seed and size; live scales carry over."""
    config = replace(net.config, seed=new_seed, neurons=new_neurons)
    return init_network(config, scales=net.scales)
