"""Session lifecycle and live steering, independent of any transport.

A :class:`SessionController` owns one engine session (LFO or arpeggiator)
and is the sole mutator of its state. Control messages are plain dicts
matching the wire schema; they are validated and applied strictly between
ticks, each answered by a ``param_echo`` (or ``error``) frame. Every applied
mutation is logged against the tick count, which makes any live run exactly
replayable offline: same seeds + same message timeline = same samples.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Any, Callable

import numpy as np

from . import viz
from .arp import ArpSession, CapacityError
from .lfo import DEFAULT_TICK_RATE_HZ, LfoSession
from .reservoir import ConfigError, EngineFault, NetworkConfig, Scales, init_network

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_PORT = 7421
LFO_BATCH_MAX = 64
VIZ_MAX_HZ = 5.0
VIZ_HISTORY_ROWS = 256

PARAM_NAMES = (
    "input_scale",
    "spectral_radius",
    "feedback_scale",
    "bias_scale",
    "leak_rate",
    "beta",
    "tick_rate_hz",
    "gate",
)
SCALE_PARAMS = PARAM_NAMES[:5]
MODES = ("lfo", "arp")
TELEMETRY_KINDS = ("lfo_frame", "arp_event", "viz_frame", "param_echo", "error")

# message kinds that change engine state and therefore enter the replay log
MUTATING_KINDS = ("set_param", "set_held_notes", "reset_state", "reseed", "set_mode")


def _param_range_ok(name: str, value: float) -> bool:
    if name == "leak_rate":
        return 0.0 <= value <= 1.0
    if name == "beta":
        return 0.0 <= value <= 1e6
    if name == "tick_rate_hz":
        return value > 0.0
    if name == "gate":
        return 0.0 < value <= 1.0
    return value >= 0.0


class SessionController:
    """Owns one engine session; applies control messages between ticks."""

    def __init__(
        self,
        seed: int = 0,
        neurons: int = 100,
        density: float = 1.0,
        max_keys: int = 8,
        rng_seed: int = 0,
        scales: Scales | None = None,
        beta: float = 2.0,
        tick_rate_hz: float = DEFAULT_TICK_RATE_HZ,
        gate: float = 0.8,
        mode: str = "lfo",
        sink: Callable[[dict], None] | None = None,
    ) -> None:
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        self.seed = int(seed)
        self.neurons = int(neurons)
        self.density = float(density)
        self.max_keys = int(max_keys)
        self.rng_seed = int(rng_seed)
        self.scales = scales if scales is not None else Scales()
        self.beta = float(beta)
        self.tick_rate_hz = float(tick_rate_hz)
        self.gate = float(gate)
        self.mode = mode
        self.held_notes: list[int] = []
        self.tick_count = 0
        self.sink = sink  # telemetry callback; None buffers into .outbox
        self.outbox: list[dict] = []
        self.subscriptions: set[str] = set(TELEMETRY_KINDS)
        self._seq = 0
        self._lfo_batch: list = []
        self._ticks_since_viz = 0
        self.session: LfoSession | ArpSession = self._build_session()
        self.applied_log: list[dict] = []
        self._init_snapshot = self.initial_snapshot()

    # -- construction ------------------------------------------------------

    def _network_config(self) -> NetworkConfig:
        if self.mode == "lfo":
            out_dim = fb_dim = 1
        else:
            out_dim = fb_dim = self.max_keys
        return NetworkConfig(
            neurons=self.neurons,
            input_dim=0,
            feedback_dim=fb_dim,
            output_dim=out_dim,
            recurrent_density=self.density,
            seed=self.seed,
        )

    def _build_session(self) -> LfoSession | ArpSession:
        net = init_network(self._network_config(), scales=self.scales)
        if self.mode == "lfo":
            return LfoSession(net, tick_rate_hz=self.tick_rate_hz)
        session = ArpSession(
            net, rng_seed=self.rng_seed, beta=self.beta, gate=self.gate
        )
        session.set_held_notes(self.held_notes)
        return session

    def initial_snapshot(self) -> dict:
        """Everything needed to reconstruct this controller at tick 0."""
        return {
            "seed": self.seed,
            "neurons": self.neurons,
            "density": self.density,
            "max_keys": self.max_keys,
            "rng_seed": self.rng_seed,
            "mode": self.mode,
            "params": self._params(),
            "held_notes": list(self.held_notes),
        }

    # -- frames ------------------------------------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _frame(self, type_: str, **fields) -> dict:
        frame = {"type": type_, "schema_version": SCHEMA_VERSION, "seq": self._next_seq()}
        frame.update(fields)
        return frame

    def _params(self) -> dict:
        return {
            "input_scale": self.scales.input_scale,
            "spectral_radius": self.scales.spectral_radius,
            "feedback_scale": self.scales.feedback_scale,
            "bias_scale": self.scales.bias_scale,
            "leak_rate": self.scales.leak_rate,
            "beta": self.beta,
            "tick_rate_hz": self.tick_rate_hz,
            "gate": self.gate,
        }

    def _param_echo(self, in_reply_to: int | None = None) -> dict:
        return self._frame(
            "param_echo",
            in_reply_to=in_reply_to,
            tick=self.tick_count,
            mode=self.mode,
            params=self._params(),
            held_notes=list(self.held_notes),
            seed=self.seed,
            neurons=self.neurons,
            density=self.density,
            max_keys=self.max_keys,
            rng_seed=self.rng_seed,
        )

    def _error(self, code: str, detail: str, in_reply_to: int | None = None) -> dict:
        return self._frame("error", code=code, detail=detail, in_reply_to=in_reply_to)

    def snapshot_frame(self, in_reply_to: int | None = None) -> dict:
        """Current full parameter set as a param_echo frame (not emitted)."""
        return self._param_echo(in_reply_to=in_reply_to)

    def error_frame(self, code: str, detail: str, in_reply_to: int | None = None) -> dict:
        """A sequenced error frame (not emitted); for transport-level rejections."""
        return self._error(code, detail, in_reply_to=in_reply_to)

    def _emit(self, frame: dict) -> None:
        if frame["type"] not in self.subscriptions:
            return
        if self.sink is not None:
            self.sink(frame)
        else:
            self.outbox.append(frame)

    # -- message handling (called between ticks only) -----------------------

    def handle_message(self, msg: dict) -> dict:
        """Validate and apply one control message; returns the ack frame.

        Rejected messages leave the session untouched. The ack (param_echo
        on success, error otherwise) is also emitted to the telemetry sink.
        """
        reply_to = msg.get("seq")
        try:
            frame = self._apply(msg)
        except (ConfigError, CapacityError, ValueError) as exc:
            frame = self._error("invalid_value", str(exc), in_reply_to=reply_to)
        self._emit(frame)
        return frame

    def _apply(self, msg: dict) -> dict:
        if not isinstance(msg, dict) or "type" not in msg:
            return self._error("bad_message", "message must be an object with a type")
        kind = msg["type"]
        reply_to = msg.get("seq")

        if kind == "set_param":
            name = msg.get("name")
            if name not in PARAM_NAMES:
                return self._error("unknown_param", f"unknown parameter {name!r}", reply_to)
            try:
                value = float(msg.get("value"))
            except (TypeError, ValueError):
                return self._error("bad_message", "value must be a number", reply_to)
            if not np.isfinite(value) or not _param_range_ok(name, value):
                return self._error("out_of_range", f"{name}={value} out of range", reply_to)
            self._set_param(name, value)
        elif kind == "set_held_notes":
            pitches = msg.get("pitches", [])
            if not isinstance(pitches, (list, tuple)):
                return self._error("bad_message", "pitches must be a list", reply_to)
            try:
                uniq = sorted(set(int(p) for p in pitches))
            except (TypeError, ValueError):
                return self._error("bad_message", "pitches must be integers", reply_to)
            if any(not 0 <= p <= 127 for p in uniq):
                return self._error("out_of_range", "pitch outside 0..127", reply_to)
            if len(uniq) > self.max_keys:
                return self._error(
                    "capacity", f"{len(uniq)} pitches exceed m={self.max_keys}", reply_to
                )
            self.held_notes = uniq
            if isinstance(self.session, ArpSession):
                self.session.set_held_notes(uniq)
        elif kind == "reset_state":
            # the sample clock restarts at 0, so close out the pending batch
            self.flush_lfo_batch()
            self.session.reset()
        elif kind == "reseed":
            try:
                new_seed = int(msg.get("seed"))
                new_neurons = int(msg.get("neurons"))
            except (TypeError, ValueError):
                return self._error("bad_message", "reseed needs seed and neurons", reply_to)
            if new_neurons < 1:
                return self._error("invalid_config", "neurons must be >= 1", reply_to)
            if not 0 <= new_seed < 2**64:
                return self._error("invalid_config", "seed must be a 64-bit unsigned", reply_to)
            self.flush_lfo_batch()
            self.seed = new_seed
            self.neurons = new_neurons
            self.session = self._build_session()
        elif kind == "set_mode":
            mode = msg.get("mode")
            if mode not in MODES:
                return self._error("bad_message", f"mode must be one of {MODES}", reply_to)
            if mode != self.mode:
                self.flush_lfo_batch()
                self.mode = mode
                self.session = self._build_session()
        elif kind == "subscribe":
            kinds = msg.get("kinds", list(TELEMETRY_KINDS))
            if not isinstance(kinds, (list, tuple)) or any(
                k not in TELEMETRY_KINDS for k in kinds
            ):
                return self._error("bad_message", f"kinds must be from {TELEMETRY_KINDS}", reply_to)
            self.subscriptions = set(kinds) | {"param_echo", "error"}
        elif kind == "snapshot_request":
            pass  # echo below is the snapshot
        else:
            return self._error("bad_message", f"unknown message type {kind!r}", reply_to)

        if kind in MUTATING_KINDS:
            self.applied_log.append({"tick": self.tick_count, "msg": _log_copy(msg)})
        return self._param_echo(in_reply_to=reply_to)

    def _set_param(self, name: str, value: float) -> None:
        if name in SCALE_PARAMS:
            self.scales = replace(self.scales, **{name: value})
            self.session.set_scales(self.scales)
        elif name == "beta":
            self.beta = value
            if isinstance(self.session, ArpSession):
                self.session.beta = value
        elif name == "tick_rate_hz":
            self.tick_rate_hz = value
            if isinstance(self.session, LfoSession):
                self.session.tick_rate_hz = value
        elif name == "gate":
            self.gate = value
            if isinstance(self.session, ArpSession):
                self.session.gate = value

    # -- ticking -------------------------------------------------------------

    def tick(self, count: int = 1) -> None:
        """Advance the engine ``count`` ticks, emitting telemetry frames.

        An engine fault produces an error frame and an automatic state
        reset; the loop keeps running.
        """
        for _ in range(count):
            try:
                self._tick_once()
            except EngineFault as exc:
                self._emit(self._error("engine_fault", str(exc)))
                self.session.reset()
            self.tick_count += 1
            if self._viz_due():
                self._emit_viz()

    def _tick_once(self) -> None:
        if isinstance(self.session, LfoSession):
            sample = self.session.tick()
            self._lfo_batch.append(sample)
            if len(self._lfo_batch) >= LFO_BATCH_MAX:
                self.flush_lfo_batch()
        else:
            event = self.session.tick()
            if event is not None:
                self._emit(
                    self._frame(
                        "arp_event",
                        t=event.t,
                        index=event.index,
                        pitch=event.pitch,
                        velocity=event.velocity,
                        duration_steps=event.duration_steps,
                    )
                )

    def flush_lfo_batch(self) -> None:
        """Emit buffered LFO samples as one frame (≤ 64 values)."""
        if not self._lfo_batch:
            return
        batch = self._lfo_batch
        self._lfo_batch = []
        self._emit(
            self._frame(
                "lfo_frame",
                t0=batch[0].t,
                values=[s.value for s in batch],
            )
        )

    # -- viz -----------------------------------------------------------------

    def _viz_due(self) -> bool:
        if "viz_frame" not in self.subscriptions:
            return False
        every = max(1, round(self.tick_rate_hz / VIZ_MAX_HZ))
        self._ticks_since_viz += 1
        if self._ticks_since_viz >= every:
            self._ticks_since_viz = 0
            return True
        return False

    def _emit_viz(self) -> None:
        self._emit(self.viz_frame())

    def viz_frame(self) -> dict:
        """Current PCA / activity / connectivity views as one frame."""
        session = self.session
        if isinstance(session, ArpSession):
            rows, labels = session.history_snapshot()
        else:
            rows, labels = session.history_snapshot(), None
        rows = rows[-VIZ_HISTORY_ROWS:]
        if labels is not None:
            labels = labels[-VIZ_HISTORY_ROWS:]
        pca = None
        if rows.shape[0] >= 2:
            k = min(viz.PCA_DEFAULT_K, min(rows.shape))
            pca = viz.pca_to_jsonable(viz.pca_project(viz.StateHistory(rows, labels), k), labels)
        graph = viz.connectivity_graph(
            session.net, session.state, viz.default_edge_threshold(session.net)
        )
        return self._frame(
            "viz_frame",
            tick=self.tick_count,
            pca=pca,
            activity=viz.activity_frame(session.state).tolist(),
            graph=viz.graph_to_jsonable(graph),
        )

    # -- replay ----------------------------------------------------------------

    def session_log(self) -> dict:
        """Replayable record: initial snapshot + applied message timeline."""
        return {
            "init": self._init_snapshot,
            "events": [dict(e) for e in self.applied_log],
            "total_ticks": self.tick_count,
        }


def _log_copy(msg: dict) -> dict:
    out = {}
    for k, v in msg.items():
        out[k] = list(v) if isinstance(v, (list, tuple)) else v
    return out


def replay_session_log(log: dict) -> dict:
    """Re-run a logged session offline and collect what it streamed.

    Returns {"lfo_values": [...], "arp_events": [...]} gathered from the
    telemetry frames a fresh controller produces when the logged messages
    are re-applied at their recorded tick boundaries.
    """
    init = log["init"]
    frames: list[dict] = []
    ctrl = SessionController(
        seed=init["seed"],
        neurons=init["neurons"],
        density=init["density"],
        max_keys=init["max_keys"],
        rng_seed=init["rng_seed"],
        mode=init["mode"],
        scales=Scales(
            input_scale=init["params"]["input_scale"],
            spectral_radius=init["params"]["spectral_radius"],
            feedback_scale=init["params"]["feedback_scale"],
            bias_scale=init["params"]["bias_scale"],
            leak_rate=init["params"]["leak_rate"],
        ),
        beta=init["params"]["beta"],
        tick_rate_hz=init["params"]["tick_rate_hz"],
        gate=init["params"]["gate"],
        sink=frames.append,
    )
    if init["held_notes"]:
        ctrl.handle_message({"type": "set_held_notes", "pitches": init["held_notes"]})
    pending = sorted(log["events"], key=lambda e: e["tick"])
    i = 0
    while ctrl.tick_count < log["total_ticks"]:
        while i < len(pending) and pending[i]["tick"] == ctrl.tick_count:
            ctrl.handle_message(pending[i]["msg"])
            i += 1
        ctrl.tick()
    while i < len(pending):
        ctrl.handle_message(pending[i]["msg"])
        i += 1
    ctrl.flush_lfo_batch()
    return collect_stream(frames)


def collect_stream(frames: list[dict]) -> dict:
    """Flatten telemetry frames into comparable sample/event streams."""
    lfo_values: list[float] = []
    arp_events: list[tuple] = []
    for f in frames:
        if f["type"] == "lfo_frame":
            lfo_values.extend(f["values"])
        elif f["type"] == "arp_event":
            arp_events.append((f["t"], f["index"], f["pitch"]))
    return {"lfo_values": lfo_values, "arp_events": arp_events}
