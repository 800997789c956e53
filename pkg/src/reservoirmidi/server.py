"""WebSocket transport for the control protocol.

One JSON object per text frame; the schema ships in docs/protocol.md and
docs/protocol.schema.json. The asyncio event loop is the concurrency story:
`SessionController.tick` is synchronous, so message handlers only ever run
between ticks, and the controller stays the sole mutator of engine state.

The first connected client holds the controller role (released on
disconnect); everyone else observes. In manual-clock mode there is no timer
task and clients advance time with ``step`` messages.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from .service import (
    DEFAULT_PORT,
    MUTATING_KINDS,
    TELEMETRY_KINDS,
    SessionController,
)

log = logging.getLogger(__name__)

LFO_FLUSH_INTERVAL_S = 0.1


class _Client:
    """Per-connection send queue and telemetry subscription set."""

    __slots__ = ("kinds", "queue")

    def __init__(self) -> None:
        self.kinds = set(TELEMETRY_KINDS)
        self.queue: asyncio.Queue = asyncio.Queue()


class ControlServer:
    """Serves one engine session to any number of WebSocket clients."""

    def __init__(
        self,
        controller: SessionController,
        host: str = "127.0.0.1",
        port: int = DEFAULT_PORT,
        manual_clock: bool = False,
    ) -> None:
        self.controller = controller
        self.host = host
        self.port = port
        self.manual_clock = manual_clock
        self._clients: dict[object, _Client] = {}
        self._controller_client: object | None = None
        self._stop = asyncio.Event()
        self.bound_port: int | None = None
        controller.sink = self._broadcast

    # -- lifecycle -----------------------------------------------------------

    async def run(self) -> None:
        """Serve until :meth:`stop` is called."""
        async with serve(self._handler, self.host, self.port) as server:
            self.bound_port = server.sockets[0].getsockname()[1]
            log.info("listening on ws://%s:%d", self.host, self.bound_port)
            ticker = None
            if not self.manual_clock:
                ticker = asyncio.ensure_future(self._tick_loop())
            try:
                await self._stop.wait()
            finally:
                if ticker is not None:
                    ticker.cancel()

    def stop(self) -> None:
        self._stop.set()

    async def _tick_loop(self) -> None:
        next_t = time.perf_counter()
        last_flush = next_t
        while True:
            period = 1.0 / self.controller.tick_rate_hz
            next_t += period
            delay = next_t - time.perf_counter()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_t = time.perf_counter()  # fell behind; no catch-up spiral
            self.controller.tick()
            now = time.perf_counter()
            if now - last_flush >= LFO_FLUSH_INTERVAL_S:
                self.controller.flush_lfo_batch()
                last_flush = now

    # -- fan-out ---------------------------------------------------------------

    def _broadcast(self, frame: dict) -> None:
        text = json.dumps(frame)
        kind = frame["type"]
        for client in list(self._clients.values()):
            if kind in client.kinds:
                client.queue.put_nowait(text)

    # -- per-connection ---------------------------------------------------------

    async def _handler(self, ws) -> None:
        client = _Client()
        self._clients[ws] = client
        # one writer task per client keeps outbound frames in emission order
        writer = asyncio.ensure_future(self._drain(ws, client.queue))
        if self._controller_client is None:
            self._controller_client = ws
        role = "controller" if self._controller_client is ws else "observer"
        log.info("client connected as %s", role)
        try:
            async for raw in ws:
                reply = self._dispatch(ws, raw)
                if reply is not None:
                    client.queue.put_nowait(json.dumps(reply))
        finally:
            self._clients.pop(ws, None)
            if self._controller_client is ws:
                self._controller_client = None
            writer.cancel()
            log.info("client disconnected")

    async def _drain(self, ws, queue: asyncio.Queue) -> None:
        try:
            while True:
                await ws.send(await queue.get())
        except ConnectionClosed:
            pass

    def _dispatch(self, ws, raw) -> dict | None:
        ctrl = self.controller
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return self._local_error(ctrl, "bad_message", "frame is not valid JSON")
        if not isinstance(msg, dict):
            return self._local_error(ctrl, "bad_message", "frame must be a JSON object")
        kind = msg.get("type")
        reply_to = msg.get("seq")

        if kind == "subscribe":
            kinds = msg.get("kinds", list(TELEMETRY_KINDS))
            if not isinstance(kinds, list) or any(k not in TELEMETRY_KINDS for k in kinds):
                return self._local_error(
                    ctrl, "bad_message", f"kinds must be from {TELEMETRY_KINDS}", reply_to
                )
            self._clients[ws].kinds = set(kinds) | {"param_echo", "error"}
            return ctrl.snapshot_frame(in_reply_to=reply_to)

        if kind == "snapshot_request":
            return ctrl.snapshot_frame(in_reply_to=reply_to)

        if kind == "step":
            if self._controller_client is not ws:
                return self._local_error(ctrl, "not_controller", "observer cannot step", reply_to)
            if not self.manual_clock:
                return self._local_error(
                    ctrl, "not_manual", "step requires manual-clock mode", reply_to
                )
            count = msg.get("count", 1)
            if not isinstance(count, int) or not 1 <= count <= 100000:
                return self._local_error(ctrl, "bad_message", "count must be in 1..100000", reply_to)
            ctrl.tick(count)
            ctrl.flush_lfo_batch()
            return ctrl.snapshot_frame(in_reply_to=reply_to)

        if kind in MUTATING_KINDS and self._controller_client is not ws:
            return self._local_error(
                ctrl, "not_controller", "only the controller client may change the session", reply_to
            )
        # ack frames are broadcast by the controller's sink; the requester
        # recognizes its own by in_reply_to, so nothing extra to send here
        ctrl.handle_message(msg)
        return None

    def _local_error(self, ctrl, code: str, detail: str, reply_to=None) -> dict:
        return ctrl.error_frame(code, detail, in_reply_to=reply_to)


def run_server(
    controller: SessionController,
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    manual_clock: bool = False,
) -> None:
    """Blocking entry point used by the CLI's serve subcommand."""
    server = ControlServer(controller, host=host, port=port, manual_clock=manual_clock)
    try:
        asyncio.run(server.run())
    except KeyboardInterrupt:
        log.info("interrupted; shutting down")
