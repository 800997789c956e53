"""Live transport tests: real WebSocket connections on an ephemeral port."""

import asyncio
import json

import websockets

from reservoirmidi.server import ControlServer
from reservoirmidi.service import SCHEMA_VERSION, SessionController


def run(coro):
    return asyncio.run(asyncio.wait_for(coro, timeout=20))


async def _start(manual_clock=True, **ctrl_kw):
    ctrl_kw.setdefault("neurons", 30)
    ctrl = SessionController(**ctrl_kw)
    server = ControlServer(ctrl, port=0, manual_clock=manual_clock)
    task = asyncio.ensure_future(server.run())
    while server.bound_port is None:
        await asyncio.sleep(0.005)
    return server, task, f"ws://127.0.0.1:{server.bound_port}"


async def _stop(server, task):
    server.stop()
    await task


async def _send(ws, **msg):
    await ws.send(json.dumps(msg))


async def _recv(ws):
    return json.loads(await ws.recv())


def test_snapshot_request_returns_full_state():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as ws:
            await _send(ws, type="snapshot_request", seq=1)
            frame = await _recv(ws)
            assert frame["type"] == "param_echo"
            assert frame["in_reply_to"] == 1
            assert frame["schema_version"] == SCHEMA_VERSION
            assert set(frame["params"]) == {
                "input_scale",
                "spectral_radius",
                "feedback_scale",
                "bias_scale",
                "leak_rate",
                "beta",
                "tick_rate_hz",
                "gate",
            }
        await _stop(server, task)

    run(main())


def test_set_param_round_trip():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as ws:
            await _send(ws, type="set_param", name="spectral_radius", value=1.25, seq=7)
            echo = await _recv(ws)
            assert echo["type"] == "param_echo"
            assert echo["params"]["spectral_radius"] == 1.25
            assert echo["in_reply_to"] == 7
        await _stop(server, task)

    run(main())


def test_telemetry_precedes_step_ack():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as ws:
            await _send(ws, type="step", count=70, seq=2)
            kinds = []
            while True:
                frame = await _recv(ws)
                kinds.append(frame["type"])
                if frame["type"] == "param_echo":
                    assert frame["tick"] == 70
                    break
            assert "lfo_frame" in kinds
            assert kinds[-1] == "param_echo"  # FIFO: batched samples, then ack
        await _stop(server, task)

    run(main())


def test_observer_cannot_mutate_or_step():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as c1, websockets.connect(uri) as c2:
            await _send(c2, type="set_param", name="beta", value=3.0, seq=1)
            err = await _recv(c2)
            assert (err["type"], err["code"]) == ("error", "not_controller")
            await _send(c2, type="step", seq=2)
            err = await _recv(c2)
            assert (err["type"], err["code"]) == ("error", "not_controller")
            # the controller can
            await _send(c1, type="set_param", name="beta", value=3.0, seq=3)
            echo = await _recv(c1)
            assert echo["type"] == "param_echo"
        await _stop(server, task)

    run(main())


def test_param_echo_broadcasts_to_observers():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as c1, websockets.connect(uri) as c2:
            await _send(c1, type="set_param", name="leak_rate", value=0.5, seq=1)
            e1, e2 = await _recv(c1), await _recv(c2)
            assert e1["params"]["leak_rate"] == e2["params"]["leak_rate"] == 0.5
        await _stop(server, task)

    run(main())


def test_controller_role_released_on_disconnect():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri):
            pass  # first controller leaves
        async with websockets.connect(uri) as ws:
            await _send(ws, type="set_param", name="beta", value=1.0, seq=1)
            echo = await _recv(ws)
            assert echo["type"] == "param_echo"
        await _stop(server, task)

    run(main())


def test_session_survives_reconnect():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as ws:
            await _send(ws, type="set_param", name="leak_rate", value=0.7, seq=1)
            await _recv(ws)
            await _send(ws, type="step", count=10, seq=2)
            while (await _recv(ws))["type"] != "param_echo":
                pass
        async with websockets.connect(uri) as ws:
            await _send(ws, type="snapshot_request", seq=3)
            snap = await _recv(ws)
            assert snap["params"]["leak_rate"] == 0.7
            assert snap["tick"] == 10
        await _stop(server, task)

    run(main())


def test_step_requires_manual_clock():
    async def main():
        server, task, uri = await _start(manual_clock=False)
        async with websockets.connect(uri) as ws:
            await _send(ws, type="step", seq=1)
            while True:
                frame = await _recv(ws)
                if frame["type"] == "error":
                    assert frame["code"] == "not_manual"
                    break
        await _stop(server, task)

    run(main())


def test_wall_clock_loop_streams_lfo_frames():
    async def main():
        server, task, uri = await _start(manual_clock=False, tick_rate_hz=500.0)
        async with websockets.connect(uri) as ws:
            frame = await _recv(ws)
            while frame["type"] != "lfo_frame":
                frame = await _recv(ws)
            assert 0 < len(frame["values"]) <= 64
            assert all(0.0 < v < 1.0 for v in frame["values"])
        await _stop(server, task)

    run(main())


def test_malformed_json_rejected():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as ws:
            await ws.send("{nope")
            err = await _recv(ws)
            assert (err["type"], err["code"]) == ("error", "bad_message")
            await ws.send(json.dumps([1, 2, 3]))
            err = await _recv(ws)
            assert err["code"] == "bad_message"
        await _stop(server, task)

    run(main())


def test_step_count_validated():
    async def main():
        server, task, uri = await _start()
        async with websockets.connect(uri) as ws:
            for count in (0, -5, "many", 100001):
                await _send(ws, type="step", count=count, seq=1)
                err = await _recv(ws)
                assert err["code"] == "bad_message"
        await _stop(server, task)

    run(main())


def test_subscribe_narrows_telemetry():
    async def main():
        server, task, uri = await _start(mode="arp")
        async with websockets.connect(uri) as ws:
            await _send(ws, type="set_held_notes", pitches=[60], seq=1)
            await _recv(ws)
            await _send(ws, type="subscribe", kinds=["arp_event"], seq=2)
            ack = await _recv(ws)
            assert ack["type"] == "param_echo"
            await _send(ws, type="step", count=50, seq=3)
            kinds = []
            while True:
                frame = await _recv(ws)
                kinds.append(frame["type"])
                if frame["type"] == "param_echo":
                    break
            assert set(kinds) <= {"arp_event", "param_echo"}
            assert kinds.count("arp_event") == 50
            await _send(ws, type="subscribe", kinds=["nope"], seq=4)
            err = await _recv(ws)
            assert err["code"] == "bad_message"
        await _stop(server, task)

    run(main())


def test_live_session_log_replays_offline():
    async def main():
        server, task, uri = await _start(seed=19, neurons=40)
        frames = []
        async with websockets.connect(uri) as ws:
            await _send(ws, type="step", count=30, seq=1)
            await _send(ws, type="set_param", name="spectral_radius", value=1.3, seq=2)
            await _send(ws, type="step", count=40, seq=3)
            acks = 0
            while acks < 3:
                frame = await _recv(ws)
                frames.append(frame)
                if frame["type"] == "param_echo":
                    acks += 1
        log = server.controller.session_log()
        await _stop(server, task)
        return frames, log

    frames, log = run(main())
    from reservoirmidi.service import collect_stream, replay_session_log

    live = collect_stream(frames)
    replayed = replay_session_log(log)
    assert replayed["lfo_values"] == live["lfo_values"]


def test_viz_frames_reach_subscribers():
    async def main():
        server, task, uri = await _start(tick_rate_hz=10.0)
        async with websockets.connect(uri) as ws:
            await _send(ws, type="step", count=10, seq=1)
            got_viz = False
            while True:
                frame = await _recv(ws)
                if frame["type"] == "viz_frame":
                    got_viz = True
                    assert len(frame["activity"]) == 30
                if frame["type"] == "param_echo":
                    break
            assert got_viz
        await _stop(server, task)

    run(main())
