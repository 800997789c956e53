"""Steer a running session over WebSocket, then replay its log offline.

Everything the UI can do goes through one socket: read the state, turn
the dials, hold a chord, advance time. The service logs every applied
change, so the whole take can be reproduced afterwards without the
server, frame for frame.

This demo runs the server with a manual clock on an ephemeral port and
acts as its own client.

Run:  python3 demos/live_control.py
"""

import asyncio
import json

import websockets

from reservoirmidi.server import ControlServer
from reservoirmidi.service import SessionController, collect_stream, replay_session_log


async def send(ws, **msg):
    await ws.send(json.dumps(msg))


async def drive(uri):
    frames = []
    async with websockets.connect(uri) as ws:

        async def collect_until_reply(seq):
            while True:
                frame = json.loads(await ws.recv())
                frames.append(frame)
                if frame.get("in_reply_to") == seq:
                    return frame

        print("1. First connection takes the controls; ask for a snapshot.")
        await send(ws, type="snapshot_request", seq=1)
        snap = await collect_until_reply(1)
        print(f"   mode={snap['mode']} tick={snap['tick']} "
              f"rho={snap['params']['spectral_radius']}")

        print("\n2. Turn dials and hold a chord; every change is echoed back.")
        await send(ws, type="set_param", name="spectral_radius", value=1.25, seq=2)
        await collect_until_reply(2)
        await send(ws, type="set_param", name="feedback_scale", value=1.2, seq=3)
        await collect_until_reply(3)
        await send(ws, type="set_mode", mode="arp", seq=4)
        await collect_until_reply(4)
        await send(ws, type="set_held_notes", pitches=[60, 64, 67], seq=5)
        echo = await collect_until_reply(5)
        print(f"   held notes now {echo['held_notes']}")

        print("\n3. Advance time explicitly; telemetry lands before the ack.")
        await send(ws, type="step", count=32, seq=6)
        await collect_until_reply(6)
        events = [f for f in frames if f["type"] == "arp_event"]
        print(f"   32 ticks produced {len(events)} note events; first five "
              f"pitches {[e['pitch'] for e in events[:5]]}")

        print("\n4. Mid-run reconfiguration: back to the LFO and step again.")
        await send(ws, type="set_mode", mode="lfo", seq=7)
        await collect_until_reply(7)
        await send(ws, type="step", count=96, seq=8)
        await collect_until_reply(8)
        values = [v for f in frames if f["type"] == "lfo_frame"
                  for v in f["values"]]
        print(f"   96 ticks produced {len(values)} samples, "
              f"last={values[-1]:.6f}")

        print("\n5. Observers see telemetry but cannot touch the dials.")
        async with websockets.connect(uri) as observer:
            await send(observer, type="set_param", name="beta",
                       value=5.0, seq=1)
            refusal = json.loads(await observer.recv())
            print(f"   second client got: {refusal['type']} "
                  f"code={refusal.get('code')}")

    return frames


def main():
    controller = SessionController(seed=26, neurons=100, rng_seed=4)
    controller.handle_message({"type": "set_param", "name": "leak_rate",
                               "value": 0.3})
    server = ControlServer(controller, port=0, manual_clock=True)

    async def run():
        task = asyncio.ensure_future(server.run())
        while server.bound_port is None:
            await asyncio.sleep(0.005)
        frames = await drive(f"ws://127.0.0.1:{server.bound_port}")
        server.stop()
        await task
        return frames

    frames = asyncio.run(run())

    print("\n6. Replay the session log offline and compare telemetry.")
    log = server.controller.session_log()
    replayed = replay_session_log(log)
    live = collect_stream(frames)
    same = all(replayed[k] == live[k] for k in ("lfo_values", "arp_events"))
    print(f"   {len(log['events'])} logged events over {log['total_ticks']} ticks")
    print(f"   replayed streams identical to live telemetry: {same}")


if __name__ == "__main__":
    main()
