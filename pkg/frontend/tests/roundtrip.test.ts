// Round-trip against the real engine: a parameter set through the UI
// code path must read back identically through an independent protocol
// client, and clicked held notes must come back as arp events with
// matching pitches in the model the piano-roll lane renders from.
//
// Spawns the actual server process; anything already on the port is a
// non-issue because the OS assigns one.
//
// Uses Node's own browser-compatible WebSocket (the same API the UI runs
// on), enabled by NODE_OPTIONS=--experimental-websocket in the test script.

import { ChildProcess, spawn } from 'node:child_process';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

const repoRoot = join(dirname(fileURLToPath(import.meta.url)), '..', '..');

import { ControlClient, WebSocketCtor } from '../src/client.js';
import { UiSessionModel } from '../src/model.js';
import { toggleHeldNote } from '../src/keyboard.js';
import {
    clampParam,
    resetSeqCounter,
    setHeldNotes,
    setMode,
    setParam,
    step,
} from '../src/protocol.js';

interface RawSocket {
    send(data: string): void;
    close(): void;
    onopen: (() => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onerror: ((ev: unknown) => void) | null;
}

const WebSocketImpl = (globalThis as { WebSocket?: new (url: string) => RawSocket }).WebSocket;
if (!WebSocketImpl) {
    throw new Error(
        'global WebSocket is missing: run the suite via `npm test` ' +
        '(NODE_OPTIONS=--experimental-websocket)',
    );
}

let server: ChildProcess;
let uri = '';

function startServer(): Promise<string> {
    return new Promise((resolve, reject) => {
        server = spawn('python3', [
            '-m', 'reservoirmidi.cli', 'serve',
            '--port', '0', '--manual-clock',
            '--seed', '26', '--neurons', '60', '--rng-seed', '4',
        ], {
            cwd: repoRoot,
            env: { ...process.env, REMI_LOG: 'INFO' },
        });
        let buffered = '';
        const onData = (chunk: Buffer) => {
            buffered += chunk.toString();
            const m = buffered.match(/listening on (ws:\/\/[0-9.]+:\d+)/);
            if (m) {
                server.stderr!.off('data', onData);
                resolve(m[1]);
            }
        };
        server.stderr!.on('data', onData);
        server.on('error', reject);
        server.on('exit', (code) => reject(new Error(`server exited early: ${code}\n${buffered}`)));
        setTimeout(() => reject(new Error(`server did not announce a port\n${buffered}`)), 15000);
    });
}

async function until(cond: () => boolean, what: string, ms = 10000): Promise<void> {
    const deadline = Date.now() + ms;
    while (!cond()) {
        if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
        await new Promise((r) => setTimeout(r, 20));
    }
}

// the render loop is requestAnimationFrame in the browser; here the
// poll drains explicitly
async function untilDrained(client: ControlClient, cond: () => boolean, what: string): Promise<void> {
    await until(() => {
        client.drainFrames();
        return cond();
    }, what);
}

beforeAll(async () => {
    uri = await startServer();
}, 20000);

afterAll(() => {
    server?.removeAllListeners('exit');
    server?.kill();
});

describe('UI round trip through the live engine', () => {
    it('slider set -> echo -> independent client reads the same value; clicks -> matching arp pitches', async () => {
        resetSeqCounter(1);
        const model = new UiSessionModel();
        const client = new ControlClient(uri, model, WebSocketImpl as unknown as WebSocketCtor);
        client.connect();

        await untilDrained(client, () => model.params !== null, 'snapshot');

        // 1. drag two sliders, exactly what controls.ts sends: leak_rate to
        //    0.3 and beta to 0.5 (soft enough that every held note gets picked)
        const value = clampParam('leak_rate', 0.3);
        const seq = client.send(setParam('leak_rate', value));
        expect(seq).not.toBeNull();
        await untilDrained(client, () => model.params!.leak_rate === 0.3, 'leak_rate echo');
        expect(model.role).toBe('controller'); // our mutation was applied
        client.send(setParam('beta', clampParam('beta', 0.5)));
        await untilDrained(client, () => model.params!.beta === 0.5, 'beta echo');

        // 2. click three keys; highlights wait for the confirmed held set
        for (const note of [60, 64, 67]) {
            const next = toggleHeldNote(model.heldNotes, note, model.maxKeys, model.controlsEnabled());
            expect(next).not.toBeNull();
            client.send(setHeldNotes(next!));
            await untilDrained(client, () => model.heldNotes.includes(note), `held ${note}`);
        }
        expect(model.heldNotes).toEqual([60, 64, 67]);

        // 3. independent protocol client (bare socket + hand-built JSON, none
        //    of the UI code): the state it reads must equal what the UI shows
        const probe = new WebSocketImpl(uri);
        const probeEcho = await new Promise<Record<string, any>>((resolve, reject) => {
            probe.onopen = () => probe.send(JSON.stringify({ type: 'snapshot_request', seq: 9001 }));
            probe.onmessage = (ev) => {
                const frame = JSON.parse(String(ev.data));
                if (frame.type === 'param_echo' && frame.in_reply_to === 9001) resolve(frame);
            };
            probe.onerror = () => reject(new Error('probe socket error'));
            setTimeout(() => reject(new Error('probe snapshot timeout')), 8000);
        });
        expect(probeEcho.params.leak_rate).toBe(0.3);
        expect(probeEcho.params.leak_rate).toBe(model.params!.leak_rate);
        expect(probeEcho.params.beta).toBe(model.params!.beta);
        expect(probeEcho.held_notes).toEqual(model.heldNotes);
        probe.close();

        // 4. arp mode + stepped time: every event pitch the piano-roll lane
        //    gets must be one of the clicked notes
        client.send(setMode('arp'));
        await untilDrained(client, () => model.mode === 'arp', 'arp mode');
        client.send(step(64));
        await untilDrained(client, () => model.arpEvents.length >= 64, 'arp events');

        const pitches = model.arpEvents.map((e) => e.pitch);
        expect(pitches.length).toBe(64);
        for (const p of pitches) {
            expect([60, 64, 67]).toContain(p);
        }
        // all three clicked notes actually sound (fixed seeds make this stable)
        expect(new Set(pitches).size).toBe(3);
        // lane colors key off the note index; indexes must stay in range
        for (const e of model.arpEvents) {
            expect(e.index).toBeGreaterThanOrEqual(0);
            expect(e.index).toBeLessThan(3);
        }

        client.close();
    }, 30000);

    it('a second client is refused control and flagged observer', async () => {
        // the role goes to whoever connects while the slot is free; the
        // previous test's holder releases it on disconnect, which the server
        // processes asynchronously, so reconnect until a claim is echoed back
        const claimRole = async (): Promise<RawSocket> => {
            const deadline = Date.now() + 8000;
            let seq = 9100;
            for (;;) {
                const sock = new WebSocketImpl(uri);
                seq += 1;
                const claimed = await new Promise<boolean>((resolve) => {
                    const mine = seq;
                    const timer = setTimeout(() => resolve(false), 2000);
                    sock.onopen = () => {
                        sock.send(JSON.stringify({ type: 'set_param', name: 'beta', value: 2.0, seq: mine }));
                    };
                    sock.onmessage = (ev) => {
                        const frame = JSON.parse(String(ev.data));
                        if (frame.in_reply_to !== mine) return;
                        clearTimeout(timer);
                        resolve(frame.type === 'param_echo');
                    };
                    sock.onerror = () => {
                        clearTimeout(timer);
                        resolve(false);
                    };
                });
                if (claimed) return sock;
                sock.close();
                if (Date.now() > deadline) throw new Error('could not claim the controller role');
                await new Promise((r) => setTimeout(r, 150));
            }
        };
        const anchor = await claimRole();

        resetSeqCounter(5000);
        const model = new UiSessionModel();
        const second = new ControlClient(uri, model, WebSocketImpl as unknown as WebSocketCtor);
        second.connect();
        await untilDrained(second, () => model.params !== null, 'snapshot');

        second.send(setParam('beta', 5));
        await untilDrained(second, () => model.role === 'observer', 'observer flag');
        expect(model.controlsEnabled()).toBe(false);
        // the refusal surfaced as a toastable error
        expect(model.errors.some((e) => e.code === 'not_controller')).toBe(true);

        second.close();
        anchor.close();
    }, 30000);
});
