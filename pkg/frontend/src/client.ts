// One socket, auto-reconnect, server-confirmed state only. Incoming
// frames are buffered and drained by the render loop, so message
// handling never blocks on drawing and vice versa.

import { UiSessionModel } from './model.js';
import {
    ClientMessage,
    ServerFrame,
    parseServerFrame,
    snapshotRequest,
} from './protocol.js';

// minimal constructor surface so tests can pass the `ws` package
export interface WebSocketLike {
    readyState: number;
    send(data: string): void;
    close(): void;
    onopen: ((ev?: unknown) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onerror: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
}

export type WebSocketCtor = new (url: string) => WebSocketLike;

const RECONNECT_DELAY_MS = 1000;

export class ControlClient {
    readonly model: UiSessionModel;
    private url: string;
    private makeSocket: WebSocketCtor;
    private ws: WebSocketLike | null = null;
    private frameBuffer: ServerFrame[] = [];
    private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
    private stopped = false;

    // mutating message types; their seqs are tracked for role detection
    private static MUTATING = new Set([
        'set_param', 'set_held_notes', 'reset_state', 'reseed', 'set_mode', 'step',
    ]);

    constructor(url: string, model: UiSessionModel, makeSocket: WebSocketCtor) {
        this.url = url;
        this.model = model;
        this.makeSocket = makeSocket;
    }

    connect(): void {
        this.stopped = false;
        this.open();
    }

    private open(): void {
        this.model.connectionChanged('connecting');
        const ws = new this.makeSocket(this.url);
        this.ws = ws;
        ws.onopen = () => {
            this.model.connectionChanged('open');
            // resync: the server state is the truth after any (re)connect
            this.send(snapshotRequest());
        };
        ws.onmessage = (ev) => {
            const frame = parseServerFrame(String(ev.data));
            if (frame !== null) {
                this.frameBuffer.push(frame);
            }
        };
        ws.onclose = () => this.dropped(ws);
        ws.onerror = () => this.dropped(ws);
    }

    private dropped(ws: WebSocketLike): void {
        if (this.ws !== ws) return; // stale socket callbacks
        this.ws = null;
        this.model.connectionChanged('closed');
        if (!this.stopped && this.reconnectTimer === null) {
            this.reconnectTimer = setTimeout(() => {
                this.reconnectTimer = null;
                if (!this.stopped) this.open();
            }, RECONNECT_DELAY_MS);
        }
    }

    close(): void {
        this.stopped = true;
        if (this.reconnectTimer !== null) {
            clearTimeout(this.reconnectTimer);
            this.reconnectTimer = null;
        }
        if (this.ws !== null) {
            const ws = this.ws;
            this.ws = null;
            ws.onclose = null;
            ws.onerror = null;
            ws.close();
        }
        this.model.connectionChanged('closed');
    }

    // send a built message; returns its seq, or null if not connected
    send(msg: ClientMessage): number | null {
        if (this.ws === null || this.ws.readyState !== 1) {
            return null;
        }
        if (ControlClient.MUTATING.has(msg.type)) {
            this.model.noteMutationSent(msg.seq);
        }
        this.ws.send(JSON.stringify(msg));
        return msg.seq;
    }

    // apply everything received since the last drain; call per frame tick
    drainFrames(): number {
        const frames = this.frameBuffer;
        if (frames.length === 0) return 0;
        this.frameBuffer = [];
        for (const frame of frames) {
            this.model.applyFrame(frame);
        }
        return frames.length;
    }
}
