// Wire protocol: typed frames, message builders, and incoming-frame guards.
// Everything sent to the server is produced by a builder here, so the
// message surface stays in one file and matches docs/protocol.schema.json.

export const SCHEMA_VERSION = 1;

export const PARAM_NAMES = [
    'input_scale',
    'spectral_radius',
    'feedback_scale',
    'bias_scale',
    'leak_rate',
    'beta',
    'tick_rate_hz',
    'gate',
] as const;

export type ParamName = typeof PARAM_NAMES[number];
export type Params = Record<ParamName, number>;
export type Mode = 'lfo' | 'arp';

// Client-side clamp ranges; the server enforces the same bounds.
// null means unbounded on that side.
export const PARAM_RANGES: Record<ParamName, { min: number; max: number | null; minExclusive?: boolean }> = {
    input_scale: { min: 0, max: null },
    spectral_radius: { min: 0, max: null },
    feedback_scale: { min: 0, max: null },
    bias_scale: { min: 0, max: null },
    leak_rate: { min: 0, max: 1 },
    beta: { min: 0, max: 1e6 },
    tick_rate_hz: { min: 0, max: null, minExclusive: true },
    gate: { min: 0, max: 1, minExclusive: true },
};

export function clampParam(name: ParamName, value: number): number {
    const range = PARAM_RANGES[name];
    let v = value;
    if (range.max !== null && v > range.max) v = range.max;
    if (v < range.min) v = range.min;
    if (range.minExclusive && v <= range.min) {
        // smallest slider-friendly positive value; the server rejects <= min
        v = range.max !== null ? Math.min(0.001, range.max) : 0.001;
    }
    return v;
}

export const TELEMETRY_KINDS = ['lfo_frame', 'arp_event', 'viz_frame', 'param_echo', 'error'] as const;
export type TelemetryKind = typeof TELEMETRY_KINDS[number];

export interface ParamEchoFrame {
    type: 'param_echo';
    schema_version: number;
    seq: number;
    in_reply_to: number | null;
    tick: number;
    mode: Mode;
    params: Params;
    held_notes: number[];
    seed: number;
    neurons: number;
    density: number;
    max_keys: number;
    rng_seed: number;
}

export interface LfoFrame {
    type: 'lfo_frame';
    schema_version: number;
    seq: number;
    t0: number;
    values: number[];
}

export interface ArpEventFrame {
    type: 'arp_event';
    schema_version: number;
    seq: number;
    t: number;
    index: number;
    pitch: number;
    velocity: number;
    duration_steps: number;
}

export interface VizFrame {
    type: 'viz_frame';
    schema_version: number;
    seq: number;
    tick: number;
    pca: {
        points: number[][];
        labels: (number | null)[] | null;
        explained_variance_ratio: number[];
        degenerate: boolean;
    } | null;
    activity: number[];
    graph: {
        vertices: [id: number, size: number][];
        edges: [src: number, dst: number, weight: number][];
    };
}

export interface ErrorFrame {
    type: 'error';
    schema_version: number;
    seq: number;
    code: string;
    detail: string;
    in_reply_to: number | null;
}

export type ServerFrame = ParamEchoFrame | LfoFrame | ArpEventFrame | VizFrame | ErrorFrame;

const FRAME_TYPES = new Set(['param_echo', 'lfo_frame', 'arp_event', 'viz_frame', 'error']);

// Parse one incoming text frame. Returns null (and logs) on anything
// malformed so a bad frame never takes the stream down.
export function parseServerFrame(raw: string): ServerFrame | null {
    let data: unknown;
    try {
        data = JSON.parse(raw);
    } catch {
        console.warn('dropped frame: not JSON');
        return null;
    }
    if (typeof data !== 'object' || data === null || Array.isArray(data)) {
        console.warn('dropped frame: not an object');
        return null;
    }
    const frame = data as Record<string, unknown>;
    if (typeof frame.type !== 'string' || !FRAME_TYPES.has(frame.type)) {
        console.warn(`dropped frame: unknown type ${String(frame.type)}`);
        return null;
    }
    if (frame.schema_version !== SCHEMA_VERSION) {
        console.warn(`dropped frame: schema_version ${String(frame.schema_version)}`);
        return null;
    }
    if (typeof frame.seq !== 'number') {
        console.warn('dropped frame: missing seq');
        return null;
    }
    if (!frameShapeOk(frame)) {
        console.warn(`dropped frame: malformed ${frame.type}`);
        return null;
    }
    return frame as unknown as ServerFrame;
}

function frameShapeOk(f: Record<string, unknown>): boolean {
    switch (f.type) {
        case 'param_echo': {
            const params = f.params as Record<string, unknown> | undefined;
            return typeof params === 'object' && params !== null
                && PARAM_NAMES.every((n) => typeof params[n] === 'number')
                && Array.isArray(f.held_notes)
                && (f.mode === 'lfo' || f.mode === 'arp')
                && typeof f.tick === 'number';
        }
        case 'lfo_frame':
            return typeof f.t0 === 'number' && Array.isArray(f.values)
                && (f.values as unknown[]).every((v) => typeof v === 'number');
        case 'arp_event':
            return typeof f.t === 'number' && typeof f.index === 'number'
                && typeof f.pitch === 'number';
        case 'viz_frame':
            return Array.isArray(f.activity) && typeof f.graph === 'object' && f.graph !== null;
        case 'error':
            return typeof f.code === 'string' && typeof f.detail === 'string';
        default:
            return false;
    }
}

// --- client message builders ---

export interface ClientMessage {
    type: string;
    seq: number;
    [key: string]: unknown;
}

let nextSeq = 1;

export function resetSeqCounter(start = 1): void {
    nextSeq = start;
}

function stamp(msg: Record<string, unknown>): ClientMessage {
    return { ...msg, seq: nextSeq++ } as ClientMessage;
}

export function setParam(name: ParamName, value: number): ClientMessage {
    return stamp({ type: 'set_param', name, value });
}

export function setHeldNotes(pitches: number[]): ClientMessage {
    const clean = pitches.filter((p) => Number.isInteger(p) && p >= 0 && p <= 127);
    return stamp({ type: 'set_held_notes', pitches: clean });
}

export function resetState(): ClientMessage {
    return stamp({ type: 'reset_state' });
}

export function reseed(seed: number, neurons: number): ClientMessage {
    return stamp({
        type: 'reseed',
        seed: Math.max(0, Math.floor(seed)),
        neurons: Math.max(1, Math.floor(neurons)),
    });
}

export function setMode(mode: Mode): ClientMessage {
    return stamp({ type: 'set_mode', mode });
}

export function subscribe(kinds: TelemetryKind[]): ClientMessage {
    return stamp({ type: 'subscribe', kinds });
}

export function snapshotRequest(): ClientMessage {
    return stamp({ type: 'snapshot_request' });
}

export function step(count: number): ClientMessage {
    return stamp({ type: 'step', count: Math.min(100000, Math.max(1, Math.floor(count))) });
}
