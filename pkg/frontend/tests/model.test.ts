// The model mirrors the server and nothing else: no field changes
// without a frame, and telemetry buffers stay bounded and contiguous.

import { describe, expect, it } from 'vitest';

import { UiSessionModel } from '../src/model.js';
import { toggleHeldNote } from '../src/keyboard.js';
import { Params, ServerFrame } from '../src/protocol.js';

const PARAMS: Params = {
    input_scale: 0, spectral_radius: 0.95, feedback_scale: 1, bias_scale: 0.2,
    leak_rate: 0.1, beta: 2, tick_rate_hz: 200, gate: 0.8,
};

let seq = 0;
function echo(overrides: Partial<Record<string, unknown>> = {}): ServerFrame {
    return {
        type: 'param_echo', schema_version: 1, seq: ++seq, in_reply_to: null,
        tick: 0, mode: 'lfo', params: { ...PARAMS }, held_notes: [],
        seed: 0, neurons: 100, density: 1, max_keys: 8, rng_seed: 0,
        ...overrides,
    } as ServerFrame;
}

function lfo(t0: number, values: number[]): ServerFrame {
    return { type: 'lfo_frame', schema_version: 1, seq: ++seq, t0, values };
}

function arp(t: number, index: number, pitch: number): ServerFrame {
    return {
        type: 'arp_event', schema_version: 1, seq: ++seq,
        t, index, pitch, velocity: 100, duration_steps: 0.8,
    };
}

function errorFrame(code: string, inReplyTo: number | null = null): ServerFrame {
    return {
        type: 'error', schema_version: 1, seq: ++seq,
        code, detail: 'test', in_reply_to: inReplyTo,
    };
}

describe('server-confirmed state only', () => {
    it('shows no parameters before the first echo', () => {
        const model = new UiSessionModel();
        expect(model.params).toBeNull();
        expect(model.controlsEnabled()).toBe(false);
    });

    it('sending a mutation changes nothing until the echo arrives', () => {
        const model = new UiSessionModel();
        model.connectionChanged('open');
        model.applyFrame(echo());
        const before = model.params!.leak_rate;

        model.noteMutationSent(7); // what the client records on send
        expect(model.params!.leak_rate).toBe(before);

        model.applyFrame(echo({
            in_reply_to: 7,
            params: { ...PARAMS, leak_rate: 0.3 },
        }));
        expect(model.params!.leak_rate).toBe(0.3);
    });

    it('mirrors mode, held notes, and tick from the echo', () => {
        const model = new UiSessionModel();
        model.applyFrame(echo({ mode: 'arp', held_notes: [60, 64], tick: 42 }));
        expect(model.mode).toBe('arp');
        expect(model.heldNotes).toEqual([60, 64]);
        expect(model.tick).toBe(42);
    });
});

describe('controller role', () => {
    it('starts unknown, confirmed by an applied mutation of ours', () => {
        const model = new UiSessionModel();
        model.connectionChanged('open');
        expect(model.role).toBe('unknown');

        model.noteMutationSent(3);
        model.applyFrame(echo({ in_reply_to: 3 }));
        expect(model.role).toBe('controller');
    });

    it('a not_controller refusal makes us an observer and disables controls', () => {
        const model = new UiSessionModel();
        model.connectionChanged('open');
        model.applyFrame(echo());
        expect(model.controlsEnabled()).toBe(true);

        model.noteMutationSent(5);
        model.applyFrame(errorFrame('not_controller', 5));
        expect(model.role).toBe('observer');
        expect(model.controlsEnabled()).toBe(false);
    });

    it('unrelated echoes do not grant the controller role', () => {
        const model = new UiSessionModel();
        model.applyFrame(echo({ in_reply_to: 99 })); // someone else's ack
        expect(model.role).toBe('unknown');
    });

    it('the role dies with the connection', () => {
        const model = new UiSessionModel();
        model.connectionChanged('open');
        model.noteMutationSent(1);
        model.applyFrame(echo({ in_reply_to: 1 }));
        expect(model.role).toBe('controller');

        model.connectionChanged('closed');
        expect(model.role).toBe('unknown');
        expect(model.controlsEnabled()).toBe(false);
    });
});

describe('waveform buffer', () => {
    it('concatenates contiguous batches', () => {
        const model = new UiSessionModel();
        model.applyFrame(lfo(0, [0.5, 0.6]));
        model.applyFrame(lfo(2, [0.7]));
        expect(model.waveform).toEqual([0.5, 0.6, 0.7]);
        expect(model.waveformT0).toBe(0);
    });

    it('restarts the trace when the sample clock jumps', () => {
        const model = new UiSessionModel();
        model.applyFrame(lfo(0, [0.5, 0.6, 0.7]));
        model.applyFrame(lfo(0, [0.9])); // reset/reseed restarted at t=0
        expect(model.waveform).toEqual([0.9]);
        expect(model.waveformT0).toBe(0);
    });

    it('stays bounded and keeps t0 aligned with the first sample', () => {
        const model = new UiSessionModel();
        let t = 0;
        for (let i = 0; i < 50; i++) {
            model.applyFrame(lfo(t, new Array(64).fill(0.5)));
            t += 64;
        }
        expect(model.waveform.length).toBe(2048);
        expect(model.waveformT0).toBe(t - 2048);
    });
});

describe('arp and error buffers', () => {
    it('keeps recent events in order and bounded', () => {
        const model = new UiSessionModel();
        for (let t = 0; t < 300; t++) {
            model.applyFrame(arp(t, t % 4, 60 + (t % 4)));
        }
        expect(model.arpEvents.length).toBe(256);
        expect(model.arpEvents[0].t).toBe(44);
        expect(model.arpEvents[255].t).toBe(299);
    });

    it('keeps the last few errors for the toast', () => {
        const model = new UiSessionModel();
        for (let i = 0; i < 12; i++) {
            model.applyFrame(errorFrame('out_of_range'));
        }
        expect(model.errors.length).toBe(8);
        expect(model.errors[7].code).toBe('out_of_range');
    });

    it('latest viz frame replaces the previous one', () => {
        const model = new UiSessionModel();
        const viz = (tick: number): ServerFrame => ({
            type: 'viz_frame', schema_version: 1, seq: ++seq, tick,
            pca: null, activity: [0.1], graph: { vertices: [[0, 0.1]], edges: [] },
        });
        model.applyFrame(viz(5));
        model.applyFrame(viz(10));
        expect(model.latestViz!.tick).toBe(10);
    });
});

describe('keyboard click logic', () => {
    it('toggles a note in and out of the held set', () => {
        expect(toggleHeldNote([60, 64], 67, 8, true)).toEqual([60, 64, 67]);
        expect(toggleHeldNote([60, 64, 67], 64, 8, true)).toEqual([60, 67]);
    });

    it('refuses clicks when disabled or at capacity', () => {
        expect(toggleHeldNote([60], 64, 8, false)).toBeNull();
        expect(toggleHeldNote([1, 2, 3, 4], 5, 4, true)).toBeNull();
        // removal is fine at capacity
        expect(toggleHeldNote([1, 2, 3, 4], 4, 4, true)).toEqual([1, 2, 3]);
    });
});
