// Server-authoritative session mirror. The model only ever reflects
// frames the server sent; nothing in here is set optimistically by
// local input, so whatever the screen shows has been confirmed.

import {
    ArpEventFrame,
    ErrorFrame,
    Params,
    ParamEchoFrame,
    ServerFrame,
    VizFrame,
    Mode,
} from './protocol.js';

export type ConnectionState = 'connecting' | 'open' | 'closed';
export type Role = 'unknown' | 'controller' | 'observer';

export interface ArpNote {
    t: number;
    index: number;
    pitch: number;
    velocity: number;
    durationSteps: number;
}

export interface UiError {
    code: string;
    detail: string;
    inReplyTo: number | null;
    at: number; // model revision when it arrived, for toast expiry
}

const WAVEFORM_CAPACITY = 2048;
const ARP_CAPACITY = 256;
const ERROR_CAPACITY = 8;

export class UiSessionModel {
    connection: ConnectionState = 'connecting';
    role: Role = 'unknown';

    // last confirmed param_echo contents; null until the first echo lands
    params: Params | null = null;
    mode: Mode = 'lfo';
    heldNotes: number[] = [];
    tick = 0;
    seed = 0;
    neurons = 0;
    maxKeys = 8;

    // rolling telemetry buffers
    waveform: number[] = [];
    waveformT0 = 0; // t of waveform[0]
    arpEvents: ArpNote[] = [];
    latestViz: VizFrame | null = null;
    errors: UiError[] = [];

    // bumped on every applied frame; render loops compare revisions
    revision = 0;

    // seqs of our own in-flight mutating messages, to spot role rejections
    private pendingMutations = new Set<number>();

    noteMutationSent(seq: number): void {
        this.pendingMutations.add(seq);
    }

    applyFrame(frame: ServerFrame): void {
        switch (frame.type) {
            case 'param_echo':
                this.applyEcho(frame);
                break;
            case 'lfo_frame':
                this.applyWave(frame.t0, frame.values);
                break;
            case 'arp_event':
                this.applyArp(frame);
                break;
            case 'viz_frame':
                this.latestViz = frame;
                break;
            case 'error':
                this.applyError(frame);
                break;
        }
        this.revision += 1;
    }

    private applyEcho(frame: ParamEchoFrame): void {
        this.params = frame.params;
        this.mode = frame.mode;
        this.heldNotes = frame.held_notes.slice();
        this.tick = frame.tick;
        this.seed = frame.seed;
        this.neurons = frame.neurons;
        this.maxKeys = frame.max_keys;
        if (frame.in_reply_to !== null && this.pendingMutations.delete(frame.in_reply_to)) {
            // a mutation of ours was applied, so we hold the controls
            this.role = 'controller';
        }
    }

    private applyWave(t0: number, values: number[]): void {
        const expected = this.waveformT0 + this.waveform.length;
        if (this.waveform.length > 0 && t0 !== expected) {
            // clock restarted (reset/reseed/mode change); start a fresh trace
            this.waveform = [];
            this.waveformT0 = t0;
        } else if (this.waveform.length === 0) {
            this.waveformT0 = t0;
        }
        this.waveform.push(...values);
        const excess = this.waveform.length - WAVEFORM_CAPACITY;
        if (excess > 0) {
            this.waveform.splice(0, excess);
            this.waveformT0 += excess;
        }
    }

    private applyArp(frame: ArpEventFrame): void {
        this.arpEvents.push({
            t: frame.t,
            index: frame.index,
            pitch: frame.pitch,
            velocity: frame.velocity,
            durationSteps: frame.duration_steps,
        });
        if (this.arpEvents.length > ARP_CAPACITY) {
            this.arpEvents.splice(0, this.arpEvents.length - ARP_CAPACITY);
        }
    }

    private applyError(frame: ErrorFrame): void {
        if (frame.code === 'not_controller') {
            this.role = 'observer';
        }
        if (frame.in_reply_to !== null) {
            this.pendingMutations.delete(frame.in_reply_to);
        }
        this.errors.push({
            code: frame.code,
            detail: frame.detail,
            inReplyTo: frame.in_reply_to,
            at: this.revision,
        });
        if (this.errors.length > ERROR_CAPACITY) {
            this.errors.splice(0, this.errors.length - ERROR_CAPACITY);
        }
    }

    connectionChanged(state: ConnectionState): void {
        this.connection = state;
        if (state !== 'open') {
            // the role belongs to the lost connection, not to us
            this.role = 'unknown';
        }
        this.revision += 1;
    }

    // controls are usable only on a live socket we haven't been refused on
    controlsEnabled(): boolean {
        return this.connection === 'open' && this.role !== 'observer' && this.params !== null;
    }
}
