// Parameter sliders, mode switch, reset/reseed. Controls send messages
// but never set what they display: displayed values come back from the
// model's confirmed param_echo mirror on each render pass.

import { ControlClient } from './client.js';
import {
    ParamName,
    clampParam,
    resetState,
    reseed,
    setMode,
    setParam,
    step,
} from './protocol.js';

interface SliderSpec {
    name: ParamName;
    label: string;
    min: number;
    max: number;
    step: number;
}

// display ranges; the protocol clamp still applies on top
const SLIDERS: SliderSpec[] = [
    { name: 'spectral_radius', label: 'spectral radius', min: 0, max: 2, step: 0.01 },
    { name: 'leak_rate', label: 'leak rate', min: 0, max: 1, step: 0.01 },
    { name: 'feedback_scale', label: 'feedback', min: 0, max: 2, step: 0.01 },
    { name: 'input_scale', label: 'input', min: 0, max: 2, step: 0.01 },
    { name: 'bias_scale', label: 'bias', min: 0, max: 1, step: 0.01 },
    { name: 'beta', label: 'confidence', min: 0, max: 10, step: 0.1 },
    { name: 'tick_rate_hz', label: 'tick rate (Hz)', min: 1, max: 500, step: 1 },
    { name: 'gate', label: 'gate', min: 0.05, max: 1, step: 0.05 },
];

export class ControlPanel {
    private client: ControlClient;
    private sliders = new Map<ParamName, { input: HTMLInputElement; readout: HTMLElement }>();
    private modeButtons = new Map<string, HTMLButtonElement>();
    private resetBtn: HTMLButtonElement;
    private stepBtn: HTMLButtonElement;
    private reseedBtn: HTMLButtonElement;
    private seedInput: HTMLInputElement;
    private neuronsInput: HTMLInputElement;
    private statusEl: HTMLElement;
    private toastEl: HTMLElement;
    private lastErrorShown = -1;
    private toastTimer: ReturnType<typeof setTimeout> | null = null;

    constructor(client: ControlClient, root: HTMLElement) {
        this.client = client;

        const grid = document.createElement('div');
        grid.className = 'control-grid';
        for (const slider of SLIDERS) {
            grid.appendChild(this.buildSlider(slider));
        }
        root.appendChild(grid);

        const row = document.createElement('div');
        row.className = 'control-row';

        for (const mode of ['lfo', 'arp'] as const) {
            const btn = document.createElement('button');
            btn.textContent = mode;
            btn.addEventListener('click', () => this.client.send(setMode(mode)));
            this.modeButtons.set(mode, btn);
            row.appendChild(btn);
        }

        this.resetBtn = document.createElement('button');
        this.resetBtn.textContent = 'reset state';
        this.resetBtn.addEventListener('click', () => this.client.send(resetState()));
        row.appendChild(this.resetBtn);

        // only does anything against a --manual-clock engine; otherwise the
        // not_manual error it draws explains itself in the toast
        this.stepBtn = document.createElement('button');
        this.stepBtn.textContent = 'step ×16';
        this.stepBtn.addEventListener('click', () => this.client.send(step(16)));
        row.appendChild(this.stepBtn);

        this.seedInput = document.createElement('input');
        this.seedInput.type = 'number';
        this.seedInput.min = '0';
        this.seedInput.value = '0';
        this.seedInput.title = 'seed';
        row.appendChild(this.seedInput);

        this.neuronsInput = document.createElement('input');
        this.neuronsInput.type = 'number';
        this.neuronsInput.min = '1';
        this.neuronsInput.value = '100';
        this.neuronsInput.title = 'neurons';
        row.appendChild(this.neuronsInput);

        this.reseedBtn = document.createElement('button');
        this.reseedBtn.textContent = 'reseed';
        this.reseedBtn.addEventListener('click', () => {
            const seed = parseInt(this.seedInput.value, 10) || 0;
            const neurons = parseInt(this.neuronsInput.value, 10) || 100;
            this.client.send(reseed(seed, neurons));
        });
        row.appendChild(this.reseedBtn);

        this.statusEl = document.createElement('span');
        this.statusEl.className = 'status';
        row.appendChild(this.statusEl);

        root.appendChild(row);

        this.toastEl = document.createElement('div');
        this.toastEl.className = 'toast hidden';
        root.appendChild(this.toastEl);
    }

    private buildSlider(slider: SliderSpec): HTMLElement {
        const wrap = document.createElement('label');
        wrap.className = 'slider';

        const title = document.createElement('span');
        title.textContent = slider.label;
        wrap.appendChild(title);

        const input = document.createElement('input');
        input.type = 'range';
        input.min = String(slider.min);
        input.max = String(slider.max);
        input.step = String(slider.step);
        input.addEventListener('change', () => {
            const value = clampParam(slider.name, parseFloat(input.value));
            this.client.send(setParam(slider.name, value));
        });
        wrap.appendChild(input);

        const readout = document.createElement('span');
        readout.className = 'readout';
        readout.textContent = '–';
        wrap.appendChild(readout);

        this.sliders.set(slider.name, { input, readout });
        return wrap;
    }

    // reflect the confirmed model state; called from the render loop
    render(): void {
        const model = this.client.model;
        const enabled = model.controlsEnabled();

        for (const [name, { input, readout }] of this.sliders) {
            input.disabled = !enabled;
            if (model.params !== null && document.activeElement !== input) {
                const confirmed = model.params[name];
                input.value = String(confirmed);
                readout.textContent = confirmed.toPrecision(3);
            }
        }
        for (const [mode, btn] of this.modeButtons) {
            btn.disabled = !enabled;
            btn.classList.toggle('active', model.mode === mode);
        }
        this.resetBtn.disabled = !enabled;
        this.stepBtn.disabled = !enabled;
        this.reseedBtn.disabled = !enabled;

        const role = model.role === 'unknown' ? '' : ` (${model.role})`;
        this.statusEl.textContent = `${model.connection}${role} · tick ${model.tick} · N=${model.neurons}`;

        const latest = model.errors[model.errors.length - 1];
        if (latest !== undefined && latest.at > this.lastErrorShown) {
            this.lastErrorShown = latest.at;
            this.toastEl.textContent = `${latest.code}: ${latest.detail}`;
            this.toastEl.classList.remove('hidden');
            if (this.toastTimer !== null) clearTimeout(this.toastTimer);
            this.toastTimer = setTimeout(() => this.toastEl.classList.add('hidden'), 4000);
        }
    }
}
