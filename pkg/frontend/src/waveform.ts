// Scrolling LFO trace. Values live in (0,1); 0.5 sits on the midline.

import { UiSessionModel } from './model.js';

export class WaveformPlot {
    private canvas: HTMLCanvasElement;
    private ctx: CanvasRenderingContext2D;
    private lastRevision = -1;

    constructor(canvas: HTMLCanvasElement) {
        this.canvas = canvas;
        const ctx = canvas.getContext('2d');
        if (!ctx) throw new Error('canvas 2d context unavailable');
        this.ctx = ctx;
    }

    render(model: UiSessionModel): void {
        if (model.revision === this.lastRevision) return;
        this.lastRevision = model.revision;

        const { width, height } = this.canvas;
        const ctx = this.ctx;
        ctx.fillStyle = '#10141a';
        ctx.fillRect(0, 0, width, height);

        // midline: a zero-dynamics network pins the trace here
        ctx.strokeStyle = '#2a3240';
        ctx.beginPath();
        ctx.moveTo(0, height / 2);
        ctx.lineTo(width, height / 2);
        ctx.stroke();

        const wave = model.waveform;
        if (wave.length < 2) return;

        const n = Math.min(wave.length, width); // one sample per pixel, newest right
        const start = wave.length - n;
        ctx.strokeStyle = '#5fd38a';
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        for (let i = 0; i < n; i++) {
            const x = (i / (n - 1)) * (width - 1);
            const y = height - wave[start + i] * height;
            if (i === 0) ctx.moveTo(x, y);
            else ctx.lineTo(x, y);
        }
        ctx.stroke();

        ctx.fillStyle = '#8fa3b8';
        ctx.font = '11px monospace';
        const last = wave[wave.length - 1];
        ctx.fillText(`t=${model.waveformT0 + wave.length - 1}  v=${last.toFixed(4)}`, 6, 14);
    }
}
