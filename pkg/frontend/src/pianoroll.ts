// Piano-roll lane of recent arp events, one row per pitch, colored by
// note index with the same palette as the PCA scatter.

import { UiSessionModel } from './model.js';

export const INDEX_COLORS = [
    '#5fd38a', '#e0b050', '#6a9ef0', '#e07070',
    '#b080e0', '#50c8c8', '#e08ac0', '#a0b060',
];

export function colorForIndex(index: number): string {
    return INDEX_COLORS[index % INDEX_COLORS.length];
}

export class PianoRoll {
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

        const events = model.arpEvents;
        if (events.length === 0) return;

        const tMax = events[events.length - 1].t;
        const span = 128; // steps visible
        const tMin = tMax - span;

        const pitches = [...new Set(events.map((e) => e.pitch))].sort((a, b) => a - b);
        const rowHeight = Math.min(18, height / Math.max(4, pitches.length));
        const rowOf = new Map(pitches.map((p, i) => [p, i]));

        ctx.font = '10px monospace';
        for (const [pitch, row] of rowOf) {
            const y = height - (row + 1) * rowHeight;
            ctx.fillStyle = '#2a3240';
            ctx.fillRect(0, y + rowHeight - 1, width, 1);
            ctx.fillStyle = '#8fa3b8';
            ctx.fillText(String(pitch), 2, y + rowHeight - 4);
        }

        for (const e of events) {
            if (e.t < tMin) continue;
            const row = rowOf.get(e.pitch);
            if (row === undefined) continue;
            const x = ((e.t - tMin) / span) * width;
            const w = Math.max(2, (e.durationSteps / span) * width);
            const y = height - (row + 1) * rowHeight;
            ctx.fillStyle = colorForIndex(e.index);
            ctx.globalAlpha = 0.35 + 0.65 * (e.velocity / 127);
            ctx.fillRect(x, y + 2, w, rowHeight - 4);
        }
        ctx.globalAlpha = 1;
    }
}
