// The three network views from the latest viz_frame: PCA scatter
// colored by note index, per-neuron activity strip, connectivity graph
// with vertices sized by activity. Frames arrive at most at the
// server's cadence; nothing here interpolates between them.

import { VizFrame } from './protocol.js';
import { colorForIndex } from './pianoroll.js';

export class PcaScatter {
    private canvas: HTMLCanvasElement;
    private ctx: CanvasRenderingContext2D;

    constructor(canvas: HTMLCanvasElement) {
        this.canvas = canvas;
        const ctx = canvas.getContext('2d');
        if (!ctx) throw new Error('canvas 2d context unavailable');
        this.ctx = ctx;
    }

    render(frame: VizFrame | null): void {
        const { width, height } = this.canvas;
        const ctx = this.ctx;
        ctx.fillStyle = '#10141a';
        ctx.fillRect(0, 0, width, height);
        if (frame === null || frame.pca === null || frame.pca.degenerate) return;

        const points = frame.pca.points;
        if (points.length === 0) return;
        const labels = frame.pca.labels;

        let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
        for (const [x, y] of points) {
            if (x < xMin) xMin = x;
            if (x > xMax) xMax = x;
            if (y < yMin) yMin = y;
            if (y > yMax) yMax = y;
        }
        const xSpan = xMax - xMin || 1;
        const ySpan = yMax - yMin || 1;
        const pad = 8;

        for (let i = 0; i < points.length; i++) {
            const [x, y] = points[i];
            const px = pad + ((x - xMin) / xSpan) * (width - 2 * pad);
            const py = height - pad - ((y - yMin) / ySpan) * (height - 2 * pad);
            const label = labels !== null ? labels[i] : null;
            ctx.fillStyle = label === null || label === undefined
                ? '#56687c' : colorForIndex(label);
            // fade older states so the trajectory reads front to back
            ctx.globalAlpha = 0.25 + 0.75 * (i / points.length);
            ctx.beginPath();
            ctx.arc(px, py, 2.2, 0, Math.PI * 2);
            ctx.fill();
        }
        ctx.globalAlpha = 1;

        const ratios = frame.pca.explained_variance_ratio;
        ctx.fillStyle = '#8fa3b8';
        ctx.font = '10px monospace';
        ctx.fillText(`var ${ratios.map((r) => r.toFixed(2)).join(' + ')}`, 6, 12);
    }
}

export class ActivityStrip {
    private canvas: HTMLCanvasElement;
    private ctx: CanvasRenderingContext2D;

    constructor(canvas: HTMLCanvasElement) {
        this.canvas = canvas;
        const ctx = canvas.getContext('2d');
        if (!ctx) throw new Error('canvas 2d context unavailable');
        this.ctx = ctx;
    }

    render(frame: VizFrame | null): void {
        const { width, height } = this.canvas;
        const ctx = this.ctx;
        ctx.fillStyle = '#10141a';
        ctx.fillRect(0, 0, width, height);
        if (frame === null || frame.activity.length === 0) return;

        const n = frame.activity.length;
        const cell = width / n;
        for (let i = 0; i < n; i++) {
            const a = Math.min(1, Math.abs(frame.activity[i]));
            // cold blue to hot green by |s_i|
            const g = Math.round(60 + a * 180);
            const b = Math.round(120 - a * 60);
            ctx.fillStyle = `rgb(30, ${g}, ${b})`;
            ctx.fillRect(i * cell, 0, Math.ceil(cell), height);
        }
    }
}

interface LayoutNode {
    x: number;
    y: number;
    vx: number;
    vy: number;
}

export class ConnectivityView {
    private canvas: HTMLCanvasElement;
    private ctx: CanvasRenderingContext2D;
    private nodes = new Map<number, LayoutNode>();
    private lastEdgeCount = -1;

    constructor(canvas: HTMLCanvasElement) {
        this.canvas = canvas;
        const ctx = canvas.getContext('2d');
        if (!ctx) throw new Error('canvas 2d context unavailable');
        this.ctx = ctx;
    }

    // a few force-directed iterations per frame; layout persists so the
    // graph settles instead of jumping
    private relax(frame: VizFrame): void {
        const { width, height } = this.canvas;
        const vertices = frame.graph.vertices;

        if (this.nodes.size !== vertices.length || this.lastEdgeCount !== frame.graph.edges.length) {
            this.nodes.clear();
            // deterministic ring start so reloads look the same
            vertices.forEach(([id], i) => {
                const angle = (2 * Math.PI * i) / vertices.length;
                this.nodes.set(id, {
                    x: width / 2 + Math.cos(angle) * width * 0.35,
                    y: height / 2 + Math.sin(angle) * height * 0.35,
                    vx: 0,
                    vy: 0,
                });
            });
            this.lastEdgeCount = frame.graph.edges.length;
        }

        const repulsion = 400;
        const springLength = 40;
        const ids = [...this.nodes.keys()];
        for (let iter = 0; iter < 3; iter++) {
            for (let i = 0; i < ids.length; i++) {
                const a = this.nodes.get(ids[i])!;
                for (let j = i + 1; j < ids.length; j++) {
                    const b = this.nodes.get(ids[j])!;
                    const dx = a.x - b.x;
                    const dy = a.y - b.y;
                    const d2 = dx * dx + dy * dy + 1;
                    const f = repulsion / d2;
                    a.vx += dx * f; a.vy += dy * f;
                    b.vx -= dx * f; b.vy -= dy * f;
                }
            }
            for (const [src, dst] of frame.graph.edges) {
                const a = this.nodes.get(src);
                const b = this.nodes.get(dst);
                if (!a || !b) continue;
                const dx = b.x - a.x;
                const dy = b.y - a.y;
                const d = Math.sqrt(dx * dx + dy * dy) + 1e-9;
                const f = 0.002 * (d - springLength);
                a.vx += (dx / d) * f * d; a.vy += (dy / d) * f * d;
                b.vx -= (dx / d) * f * d; b.vy -= (dy / d) * f * d;
            }
            for (const node of this.nodes.values()) {
                node.x += Math.max(-5, Math.min(5, node.vx * 0.05));
                node.y += Math.max(-5, Math.min(5, node.vy * 0.05));
                node.vx *= 0.5;
                node.vy *= 0.5;
                node.x = Math.max(10, Math.min(width - 10, node.x));
                node.y = Math.max(10, Math.min(height - 10, node.y));
            }
        }
    }

    render(frame: VizFrame | null): void {
        const { width, height } = this.canvas;
        const ctx = this.ctx;
        ctx.fillStyle = '#10141a';
        ctx.fillRect(0, 0, width, height);
        if (frame === null || frame.graph.vertices.length === 0) return;

        this.relax(frame);

        ctx.strokeStyle = '#2a3240';
        let maxWeight = 0;
        for (const [, , weight] of frame.graph.edges) {
            if (Math.abs(weight) > maxWeight) maxWeight = Math.abs(weight);
        }
        for (const [src, dst, weight] of frame.graph.edges) {
            const a = this.nodes.get(src);
            const b = this.nodes.get(dst);
            if (!a || !b) continue;
            ctx.globalAlpha = 0.15 + 0.5 * (Math.abs(weight) / (maxWeight || 1));
            ctx.beginPath();
            ctx.moveTo(a.x, a.y);
            ctx.lineTo(b.x, b.y);
            ctx.stroke();
        }
        ctx.globalAlpha = 1;

        // vertex radius tracks activity |s_i|
        for (const [id, size] of frame.graph.vertices) {
            const node = this.nodes.get(id);
            if (!node) continue;
            const r = 1.5 + 5 * Math.min(1, size);
            ctx.fillStyle = '#5fd38a';
            ctx.beginPath();
            ctx.arc(node.x, node.y, r, 0, Math.PI * 2);
            ctx.fill();
        }
    }
}
