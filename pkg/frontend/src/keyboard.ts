// Clickable two-octave keyboard: clicking toggles a held note and sends
// the whole held set. Key highlights come from the model's confirmed
// held_notes, not from the click.

import { ControlClient } from './client.js';
import { setHeldNotes } from './protocol.js';

const START_NOTE = 48; // C3
const END_NOTE = 72;   // C5
const WHITE = [0, 2, 4, 5, 7, 9, 11];

// What one click does: the next held set, or null when the click must be
// ignored (controls unavailable, or adding past server capacity).
export function toggleHeldNote(
    held: number[],
    note: number,
    maxKeys: number,
    enabled: boolean,
): number[] | null {
    if (!enabled) return null;
    const next = new Set(held);
    if (next.has(note)) {
        next.delete(note);
    } else {
        if (next.size >= maxKeys) return null; // server would refuse
        next.add(note);
    }
    return [...next].sort((a, b) => a - b);
}

export class Keyboard {
    private client: ControlClient;
    private keys = new Map<number, HTMLElement>();

    constructor(client: ControlClient, container: HTMLElement) {
        this.client = client;
        container.classList.add('keyboard');

        let whiteCount = 0;
        for (let note = START_NOTE; note <= END_NOTE; note++) {
            if (WHITE.includes(note % 12)) whiteCount++;
        }
        const whiteWidth = 100 / whiteCount;

        let whiteIndex = 0;
        for (let note = START_NOTE; note <= END_NOTE; note++) {
            const isWhite = WHITE.includes(note % 12);
            const key = document.createElement('div');
            key.dataset.note = String(note);
            if (isWhite) {
                key.className = 'key white';
                key.style.width = `${whiteWidth}%`;
                key.style.left = `${whiteIndex * whiteWidth}%`;
                whiteIndex++;
            } else {
                key.className = 'key black';
                key.style.width = `${whiteWidth * 0.6}%`;
                key.style.left = `${(whiteIndex - 1) * whiteWidth + whiteWidth * 0.7}%`;
            }
            key.addEventListener('mousedown', (e) => {
                e.preventDefault();
                this.toggle(note);
            });
            this.keys.set(note, key);
            container.appendChild(key);
        }
        container.addEventListener('selectstart', (e) => e.preventDefault());
    }

    private toggle(note: number): void {
        const model = this.client.model;
        const next = toggleHeldNote(
            model.heldNotes, note, model.maxKeys, model.controlsEnabled());
        if (next !== null) {
            this.client.send(setHeldNotes(next));
        }
    }

    render(): void {
        const held = new Set(this.client.model.heldNotes);
        for (const [note, key] of this.keys) {
            key.classList.toggle('held', held.has(note));
        }
    }
}
