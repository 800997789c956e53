// Entry point: one socket, one model, one render loop. Socket handlers
// only buffer frames; requestAnimationFrame drains the buffer into the
// model and repaints whatever changed.

import { ControlClient, WebSocketCtor } from './client.js';
import { ControlPanel } from './controls.js';
import { Keyboard } from './keyboard.js';
import { UiSessionModel } from './model.js';
import { PianoRoll } from './pianoroll.js';
import { resetSeqCounter } from './protocol.js';
import { PcaScatter, ActivityStrip, ConnectivityView } from './viz.js';
import { WaveformPlot } from './waveform.js';

const params = new URLSearchParams(window.location.search);
const host = params.get('host') ?? window.location.hostname ?? '127.0.0.1';
const port = params.get('port') ?? '7421';

// Controller role is inferred from echoes of our own seqs; start each tab
// at a random seq so two tabs can't mistake each other's echoes for theirs.
resetSeqCounter(1 + Math.floor(Math.random() * 1_000_000));

const model = new UiSessionModel();
const client = new ControlClient(
    `ws://${host}:${port}`,
    model,
    WebSocket as unknown as WebSocketCtor,
);

function canvasById(id: string): HTMLCanvasElement {
    const el = document.getElementById(id);
    if (!(el instanceof HTMLCanvasElement)) throw new Error(`missing canvas #${id}`);
    return el;
}

function divById(id: string): HTMLElement {
    const el = document.getElementById(id);
    if (el === null) throw new Error(`missing element #${id}`);
    return el;
}

const panel = new ControlPanel(client, divById('controls'));
const keyboard = new Keyboard(client, divById('keyboard'));
const waveform = new WaveformPlot(canvasById('waveform'));
const pianoRoll = new PianoRoll(canvasById('pianoroll'));
const pca = new PcaScatter(canvasById('pca'));
const activity = new ActivityStrip(canvasById('activity'));
const graph = new ConnectivityView(canvasById('graph'));

client.connect();

let lastVizSeq = -1;
function frame(): void {
    client.drainFrames();
    panel.render();
    keyboard.render();
    waveform.render(model);
    pianoRoll.render(model);
    // the graph relaxes continuously; scatter and strip only on new frames
    graph.render(model.latestViz);
    if (model.latestViz !== null && model.latestViz.seq !== lastVizSeq) {
        lastVizSeq = model.latestViz.seq;
        pca.render(model.latestViz);
        activity.render(model.latestViz);
    }
    requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
