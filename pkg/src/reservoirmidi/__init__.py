"""Fixed-weight random reservoir networks as MIDI control sources.

A small leaky echo state network is initialized from a seed and never
trained. Its readout, squashed or sampled, becomes either a smooth
control-change LFO or an arpeggiator over held notes. Everything is
deterministic given the seeds, so any live session can be re-rendered
offline bit for bit.
"""

from .arp import (
    ArpSession,
    CapacityError,
    NoteEvent,
    arp_tick,
    note_counts,
    one_hot,
    render_arp,
    sample_index,
    set_held_notes,
    softmax_confidence,
)
from .lfo import (
    LfoSample,
    LfoSession,
    PulseInput,
    dominant_period,
    lfo_tick,
    render_lfo,
    search_waveforms,
    sigmoid,
    value_to_cc,
)
from .midifile import MidiMessage, events_to_smf, lfo_to_cc_stream, write_smf
from .reservoir import (
    ConfigError,
    EngineFault,
    Network,
    NetworkConfig,
    ReservoirState,
    Scales,
    effective_matrices,
    init_network,
    network_from_matrices,
    reseed,
    reset_state,
    spectral_radius_estimate,
    step,
)
from .service import SessionController, collect_stream, replay_session_log
from .viz import (
    ConnectivityGraph,
    PcaResult,
    StateHistory,
    activity_frame,
    connectivity_graph,
    default_edge_threshold,
    pca_project,
)

__version__ = "0.1.0"

__all__ = [
    "ArpSession",
    "CapacityError",
    "ConfigError",
    "ConnectivityGraph",
    "EngineFault",
    "LfoSample",
    "LfoSession",
    "MidiMessage",
    "Network",
    "NetworkConfig",
    "NoteEvent",
    "PcaResult",
    "PulseInput",
    "ReservoirState",
    "Scales",
    "SessionController",
    "StateHistory",
    "activity_frame",
    "arp_tick",
    "collect_stream",
    "connectivity_graph",
    "default_edge_threshold",
    "dominant_period",
    "effective_matrices",
    "events_to_smf",
    "init_network",
    "lfo_tick",
    "lfo_to_cc_stream",
    "network_from_matrices",
    "note_counts",
    "one_hot",
    "pca_project",
    "render_arp",
    "render_lfo",
    "replay_session_log",
    "reseed",
    "reset_state",
    "sample_index",
    "search_waveforms",
    "set_held_notes",
    "sigmoid",
    "softmax_confidence",
    "spectral_radius_estimate",
    "step",
    "value_to_cc",
    "write_smf",
]
