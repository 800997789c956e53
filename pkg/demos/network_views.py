"""Project reservoir trajectories and inspect the wiring under them.

Three views of the same running network: a PCA projection of the state
trajectory, a per-neuron activity frame, and the thresholded
connectivity graph weighted by current activity. Each view ends up as
a CSV you can plot with anything.

Run:  python3 demos/network_views.py
"""

from pathlib import Path

import numpy as np

from reservoirmidi import (
    ArpSession,
    LfoSession,
    NetworkConfig,
    Scales,
    arp_tick,
    init_network,
    lfo_tick,
    set_held_notes,
)
from reservoirmidi.viz import (
    StateHistory,
    activity_frame,
    connectivity_graph,
    default_edge_threshold,
    pca_project,
    write_activity_csv,
    write_graph_csv,
    write_pca_csv,
)

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)


def main():
    lfo_config = NetworkConfig(neurons=100, seed=26)
    arp_config = NetworkConfig(neurons=100, seed=26, feedback_dim=8, output_dim=8)
    scales = Scales(spectral_radius=1.25, feedback_scale=1.2, leak_rate=0.3)

    print("1. Run the oscillating LFO and project its 100-dim trajectory.")
    session = LfoSession(init_network(lfo_config, scales))
    for _ in range(1024):
        lfo_tick(session)
    history = StateHistory(np.array(session.history))
    pca = pca_project(history, k=2)
    ratios = pca.explained_variance_ratio
    print(f"   history: {history.rows.shape[0]} states of {history.rows.shape[1]} dims")
    print(f"   top-2 explained variance: {ratios[0]:.3f} + {ratios[1]:.3f}"
          f" = {ratios.sum():.3f}")
    print("   a clean limit cycle flattens onto very few components")
    write_pca_csv(pca, OUT / "lfo_trajectory_pca.csv")

    print("\n2. The arpeggiator visits per-note regions; label points by the")
    print("   note index chosen at that step and the projection keeps them.")
    arp = ArpSession(init_network(arp_config, scales), rng_seed=4, beta=3.0)
    set_held_notes(arp, [60, 64, 67, 71])
    labels = []
    for _ in range(512):
        event = arp_tick(arp)
        labels.append(event.index if event else None)
    arp_history = StateHistory(np.array(arp.history), labels=labels)
    arp_pca = pca_project(arp_history, k=2)
    write_pca_csv(arp_pca, OUT / "arp_trajectory_pca.csv", labels=labels)
    print(f"   labelled projection -> {OUT / 'arp_trajectory_pca.csv'}")

    print("\n3. Instantaneous views of the same session.")
    frame = activity_frame(arp.state)
    print(f"   activity frame: {frame.size} values, "
          f"mean |s|={np.abs(frame).mean():.3f}, max |s|={np.abs(frame).max():.3f}")
    write_activity_csv(frame, OUT / "activity.csv")

    threshold = default_edge_threshold(arp.net)
    graph = connectivity_graph(arp.net, arp.state, threshold)
    print(f"   connectivity graph at threshold {threshold:.3f}: "
          f"{len(graph.vertices)} vertices, {len(graph.edges)} edges")
    print("   (edges keep the strongest fifth of the recurrent weights;")
    print("    vertex size tracks |s_i| so hot neurons stand out)")
    write_graph_csv(graph, OUT / "graph.csv")

    print(f"\nCSV views written to {OUT}/")


if __name__ == "__main__":
    main()
