"""State-history analytics: PCA projection, activity frame, connectivity.

These produce the data behind the three live arpeggiator views; layout and
drawing belong to the client. Everything here is a pure function over
snapshots.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .reservoir import Network, ReservoirState, effective_matrices

PCA_DEFAULT_K = 2
EDGE_PERCENTILE = 80.0


@dataclass
class StateHistory:
    """T x N matrix of state snapshots, optionally labeled by note index."""

    rows: np.ndarray
    labels: list[int | None] | None = None

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            raise ValueError("rows must be a T x N matrix")
        if self.labels is not None and len(self.labels) != self.rows.shape[0]:
            raise ValueError("labels length must match row count")


@dataclass
class PcaResult:
    components: np.ndarray  # k x N, orthonormal rows
    projected: np.ndarray  # T x k
    explained_variance_ratio: np.ndarray  # k, non-increasing
    degenerate: bool = False


@dataclass
class ConnectivityGraph:
    vertices: list[tuple[int, float]]  # (neuron id, |s_i|)
    edges: list[tuple[int, int, float]]  # (from, to, effective weight)


def pca_project(history: StateHistory, k: int = PCA_DEFAULT_K) -> PcaResult:
    """Top-k principal components of the mean-centered history.

    Computed by SVD of the centered matrix. Deterministic sign convention:
    each component's largest-magnitude entry is made positive. Zero-variance
    data comes back flagged degenerate with all ratios 0.
    """
    rows = history.rows
    t, n = rows.shape
    if t < 2:
        raise ValueError(f"need at least 2 rows, got {t}")
    if not 1 <= k <= min(t, n):
        raise ValueError(f"k must be in [1, {min(t, n)}], got {k}")
    centered = rows - rows.mean(axis=0)
    total = float(np.sum(centered**2))
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:k].copy()
    degenerate = total < 1e-18
    if degenerate:
        ratios = np.zeros(k)
    else:
        ratios = svals[:k] ** 2 / total
    for i in range(k):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    projected = centered @ components.T
    return PcaResult(
        components=components,
        projected=projected,
        explained_variance_ratio=ratios,
        degenerate=degenerate,
    )


def activity_frame(state: ReservoirState) -> np.ndarray:
    """The state vector s, verbatim; display scaling is the client's job."""
    return state.s.copy()


def connectivity_graph(
    net: Network, state: ReservoirState, threshold: float
) -> ConnectivityGraph:
    """Vertices carry |s_i|; edges are effective recurrent entries with
    |weight| strictly above the display threshold, directed source -> target."""
    _, w, _, _, _ = effective_matrices(net)
    vertices = [(i, float(a)) for i, a in enumerate(np.abs(state.s))]
    targets, sources = np.nonzero(np.abs(w) > threshold)
    edges = [
        (int(j), int(i), float(w[i, j])) for i, j in zip(targets, sources)
    ]
    return ConnectivityGraph(vertices=vertices, edges=edges)


def default_edge_threshold(net: Network) -> float:
    """80th percentile of the nonzero effective recurrent magnitudes."""
    _, w, _, _, _ = effective_matrices(net)
    mags = np.abs(w[w != 0.0])
    if mags.size == 0:
        return 0.0
    return float(np.percentile(mags, EDGE_PERCENTILE))


def pca_to_jsonable(result: PcaResult, labels=None) -> dict:
    return {
        "points": result.projected.tolist(),
        "labels": list(labels) if labels is not None else None,
        "explained_variance_ratio": result.explained_variance_ratio.tolist(),
        "degenerate": result.degenerate,
    }


def graph_to_jsonable(graph: ConnectivityGraph) -> dict:
    return {
        "vertices": [[i, a] for i, a in graph.vertices],
        "edges": [[u, v, w] for u, v, w in graph.edges],
    }


def write_pca_csv(result: PcaResult, path, labels=None) -> None:
    """Projected points (and labels when given), one row per history row."""
    k = result.projected.shape[1]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        header = [f"pc{i + 1}" for i in range(k)]
        if labels is not None:
            header.append("label")
        writer.writerow(header)
        for i, row in enumerate(result.projected):
            out = [f"{v:.9g}" for v in row]
            if labels is not None:
                out.append("" if labels[i] is None else str(labels[i]))
            writer.writerow(out)


def write_activity_csv(frame: np.ndarray, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["neuron", "activity"])
        for i, v in enumerate(frame):
            writer.writerow([i, f"{v:.9g}"])


def write_graph_csv(graph: ConnectivityGraph, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["from", "to", "weight"])
        for u, v, w in graph.edges:
            writer.writerow([u, v, f"{w:.9g}"])
