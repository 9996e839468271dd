import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ccpareto.exceptions import (
    CoverageUnderflowError,
    DimensionMismatchError,
    EmptyGraphError,
    GraphFormatError,
)

logger = logging.getLogger(__name__)

# Published vertex counts of the benchmark collaboration graphs, used only to
# flag a preprocessing difference when one of these files is loaded.
REFERENCE_VERTEX_COUNTS = {
    "ca-GrQc": 4158,
    "ca-HepPh": 11204,
    "ca-AstroPh": 17903,
}

Flip = Tuple[int, bool]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph over dense vertex indices 0..n-1."""
    n: int
    adjacency: Tuple[np.ndarray, ...]
    degrees: np.ndarray
    edge_count: int
    original_ids: np.ndarray
    closed: Tuple[np.ndarray, ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]], original_ids: Sequence[int] = None) -> "Graph":
        neighbours: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                continue
            neighbours[u].add(v)
            neighbours[v].add(u)

        adjacency = tuple(np.array(sorted(nb), dtype=np.int64) for nb in neighbours)
        closed = tuple(np.array(sorted(nb | {i}), dtype=np.int64) for i, nb in enumerate(neighbours))
        degrees = np.array([len(nb) for nb in neighbours], dtype=np.int64)
        ids = np.arange(n, dtype=np.int64) if original_ids is None else np.asarray(original_ids, dtype=np.int64)

        return cls(
            n=n,
            adjacency=adjacency,
            degrees=degrees,
            edge_count=int(degrees.sum()) // 2,
            original_ids=ids,
            closed=closed,
        )


@dataclass
class CoverageState:
    """Per-vertex cover counters of one selection."""
    cover_count: np.ndarray
    covered_total: int = 0

    @classmethod
    def empty(cls, n: int) -> "CoverageState":
        return cls(cover_count=np.zeros(n, dtype=np.int32), covered_total=0)

    def copy(self) -> "CoverageState":
        return CoverageState(cover_count=self.cover_count.copy(), covered_total=self.covered_total)


def load_graph(path: str) -> Graph:
    """Read a SNAP-style edge list.

    Node ids are remapped to dense indices in ascending order of original id;
    duplicate edges collapse and self-loops are dropped.
    """
    raw_edges: List[Tuple[int, int]] = []

    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue

            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"expected two node ids, got {len(parts)} tokens", path, line_no)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"non-integer token in {line!r}", path, line_no)
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative node id in {line!r}", path, line_no)

            raw_edges.append((u, v))

    if not raw_edges:
        raise EmptyGraphError(f"{path}: empty edge set")

    ids = sorted({u for edge in raw_edges for u in edge})
    index: Dict[int, int] = {node: i for i, node in enumerate(ids)}
    graph = Graph.from_edges(len(ids), ((index[u], index[v]) for u, v in raw_edges), original_ids=ids)

    if graph.edge_count == 0:
        raise EmptyGraphError(f"{path}: empty edge set (only self-loops)")

    logger.info(f"Loaded graph {path}: n={graph.n}, edges={graph.edge_count}")

    stem = os.path.basename(path).split(".")[0]
    expected_n = REFERENCE_VERTEX_COUNTS.get(stem)
    if expected_n is not None and expected_n != graph.n:
        logger.info(f"Graph {stem} has n={graph.n}; the published benchmark instance has n={expected_n}")

    return graph


def _check_length(graph: Graph, selection: np.ndarray):
    if len(selection) != graph.n:
        raise DimensionMismatchError(f"selection has length {len(selection)}, graph has {graph.n} vertices")


def coverage(graph: Graph, selection: np.ndarray) -> int:
    """Number of vertices that are selected or adjacent to a selected vertex."""
    selection = np.asarray(selection, dtype=bool)
    _check_length(graph, selection)

    covered = np.zeros(graph.n, dtype=bool)
    for v in np.flatnonzero(selection):
        covered[graph.closed[v]] = True
    return int(covered.sum())


def coverage_state(graph: Graph, selection: np.ndarray) -> CoverageState:
    selection = np.asarray(selection, dtype=bool)
    _check_length(graph, selection)

    state = CoverageState.empty(graph.n)
    for v in np.flatnonzero(selection):
        state.cover_count[graph.closed[v]] += 1
    state.covered_total = int(np.count_nonzero(state.cover_count))
    return state


def coverage_apply_flips(state: CoverageState, graph: Graph, flipped: Sequence[Flip]) -> CoverageState:
    """Update ``state`` in place for the given (vertex, new bit) flips and return it."""
    counts = state.cover_count
    for v, bit in flipped:
        idx = graph.closed[v]
        current = counts[idx]
        if bit:
            state.covered_total += int(np.count_nonzero(current == 0))
            counts[idx] = current + 1
        else:
            if np.any(current <= 0):
                raise CoverageUnderflowError(f"cover counter underflow when removing vertex {v}")
            state.covered_total -= int(np.count_nonzero(current == 1))
            counts[idx] = current - 1
    return state


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p) graph, mostly for oracle tests and demos."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    edges = list(zip(*np.nonzero(upper)))
    return Graph.from_edges(n, ((int(u), int(v)) for u, v in edges))
