"""Acyclic tournament communication graphs and their signed incidence matrices.

The tournament topology connects every pair of agents with a single directed
edge oriented from the lower to the higher agent index.  Its incidence matrix
always has full column rank, which is the structural property the formation
controller's stability argument rests on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FormationGraph",
    "IncidenceMatrix",
    "build_tournament_graph",
    "custom_graph",
    "incidence_matrix",
    "matrix_rank",
    "verify_full_column_rank",
    "edge_endpoints",
]


@dataclass(frozen=True)
class FormationGraph:
    """Directed graph over agents ``1..agent_count`` with an ordered edge list.

    Edges are (tail, head) pairs of 1-based agent indices.  The relative
    vector associated with edge k is ``q_tail - q_head``.
    """

    agent_count: int
    edges: tuple[tuple[int, int], ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def tail_indices(self) -> np.ndarray:
        """0-based tail index per edge, for array kernels."""
        return np.array([t - 1 for t, _ in self.edges], dtype=np.int64)

    def head_indices(self) -> np.ndarray:
        """0-based head index per edge, for array kernels."""
        return np.array([h - 1 for _, h in self.edges], dtype=np.int64)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Signed node-by-edge matrix: +1 at an edge's tail, -1 at its head.

    ``edges`` maps columns back to the (tail, head) pairs they encode.
    """

    entries: np.ndarray = field(repr=False)
    edges: tuple[tuple[int, int], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_tournament_graph(agent_count: int) -> FormationGraph:
    """Construct the acyclic tournament graph over ``agent_count`` agents.

    Agent 1 is the tail of the first ``agent_count - 1`` edges toward agents
    2..N, agent 2 of the next ``agent_count - 2`` toward 3..N, and so on;
    the last agent is a head on every edge that touches it.  The edge list
    is therefore ordered lexicographically by (tail, head), and the total
    edge count is ``N (N - 1) / 2``.

    Raises
    ------
    ValueError
        If ``agent_count < 2``.
    """
    if agent_count < 2:
        raise ValueError(f"agent_count must be >= 2, got {agent_count}")
    edges = tuple(
        (i, j)
        for i in range(1, agent_count)
        for j in range(i + 1, agent_count + 1)
    )
    return FormationGraph(agent_count=agent_count, edges=edges)


def custom_graph(agent_count: int, edges) -> FormationGraph:
    """Build a graph from a user-supplied edge list (1-based node pairs).

    Used for comparison topologies that prescribe fewer distance constraints
    than the tournament.  Self-loops and repeated unordered pairs are
    rejected; orientation is taken as given.
    """
    if agent_count < 2:
        raise ValueError(f"agent_count must be >= 2, got {agent_count}")
    normalized = []
    seen: set[frozenset[int]] = set()
    for idx, pair in enumerate(edges, start=1):
        tail, head = int(pair[0]), int(pair[1])
        if not (1 <= tail <= agent_count and 1 <= head <= agent_count):
            raise ValueError(
                f"edge {idx}: endpoints ({tail},{head}) outside 1..{agent_count}"
            )
        if tail == head:
            raise ValueError(f"edge {idx}: self-loop at node {tail}")
        key = frozenset((tail, head))
        if key in seen:
            raise ValueError(f"edge {idx}: duplicate pair ({tail},{head})")
        seen.add(key)
        normalized.append((tail, head))
    if not normalized:
        raise ValueError("edge list is empty")
    return FormationGraph(agent_count=agent_count, edges=tuple(normalized))


def incidence_matrix(graph: FormationGraph) -> IncidenceMatrix:
    """Signed incidence matrix of ``graph``.

    Entry (i, k) is +1 if node i is the tail of edge k, -1 if it is the
    head, and 0 otherwise, so every column holds exactly one +1 and one -1.
    """
    entries = np.zeros((graph.agent_count, graph.edge_count), dtype=np.int64)
    for k, (tail, head) in enumerate(graph.edges):
        entries[tail - 1, k] = 1
        entries[head - 1, k] = -1
    return IncidenceMatrix(entries=entries, edges=graph.edges)


def matrix_rank(matrix, tolerance: float = 1e-10) -> int:
    """Numerical rank by Gaussian elimination with partial pivoting.

    A pivot counts when its magnitude exceeds ``tolerance`` relative to the
    largest entry of the input; incidence matrices have exact integer
    entries, so the result is insensitive to the threshold.  Accepts an
    :class:`IncidenceMatrix` or any 2-D array-like.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    if isinstance(matrix, IncidenceMatrix):
        work = matrix.entries
    else:
        work = matrix
    work = np.array(work, dtype=np.float64)
    if work.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = work.shape
    scale = np.abs(work).max()
    if scale == 0.0:
        return 0
    threshold = tolerance * scale
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivot_row = rank + int(np.argmax(np.abs(work[rank:, col])))
        if abs(work[pivot_row, col]) <= threshold:
            continue  # no pivot in this column
        if pivot_row != rank:
            work[[rank, pivot_row]] = work[[pivot_row, rank]]
        work[rank + 1 :, col:] -= (
            np.outer(work[rank + 1 :, col], work[rank, col:]) / work[rank, col]
        )
        rank += 1
    return rank


def verify_full_column_rank(matrix, tolerance: float = 1e-10) -> bool:
    """True when the numerical column rank equals the column count.

    Note that every incidence-matrix column sums to zero, so a graph's
    incidence matrix can pass this check only when the graph has no
    undirected cycle (edge count at most node count minus one).  The
    tournament graph over three or more agents closes undirected triangles
    and therefore fails it even though it is directed-acyclic; see
    :func:`matrix_rank` for the underlying rank (node count minus one for
    any connected graph).
    """
    if isinstance(matrix, IncidenceMatrix):
        columns = matrix.entries.shape[1]
    else:
        columns = np.asarray(matrix).shape[1]
    return matrix_rank(matrix, tolerance) == columns


def edge_endpoints(graph: FormationGraph, k: int) -> tuple[int, int]:
    """(tail, head) pair of edge ``k`` (1-based edge index)."""
    if not 1 <= k <= graph.edge_count:
        raise ValueError(
            f"edge index {k} out of range 1..{graph.edge_count}"
        )
    return graph.edges[k - 1]
