"""Canonical weighted graph representation and its discrete vector calculus.

A graph stores an oriented edge list in canonical form: every edge is a pair
``(i, j)`` with ``i > j`` (1-based labels on the way in, 0-based arrays
internally), sorted lexicographically.  Vertex functions live in ``R^n``,
edge flows in ``R^m``; both are plain float64 numpy arrays.  All operations
here are pure functions over the immutable graph, safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    EmptyGraphError,
    NonpositiveWeightError,
    SelfLoopError,
)

__all__ = [
    "Graph",
    "validate_graph",
    "gradient",
    "divergence",
    "apply_laplacian",
    "flow_norm",
    "energy_seminorm",
]


@dataclass(frozen=True)
class Graph:
    """Immutable connected weighted undirected simple graph.

    Attributes
    ----------
    n : int
        Number of vertices, labeled 0..n-1 internally (1..n in I/O).
    edge_i, edge_j : ndarray of int64
        Endpoints of each edge with ``edge_i > edge_j``, sorted
        lexicographically by ``(edge_i, edge_j)``.
    weights : ndarray of float64
        Positive edge weights, one per edge.
    """

    n: int
    edge_i: np.ndarray = field(repr=False)
    edge_j: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.edge_i.shape[0]

    @property
    def cycle_dim(self) -> int:
        return self.m - self.n + 1

    @cached_property
    def inv_weights(self) -> np.ndarray:
        return 1.0 / self.weights

    @cached_property
    def _adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style incidence: per vertex, incident edges ascending by edge id.

        Returns (ptr, edge, other, sign); ``sign`` is +1 where the vertex is
        the larger endpoint of the edge, -1 otherwise.
        """
        m = self.m
        verts = np.concatenate([self.edge_i, self.edge_j])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        others = np.concatenate([self.edge_j, self.edge_i])
        signs = np.concatenate(
            [np.ones(m, dtype=np.int8), -np.ones(m, dtype=np.int8)]
        )
        order = np.lexsort((eids, verts))
        counts = np.bincount(verts, minlength=self.n)
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return ptr, eids[order], others[order], signs[order]

    @property
    def adj_ptr(self) -> np.ndarray:
        return self._adjacency[0]

    @property
    def adj_edge(self) -> np.ndarray:
        return self._adjacency[1]

    @property
    def adj_other(self) -> np.ndarray:
        return self._adjacency[2]

    @property
    def adj_sign(self) -> np.ndarray:
        return self._adjacency[3]

    @cached_property
    def adj_weight(self) -> np.ndarray:
        return self.weights[self.adj_edge]

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        return np.bincount(
            np.concatenate([self.edge_i, self.edge_j]),
            weights=np.concatenate([self.weights, self.weights]),
            minlength=self.n,
        )

    def edge_labels(self) -> np.ndarray:
        """Edges as 1-based (i, j) pairs, shape (m, 2)."""
        return np.column_stack([self.edge_i + 1, self.edge_j + 1])


def _check_vertex(g: Graph, v: np.ndarray, name: str = "vertex function") -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise DimensionMismatchError(
            f"{name} has shape {v.shape}, expected ({g.n},)"
        )
    return v


def _check_edge(g: Graph, tau: np.ndarray, name: str = "edge flow") -> np.ndarray:
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != (g.m,):
        raise DimensionMismatchError(
            f"{name} has shape {tau.shape}, expected ({g.m},)"
        )
    return tau


def validate_graph(edges: Iterable[Sequence[float]], n: int) -> Graph:
    """Build a canonical :class:`Graph` from a raw 1-based edge list.

    Edges are reoriented so the larger vertex label comes first and sorted
    lexicographically; the input orientation is discarded.

    Parameters
    ----------
    edges : iterable of (i, j, weight)
        1-based endpoints and a positive weight.
    n : int
        Vertex count.

    Raises
    ------
    EmptyGraphError, SelfLoopError, DuplicateEdgeError,
    NonpositiveWeightError, DisconnectedGraphError
    """
    arr = np.asarray(list(edges), dtype=np.float64)
    if arr.size == 0:
        raise EmptyGraphError("edge list is empty")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("edges must be (i, j, weight) triples")
    a = arr[:, 0].astype(np.int64)
    b = arr[:, 1].astype(np.int64)
    w = arr[:, 2]
    if np.any((a < 1) | (a > n) | (b < 1) | (b > n)):
        raise ValueError(f"vertex labels must lie in 1..{n}")
    loops = a == b
    if np.any(loops):
        k = int(np.argmax(loops))
        raise SelfLoopError(f"self-loop at vertex {a[k]}")
    if np.any(w <= 0):
        k = int(np.argmax(w <= 0))
        raise NonpositiveWeightError(
            f"edge ({a[k]}, {b[k]}) has nonpositive weight {w[k]}"
        )
    hi = np.maximum(a, b) - 1
    lo = np.minimum(a, b) - 1
    order = np.lexsort((lo, hi))
    hi, lo, w = hi[order], lo[order], np.ascontiguousarray(w[order])
    key = hi * n + lo
    dup = np.nonzero(np.diff(key) == 0)[0]
    if dup.size:
        k = int(dup[0])
        raise DuplicateEdgeError(f"duplicate edge ({hi[k] + 1}, {lo[k] + 1})")
    g = Graph(n=n, edge_i=hi, edge_j=lo, weights=w)
    if not _connected(g):
        raise DisconnectedGraphError("graph is not connected")
    for name in ("edge_i", "edge_j", "weights"):
        getattr(g, name).setflags(write=False)
    return g


def _connected(g: Graph) -> bool:
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    ptr, other = g.adj_ptr, g.adj_other
    while frontier.size:
        counts = ptr[frontier + 1] - ptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        take = np.repeat(ptr[frontier], counts) + (
            np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        )
        nxt = np.unique(other[take])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return bool(seen.all())


def gradient(g: Graph, v: np.ndarray) -> np.ndarray:
    """Discrete gradient: per edge ``(i, j)`` with ``i > j``, ``v[i] - v[j]``."""
    v = _check_vertex(g, v)
    return v[g.edge_i] - v[g.edge_j]


def divergence(g: Graph, tau: np.ndarray) -> np.ndarray:
    """Discrete divergence, the exact adjoint of :func:`gradient`.

    Vertex ``i`` accumulates ``+tau_e`` over edges where it is the larger
    endpoint and ``-tau_e`` where it is the smaller one.
    """
    tau = _check_edge(g, tau)
    return np.bincount(g.edge_i, weights=tau, minlength=g.n) - np.bincount(
        g.edge_j, weights=tau, minlength=g.n
    )


def apply_laplacian(g: Graph, v: np.ndarray) -> np.ndarray:
    """Weighted graph Laplacian action: divergence of the weighted gradient."""
    return divergence(g, g.weights * gradient(g, v))


def flow_norm(g: Graph, tau: np.ndarray) -> float:
    """Inverse-weight norm of an edge flow: ``sqrt(sum tau_e**2 / w_e)``."""
    tau = _check_edge(g, tau)
    return float(np.sqrt(np.sum(tau * tau * g.inv_weights)))


def energy_seminorm(g: Graph, v: np.ndarray) -> float:
    """Energy seminorm: ``sqrt(sum_e w_e (v_i - v_j)**2)``; kills constants."""
    d = gradient(g, v)
    return float(np.sqrt(np.sum(g.weights * d * d)))
