"""BFS spanning trees and the tree-supported flow solve.

The expensive half of the error estimator needs a flow with prescribed
divergence.  On a spanning tree that flow is unique and computable in one
bottom-up pass: the flow on the edge above vertex ``k`` must carry the whole
rhs mass of ``k``'s subtree.  A matching top-down pass recovers the tree
potential, which is how the two routes (subtree sums vs. solving the tree
Laplacian and multiplying back) are cross-checked in the tests.

All passes are level-synchronous and vectorized; an optional work counter
tallies the array elements touched by the bulk operations so tests can pin
the O(n + m) behavior.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, IncompatibleRHSError
from .graph import Graph

__all__ = [
    "SpanningTree",
    "WorkCounter",
    "count_work",
    "bfs_tree",
    "tree_flow",
    "tree_potential",
    "compute_tau_f",
]


class WorkCounter:
    """Tally of array elements touched by the bulk passes in this module."""

    __slots__ = ("elements",)

    def __init__(self) -> None:
        self.elements = 0

    def add(self, k: int) -> None:
        self.elements += int(k)


_active_counter: WorkCounter | None = None


@contextmanager
def count_work():
    """Collect a :class:`WorkCounter` over the enclosed tree computations."""
    global _active_counter
    counter = WorkCounter()
    prev = _active_counter
    _active_counter = counter
    try:
        yield counter
    finally:
        _active_counter = prev


def _charge(k: int) -> None:
    if _active_counter is not None:
        _active_counter.add(k)


@dataclass(frozen=True)
class SpanningTree:
    """BFS spanning tree in flat-array form.

    ``parent[root] == root`` and ``parent_edge[root] == -1``; every other
    vertex stores its parent and the graph edge id joining them.  ``depth``
    is the hop distance from the root and ``bfs_order`` lists vertices in
    discovery order (root first), so depth is nondecreasing along it.
    """

    root: int
    parent: np.ndarray = field(repr=False)
    parent_edge: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    bfs_order: np.ndarray = field(repr=False)
    tree_edge_set: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.parent.shape[0]


def bfs_tree(g: Graph, root: int = 0) -> SpanningTree:
    """Breadth-first spanning tree from ``root`` (0-based).

    Deterministic: each frontier is expanded in queue order and, per vertex,
    neighbors are scanned ascending by edge id, so ties resolve exactly as in
    the classic sequential algorithm.
    """
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range 0..{g.n - 1}")
    n = g.n
    ptr, edge, other = g.adj_ptr, g.adj_edge, g.adj_other
    parent = np.full(n, -1, dtype=np.int64)
    parent_edge = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    parent[root] = root
    frontier = np.array([root], dtype=np.int64)
    layers = [frontier]
    level = 0
    while frontier.size:
        counts = ptr[frontier + 1] - ptr[frontier]
        total = int(counts.sum())
        _charge(total)
        starts = np.repeat(ptr[frontier], counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        take = starts + offsets
        src = np.repeat(frontier, counts)
        tgt = other[take]
        eid = edge[take]
        fresh = ~seen[tgt]
        tgt, src, eid = tgt[fresh], src[fresh], eid[fresh]
        # first discovery in stream order wins, matching the queue algorithm
        uniq, first = np.unique(tgt, return_index=True)
        enqueue = np.argsort(first, kind="stable")
        new = uniq[enqueue]
        if new.size == 0:
            break
        level += 1
        parent[new] = src[first][enqueue]
        parent_edge[new] = eid[first][enqueue]
        depth[new] = level
        seen[new] = True
        layers.append(new)
        frontier = new
    bfs_order = np.concatenate(layers)
    tree_edge_set = np.zeros(g.m, dtype=bool)
    tree_edge_set[parent_edge[parent_edge >= 0]] = True
    for name in ("parent", "parent_edge", "depth", "bfs_order", "tree_edge_set"):
        locals()[name].setflags(write=False)
    return SpanningTree(
        root=root,
        parent=parent,
        parent_edge=parent_edge,
        depth=depth,
        bfs_order=bfs_order,
        tree_edge_set=tree_edge_set,
    )


def _check_compatible(g: Graph, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (g.n,):
        raise DimensionMismatchError(
            f"rhs has shape {f.shape}, expected ({g.n},)"
        )
    total = float(f.sum())
    if abs(total) > 1e-10 * max(1.0, float(np.linalg.norm(f))):
        raise IncompatibleRHSError(
            f"rhs entries sum to {total:.3e}; a solvable system needs zero mass "
            "(pass --project-rhs at the CLI to subtract the mean)"
        )
    return f


def tree_flow(g: Graph, t: SpanningTree, f: np.ndarray) -> np.ndarray:
    """Flow supported on tree edges whose divergence is ``f``.

    Bottom-up: the subtree sums of ``f`` are accumulated level by level, and
    the flow on the parent edge of ``k`` is the subtree sum of ``k`` signed by
    whether ``k`` is the larger endpoint of that edge.  Equivalent to solving
    the tree Laplacian for a potential and multiplying back, in O(n).
    """
    f = _check_compatible(g, f)
    subtree = f.copy()
    depth, parent = t.depth, t.parent
    order = t.bfs_order
    ends = np.searchsorted(depth[order], np.arange(depth.max() + 2))
    for d in range(int(depth.max()), 0, -1):
        layer = order[ends[d] : ends[d + 1]]
        _charge(layer.size)
        np.add.at(subtree, parent[layer], subtree[layer])
    tau = np.zeros(g.m)
    nonroot = order[1:]
    pe = t.parent_edge[nonroot]
    sign = np.where(g.edge_i[pe] == nonroot, 1.0, -1.0)
    tau[pe] = sign * subtree[nonroot]
    _charge(nonroot.size)
    return tau


def tree_potential(g: Graph, t: SpanningTree, tau: np.ndarray) -> np.ndarray:
    """Potential ``x`` with ``x[root] = 0`` whose weighted tree gradient is ``tau``.

    Reads only tree-edge entries of ``tau``.  Top-down integration:
    ``x[child] = x[parent] +/- tau_e / w_e`` along each parent edge.
    """
    tau = np.asarray(tau, dtype=np.float64)
    x = np.zeros(g.n)
    depth, parent = t.depth, t.parent
    order = t.bfs_order
    ends = np.searchsorted(depth[order], np.arange(depth.max() + 2))
    for d in range(1, int(depth.max()) + 1):
        layer = order[ends[d] : ends[d + 1]]
        _charge(layer.size)
        pe = t.parent_edge[layer]
        sign = np.where(g.edge_i[pe] == layer, 1.0, -1.0)
        x[layer] = x[parent[layer]] + sign * tau[pe] / g.weights[pe]
    return x


def compute_tau_f(g: Graph, f: np.ndarray, root: int = 0) -> tuple[np.ndarray, SpanningTree]:
    """Curl-free flow with divergence ``f``, plus the BFS tree that carried it.

    The returned flow vanishes on every off-tree edge; total work is O(n + m).
    """
    t = bfs_tree(g, root)
    return tree_flow(g, t, f), t
