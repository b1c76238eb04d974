"""Cycle bases of a graph and their subspace decompositions.

Two constructions: fundamental cycles (one per off-tree edge, closed through
the spanning tree) for general graphs, and length-3 face cycles for generated
triangulated grids.  Coefficients are exact signed units, so divergence-free
checks hold with zero tolerance.

Storage is flat CSR-style throughout: a cycle is a slice of parallel
edge-id/coefficient arrays, and two inverted indexes (edge to cycles, vertex
to incident cycles) are built once at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyBasisError,
    InvalidCycleError,
    NotAGridGraphError,
    RankDeficientError,
)
from .graph import Graph
from .tree import SpanningTree

__all__ = [
    "CycleBasis",
    "SubspaceDecomposition",
    "fundamental_cycle_basis",
    "face_cycle_basis",
    "vertex_subspaces",
    "validate_cycle_basis",
    "basis_to_json",
]


@dataclass(frozen=True)
class CycleBasis:
    """Flat storage of divergence-free cycle vectors over a fixed graph.

    Cycle ``c`` occupies ``cyc_edge[cyc_ptr[c]:cyc_ptr[c+1]]`` with matching
    ``cyc_coef`` entries in {-1, +1}.  ``anchors[c]`` is the inducing
    off-tree edge for fundamental cycles, -1 for face cycles.
    """

    n: int
    m: int
    cyc_ptr: np.ndarray = field(repr=False)
    cyc_edge: np.ndarray = field(repr=False)
    cyc_coef: np.ndarray = field(repr=False)
    anchors: np.ndarray = field(repr=False)
    e2c_ptr: np.ndarray = field(repr=False)
    e2c_cyc: np.ndarray = field(repr=False)
    v2c_ptr: np.ndarray = field(repr=False)
    v2c_cyc: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.anchors.shape[0]

    def densify(self, c: int) -> np.ndarray:
        """Cycle ``c`` as a length-m float vector."""
        out = np.zeros(self.m)
        sl = slice(self.cyc_ptr[c], self.cyc_ptr[c + 1])
        out[self.cyc_edge[sl]] = self.cyc_coef[sl]
        return out

    def dense_matrix(self) -> np.ndarray:
        """All cycles as columns of an m x size matrix (small problems only)."""
        out = np.zeros((self.m, self.size))
        for c in range(self.size):
            out[:, c] = self.densify(c)
        return out

    def cycles_at_vertex(self, v: int) -> np.ndarray:
        return self.v2c_cyc[self.v2c_ptr[v] : self.v2c_ptr[v + 1]]

    def cycles_on_edge(self, e: int) -> np.ndarray:
        return self.e2c_cyc[self.e2c_ptr[e] : self.e2c_ptr[e + 1]]


@dataclass(frozen=True)
class SubspaceDecomposition:
    """Grouping of cycle ids into J blocks for the multiplicative sweep.

    ``owners[j]`` records what block ``j`` is built around: a vertex id in
    vertex mode, the cycle id itself in single-cycle mode.
    """

    mode: str
    sub_ptr: np.ndarray = field(repr=False)
    sub_cyc: np.ndarray = field(repr=False)
    owners: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return self.owners.shape[0]

    @property
    def max_block(self) -> int:
        return int(np.max(np.diff(self.sub_ptr))) if self.count else 0

    def block(self, j: int) -> np.ndarray:
        return self.sub_cyc[self.sub_ptr[j] : self.sub_ptr[j + 1]]


def _finalize(g: Graph, cyc_ptr, cyc_edge, cyc_coef, anchors) -> CycleBasis:
    """Build the inverted indexes and freeze the basis."""
    ncyc = cyc_ptr.shape[0] - 1
    owner = np.repeat(np.arange(ncyc, dtype=np.int64), np.diff(cyc_ptr))
    order = np.lexsort((owner, cyc_edge))
    e2c_cyc = owner[order]
    e2c_ptr = np.zeros(g.m + 1, dtype=np.int64)
    np.cumsum(np.bincount(cyc_edge, minlength=g.m), out=e2c_ptr[1:])
    verts = np.concatenate([g.edge_i[cyc_edge], g.edge_j[cyc_edge]])
    vc = np.stack([verts, np.concatenate([owner, owner])])
    vc = np.unique(vc, axis=1)
    v2c_ptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(vc[0], minlength=g.n), out=v2c_ptr[1:])
    return CycleBasis(
        n=g.n,
        m=g.m,
        cyc_ptr=cyc_ptr,
        cyc_edge=cyc_edge,
        cyc_coef=cyc_coef,
        anchors=np.asarray(anchors, dtype=np.int64),
        e2c_ptr=e2c_ptr,
        e2c_cyc=e2c_cyc,
        v2c_ptr=v2c_ptr,
        v2c_cyc=vc[1],
    )


def _assemble(g: Graph, entries, anchors) -> CycleBasis:
    """Freeze per-cycle (edge, coef) lists into flat arrays plus indexes."""
    sizes = np.fromiter((len(ent) for ent in entries), dtype=np.int64, count=len(entries))
    cyc_ptr = np.zeros(len(entries) + 1, dtype=np.int64)
    np.cumsum(sizes, out=cyc_ptr[1:])
    total = int(cyc_ptr[-1])
    cyc_edge = np.empty(total, dtype=np.int64)
    cyc_coef = np.empty(total, dtype=np.int8)
    for c, ent in enumerate(entries):
        lo = cyc_ptr[c]
        for k, (e, s) in enumerate(ent):
            cyc_edge[lo + k] = e
            cyc_coef[lo + k] = s
    return _finalize(g, cyc_ptr, cyc_edge, cyc_coef, anchors)


def fundamental_cycle_basis(g: Graph, t: SpanningTree) -> CycleBasis:
    """One cycle per off-tree edge, closed through the tree.

    The off-tree edge ``(i, j)`` with ``i > j`` carries coefficient +1; the
    remaining coefficients follow the traversal ``i -> j -> ... -> i``, each
    edge signed positive when walked from its larger endpoint to its smaller.
    The tree path is found by climbing both endpoints to their lowest common
    ancestor using the stored depths.
    """
    parent, parent_edge, depth = t.parent, t.parent_edge, t.depth
    edge_i = g.edge_i
    entries = []
    anchors = []
    for e in np.nonzero(~t.tree_edge_set)[0]:
        i, j = int(g.edge_i[e]), int(g.edge_j[e])
        ent = [(int(e), 1)]
        a, b = j, i
        up_a = []
        up_b = []
        while depth[a] > depth[b]:
            pe = int(parent_edge[a])
            up_a.append((pe, 1 if edge_i[pe] == a else -1))
            a = int(parent[a])
        while depth[b] > depth[a]:
            pe = int(parent_edge[b])
            up_b.append((pe, -1 if edge_i[pe] == b else 1))
            b = int(parent[b])
        while a != b:
            pe = int(parent_edge[a])
            up_a.append((pe, 1 if edge_i[pe] == a else -1))
            a = int(parent[a])
            pe = int(parent_edge[b])
            up_b.append((pe, -1 if edge_i[pe] == b else 1))
            b = int(parent[b])
        entries.append(ent + up_a + up_b)
        anchors.append(int(e))
    return _assemble(g, entries, anchors)


def face_cycle_basis(grid) -> CycleBasis:
    """Length-3 cycles over the triangles of a generated grid.

    Each square cell of the (N+1) x (N+1) vertex lattice is split by its
    ascending diagonal into two triangles, giving 2 N^2 cycles; every vertex
    meets at most six of them.  Accepts the object returned by
    ``uniform_grid`` (anything carrying ``N`` and ``graph``).
    """
    N = getattr(grid, "N", None)
    g = getattr(grid, "graph", None)
    if N is None or g is None:
        raise NotAGridGraphError("face cycles need a generated grid description")
    if g.n != (N + 1) ** 2 or g.m != 2 * N * (N + 1) + N * N:
        raise NotAGridGraphError(
            f"graph shape (n={g.n}, m={g.m}) does not match an N={N} grid"
        )
    rr, cc = np.meshgrid(np.arange(N, dtype=np.int64), np.arange(N, dtype=np.int64), indexing="ij")
    sw = (rr * (N + 1) + cc).ravel()
    se = sw + 1
    nw = sw + (N + 1)
    ne = nw + 1
    ncell = sw.shape[0]
    # per cell: lower triangle sw->se->ne, then upper triangle sw->ne->nw
    a = np.empty((ncell, 6), dtype=np.int64)
    b = np.empty((ncell, 6), dtype=np.int64)
    a[:, 0], b[:, 0] = sw, se
    a[:, 1], b[:, 1] = se, ne
    a[:, 2], b[:, 2] = ne, sw
    a[:, 3], b[:, 3] = sw, ne
    a[:, 4], b[:, 4] = ne, nw
    a[:, 5], b[:, 5] = nw, sw
    a = a.ravel()
    b = b.ravel()
    coef = np.where(a > b, 1, -1).astype(np.int8)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    keys = g.edge_i * g.n + g.edge_j
    want = hi * g.n + lo
    ids = np.searchsorted(keys, want)
    if np.any(ids >= g.m) or np.any(keys[np.minimum(ids, g.m - 1)] != want):
        raise NotAGridGraphError("expected grid edge missing from graph")
    ncyc = 2 * ncell
    cyc_ptr = np.arange(0, 3 * ncyc + 1, 3, dtype=np.int64)
    return _finalize(g, cyc_ptr, ids, coef, np.full(ncyc, -1, dtype=np.int64))


def vertex_subspaces(basis: CycleBasis, mode: str = "vertex") -> SubspaceDecomposition:
    """Group cycles into blocks for the multiplicative sweep.

    ``vertex`` mode assigns each vertex the cycles it touches and drops
    vertices touching none; ``single-cycle`` mode yields singleton blocks.
    """
    if basis.size == 0:
        raise EmptyBasisError("cannot decompose an empty cycle basis")
    if mode == "single-cycle":
        ids = np.arange(basis.size, dtype=np.int64)
        ptr = np.arange(basis.size + 1, dtype=np.int64)
        return SubspaceDecomposition(mode=mode, sub_ptr=ptr, sub_cyc=ids, owners=ids)
    if mode != "vertex":
        raise ValueError(f"unknown decomposition mode {mode!r}")
    sizes = np.diff(basis.v2c_ptr)
    keep = np.nonzero(sizes > 0)[0]
    ptr = np.zeros(keep.size + 1, dtype=np.int64)
    np.cumsum(sizes[keep], out=ptr[1:])
    chunks = [basis.cycles_at_vertex(int(v)) for v in keep]
    sub_cyc = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return SubspaceDecomposition(
        mode=mode, sub_ptr=ptr, sub_cyc=sub_cyc, owners=keep.astype(np.int64)
    )


def validate_cycle_basis(g: Graph, basis: CycleBasis) -> dict:
    """Check the basis invariants; raise on violation, else return diagnostics.

    Divergence of every cycle must vanish identically.  The cardinality must
    be m - n + 1, and for n <= 500 a dense rank oracle confirms independence.
    """
    expected = g.cycle_dim
    if basis.size != expected:
        raise RankDeficientError(
            f"basis has {basis.size} cycles, cycle space has dimension {expected}"
        )
    # all cycles at once: segment-sum signed coefficients over (cycle, vertex)
    # runs; every run must cancel exactly (coefficients are integers)
    owner = np.repeat(
        np.arange(basis.size, dtype=np.int64), np.diff(basis.cyc_ptr)
    )
    verts = np.concatenate([g.edge_i[basis.cyc_edge], g.edge_j[basis.cyc_edge]])
    signs = np.concatenate([basis.cyc_coef, -basis.cyc_coef]).astype(np.int64)
    both = np.concatenate([owner, owner])
    order = np.lexsort((verts, both))
    verts, signs, both = verts[order], signs[order], both[order]
    if verts.size:
        starts = np.concatenate(
            [[0], np.nonzero((np.diff(both) != 0) | (np.diff(verts) != 0))[0] + 1]
        )
        sums = np.add.reduceat(signs, starts)
        bad = np.nonzero(sums != 0)[0]
        if bad.size:
            c = int(both[starts[bad[0]]])
            raise InvalidCycleError(f"cycle {c} has nonzero divergence")
    rank_checked = g.n <= 500
    if rank_checked:
        rank = int(np.linalg.matrix_rank(basis.dense_matrix()))
        if rank != expected:
            raise RankDeficientError(
                f"cycles span a rank-{rank} space, expected {expected}"
            )
    return {
        "cycles": basis.size,
        "rank_checked": rank_checked,
        "max_support": int(np.max(np.diff(basis.cyc_ptr))) if basis.size else 0,
        "max_cycles_per_vertex": int(np.max(np.diff(basis.v2c_ptr))) if basis.size else 0,
    }


def basis_to_json(basis: CycleBasis) -> list[dict]:
    """JSON-ready dump: per cycle, its 1-based anchor (or None) and entries."""
    out = []
    for c in range(basis.size):
        sl = slice(int(basis.cyc_ptr[c]), int(basis.cyc_ptr[c + 1]))
        anchor = int(basis.anchors[c])
        out.append(
            {
                "anchor": anchor + 1 if anchor >= 0 else None,
                "entries": [
                    [int(e) + 1, int(s)]
                    for e, s in zip(basis.cyc_edge[sl], basis.cyc_coef[sl])
                ],
            }
        )
    return out
