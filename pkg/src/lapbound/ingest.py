"""Graph ingestion and synthesis: Matrix Market files, lattices, generators.

File reading is deliberately forgiving (self-loops, duplicates, negative or
zero weights, disconnection all pass through) and :func:`preprocess` is the
single place that turns raw entries into a clean connected weighted graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse
import scipy.sparse.csgraph

from .errors import (
    EmptyGraphError,
    ParseError,
    TooManyEdgesError,
    UnsupportedFormatError,
)
from .graph import Graph, apply_laplacian

__all__ = [
    "GridSpec",
    "read_matrix_market",
    "write_matrix_market",
    "preprocess",
    "uniform_grid",
    "sine_field",
    "sample_and_rhs",
    "random_connected_graph",
]


def read_matrix_market(path) -> tuple[np.ndarray, int]:
    """Read a Matrix Market coordinate file into raw 1-based edge triples.

    Returns ``(entries, n)`` where ``entries`` has one ``(i, j, w)`` row per
    undirected edge occurrence, ``i >= j``.  Symmetric (and skew-symmetric)
    files contribute their stored triangle verbatim; general files are
    symmetrized as the average of the matrix and its transpose, so each
    one-sided entry carries half its stored value.  Pattern files get unit
    weights.  Nothing is merged or dropped here; see :func:`preprocess`.
    """
    # scipy folds a missing file into its banner error; keep it an OSError
    with open(path, "rb"):
        pass
    try:
        rows, cols, _, fmt, fieldkind, symmetry = scipy.io.mminfo(path)
    except ValueError as exc:
        raise ParseError(f"unreadable Matrix Market header in {path}: {exc}") from exc
    if fieldkind == "complex" or symmetry == "hermitian":
        raise UnsupportedFormatError("complex-valued matrices have no edge weights")
    if fmt != "coordinate":
        raise UnsupportedFormatError("dense array files are not edge lists")
    if rows != cols:
        raise ParseError(f"adjacency matrix must be square, got {rows}x{cols}")
    try:
        mat = scipy.io.mmread(path).tocoo()
    except (ValueError, TypeError) as exc:
        raise ParseError(f"malformed Matrix Market body in {path}: {exc}") from exc
    r = mat.row.astype(np.int64)
    c = mat.col.astype(np.int64)
    w = np.asarray(mat.data, dtype=np.float64)
    if symmetry == "general":
        off = r != c
        half = np.where(off, 0.5 * w, w)
        entries = np.column_stack(
            [np.maximum(r, c) + 1.0, np.minimum(r, c) + 1.0, half]
        )
    else:
        # the reader mirrors the stored triangle; keep the stored half
        keep = r >= c
        entries = np.column_stack([r[keep] + 1.0, c[keep] + 1.0, w[keep]])
    return entries, int(rows)


def write_matrix_market(path, g: Graph, comment: str | None = None) -> None:
    """Write a graph as a symmetric real coordinate file, lower triangle."""
    labels = g.edge_labels()
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{g.n} {g.n} {g.m}\n")
        for (i, j), w in zip(labels, g.weights):
            fh.write(f"{i} {j} {w:.17g}\n")


def preprocess(entries, n: int) -> Graph:
    """Clean raw edge triples into a canonical connected graph.

    Drops self-loops, merges duplicate edges by summing weights, takes
    absolute values, drops exact zeros, keeps the largest connected
    component, and relabels its vertices contiguously in original order.
    """
    arr = np.asarray(entries, dtype=np.float64)
    if arr.size == 0:
        raise EmptyGraphError("no entries to preprocess")
    arr = arr.reshape(-1, 3)
    a = arr[:, 0].astype(np.int64)
    b = arr[:, 1].astype(np.int64)
    w = arr[:, 2]
    if np.any((a < 1) | (a > n) | (b < 1) | (b > n)):
        raise ParseError(f"vertex labels must lie in 1..{n}")
    off = a != b
    hi = np.maximum(a[off], b[off]) - 1
    lo = np.minimum(a[off], b[off]) - 1
    key, inverse = np.unique(hi * n + lo, return_inverse=True)
    merged = np.bincount(inverse, weights=w[off], minlength=key.size)
    weight = np.abs(merged)
    alive = weight > 0.0
    if not np.any(alive):
        raise EmptyGraphError("no edges survive preprocessing")
    key, weight = key[alive], weight[alive]
    hi, lo = key // n, key % n
    adj = scipy.sparse.coo_matrix(
        (np.ones(hi.size), (hi, lo)), shape=(n, n)
    )
    _, labels = scipy.sparse.csgraph.connected_components(adj, directed=False)
    winner = np.argmax(np.bincount(labels))
    in_comp = labels == winner
    keep = in_comp[hi]
    hi, lo, weight = hi[keep], lo[keep], weight[keep]
    new_id = np.cumsum(in_comp) - 1
    hi, lo = new_id[hi], new_id[lo]
    order = np.lexsort((lo, hi))
    g = Graph(
        n=int(in_comp.sum()),
        edge_i=hi[order],
        edge_j=lo[order],
        weights=np.ascontiguousarray(weight[order]),
    )
    for name in ("edge_i", "edge_j", "weights"):
        getattr(g, name).setflags(write=False)
    return g


@dataclass(frozen=True)
class GridSpec:
    """A uniform right-triangle lattice on the unit square."""

    level: int
    N: int
    h: float
    graph: Graph = field(repr=False)
    coords: np.ndarray = field(repr=False)


def uniform_grid(level: int) -> GridSpec:
    """Unit-weight triangulated lattice with 2^level cells per side.

    Each square cell gets horizontal, vertical, and one diagonal edge along
    the (1,1) direction, splitting it into two right triangles.  Vertex ids
    run row-major from the origin corner.
    """
    if not 1 <= level <= 12:
        raise ValueError("grid level must lie in 1..12")
    N = 2**level
    side = N + 1
    n = side * side
    idx = np.arange(n, dtype=np.int64)
    right_ok = (idx % side) < N
    up_ok = idx < n - side
    horiz_lo = idx[right_ok]
    vert_lo = idx[up_ok]
    diag_lo = idx[right_ok & up_ok]
    lo = np.concatenate([horiz_lo, vert_lo, diag_lo])
    hi = np.concatenate([horiz_lo + 1, vert_lo + side, diag_lo + side + 1])
    order = np.lexsort((lo, hi))
    g = Graph(
        n=n,
        edge_i=hi[order],
        edge_j=lo[order],
        weights=np.ones(lo.size),
    )
    for name in ("edge_i", "edge_j", "weights"):
        getattr(g, name).setflags(write=False)
    h = 1.0 / N
    coords = np.column_stack([(idx % side) * h, (idx // side) * h])
    coords.setflags(write=False)
    return GridSpec(level=level, N=N, h=h, graph=g, coords=coords)


def sine_field(x, y):
    """The smooth benchmark field, vanishing on the lower-left edges."""
    return np.sin(np.pi * x / 2.0) * np.sin(np.pi * y / 2.0)


def sample_and_rhs(grid: GridSpec, fieldfn=None) -> tuple[np.ndarray, np.ndarray]:
    """Sample a closed-form field on grid vertices and take its Laplacian.

    The returned pair ``(u, f)`` satisfies ``Lu = f`` exactly up to
    rounding, which makes ``u`` (shifted to mean zero) the reference
    solution for ``f``.
    """
    if fieldfn is None:
        fieldfn = sine_field
    x, y = grid.coords[:, 0], grid.coords[:, 1]
    u = np.asarray(fieldfn(x, y), dtype=np.float64)
    return u, apply_laplacian(grid.graph, u)


def random_connected_graph(
    n: int, extra: int, weight_range=(0.1, 10.0), seed: int = 0
) -> Graph:
    """Random spanning tree plus ``extra`` distinct off-tree edges.

    Deterministic for a fixed seed; weights are uniform in ``weight_range``.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    if extra < 0:
        raise ValueError("extra edge count must be nonnegative")
    budget = n * (n - 1) // 2 - (n - 1)
    if extra > budget:
        raise TooManyEdgesError(
            f"{extra} extra edges requested, only {budget} distinct ones exist"
        )
    rng = np.random.default_rng(seed)
    child = np.arange(1, n, dtype=np.int64)
    parent = (rng.random(n - 1) * child).astype(np.int64)
    tree_key = child * n + parent
    if n <= 2000:
        small, big = np.triu_indices(n, 1)
        all_key = np.setdiff1d(big * n + small, tree_key, assume_unique=False)
        chosen = rng.choice(all_key, size=extra, replace=False)
    else:
        used = set(tree_key.tolist())
        picked = []
        while len(picked) < extra:
            cand = rng.integers(0, n, size=(max(64, extra), 2))
            for a, b in cand:
                if a == b or len(picked) >= extra:
                    continue
                k = int(max(a, b) * n + min(a, b))
                if k not in used:
                    used.add(k)
                    picked.append(k)
        chosen = np.asarray(picked, dtype=np.int64)
    hi = np.concatenate([child, chosen // n])
    lo = np.concatenate([parent, chosen % n])
    w = rng.uniform(weight_range[0], weight_range[1], hi.size)
    order = np.lexsort((lo, hi))
    g = Graph(n=n, edge_i=hi[order], edge_j=lo[order], weights=np.ascontiguousarray(w[order]))
    for name in ("edge_i", "edge_j", "weights"):
        getattr(g, name).setflags(write=False)
    return g
