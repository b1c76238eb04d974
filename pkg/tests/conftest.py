"""Shared test helpers: seeded random graph edge lists, dense oracles.

The dense-matrix builders here are deliberately independent of the package
internals: they spell out the incidence matrix entry by entry so that the
vectorized library code is checked against a second derivation.
"""

import numpy as np
import pytest

from lapbound.graph import validate_graph


def random_edge_list(rng, n, extra=0, w_lo=0.1, w_hi=10.0):
    """1-based (i, j, w) triples for a connected graph on n vertices.

    A random recursive tree guarantees connectivity; ``extra`` distinct
    non-tree edges are layered on top.  Orientation of returned pairs is
    randomized to exercise canonicalization.
    """
    edges = []
    present = set()
    for k in range(2, n + 1):
        j = int(rng.integers(1, k))
        edges.append((k, j))
        present.add((k, j))
    budget = n * (n - 1) // 2 - (n - 1)
    count = min(extra, budget)
    while count > 0:
        a = int(rng.integers(1, n + 1))
        b = int(rng.integers(1, n + 1))
        if a == b:
            continue
        pair = (max(a, b), min(a, b))
        if pair in present:
            continue
        present.add(pair)
        edges.append(pair)
        count -= 1
    out = []
    for (i, j) in edges:
        w = float(rng.uniform(w_lo, w_hi))
        if rng.random() < 0.5:
            i, j = j, i
        out.append((i, j, w))
    rng.shuffle(out)
    return out


def random_graph(seed, n, extra=0):
    rng = np.random.default_rng(seed)
    return validate_graph(random_edge_list(rng, n, extra), n)


def dense_gradient_matrix(g):
    """m x n incidence with +1 at the larger endpoint, -1 at the smaller."""
    G = np.zeros((g.m, g.n))
    for e in range(g.m):
        G[e, g.edge_i[e]] = 1.0
        G[e, g.edge_j[e]] = -1.0
    return G


def dense_laplacian(g):
    G = dense_gradient_matrix(g)
    return G.T @ np.diag(g.weights) @ G


@pytest.fixture
def k3():
    """Unit triangle; canonical edges (2,1), (3,1), (3,2) in 1-based labels."""
    return validate_graph([(1, 2, 1.0), (3, 1, 1.0), (2, 3, 1.0)], 3)
