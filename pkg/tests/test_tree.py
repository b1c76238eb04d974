import numpy as np
import pytest

from conftest import random_graph
from lapbound.errors import DimensionMismatchError, IncompatibleRHSError
from lapbound.graph import divergence, gradient, validate_graph
from lapbound.tree import (
    bfs_tree,
    compute_tau_f,
    count_work,
    tree_flow,
    tree_potential,
)


@pytest.fixture
def path3():
    return validate_graph([(1, 2, 1.0), (2, 3, 1.0)], 3)


class TestBFS:
    def test_k3(self, k3):
        t = bfs_tree(k3, 0)
        assert t.root == 0
        assert t.parent.tolist() == [0, 0, 0]
        assert t.parent_edge.tolist() == [-1, 0, 1]
        assert t.depth.tolist() == [0, 1, 1]
        assert t.bfs_order.tolist() == [0, 1, 2]
        assert t.tree_edge_set.tolist() == [True, True, False]

    def test_path_tree_is_whole_graph(self, path3):
        t = bfs_tree(path3, 0)
        assert t.tree_edge_set.all()
        assert t.depth.tolist() == [0, 1, 2]

    def test_tie_break_matches_queue_order(self):
        # 0-1, 0-2, 1-3, 2-3: vertex 3 reachable from both level-1 vertices.
        # Queue order dequeues vertex 1 first, so it must win the parenthood.
        g = validate_graph([(1, 2, 1.0), (1, 3, 1.0), (2, 4, 1.0), (3, 4, 1.0)], 4)
        t = bfs_tree(g, 0)
        assert t.parent.tolist() == [0, 0, 0, 1]
        assert t.parent_edge[3] == 2  # edge (4,2)
        assert t.bfs_order.tolist() == [0, 1, 2, 3]

    @pytest.mark.parametrize("seed", range(10))
    def test_structure_random(self, seed):
        g = random_graph(seed, 60, extra=80)
        root = seed % g.n
        t = bfs_tree(g, root)
        assert t.tree_edge_set.sum() == g.n - 1
        assert t.parent[root] == root and t.parent_edge[root] == -1
        nonroot = np.setdiff1d(np.arange(g.n), [root])
        assert np.all(t.depth[nonroot] == t.depth[t.parent[nonroot]] + 1)
        assert np.all(np.diff(t.depth[t.bfs_order]) >= 0)
        # parent edges join exactly the stated endpoint pairs
        pe = t.parent_edge[nonroot]
        pairs = {frozenset((int(i), int(j))) for i, j in zip(g.edge_i[pe], g.edge_j[pe])}
        expect = {frozenset((int(v), int(t.parent[v]))) for v in nonroot}
        assert pairs == expect

    def test_bad_root(self, k3):
        with pytest.raises(ValueError):
            bfs_tree(k3, 3)


class TestTreeFlow:
    def test_k3(self, k3):
        t = bfs_tree(k3, 0)
        tau = tree_flow(k3, t, np.array([1.0, -1.0, 0.0]))
        assert tau.tolist() == [-1.0, 0.0, 0.0]

    def test_path(self, path3):
        t = bfs_tree(path3, 0)
        tau = tree_flow(path3, t, np.array([1.0, 0.0, -1.0]))
        assert tau.tolist() == [-1.0, -1.0]

    def test_zero_rhs(self, k3):
        t = bfs_tree(k3, 0)
        assert tree_flow(k3, t, np.zeros(3)).tolist() == [0.0, 0.0, 0.0]

    def test_incompatible_rhs(self, k3):
        t = bfs_tree(k3, 0)
        with pytest.raises(IncompatibleRHSError):
            tree_flow(k3, t, np.array([1.0, 0.0, 0.0]))

    def test_shape_mismatch(self, k3):
        t = bfs_tree(k3, 0)
        with pytest.raises(DimensionMismatchError):
            tree_flow(k3, t, np.zeros(4))

    @pytest.mark.parametrize("seed", range(10))
    def test_divergence_exact_random(self, seed):
        g = random_graph(seed, 80, extra=120)
        rng = np.random.default_rng(seed + 7)
        f = rng.standard_normal(g.n)
        f -= f.mean()
        tau, t = compute_tau_f(g, f, root=seed % g.n)
        assert np.linalg.norm(divergence(g, tau) - f) <= 1e-10 * np.linalg.norm(f)
        assert np.all(tau[~t.tree_edge_set] == 0.0)

    def test_linearity(self):
        g = random_graph(42, 50, extra=60)
        t = bfs_tree(g, 0)
        rng = np.random.default_rng(0)
        f1 = rng.standard_normal(g.n)
        f1 -= f1.mean()
        f2 = rng.standard_normal(g.n)
        f2 -= f2.mean()
        combo = tree_flow(g, t, 2.0 * f1 - 0.5 * f2)
        parts = 2.0 * tree_flow(g, t, f1) - 0.5 * tree_flow(g, t, f2)
        np.testing.assert_allclose(combo, parts, atol=1e-12 * max(1, np.abs(parts).max()))


class TestTreePotential:
    def test_k3(self, k3):
        t = bfs_tree(k3, 0)
        x = tree_potential(k3, t, np.array([-1.0, 0.0, 0.0]))
        assert x.tolist() == [0.0, -1.0, 0.0]

    def test_zero(self, k3):
        t = bfs_tree(k3, 0)
        assert tree_potential(k3, t, np.zeros(3)).tolist() == [0.0, 0.0, 0.0]

    @pytest.mark.parametrize("seed", range(6))
    def test_round_trip(self, seed):
        # forward map: weighted tree gradient of a potential; inverse: integrate
        g = random_graph(seed, 40, extra=30)
        t = bfs_tree(g, 0)
        rng = np.random.default_rng(seed)
        x0 = rng.standard_normal(g.n)
        x0 -= x0[t.root]
        tau = np.where(t.tree_edge_set, g.weights * gradient(g, x0), 0.0)
        np.testing.assert_allclose(tree_potential(g, t, tau), x0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_agrees_with_tree_laplacian_route(self, seed):
        # tree_flow must equal: solve the tree Laplacian for x, multiply back
        g = random_graph(seed, 35, extra=25)
        t = bfs_tree(g, 0)
        rng = np.random.default_rng(seed + 1)
        f = rng.standard_normal(g.n)
        f -= f.mean()
        tau = tree_flow(g, t, f)
        x = tree_potential(g, t, tau)
        assert np.linalg.norm(divergence(g, np.where(t.tree_edge_set, g.weights * gradient(g, x), 0.0)) - f) <= 1e-9


class TestWorkCounter:
    def test_linear_in_size(self):
        g = random_graph(5, 400, extra=800)
        f = np.random.default_rng(0).standard_normal(g.n)
        f -= f.mean()
        with count_work() as c:
            compute_tau_f(g, f)
        assert 0 < c.elements <= 4 * (g.n + g.m)

    def test_scaling_across_grid_levels(self):
        from lapbound.ingest import uniform_grid

        ratios = []
        for level in range(3, 9):
            spec = uniform_grid(level)
            g = spec.graph
            rng = np.random.default_rng(level)
            f = rng.standard_normal(g.n)
            f -= f.mean()
            with count_work() as c:
                compute_tau_f(g, f)
            ratios.append(c.elements / (g.n + g.m))
        assert max(ratios) <= 4.0
