import numpy as np
import pytest

from conftest import random_graph
from lapbound.cycles import fundamental_cycle_basis, vertex_subspaces
from lapbound.errors import ProblemTooLargeError, SingularLocalSystemWarning
from lapbound.graph import divergence, flow_norm, validate_graph
from lapbound.schwarz import (
    SubspaceDecomposition,
    build_local_systems,
    exact_cycle_minimizer,
    init_state,
    local_solve,
    minimize_cycle_component,
    schwarz_sweep,
)
from lapbound.tree import bfs_tree


def k3_setup(k3):
    basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
    dec = vertex_subspaces(basis)
    return basis, dec, build_local_systems(k3, basis, dec)


@pytest.fixture
def bowtie():
    # two triangles sharing vertex 1: cycles 1-2-3 and 1-4-5 are edge-disjoint
    return validate_graph(
        [(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (1, 4, 1.0), (1, 5, 1.0), (4, 5, 1.0)],
        5,
    )


class TestLocalSystems:
    def test_k3_gram(self, k3):
        _, dec, sys_ = k3_setup(k3)
        assert sys_.count == 3
        for j in range(3):
            np.testing.assert_allclose(sys_.gram(j, k3.inv_weights), [[3.0]])
        # stored factor is the Cholesky of [[3]]
        assert sys_.fac_kind.tolist() == [0, 0, 0]
        np.testing.assert_allclose(sys_.fac_data[0], np.sqrt(3.0))

    def test_disjoint_cycles_give_diagonal_gram(self, bowtie):
        basis = fundamental_cycle_basis(bowtie, bfs_tree(bowtie, 0))
        dec = vertex_subspaces(basis)
        sys_ = build_local_systems(bowtie, basis, dec)
        shared = np.nonzero(dec.owners == 0)[0][0]
        M = sys_.gram(int(shared), bowtie.inv_weights)
        np.testing.assert_allclose(M, 3.0 * np.eye(2))

    def test_weighted_gram_matches_brute_force(self):
        g = random_graph(7, 20, extra=25)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        dec = vertex_subspaces(basis)
        sys_ = build_local_systems(g, basis, dec)
        C = basis.dense_matrix()
        iw = g.inv_weights
        for j in range(min(dec.count, 8)):
            ids = dec.block(j)
            expect = np.array(
                [[np.sum(C[:, a] * C[:, b] * iw) for b in ids] for a in ids]
            )
            d = len(ids)
            L = sys_.fac_data[sys_.fac_ptr[j] : sys_.fac_ptr[j + 1]].reshape(d, d)
            assert sys_.fac_kind[j] == 0
            np.testing.assert_allclose(np.tril(L) @ np.tril(L).T, expect, atol=1e-10)

    def test_singular_block_falls_back_with_warning(self, k3):
        basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
        dec = SubspaceDecomposition(
            mode="vertex",
            sub_ptr=np.array([0, 2], dtype=np.int64),
            sub_cyc=np.array([0, 0], dtype=np.int64),
            owners=np.array([0], dtype=np.int64),
        )
        with pytest.warns(SingularLocalSystemWarning):
            sys_ = build_local_systems(k3, basis, dec)
        assert sys_.fac_kind.tolist() == [1]
        # pseudo-solve still reaches the single-cycle optimum
        state = init_state(k3, sys_, np.array([1.0, 0.0, 0.0]))
        local_solve(k3, sys_, state, 0)
        assert state.objective == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-12)


class TestLocalSolve:
    def test_k3_hand_values(self, k3):
        _, _, sys_ = k3_setup(k3)
        state = init_state(k3, sys_, np.array([1.0, 0.0, 0.0]))
        assert state.objective == pytest.approx(1.0)
        local_solve(k3, sys_, state, 0)
        np.testing.assert_allclose(state.alpha, [1.0 / 3.0])
        np.testing.assert_allclose(state.residual, [2.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0])
        np.testing.assert_allclose(state.tau0, [1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0])
        assert state.objective == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-14)

    def test_idempotent_on_same_block(self, k3):
        # idempotent up to one rounding correction of the residual
        _, _, sys_ = k3_setup(k3)
        state = init_state(k3, sys_, np.array([1.0, 0.0, 0.0]))
        local_solve(k3, sys_, state, 0)
        r, t0, a = state.residual.copy(), state.tau0.copy(), state.alpha.copy()
        local_solve(k3, sys_, state, 0)
        np.testing.assert_allclose(state.residual, r, atol=1e-15)
        np.testing.assert_allclose(state.tau0, t0, atol=1e-15)
        np.testing.assert_allclose(state.alpha, a, atol=1e-15)

    def test_orthogonal_residual_is_noop(self, k3):
        _, _, sys_ = k3_setup(k3)
        state = init_state(k3, sys_, np.array([1.0, 1.0, 0.0]))
        local_solve(k3, sys_, state, 1)
        assert state.alpha.tolist() == [0.0]
        assert state.residual.tolist() == [1.0, 1.0, 0.0]

    def test_bad_index(self, k3):
        _, _, sys_ = k3_setup(k3)
        state = init_state(k3, sys_, np.zeros(3))
        with pytest.raises(IndexError):
            local_solve(k3, sys_, state, 3)


class TestSweep:
    def test_k3_one_sweep_reaches_optimum(self, k3):
        _, _, sys_ = k3_setup(k3)
        state = init_state(k3, sys_, np.array([1.0, 0.0, 0.0]))
        schwarz_sweep(k3, sys_, state)
        assert state.sweep_count == 1
        assert state.objective == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-14)
        schwarz_sweep(k3, sys_, state)
        assert state.objective == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-14)

    @pytest.mark.parametrize("seed", range(6))
    def test_monotone_and_consistent(self, seed):
        g = random_graph(seed, 40, extra=60)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        dec = vertex_subspaces(basis)
        sys_ = build_local_systems(g, basis, dec)
        rng = np.random.default_rng(seed)
        r0 = rng.standard_normal(g.m)
        state = init_state(g, sys_, r0)
        prev = state.objective
        for _ in range(100):
            schwarz_sweep(g, sys_, state)
            assert state.objective <= prev + 1e-12
            prev = state.objective
        # incrementally tracked quantities agree with recomputation
        np.testing.assert_allclose(
            state.residual, r0 - state.tau0, atol=1e-10 * max(1, np.abs(r0).max())
        )
        np.testing.assert_allclose(
            state.tau0,
            basis.dense_matrix() @ state.alpha,
            atol=1e-10 * max(1, np.abs(state.tau0).max()),
        )
        assert np.linalg.norm(divergence(g, state.tau0), np.inf) <= 1e-12 * max(
            1, np.linalg.norm(state.tau0)
        )

    @pytest.mark.parametrize("seed", [0, 3, 5])
    def test_converges_to_oracle(self, seed):
        g = random_graph(seed + 30, 50, extra=50)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        dec = vertex_subspaces(basis)
        rng = np.random.default_rng(seed)
        r0 = rng.standard_normal(g.m)
        star = exact_cycle_minimizer(g, basis, r0)
        best = flow_norm(g, r0 - star)
        _, trace = minimize_cycle_component(g, basis, dec, r0, 400)
        assert trace[-1] == pytest.approx(best, abs=1e-6)
        assert trace[-1] >= best - 1e-10


class TestMinimize:
    def test_zero_sweeps(self, k3):
        basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
        dec = vertex_subspaces(basis)
        r0 = np.array([1.0, 0.0, 0.0])
        tau0, trace = minimize_cycle_component(k3, basis, dec, r0, 0)
        assert tau0.tolist() == [0.0, 0.0, 0.0]
        assert trace == [1.0]

    def test_k3_trace(self, k3):
        basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
        dec = vertex_subspaces(basis)
        tau0, trace = minimize_cycle_component(k3, basis, dec, np.array([1.0, 0.0, 0.0]), 2)
        assert len(trace) == 3
        assert trace[0] == pytest.approx(1.0)
        assert trace[1] == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-14)
        np.testing.assert_allclose(tau0, [1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0])

    def test_trace_nonincreasing(self):
        g = random_graph(17, 35, extra=45)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        dec = vertex_subspaces(basis)
        r0 = np.random.default_rng(1).standard_normal(g.m)
        _, trace = minimize_cycle_component(g, basis, dec, r0, 25)
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_random_order_deterministic_by_seed(self):
        g = random_graph(23, 30, extra=40)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        dec = vertex_subspaces(basis)
        r0 = np.random.default_rng(2).standard_normal(g.m)
        t1, tr1 = minimize_cycle_component(
            g, basis, dec, r0, 5, sweep_order="random", seed=99
        )
        t2, tr2 = minimize_cycle_component(
            g, basis, dec, r0, 5, sweep_order="random", seed=99
        )
        np.testing.assert_array_equal(t1, t2)
        assert tr1 == tr2
        assert all(b <= a + 1e-12 for a, b in zip(tr1, tr1[1:]))

    def test_bad_arguments(self, k3):
        basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
        dec = vertex_subspaces(basis)
        with pytest.raises(ValueError):
            minimize_cycle_component(k3, basis, dec, np.zeros(3), -1)
        with pytest.raises(ValueError):
            minimize_cycle_component(k3, basis, dec, np.zeros(3), 1, sweep_order="zigzag")


class TestExactOracle:
    def test_k3(self, k3):
        basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
        star = exact_cycle_minimizer(k3, basis, np.array([1.0, 0.0, 0.0]))
        np.testing.assert_allclose(star, [1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0], atol=1e-14)
        assert flow_norm(k3, np.array([1.0, 0.0, 0.0]) - star) == pytest.approx(
            np.sqrt(2.0 / 3.0)
        )

    def test_in_span_residual_zero(self, k3):
        basis = fundamental_cycle_basis(k3, bfs_tree(k3, 0))
        r0 = 2.5 * basis.densify(0)
        star = exact_cycle_minimizer(k3, basis, r0)
        np.testing.assert_allclose(star, r0, atol=1e-12)

    def test_too_large(self):
        g = validate_graph([(i, i + 1, 1.0) for i in range(1, 2002)], 2002)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        with pytest.raises(ProblemTooLargeError):
            exact_cycle_minimizer(g, basis, np.zeros(g.m))

    def test_empty_basis_returns_zero(self):
        g = validate_graph([(1, 2, 1.0), (2, 3, 1.0)], 3)
        basis = fundamental_cycle_basis(g, bfs_tree(g, 0))
        star = exact_cycle_minimizer(g, basis, np.array([1.0, -2.0]))
        assert star.tolist() == [0.0, 0.0]
