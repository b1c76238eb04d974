"""Cycle-space least squares by multiplicative block sweeps.

The divergence-free correction solves ``min ||r0 - C a||`` in the
inverse-weight norm, with C holding the basis cycles as columns.  Instead of
one global solve, the sweep visits small blocks of cycles (typically the
cycles around one vertex), solves each block's normal equations exactly, and
updates the residual in place.  Every block solve can only lower the
objective, so any intermediate state still yields a guaranteed bound.

Block Gram matrices depend only on the basis and weights; they are built and
factorized once, then shared read-only across sweeps and states.  A dense
oracle (`exact_cycle_minimizer`) solves the same problem globally at desk
scale for verification.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import backend
from .cycles import CycleBasis, SubspaceDecomposition
from .errors import ProblemTooLargeError, SingularLocalSystemWarning
from .graph import Graph, flow_norm

__all__ = [
    "LocalSystems",
    "SchwarzState",
    "build_local_systems",
    "init_state",
    "local_solve",
    "schwarz_sweep",
    "minimize_cycle_component",
    "exact_cycle_minimizer",
]

# below this many dense Gram entries, skip sparse machinery entirely
_DENSE_GRAM_LIMIT = 1_000_000


@dataclass(frozen=True)
class LocalSystems:
    """Prefactorized block systems for one (graph, basis, decomposition).

    Block ``j`` owns cycles ``decomposition.block(j)``; its Gram matrix
    (pairwise inverse-weight inner products of those cycles) is stored
    factorized in ``fac_data[fac_ptr[j]:fac_ptr[j+1]]`` row-major: a lower
    Cholesky factor when ``fac_kind[j] == 0``, an explicit pseudo-inverse
    when 1 (near-singular blocks, flagged at build time with a warning).
    Immutable and shareable between concurrently swept states.
    """

    basis: CycleBasis
    decomposition: SubspaceDecomposition
    cyc_coef_f: np.ndarray = field(repr=False)
    fac_ptr: np.ndarray = field(repr=False)
    fac_data: np.ndarray = field(repr=False)
    fac_kind: np.ndarray = field(repr=False)
    max_dim: int = 0

    @property
    def count(self) -> int:
        return self.decomposition.count

    def gram(self, j: int, inv_w: np.ndarray) -> np.ndarray:
        """Recompute block ``j``'s Gram matrix densely (testing aid)."""
        ids = self.decomposition.block(j)
        basis = self.basis
        cols = [basis.densify(int(c)) for c in ids]
        M = np.empty((len(cols), len(cols)))
        for a, ca in enumerate(cols):
            for b, cb in enumerate(cols):
                M[a, b] = np.sum(ca * cb * inv_w)
        return M


@dataclass
class SchwarzState:
    """Mutable iterate of the block sweep; confined to one thread.

    ``residual`` tracks ``r0 - C alpha`` incrementally, ``objective`` caches
    its inverse-weight norm, and ``alpha`` the per-cycle coefficient totals.
    """

    residual: np.ndarray
    tau0: np.ndarray
    alpha: np.ndarray
    objective: float
    sweep_count: int = 0
    _b_buf: np.ndarray = field(default=None, repr=False)
    _alpha_buf: np.ndarray = field(default=None, repr=False)


def _gram_matrix(g: Graph, basis: CycleBasis):
    """Full cycle Gram S = C^T diag(1/w) C, dense for small sizes else CSR."""
    nc = basis.size
    owner = np.repeat(np.arange(nc, dtype=np.int64), np.diff(basis.cyc_ptr))
    coef = basis.cyc_coef.astype(np.float64)
    if g.m * nc <= _DENSE_GRAM_LIMIT:
        C = np.zeros((g.m, nc))
        C[basis.cyc_edge, owner] = coef
        return (C * g.inv_weights[:, None]).T @ C
    C = sp.csc_matrix(
        (coef, (basis.cyc_edge, owner)), shape=(g.m, nc), dtype=np.float64
    )
    S = (C.T.multiply(g.inv_weights[None, :]) @ C).tocsr()
    S.sort_indices()
    return S


def _block_entries(S, decomposition: SubspaceDecomposition, fac_ptr) -> np.ndarray:
    """Gather every block's Gram entries into one flat array.

    The flat layout matches ``fac_ptr``: block j's d x d entries sit row-major
    in ``out[fac_ptr[j]:fac_ptr[j+1]]``.
    """
    sub_ptr, sub_cyc = decomposition.sub_ptr, decomposition.sub_cyc
    dims = np.diff(sub_ptr)
    sq = dims * dims
    total = int(sq.sum())
    base = np.repeat(sub_ptr[:-1], sq)
    within = np.arange(total) - np.repeat(np.cumsum(sq) - sq, sq)
    dpair = np.repeat(dims, sq)
    rows = sub_cyc[base + within // dpair]
    cols = sub_cyc[base + within % dpair]
    if isinstance(S, np.ndarray):
        return S[rows, cols]
    lens = np.diff(S.indptr)
    max_nnz = int(lens[np.unique(rows)].max()) if rows.size else 0
    if max_nnz <= 48:
        # rows are short: probe every slot of each row in lockstep
        out = np.zeros(total)
        starts = S.indptr[rows]
        rl = lens[rows]
        cap = S.indices.shape[0] - 1
        for k in range(max_nnz):
            idx = np.minimum(starts + k, cap)
            hit = (k < rl) & (S.indices[idx] == cols)
            out[hit] = S.data[idx[hit]]
        return out
    out = np.empty(total)
    for j in range(decomposition.count):
        ids = decomposition.block(j)
        out[fac_ptr[j] : fac_ptr[j + 1]] = S[ids][:, ids].toarray().ravel()
    return out


def build_local_systems(
    g: Graph, basis: CycleBasis, decomposition: SubspaceDecomposition
) -> LocalSystems:
    """Assemble and factorize every block's Gram matrix.

    Healthy blocks get a Cholesky factor, computed in batches grouped by
    block dimension.  A block whose Gram is singular or numerically
    indefinite (dependent cycles) falls back to a minimum-norm
    pseudo-inverse with eigenvalues below ``1e-12 * max diagonal`` dropped;
    one `SingularLocalSystemWarning` reports how many blocks degraded.
    """
    S = _gram_matrix(g, basis)
    J = decomposition.count
    dims = np.diff(decomposition.sub_ptr)
    fac_ptr = np.zeros(J + 1, dtype=np.int64)
    np.cumsum(dims * dims, out=fac_ptr[1:])
    fac_data = _block_entries(S, decomposition, fac_ptr)
    fac_kind = np.zeros(J, dtype=np.int8)
    fallback = 0
    for d in np.unique(dims):
        group = np.nonzero(dims == d)[0]
        idx = fac_ptr[group][:, None] + np.arange(d * d)
        stack = fac_data[idx].reshape(-1, d, d)
        try:
            fac_data[idx] = np.linalg.cholesky(stack).reshape(-1, d * d)
            continue
        except np.linalg.LinAlgError:
            pass
        for k, j in enumerate(group):
            M = stack[k]
            try:
                fac_data[fac_ptr[j] : fac_ptr[j + 1]] = np.linalg.cholesky(M).ravel()
            except np.linalg.LinAlgError:
                vals, vecs = np.linalg.eigh(M)
                cut = 1e-12 * max(float(M.diagonal().max()), np.finfo(float).tiny)
                inv_vals = np.where(vals > cut, 1.0 / np.maximum(vals, cut), 0.0)
                fac_data[fac_ptr[j] : fac_ptr[j + 1]] = (
                    (vecs * inv_vals) @ vecs.T
                ).ravel()
                fac_kind[j] = 1
                fallback += 1
    if fallback:
        warnings.warn(
            f"{fallback} of {J} local systems were singular; "
            "using minimum-norm pseudo-solves for them",
            SingularLocalSystemWarning,
            stacklevel=2,
        )
    return LocalSystems(
        basis=basis,
        decomposition=decomposition,
        cyc_coef_f=basis.cyc_coef.astype(np.float64),
        fac_ptr=fac_ptr,
        fac_data=fac_data,
        fac_kind=fac_kind,
        max_dim=int(dims.max()) if J else 0,
    )


def init_state(g: Graph, systems: LocalSystems, r0: np.ndarray) -> SchwarzState:
    r0 = np.ascontiguousarray(r0, dtype=np.float64)
    return SchwarzState(
        residual=r0.copy(),
        tau0=np.zeros(g.m),
        alpha=np.zeros(systems.basis.size),
        objective=flow_norm(g, r0),
        _b_buf=np.empty(max(systems.max_dim, 1)),
        _alpha_buf=np.empty(max(systems.max_dim, 1)),
    )


def _run_kernel(g: Graph, systems: LocalSystems, state: SchwarzState, order) -> float:
    basis = systems.basis
    dec = systems.decomposition
    return backend.schwarz_sweep_kernel(
        state.residual,
        state.tau0,
        state.alpha,
        g.inv_weights,
        basis.cyc_ptr,
        basis.cyc_edge,
        systems.cyc_coef_f,
        dec.sub_ptr,
        dec.sub_cyc,
        systems.fac_ptr,
        systems.fac_data,
        systems.fac_kind,
        np.ascontiguousarray(order, dtype=np.int64),
        state._b_buf,
        state._alpha_buf,
    )


def local_solve(
    g: Graph, systems: LocalSystems, state: SchwarzState, j: int
) -> SchwarzState:
    """Minimize the objective over block ``j`` alone, updating the state."""
    if not 0 <= j < systems.count:
        raise IndexError(f"block index {j} out of range 0..{systems.count - 1}")
    _run_kernel(g, systems, state, np.array([j], dtype=np.int64))
    state.objective = flow_norm(g, state.residual)
    return state


def schwarz_sweep(
    g: Graph,
    systems: LocalSystems,
    state: SchwarzState,
    order: np.ndarray | None = None,
) -> SchwarzState:
    """One multiplicative pass over every block (default: ascending order)."""
    if order is None:
        order = np.arange(systems.count, dtype=np.int64)
    _run_kernel(g, systems, state, order)
    state.objective = flow_norm(g, state.residual)
    state.sweep_count += 1
    return state


def minimize_cycle_component(
    g: Graph,
    basis: CycleBasis,
    decomposition: SubspaceDecomposition,
    r0: np.ndarray,
    max_sweeps: int,
    sweep_order: str = "ascending",
    seed: int | None = None,
    systems: LocalSystems | None = None,
) -> tuple[np.ndarray, list[float]]:
    """Approximate the divergence-free correction by ``max_sweeps`` sweeps.

    Returns the correction flow and the objective trace, entry 0 being the
    starting objective (so ``max_sweeps=0`` reports the uncorrected value).
    ``sweep_order="random"`` draws a fresh permutation per sweep from a
    generator seeded with ``seed``.
    """
    if max_sweeps < 0:
        raise ValueError("max_sweeps must be nonnegative")
    if sweep_order not in ("ascending", "random"):
        raise ValueError(f"unknown sweep order {sweep_order!r}")
    if systems is None:
        systems = build_local_systems(g, basis, decomposition)
    state = init_state(g, systems, r0)
    trace = [state.objective]
    rng = np.random.default_rng(seed) if sweep_order == "random" else None
    for _ in range(max_sweeps):
        order = (
            rng.permutation(systems.count).astype(np.int64)
            if rng is not None
            else None
        )
        schwarz_sweep(g, systems, state, order)
        trace.append(state.objective)
    return state.tau0, trace


def exact_cycle_minimizer(g: Graph, basis: CycleBasis, r0: np.ndarray) -> np.ndarray:
    """Global minimizer of the cycle-space least-squares problem (dense).

    Desk-scale verification oracle; refuses graphs beyond n = 2000.
    """
    if g.n > 2000:
        raise ProblemTooLargeError(
            f"dense oracle is limited to 2000 vertices, got {g.n}"
        )
    if basis.size == 0:
        return np.zeros(g.m)
    C = basis.dense_matrix()
    scale = np.sqrt(g.inv_weights)
    A = C * scale[:, None]
    b = np.asarray(r0, dtype=np.float64) * scale
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    return C @ coef
