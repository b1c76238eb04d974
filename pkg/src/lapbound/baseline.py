"""Producers of approximate and reference solutions, plus the comparator bound.

Three roles.  Gauss-Seidel sweeps generate the approximate solutions whose
error gets estimated.  A desk-scale reference solve supplies the true error
for efficiency reporting.  And an alternating-minimization comparator bounds
the error by a two-term functional E(beta, tau) that penalizes divergence
mismatch through a Poincare constant, the approach this estimator improves
on: E needs a global eigenvalue and its tau step is a dense solve, which is
why it stays gated to small problems.

The penalty weight multiplying the squared divergence term is the squared
inverse Poincare constant.  With that weight, minimizing over beta in closed
form gives E = (sqrt(A) + sqrt(B))^2, exactly the square of the two-term
bound eta, so eta <= sqrt(E) holds with equality at the optimum; an
unsquared weight would break that guarantee whenever the spectral gap drops
below one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg

from . import backend
from .errors import (
    DegenerateBetaError,
    DimensionMismatchError,
    IncompatibleRHSError,
    NoConvergenceError,
    ProblemTooLargeError,
)
from .graph import Graph, apply_laplacian, divergence, flow_norm, gradient

__all__ = [
    "SolveConfig",
    "BoundState",
    "gauss_seidel",
    "random_initial_guess",
    "reference_solution",
    "poincare_constant",
    "eta",
    "optimal_beta",
    "minimize_bound_alternating",
]

_DESK_SCALE = 2000
_BETA_MIN = 1e-8
_BETA_MAX = 1e8


@dataclass(frozen=True)
class SolveConfig:
    """How to produce the approximate solution in an experiment run."""

    iterations: int = 3
    seed: int = 0
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")


def _require_compatible(g: Graph, f) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (g.n,):
        raise DimensionMismatchError(f"rhs has shape {f.shape}, expected ({g.n},)")
    if abs(float(f.sum())) > 1e-10 * max(1.0, float(np.linalg.norm(f))):
        raise IncompatibleRHSError("rhs entries must sum to zero")
    return f


def gauss_seidel(g: Graph, f, v0, k: int) -> np.ndarray:
    """k forward sweeps of weighted Gauss-Seidel starting from v0."""
    f = _require_compatible(g, f)
    v = np.array(v0, dtype=np.float64)
    if v.shape != (g.n,):
        raise DimensionMismatchError(f"v0 has shape {v.shape}, expected ({g.n},)")
    if k < 0:
        raise ValueError("sweep count must be nonnegative")
    for _ in range(k):
        backend.gauss_seidel_kernel(
            v, f, g.adj_ptr, g.adj_other, g.adj_weight, g.weighted_degree
        )
    return v


def random_initial_guess(g: Graph, seed: int) -> np.ndarray:
    """Uniform [0,1) start vector, mean-subtracted, from a seeded generator."""
    v = np.random.default_rng(seed).random(g.n)
    return v - v.mean()


def reference_solution(g: Graph, f, tolerance: float = 1e-12) -> np.ndarray:
    """Mean-zero u with ``Lu = f`` to ``tolerance`` relative residual.

    Dense minimum-norm solve up to 2000 vertices; beyond that, conjugate
    gradients restricted to the mean-zero subspace.
    """
    f = _require_compatible(g, f)
    fnorm = float(np.linalg.norm(f))
    if fnorm == 0.0:
        return np.zeros(g.n)
    if g.n <= _DESK_SCALE:
        L = _dense_laplacian(g)
        u, *_ = np.linalg.lstsq(L, f, rcond=None)
        u -= u.mean()
    else:
        n = g.n

        def matvec(x):
            y = apply_laplacian(g, x)
            return y - y.mean()

        op = scipy.sparse.linalg.LinearOperator((n, n), matvec=matvec, dtype=np.float64)
        u, info = _cg(op, f - f.mean(), tolerance, maxiter=20 * n)
        if info != 0:
            raise NoConvergenceError(
                f"conjugate gradients stopped with status {info} before reaching "
                f"tolerance {tolerance:g}"
            )
        u -= u.mean()
    resid = float(np.linalg.norm(apply_laplacian(g, u) - f))
    if resid > max(tolerance, 1e-10) * fnorm:
        raise NoConvergenceError(
            f"reference solve residual {resid:.3e} exceeds tolerance"
        )
    return u


def _cg(op, b, tolerance, maxiter):
    try:
        return scipy.sparse.linalg.cg(op, b, rtol=tolerance, maxiter=maxiter)
    except TypeError:  # older scipy spells the relative tolerance "tol"
        return scipy.sparse.linalg.cg(op, b, tol=tolerance, maxiter=maxiter)


def _dense_laplacian(g: Graph) -> np.ndarray:
    L = np.zeros((g.n, g.n))
    np.add.at(L, (g.edge_i, g.edge_j), -g.weights)
    np.add.at(L, (g.edge_j, g.edge_i), -g.weights)
    L[np.arange(g.n), np.arange(g.n)] = g.weighted_degree
    return L


def poincare_constant(g: Graph) -> float:
    """sqrt of the spectral gap: the smallest nonzero Laplacian eigenvalue.

    This is the constant for which mean-zero vectors satisfy
    ``||w|| <= C^{-1} ||w||_L``.  Dense eigensolve; desk scale only.
    """
    if g.n > _DESK_SCALE:
        raise ProblemTooLargeError(
            f"dense eigensolve is limited to {_DESK_SCALE} vertices, got {g.n}"
        )
    vals = np.linalg.eigvalsh(_dense_laplacian(g))
    return float(np.sqrt(vals[1]))


def eta(g: Graph, v, f, tau, c_p: float) -> float:
    """Two-term bound: flow mismatch plus scaled divergence mismatch.

    Reduces to the flow-norm estimate alone when the divergence of ``tau``
    matches ``f`` exactly.
    """
    v = np.asarray(v, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if v.shape != (g.n,) or f.shape != (g.n,) or tau.shape != (g.m,):
        raise DimensionMismatchError("eta: argument lengths do not match the graph")
    flow_term = flow_norm(g, g.weights * gradient(g, v) - tau)
    div_term = float(np.linalg.norm(divergence(g, tau) - f))
    return flow_term + div_term / c_p


def optimal_beta(A: float, B: float) -> float:
    """Closed-form minimizer of (1+beta) A + (1+1/beta) B over beta > 0."""
    if A <= 0.0 or B <= 0.0:
        raise DegenerateBetaError(
            f"balance parameter undefined for A={A:g}, B={B:g}"
        )
    return float(np.sqrt(B / A))


@dataclass(frozen=True)
class BoundState:
    """Converged (or iteration-capped) state of the alternating comparator."""

    beta: float
    tau: np.ndarray = field(repr=False)
    c_p: float = 0.0
    value: float = 0.0
    iterations: int = 0
    trace: tuple = ()

    @property
    def bound(self) -> float:
        return float(np.sqrt(self.value))


def minimize_bound_alternating(
    g: Graph, v, f, max_iter: int = 50, c_p: float | None = None
) -> BoundState:
    """Alternate exact tau and beta minimizations of the two-term functional.

    The tau step solves the dense normal equations
    ``[(1+beta) D^{-1} + (1+1/beta) gamma G G^T] tau = (1+beta) Gv
    + (1+1/beta) gamma G f`` with gamma the squared inverse Poincare
    constant; the beta step uses the closed form sqrt(B/A).  The functional
    value is nonincreasing across steps.  Degenerate steps (either term
    vanishing: the bound is already tight) end the iteration early.
    """
    if g.n > _DESK_SCALE:
        raise ProblemTooLargeError(
            f"alternating comparator is limited to {_DESK_SCALE} vertices, got {g.n}"
        )
    v = np.asarray(v, dtype=np.float64)
    f = _require_compatible(g, f)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if c_p is None:
        c_p = poincare_constant(g)
    gamma = 1.0 / (c_p * c_p)
    Gmat = np.zeros((g.m, g.n))
    Gmat[np.arange(g.m), g.edge_i] = 1.0
    Gmat[np.arange(g.m), g.edge_j] = -1.0
    GGt = Gmat @ Gmat.T
    Gv = Gmat @ v
    Gf = Gmat @ f
    inv_w = g.inv_weights
    beta = 1.0
    tau = np.zeros(g.m)
    scale = max(1.0, float(np.dot(Gv * g.weights, Gv)), float(np.dot(f, f)) * gamma)
    trace = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        wa = 1.0 + beta
        wb = (1.0 + 1.0 / beta) * gamma
        K = wa * np.diag(inv_w) + wb * GGt
        tau_new = np.linalg.solve(K, wa * Gv + wb * Gf)
        A = flow_norm(g, g.weights * Gv - tau_new) ** 2
        B = gamma * float(np.sum((divergence(g, tau_new) - f) ** 2))
        if A <= 1e-28 * scale or B <= 1e-28 * scale:
            tau = tau_new
            trace.append((1.0 + beta) * A + (1.0 + 1.0 / beta) * B)
            break
        # Clamping keeps the next tau-step matrix solvable; near the clamp
        # the balance term is already negligible.
        beta_new = min(max(optimal_beta(A, B), _BETA_MIN), _BETA_MAX)
        value = (1.0 + beta_new) * A + (1.0 + 1.0 / beta_new) * B
        if trace and value > trace[-1]:
            break  # progress is below rounding noise, keep the better iterate
        tau, beta = tau_new, beta_new
        trace.append(value)
        if len(trace) >= 2 and trace[-2] - value <= 1e-14 * trace[0]:
            break
    return BoundState(
        beta=beta,
        tau=tau,
        c_p=c_p,
        value=trace[-1] if trace else 0.0,
        iterations=iterations,
        trace=tuple(trace),
    )
