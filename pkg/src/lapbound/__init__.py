"""Guaranteed a posteriori error bounds for graph Laplacian solves.

Given an approximate solution ``v`` of ``L u = f`` on a weighted undirected
graph, the estimator builds a flow whose divergence matches ``f`` exactly
and returns a certified upper bound on the energy-norm error ``u - v``,
together with its per-edge localization.  The divergence-free part of the
flow is improved by multiplicative Schwarz sweeps over a cycle basis; an
exact dense minimizer and a two-term alternating bound are available for
cross-checks at small scale.

Typical use::

    from lapbound import error_estimate, preprocess, read_matrix_market

    g = preprocess(*read_matrix_market("graph.mtx"))
    est = error_estimate(g, v, f)
    print(est.psi, est.per_edge)
"""

__version__ = "0.1.0"

from .backend import HAVE_COMPILED, USING_COMPILED, backend_name
from .baseline import (
    BoundState,
    SolveConfig,
    eta,
    gauss_seidel,
    minimize_bound_alternating,
    optimal_beta,
    poincare_constant,
    random_initial_guess,
    reference_solution,
)
from .cycles import (
    CycleBasis,
    SubspaceDecomposition,
    basis_to_json,
    face_cycle_basis,
    fundamental_cycle_basis,
    validate_cycle_basis,
    vertex_subspaces,
)
from .errors import (
    DegenerateBetaError,
    DimensionMismatchError,
    DisconnectedGraphError,
    DivergenceMismatchError,
    DuplicateEdgeError,
    EmptyBasisError,
    EmptyGraphError,
    GraphValidationError,
    IncompatibleRHSError,
    InvalidCycleError,
    LapboundError,
    NoConvergenceError,
    NonpositiveWeightError,
    NotAGridGraphError,
    ParseError,
    ProblemTooLargeError,
    RankDeficientError,
    SelfLoopError,
    SingularLocalSystemWarning,
    TooManyEdgesError,
    UnsupportedFormatError,
    ZeroTrueError,
)
from .estimator import (
    ErrorEstimate,
    EstimateConfig,
    efficiency_index,
    error_estimate,
    global_psi,
    hypercircle_check,
    local_psi,
)
from .graph import (
    Graph,
    apply_laplacian,
    divergence,
    energy_seminorm,
    flow_norm,
    gradient,
    validate_graph,
)
from .ingest import (
    GridSpec,
    preprocess,
    random_connected_graph,
    read_matrix_market,
    sample_and_rhs,
    sine_field,
    uniform_grid,
    write_matrix_market,
)
from .report import (
    ExperimentReport,
    ReportRow,
    comparator_to_csv,
    per_edge_table,
    report_to_csv,
    report_to_json,
)
from .schwarz import (
    LocalSystems,
    SchwarzState,
    build_local_systems,
    exact_cycle_minimizer,
    init_state,
    local_solve,
    minimize_cycle_component,
    schwarz_sweep,
)
from .tree import SpanningTree, bfs_tree, compute_tau_f, tree_flow, tree_potential

__all__ = [
    "__version__",
    "HAVE_COMPILED",
    "USING_COMPILED",
    "backend_name",
    "BoundState",
    "SolveConfig",
    "eta",
    "gauss_seidel",
    "minimize_bound_alternating",
    "optimal_beta",
    "poincare_constant",
    "random_initial_guess",
    "reference_solution",
    "CycleBasis",
    "SubspaceDecomposition",
    "basis_to_json",
    "face_cycle_basis",
    "fundamental_cycle_basis",
    "validate_cycle_basis",
    "vertex_subspaces",
    "DegenerateBetaError",
    "DimensionMismatchError",
    "DisconnectedGraphError",
    "DivergenceMismatchError",
    "DuplicateEdgeError",
    "EmptyBasisError",
    "EmptyGraphError",
    "GraphValidationError",
    "IncompatibleRHSError",
    "InvalidCycleError",
    "LapboundError",
    "NoConvergenceError",
    "NonpositiveWeightError",
    "NotAGridGraphError",
    "ParseError",
    "ProblemTooLargeError",
    "RankDeficientError",
    "SelfLoopError",
    "SingularLocalSystemWarning",
    "TooManyEdgesError",
    "UnsupportedFormatError",
    "ZeroTrueError",
    "ErrorEstimate",
    "EstimateConfig",
    "efficiency_index",
    "error_estimate",
    "global_psi",
    "hypercircle_check",
    "local_psi",
    "Graph",
    "apply_laplacian",
    "divergence",
    "energy_seminorm",
    "flow_norm",
    "gradient",
    "validate_graph",
    "GridSpec",
    "preprocess",
    "random_connected_graph",
    "read_matrix_market",
    "sample_and_rhs",
    "sine_field",
    "uniform_grid",
    "write_matrix_market",
    "ExperimentReport",
    "ReportRow",
    "comparator_to_csv",
    "per_edge_table",
    "report_to_csv",
    "report_to_json",
    "LocalSystems",
    "SchwarzState",
    "build_local_systems",
    "exact_cycle_minimizer",
    "init_state",
    "local_solve",
    "minimize_cycle_component",
    "schwarz_sweep",
    "SpanningTree",
    "bfs_tree",
    "compute_tau_f",
    "tree_flow",
    "tree_potential",
]
