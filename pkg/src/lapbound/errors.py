"""Exception taxonomy shared by all lapbound modules."""


class LapboundError(Exception):
    """Base class for all lapbound errors."""


class GraphValidationError(LapboundError):
    """Base class for rejected graph input."""


class SelfLoopError(GraphValidationError):
    pass


class DuplicateEdgeError(GraphValidationError):
    pass


class NonpositiveWeightError(GraphValidationError):
    pass


class DisconnectedGraphError(GraphValidationError):
    pass


class EmptyGraphError(GraphValidationError):
    """No edges survive preprocessing."""


class DimensionMismatchError(LapboundError):
    """Vector length does not match the graph's vertex or edge count."""


class ParseError(LapboundError):
    """Malformed Matrix Market file."""


class UnsupportedFormatError(LapboundError):
    """Matrix Market field we do not handle (complex)."""


class TooManyEdgesError(LapboundError):
    """Requested more extra edges than the complete graph can hold."""


class IncompatibleRHSError(LapboundError):
    """Right-hand side is not (numerically) in the range of the Laplacian."""


class NotAGridGraphError(LapboundError):
    """Face cycle construction asked for on a non-grid graph."""


class EmptyBasisError(LapboundError):
    pass


class InvalidCycleError(LapboundError):
    """A basis vector has nonzero divergence."""


class RankDeficientError(LapboundError):
    """A cycle basis with fewer independent vectors than the cycle space dimension."""


class ProblemTooLargeError(LapboundError):
    """Dense desk-scale routine called beyond its size gate."""


class ZeroTrueError(LapboundError):
    """Efficiency index requested against a zero true error."""


class DivergenceMismatchError(LapboundError):
    """Flow does not carry the divergence the identity or certificate requires."""


class NoConvergenceError(LapboundError):
    pass


class DegenerateBetaError(LapboundError):
    """Closed-form balance step hit a boundary (one residual term vanished)."""


class SingularLocalSystemWarning(UserWarning):
    """Dependent cycles inside one subspace; pseudo-solve fallback engaged."""
