"""Exception hierarchy shared by the whole package."""

from __future__ import annotations


class GraphEnvelopeError(Exception):
    """Base class for all errors raised by this package."""


class GraphValidationError(GraphEnvelopeError):
    """A graph description violates a structural invariant."""


class EmptyGraphError(GraphValidationError):
    pass


class LoopEdgeError(GraphValidationError):
    pass


class NonpositiveLengthError(GraphValidationError):
    pass


class DisconnectedGraphError(GraphValidationError):
    pass


class DuplicatePointError(GraphEnvelopeError):
    """Two datum points canonicalize to the same location."""


class EmptyDatumError(GraphEnvelopeError):
    """A solve was requested with no data points at all."""


class EdgeNotIncidentError(GraphEnvelopeError):
    """An (edge, vertex) query where the edge does not touch the vertex."""


class DegreeTooSmallError(GraphEnvelopeError):
    """A vertex operation that needs degree >= 2 hit a terminal vertex."""


class AssumptionViolatedError(GraphEnvelopeError):
    """Some edge is longer than the shortest detour between its endpoints.

    Solvers refuse such graphs because same-edge distances stop being
    plain coordinate differences there.
    """

    def __init__(self, edges: tuple[int, ...], message: str | None = None):
        self.edges = tuple(edges)
        super().__init__(message or f"same-edge distance assumption fails on edges {list(self.edges)}")


class UnboundedEnvelopeError(GraphEnvelopeError):
    """The requested envelope has no finite supremum for this datum.

    ``witness`` is a terminal vertex id (convex case) or the geodesic hull
    of the datum (quasiconvex case).
    """

    def __init__(self, kind: str, witness, message: str | None = None):
        self.kind = kind
        self.witness = witness
        super().__init__(message or f"{kind} envelope is unbounded")


class NoConvergenceError(GraphEnvelopeError):
    """Sweep budget exhausted before reaching the requested tolerance.

    ``report`` carries the partial solver state.
    """

    def __init__(self, report, message: str | None = None):
        self.report = report
        super().__init__(message or "solver did not converge within the sweep budget")


class ProblemFormatError(GraphEnvelopeError):
    """Base for problem/result file errors; remembers the source line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ProblemSyntaxError(ProblemFormatError):
    pass


class UnknownReferenceError(ProblemFormatError):
    pass
