"""Convex envelope of point data on a compact metric graph.

The envelope is affine on every edge between data points and satisfies,
at each vertex not carrying a datum, the coupling condition that the
minimum over pairs of incident edges of the two ingoing derivatives sums
to zero.  Those facts pin the solution to finitely many vertex unknowns,
which are found by a monotone downward sweep:

1. subdivide the graph so every data point is a vertex;
2. start from the largest admissible bound (the data maximum) and the
   data values themselves;
3. repeatedly cap each vertex by the best linear interpolation through
   any pair of neighbours, clamping data vertices by their values;
4. stop when a full sweep changes nothing beyond the tolerance.

Every iterate dominates the envelope and the map is monotone, so the
sweeps converge to the envelope from above.  The report carries a
certificate: slope convexity, vertex equation residuals, complementarity
at data vertices, and the data min/max bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import (
    AssumptionViolatedError,
    EmptyDatumError,
    NoConvergenceError,
    UnboundedEnvelopeError,
)
from .functions import LocalConvexityReport, PWLFunction, check_convex_local, slope_tolerance
from .geometry import check_same_edge_assumption
from .graph import (
    Datum,
    GraphPoint,
    MetricGraph,
    SubdivisionMap,
    VertexPoint,
    subdivide_at,
    terminal_vertices,
)

__all__ = [
    "ConvexSolveParams",
    "BoundednessReport",
    "EnvelopeReport",
    "check_boundedness_convex",
    "solve_convex",
]


@dataclass(frozen=True)
class ConvexSolveParams:
    """Iteration controls; ``sweep`` is ``gauss-seidel`` or ``jacobi``."""

    tolerance: float = 1e-12
    max_sweeps: int = 1_000_000
    sweep: str = "gauss-seidel"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        if self.sweep not in ("gauss-seidel", "jacobi"):
            raise ValueError("sweep must be 'gauss-seidel' or 'jacobi'")


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    missing_terminals: tuple[int, ...]

    @property
    def witness(self) -> int | None:
        return self.missing_terminals[0] if self.missing_terminals else None


def check_boundedness_convex(g: MetricGraph, datum: Datum) -> BoundednessReport:
    """The convex envelope is bounded iff every terminal vertex carries data."""
    covered = {p.vertex for p in datum.points if isinstance(p, VertexPoint)}
    missing = tuple(sorted(v for v in terminal_vertices(g) if v not in covered))
    return BoundednessReport(bounded=not missing, missing_terminals=missing)


@dataclass
class EnvelopeReport:
    """Solved envelope plus the certificate that it is one."""

    function: PWLFunction
    graph: MetricGraph
    mapping: SubdivisionMap
    a_nodes: dict[int, float]
    sweeps: int
    final_change: float
    converged: bool
    equation_residuals: dict[int, float]
    complementarity: dict[int, float]
    datum_slack: dict[int, float]
    value_min: float
    value_max: float
    bounds_ok: bool
    local_check: LocalConvexityReport
    slope_tol: float
    certificate_ok: bool
    params: ConvexSolveParams = field(default_factory=ConvexSolveParams)

    def eval_source(self, p: GraphPoint) -> float:
        """Evaluate on a point of the original (pre-subdivision) graph."""
        return self.function.eval(self.mapping.to_result(p))


def _certificate(
    fn: PWLFunction,
    g2: MetricGraph,
    a_nodes: dict[int, float],
    inf_f: float,
    sup_f: float,
) -> tuple[dict[int, float], dict[int, float], dict[int, float], float, float, bool, LocalConvexityReport, float, bool]:
    tol = slope_tolerance(fn)
    terminals = terminal_vertices(g2)
    residuals: dict[int, float] = {}
    comp: dict[int, float] = {}
    slack: dict[int, float] = {}
    for v in range(g2.n_vertices):
        if v in a_nodes:
            slack[v] = a_nodes[v] - fn.vertex_values[v]
            if v not in terminals and g2.degree(v) >= 2:
                comp[v] = min(slack[v], fn.min_pair_slope(v))
        elif g2.degree(v) >= 2:
            residuals[v] = fn.min_pair_slope(v)
    vmin = min(fn.vertex_values)
    vmax = max(fn.vertex_values)
    bounds_ok = vmin >= inf_f - tol and vmax <= sup_f + tol
    local = check_convex_local(fn, tol)
    ok = (
        bounds_ok
        and local.passed
        and all(abs(r) <= tol for r in residuals.values())
        and all(abs(c) <= tol for c in comp.values())
        and all(s >= -tol for s in slack.values())
    )
    return residuals, comp, slack, vmin, vmax, bounds_ok, local, tol, ok


def solve_convex(
    g: MetricGraph, datum: Datum, params: ConvexSolveParams | None = None
) -> EnvelopeReport:
    """Compute the convex envelope of ``datum`` on ``g``.

    Raises ``UnboundedEnvelopeError`` when a terminal vertex carries no
    datum, ``AssumptionViolatedError`` when some edge is longer than the
    detour between its endpoints, and ``NoConvergenceError`` (carrying the
    partial report) when the sweep budget runs out.
    """
    if params is None:
        params = ConvexSolveParams()
    if len(datum) == 0:
        raise EmptyDatumError("cannot solve with an empty datum")

    same_edge = check_same_edge_assumption(g)
    if not same_edge.passed:
        raise AssumptionViolatedError(same_edge.violations)

    bound = check_boundedness_convex(g, datum)
    if not bound.bounded:
        raise UnboundedEnvelopeError("convex", bound.witness)

    g2, mapping = subdivide_at(g, datum.points)
    a_nodes = {mapping.node_of(p): value for p, value in datum.items()}
    inf_f = min(a_nodes.values())
    sup_f = max(a_nodes.values())

    n = g2.n_vertices
    terminals = terminal_vertices(g2)
    # Neighbour pairs per vertex: ((len_e, across_e, len_f, across_f), ...)
    pairs: list[tuple[tuple[float, int, float, int], ...]] = []
    for v in range(n):
        combos = []
        for ea, eb in combinations(g2.incident_edges(v), 2):
            combos.append(
                (g2.edge_length(ea), g2.other_end(ea, v), g2.edge_length(eb), g2.other_end(eb, v))
            )
        pairs.append(tuple(combos))

    u = [a_nodes.get(v, sup_f) for v in range(n)]
    sweeps = 0
    change = float("inf")
    converged = False
    while sweeps < params.max_sweeps:
        sweeps += 1
        change = 0.0
        source = list(u) if params.sweep == "jacobi" else u
        for v in range(n):
            if v in terminals:
                nv = a_nodes[v]
            else:
                cap = min(
                    (lb * source[p] + la * source[q]) / (la + lb)
                    for la, p, lb, q in pairs[v]
                )
                nv = min(a_nodes[v], cap) if v in a_nodes else cap
            delta = abs(nv - u[v])
            if delta > change:
                change = delta
            u[v] = nv
        if change <= params.tolerance:
            converged = True
            break

    fn = PWLFunction.from_vertex_values(g2, u)
    residuals, comp, slack, vmin, vmax, bounds_ok, local, tol, cert_ok = _certificate(
        fn, g2, a_nodes, inf_f, sup_f
    )
    report = EnvelopeReport(
        function=fn,
        graph=g2,
        mapping=mapping,
        a_nodes=a_nodes,
        sweeps=sweeps,
        final_change=change,
        converged=converged,
        equation_residuals=residuals,
        complementarity=comp,
        datum_slack=slack,
        value_min=vmin,
        value_max=vmax,
        bounds_ok=bounds_ok,
        local_check=local,
        slope_tol=tol,
        certificate_ok=cert_ok and converged,
        params=params,
    )
    if not converged:
        raise NoConvergenceError(report)
    return report
