"""Quasiconvex envelope of point data on a compact metric graph.

The envelope is piecewise constant: one value per vertex and, on every
open edge interior, the maximum of the two endpoint values.  The vertex
values are the largest lattice fixed point of the full path constraint
set

    u(z) <= max(u(p), u(q))   whenever z lies on a minimal path [p, q],

clamped by the data.  Constraining only adjacent vertex pairs is not
enough: graphs exist where the local min-max relations admit strictly
larger spurious fixed points, so the solver sweeps all node triples.
Values only ever move to other data values, and sweeps stop exactly when
nothing changes, so termination needs no tolerance.

The certificate checks the local min-max relation at every non-data
vertex, runs the sampled definitional check, and verifies the output
dominates the convex envelope.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .convex import ConvexSolveParams, solve_convex
from .errors import EmptyDatumError, UnboundedEnvelopeError
from .functions import PWCFunction, SampledCheckReport, check_quasiconvex_sampled, slope_tolerance
from .geometry import Subset, check_same_edge_assumption, convex_hull, distance_matrix, is_whole_graph
from .graph import (
    Datum,
    EdgePoint,
    GraphPoint,
    MetricGraph,
    SubdivisionMap,
    VertexPoint,
    subdivide_at,
)

__all__ = [
    "QuasiBoundednessReport",
    "QuasiSolveReport",
    "check_boundedness_quasi",
    "solve_quasiconvex",
]


@dataclass(frozen=True)
class QuasiBoundednessReport:
    bounded: bool
    hull: Subset
    graph: MetricGraph
    mapping: SubdivisionMap


def check_boundedness_quasi(g: MetricGraph, datum: Datum) -> QuasiBoundednessReport:
    """Bounded iff the geodesic hull of the data points covers the graph.

    The hull is computed on the graph subdivided at interior data points,
    so it is a plain node/edge subset.
    """
    if len(datum) == 0:
        raise EmptyDatumError("cannot check boundedness of an empty datum")
    g2, mapping = subdivide_at(g, datum.points)
    seeds = [mapping.node_of(p) for p in datum.points]
    hull = convex_hull(g2, seeds)
    return QuasiBoundednessReport(
        bounded=is_whole_graph(g2, hull), hull=hull, graph=g2, mapping=mapping
    )


@dataclass
class QuasiSolveReport:
    function: PWCFunction
    graph: MetricGraph
    mapping: SubdivisionMap
    a_nodes: dict[int, float]
    sweeps: int
    datum_slack: dict[int, float]
    relation_mismatches: dict[int, tuple[float, float]]
    relations_ok: bool
    value_set_ok: bool
    sampled: SampledCheckReport
    convex_minorant_gap: float | None
    convex_minorant_ok: bool | None
    certificate_ok: bool

    def eval_source(self, p: GraphPoint) -> float:
        return self.function.eval(self.mapping.to_result(p))


def _vertex_relation(g2: MetricGraph, u: list[float], v: int) -> float | None:
    """min over pairs of distinct adjacent vertices of the larger value."""
    neighbours = g2.adjacent_vertices(v)
    if len(neighbours) < 2:
        return None
    return min(max(u[a], u[b]) for a, b in combinations(neighbours, 2))


def solve_quasiconvex(
    g: MetricGraph,
    datum: Datum,
    *,
    certificate_samples: int = 512,
    seed: int = 0,
) -> QuasiSolveReport:
    """Compute the quasiconvex envelope of ``datum`` on ``g``.

    Raises ``UnboundedEnvelopeError`` (with the hull as witness) when the
    data points do not span the whole graph.
    """
    bound = check_boundedness_quasi(g, datum)
    if not bound.bounded:
        raise UnboundedEnvelopeError("quasiconvex", bound.hull)
    g2, mapping = bound.graph, bound.mapping
    a_nodes = {mapping.node_of(p): value for p, value in datum.items()}

    n = g2.n_vertices
    dm = distance_matrix(g2)
    tol = g2.path_tolerance
    # Triple constraint lists: for each z the pairs (p, q) with z on a
    # minimal path between them.
    constraints: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for z in range(n):
        row = dm[z]
        for p in range(n):
            if p == z:
                continue
            for q in range(p + 1, n):
                if q == z:
                    continue
                if row[p] + row[q] <= dm[p, q] + tol:
                    constraints[z].append((p, q))

    u = [a_nodes.get(v, max(a_nodes.values())) for v in range(n)]
    sweeps = 0
    while True:
        sweeps += 1
        changed = False
        for z in range(n):
            uz = u[z]
            for p, q in constraints[z]:
                cap = u[p] if u[p] >= u[q] else u[q]
                if cap < uz:
                    uz = cap
            if uz != u[z]:
                u[z] = uz
                changed = True
        if not changed:
            break

    edge_values = tuple(
        max(u[g2.edges[e].tail], u[g2.edges[e].head]) for e in range(g2.n_edges)
    )
    fn = PWCFunction(g2, edge_values, u)

    # Certificate.
    slack = {v: a_nodes[v] - u[v] for v in a_nodes}
    mismatches: dict[int, tuple[float, float]] = {}
    for v in range(n):
        if v in a_nodes:
            continue
        expected = _vertex_relation(g2, u, v)
        if expected is not None and expected != u[v]:
            mismatches[v] = (u[v], expected)
    value_set = set(a_nodes.values())
    value_set_ok = all(value in value_set for value in u)
    sampled = check_quasiconvex_sampled(fn, samples=certificate_samples, seed=seed)

    # Dominance over the convex envelope, checked at all nodes and edge
    # midpoints.  Skipped when the convex solver would reject the graph.
    gap: float | None = None
    minorant_ok: bool | None = None
    if check_same_edge_assumption(g).passed:
        convex_report = solve_convex(g, datum, ConvexSolveParams())
        gaps = []
        for v in range(n):
            src = mapping.to_source(VertexPoint(v))
            gaps.append(u[v] - convex_report.eval_source(src))
        for e in range(g2.n_edges):
            p = EdgePoint(e, 0.5 * g2.edge_length(e))
            gaps.append(fn.eval(p) - convex_report.eval_source(mapping.to_source(p)))
        gap = min(gaps)
        minorant_ok = gap >= -2.0 * slope_tolerance(fn)

    certificate_ok = (
        not mismatches
        and value_set_ok
        and sampled.passed
        and all(s >= 0 for s in slack.values())
        and (minorant_ok is None or minorant_ok)
    )
    return QuasiSolveReport(
        function=fn,
        graph=g2,
        mapping=mapping,
        a_nodes=a_nodes,
        sweeps=sweeps,
        datum_slack=slack,
        relation_mismatches=mismatches,
        relations_ok=not mismatches,
        value_set_ok=value_set_ok,
        sampled=sampled,
        convex_minorant_gap=gap,
        convex_minorant_ok=minorant_ok,
        certificate_ok=certificate_ok,
    )
