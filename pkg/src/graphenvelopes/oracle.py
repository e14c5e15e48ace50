"""Brute-force envelopes on a uniform grid, for validating the solvers.

The grid refinement cuts every edge into equal pieces no longer than a
mesh width ``h``.  On the grid nodes the oracles enforce the defining
inequalities exhaustively over all node triples (z on a minimal path
between p and q) by downward Gauss-Seidel sweeps:

* convex: chord constraint with distance weights;
* quasiconvex: max constraint, with exact termination.

Both envelopes are piecewise linear / piecewise constant with breakpoints
only at nodes of the subdivided graph, so agreement at grid nodes pins
the solver output everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .convex import ConvexSolveParams, solve_convex
from .errors import NoConvergenceError
from .geometry import distance_matrix
from .graph import (
    Datum,
    EdgePoint,
    GraphPoint,
    MetricGraph,
    SubdivisionMap,
    VertexPoint,
    subdivide_at,
)
from .quasiconvex import solve_quasiconvex

__all__ = [
    "GridRefinement",
    "refine",
    "oracle_convex_envelope",
    "oracle_quasiconvex_envelope",
    "ComparisonReport",
    "compare",
    "run_oracle_comparison",
]

DEFAULT_ORACLE_TOL = 1e-10
DEFAULT_ORACLE_SWEEPS = 100_000


@dataclass
class GridRefinement:
    """Uniformly refined copy of a graph plus the node-to-source mapping."""

    source: MetricGraph
    h: float
    graph: MetricGraph
    mapping: SubdivisionMap
    node_to_source: tuple[GraphPoint, ...]

    @property
    def n_nodes(self) -> int:
        return self.graph.n_vertices

    def node_of_source_vertex(self, v: int) -> int:
        # subdivide_at keeps source vertex ids
        return v


def refine(g: MetricGraph, h: float) -> GridRefinement:
    """Cut every edge into ceil(length / h) equal pieces."""
    if h <= 0:
        raise ValueError("mesh width must be positive")
    cuts: list[GraphPoint] = []
    for eid in range(g.n_edges):
        length = g.edge_length(eid)
        m = max(1, int(np.ceil(length / h - 1e-12)))
        for k in range(1, m):
            cuts.append(EdgePoint(eid, length * k / m))
    refined, mapping = subdivide_at(g, cuts)
    node_to_source = tuple(
        mapping.to_source(VertexPoint(v)) for v in range(refined.n_vertices)
    )
    return GridRefinement(source=g, h=h, graph=refined, mapping=mapping, node_to_source=node_to_source)


def _masked_sweep_setup(grid: GridRefinement):
    dm = np.asarray(distance_matrix(grid.graph), dtype=float)
    tol = grid.graph.path_tolerance
    return dm, tol


def oracle_convex_envelope(
    grid: GridRefinement,
    a_values: Mapping[int, float],
    tol: float = DEFAULT_ORACLE_TOL,
    max_sweeps: int = DEFAULT_ORACLE_SWEEPS,
) -> np.ndarray:
    """Largest grid function below the data satisfying every chord constraint."""
    dm, path_tol = _masked_sweep_setup(grid)
    n = grid.n_nodes
    sup_f = max(a_values.values())
    u = np.full(n, sup_f, dtype=float)
    for v, value in a_values.items():
        u[v] = value
    a_idx = dict(a_values)
    dsafe = dm + np.eye(n)

    for _sweep in range(max_sweeps):
        change = 0.0
        for z in range(n):
            dz = dm[:, z]
            onpath = dz[:, None] + dz[None, :] <= dm + path_tol
            np.fill_diagonal(onpath, False)
            onpath[z, :] = False
            onpath[:, z] = False
            if not onpath.any():
                continue
            num = np.outer(u, dz) + np.outer(dz, u)
            vals = num / dsafe
            cand = vals[onpath].min()
            nv = min(u[z], cand)
            if z in a_idx:
                nv = min(nv, a_idx[z])
            delta = abs(u[z] - nv)
            if delta > change:
                change = delta
            u[z] = nv
        if change <= tol:
            return u
    raise NoConvergenceError(None, "convex oracle exhausted its sweep budget")


def oracle_quasiconvex_envelope(
    grid: GridRefinement, a_values: Mapping[int, float]
) -> np.ndarray:
    """Largest grid function below the data satisfying every max constraint.

    Values stay inside the finite data value set, so sweeps terminate
    exactly.
    """
    dm, path_tol = _masked_sweep_setup(grid)
    n = grid.n_nodes
    sup_f = max(a_values.values())
    u = np.full(n, sup_f, dtype=float)
    for v, value in a_values.items():
        u[v] = value

    while True:
        changed = False
        for z in range(n):
            dz = dm[:, z]
            onpath = dz[:, None] + dz[None, :] <= dm + path_tol
            np.fill_diagonal(onpath, False)
            onpath[z, :] = False
            onpath[:, z] = False
            if not onpath.any():
                continue
            vals = np.maximum.outer(u, u)
            cand = vals[onpath].min()
            if cand < u[z]:
                u[z] = cand
                changed = True
        if not changed:
            return u


@dataclass(frozen=True)
class ComparisonReport:
    max_deviation: float
    worst_node: int | None
    nodes_compared: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def compare(solver_fn, grid: GridRefinement, oracle_values, tol: float = 1e-6) -> ComparisonReport:
    """Max absolute deviation between a solved function and grid values.

    The solved function lives on ``grid.source``; each grid node is
    evaluated through its source point.
    """
    worst = 0.0
    worst_node = None
    for node in range(grid.n_nodes):
        dev = abs(solver_fn.eval(grid.node_to_source[node]) - float(oracle_values[node]))
        if dev > worst:
            worst = dev
            worst_node = node
    return ComparisonReport(
        max_deviation=worst, worst_node=worst_node, nodes_compared=grid.n_nodes, tol=tol
    )


def run_oracle_comparison(
    g: MetricGraph,
    datum: Datum,
    kind: str,
    h: float | None = None,
    tol: float = 1e-6,
    params: ConvexSolveParams | None = None,
    oracle_tol: float = DEFAULT_ORACLE_TOL,
) -> ComparisonReport:
    """Solve with the primary solver, then cross-check against the oracle.

    The grid refines the solve graph (data points already subdivided to
    vertices) with mesh width ``h``, defaulting to an eighth of its
    shortest edge.
    """
    if kind == "convex":
        report = solve_convex(g, datum, params)
    elif kind == "quasiconvex":
        report = solve_quasiconvex(g, datum)
    else:
        raise ValueError(f"unknown envelope kind {kind!r}")
    solve_graph = report.graph
    if h is None:
        h = solve_graph.min_edge_length / 8.0
    grid = refine(solve_graph, h)
    a_grid = {grid.node_of_source_vertex(v): value for v, value in report.a_nodes.items()}
    if kind == "convex":
        oracle_values = oracle_convex_envelope(grid, a_grid, tol=oracle_tol)
    else:
        oracle_values = oracle_quasiconvex_envelope(grid, a_grid)
    return compare(report.function, grid, oracle_values, tol=tol)
