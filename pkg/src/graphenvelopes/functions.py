"""Function objects on a metric graph and the convexity checkers.

Two shapes cover everything the solvers produce: continuous piecewise
linear functions (one breakpoint run per edge) and piecewise constant
functions (one value per open edge interior, one per vertex, jumps
allowed).

The checkers come in two independent flavours per notion: a local one
that inspects slopes (edge kinks plus the minimum pairwise sum of ingoing
derivatives at each interior vertex) and a sampled one that tests the
defining chord / max inequality along minimal paths on a deterministic
point pool.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import DegreeTooSmallError, EdgeNotIncidentError
from .geometry import Subset, convex_hull, distance
from .graph import EdgePoint, GraphPoint, MetricGraph, VertexPoint, point_sort_key

__all__ = [
    "PWLFunction",
    "PWCFunction",
    "ingoing_derivative",
    "min_pair_slope",
    "LocalConvexityReport",
    "SampledCheckReport",
    "Counterexample",
    "slope_tolerance",
    "check_convex_local",
    "check_convex_sampled",
    "check_quasiconvex_sampled",
    "sublevel_set",
    "sample_points",
]

_GOLDEN = 0.6180339887498949


class PWLFunction:
    """Continuous piecewise linear function on a metric graph.

    ``edge_breakpoints[e]`` is a strictly increasing run of ``(t, value)``
    pairs from coordinate 0 to the edge length.  Endpoint values must agree
    exactly across all edges meeting at a vertex.
    """

    __slots__ = ("graph", "edge_breakpoints", "vertex_values")

    def __init__(self, graph: MetricGraph, edge_breakpoints: Sequence[Sequence[tuple[float, float]]]):
        if len(edge_breakpoints) != graph.n_edges:
            raise ValueError("one breakpoint run per edge is required")
        runs = []
        vertex_values: list[float | None] = [None] * graph.n_vertices
        for eid, run in enumerate(edge_breakpoints):
            run = tuple((float(t), float(u)) for t, u in run)
            if len(run) < 2:
                raise ValueError(f"edge {graph.edge_names[eid]} needs at least two breakpoints")
            length = graph.edge_length(eid)
            if run[0][0] != 0.0 or run[-1][0] != length:
                raise ValueError(
                    f"edge {graph.edge_names[eid]} breakpoints must span [0, {length!r}]"
                )
            for (t0, _), (t1, _) in zip(run, run[1:]):
                if not t1 > t0:
                    raise ValueError(f"edge {graph.edge_names[eid]} breakpoints must increase")
            for t, u in run:
                if not math.isfinite(t) or not math.isfinite(u):
                    raise ValueError("breakpoints must be finite")
            tail, head = graph.edge_ends(eid)
            for v, value in ((tail, run[0][1]), (head, run[-1][1])):
                if vertex_values[v] is None:
                    vertex_values[v] = value
                elif vertex_values[v] != value:
                    raise ValueError(
                        f"conflicting values at vertex {graph.vertex_names[v]}: "
                        f"{vertex_values[v]!r} vs {value!r}"
                    )
            runs.append(run)
        self.graph = graph
        self.edge_breakpoints = tuple(runs)
        self.vertex_values = tuple(float(v) for v in vertex_values)  # type: ignore[arg-type]

    @classmethod
    def from_vertex_values(cls, graph: MetricGraph, values: Sequence[float]) -> "PWLFunction":
        """Linear interpolation of vertex values along every edge."""
        if len(values) != graph.n_vertices:
            raise ValueError("one value per vertex is required")
        runs = []
        for eid in range(graph.n_edges):
            tail, head = graph.edge_ends(eid)
            runs.append(((0.0, float(values[tail])), (graph.edge_length(eid), float(values[head]))))
        return cls(graph, runs)

    def eval(self, x: GraphPoint) -> float:
        x = self.graph.canonical(x)
        if isinstance(x, VertexPoint):
            return self.vertex_values[x.vertex]
        run = self.edge_breakpoints[x.edge]
        ts = [t for t, _ in run]
        i = bisect_right(ts, x.t)  # canonical interior points give 1 <= i < len(run)
        (t0, u0), (t1, u1) = run[i - 1], run[i]
        return u0 + (u1 - u0) * (x.t - t0) / (t1 - t0)

    __call__ = eval

    def edge_slopes(self, e: int) -> tuple[float, ...]:
        run = self.edge_breakpoints[e]
        return tuple((u1 - u0) / (t1 - t0) for (t0, u0), (t1, u1) in zip(run, run[1:]))

    def ingoing_derivative(self, v: int, e: int) -> float:
        """One-sided derivative at ``v`` in the direction entering edge ``e``."""
        tail, head = self.graph.edge_ends(e)
        slopes = self.edge_slopes(e)
        if v == tail:
            return slopes[0]
        if v == head:
            return -slopes[-1]
        raise EdgeNotIncidentError(
            f"edge {self.graph.edge_names[e]} is not incident to vertex {self.graph.vertex_names[v]}"
        )

    def min_pair_slope(self, v: int) -> float:
        """Minimum over unordered pairs of incident edges of the ingoing sums."""
        incident = self.graph.incident_edges(v)
        if len(incident) < 2:
            raise DegreeTooSmallError(
                f"vertex {self.graph.vertex_names[v]} has degree {len(incident)} < 2"
            )
        slopes = {e: self.ingoing_derivative(v, e) for e in incident}
        return min(slopes[a] + slopes[b] for a, b in combinations(incident, 2))

    @property
    def max_abs_value(self) -> float:
        return max(abs(u) for run in self.edge_breakpoints for _, u in run)

    def breakpoints_as_points(self) -> list[GraphPoint]:
        pts = []
        for eid, run in enumerate(self.edge_breakpoints):
            for t, _ in run[1:-1]:
                pts.append(EdgePoint(eid, t))
        return pts


class PWCFunction:
    """Piecewise constant function: edge interiors and vertices separately."""

    __slots__ = ("graph", "edge_values", "vertex_values")

    def __init__(self, graph: MetricGraph, edge_values: Sequence[float], vertex_values: Sequence[float]):
        if len(edge_values) != graph.n_edges or len(vertex_values) != graph.n_vertices:
            raise ValueError("one value per edge and per vertex is required")
        values = tuple(float(v) for v in edge_values) + tuple(float(v) for v in vertex_values)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("all values must be finite")
        self.graph = graph
        self.edge_values = tuple(float(v) for v in edge_values)
        self.vertex_values = tuple(float(v) for v in vertex_values)

    def eval(self, x: GraphPoint) -> float:
        x = self.graph.canonical(x)
        if isinstance(x, VertexPoint):
            return self.vertex_values[x.vertex]
        return self.edge_values[x.edge]

    __call__ = eval

    @property
    def value_set(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.edge_values) | set(self.vertex_values)))

    @property
    def max_abs_value(self) -> float:
        return max(abs(v) for v in self.edge_values + self.vertex_values)


def ingoing_derivative(u: PWLFunction, v: int, e: int) -> float:
    return u.ingoing_derivative(v, e)


def min_pair_slope(u: PWLFunction, v: int) -> float:
    return u.min_pair_slope(v)


def slope_tolerance(u: PWLFunction | PWCFunction) -> float:
    """Default slack for slope and chord comparisons, scaled to the data."""
    return 1e-9 * max(1.0, u.max_abs_value)


@dataclass(frozen=True)
class LocalConvexityReport:
    passed: bool
    edge_violations: tuple[tuple[int, int, float], ...]  # (edge, piece index, slope drop)
    vertex_violations: tuple[tuple[int, float], ...]  # (vertex, min pair slope)
    tolerance: float


def check_convex_local(u: PWLFunction, tol: float | None = None) -> LocalConvexityReport:
    """Slope-based convexity certificate.

    Passes iff slopes never decrease along any edge and the minimum ingoing
    pair sum at every vertex of degree >= 2 is at least ``-tol``.  Passing
    certifies convexity along every minimal path.
    """
    if tol is None:
        tol = slope_tolerance(u)
    edge_bad = []
    for eid in range(u.graph.n_edges):
        slopes = u.edge_slopes(eid)
        for i, (a, b) in enumerate(zip(slopes, slopes[1:])):
            if b < a - tol:
                edge_bad.append((eid, i, a - b))
    vertex_bad = []
    for v in range(u.graph.n_vertices):
        if u.graph.degree(v) < 2:
            continue
        mps = u.min_pair_slope(v)
        if mps < -tol:
            vertex_bad.append((v, mps))
    return LocalConvexityReport(
        passed=not edge_bad and not vertex_bad,
        edge_violations=tuple(edge_bad),
        vertex_violations=tuple(vertex_bad),
        tolerance=tol,
    )


@dataclass(frozen=True)
class Counterexample:
    x: GraphPoint
    y: GraphPoint
    z: GraphPoint
    value: float
    bound: float


@dataclass(frozen=True)
class SampledCheckReport:
    passed: bool
    checked: int
    counterexample: Counterexample | None


_EDGE_FRACTIONS = (0.0625, 0.125, 0.25, 0.5, 0.75, 0.875, 0.9375)


def sample_points(
    g: MetricGraph,
    seed: int = 0,
    extra_per_edge: int = 4,
    include: Sequence[GraphPoint] = (),
) -> list[GraphPoint]:
    """Deterministic point pool: vertices, fixed edge fractions, a golden
    ratio sequence phased by the seed, plus any extra points requested."""
    pool: dict[tuple, GraphPoint] = {}

    def add(p: GraphPoint):
        cp = g.canonical(p)
        pool.setdefault(point_sort_key(cp), cp)

    for v in range(g.n_vertices):
        add(VertexPoint(v))
    for p in include:
        add(p)
    for eid in range(g.n_edges):
        length = g.edge_length(eid)
        for f in _EDGE_FRACTIONS:
            add(EdgePoint(eid, f * length))
        for k in range(extra_per_edge):
            frac = ((k + 1) * _GOLDEN + seed * 0.2654435561 + eid * 0.0813) % 1.0
            if 0.0 < frac < 1.0:
                add(EdgePoint(eid, frac * length))
    return [pool[k] for k in sorted(pool)]


def _sampled_check(u, samples: int, seed: int, bound_fn) -> SampledCheckReport:
    g = u.graph
    include = u.breakpoints_as_points() if isinstance(u, PWLFunction) else ()
    pool = sample_points(g, seed=seed, include=include)
    m = len(pool)
    keys = [point_sort_key(p) for p in pool]
    values = [u.eval(p) for p in pool]
    tol_d = g.path_tolerance

    dcache: dict[tuple[int, int], float] = {}

    def dist(i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        d = dcache.get((i, j))
        if d is None:
            d = distance(g, pool[i], pool[j])
            dcache[(i, j)] = d
        return d

    worst: Counterexample | None = None
    worst_key = None
    checked = 0

    def consider(i: int, j: int, k: int) -> bool:
        nonlocal worst, worst_key, checked
        if checked >= samples:
            return False
        if i == j or k == i or k == j:
            return True
        checked += 1
        if keys[j] < keys[i]:
            i, j = j, i
        d_xy = dist(i, j)
        if d_xy <= tol_d:
            return True
        d_xz = dist(i, k)
        d_zy = dist(k, j)
        if d_xz + d_zy > d_xy + tol_d:
            return True
        bound = bound_fn(values[i], values[j], d_xz, d_zy, d_xy)
        if values[k] > bound:
            key = (keys[i], keys[j], keys[k])
            if worst_key is None or key < worst_key:
                worst_key = key
                worst = Counterexample(pool[i], pool[j], pool[k], values[k], bound)
        return True

    # Stage 1: every vertex triple, in id order.  This keeps failures at
    # nodes reproducible and guaranteed to be found when the budget allows.
    node_idx = [i for i, p in enumerate(pool) if isinstance(p, VertexPoint)]
    done = False
    for a in range(len(node_idx)):
        for b in range(a + 1, len(node_idx)):
            for c in node_idx:
                if not consider(node_idx[a], node_idx[b], c):
                    done = True
                    break
            if done:
                break
        if done:
            break

    # Stage 2: seeded random triples over the full pool.
    rng = random.Random(seed)
    while checked < samples:
        consider(rng.randrange(m), rng.randrange(m), rng.randrange(m))

    return SampledCheckReport(passed=worst is None, checked=checked, counterexample=worst)


def check_convex_sampled(
    u: PWLFunction, samples: int = 10000, seed: int = 0, tol: float | None = None
) -> SampledCheckReport:
    """Definitional convexity check: chord inequality along minimal paths."""
    if tol is None:
        tol = slope_tolerance(u)

    def bound(ux: float, uy: float, d_xz: float, d_zy: float, d_xy: float) -> float:
        return (d_zy * ux + d_xz * uy) / d_xy + tol

    return _sampled_check(u, samples, seed, bound)


def check_quasiconvex_sampled(
    u: PWLFunction | PWCFunction, samples: int = 10000, seed: int = 0, tol: float = 0.0
) -> SampledCheckReport:
    """Definitional quasiconvexity check: max inequality along minimal paths."""

    def bound(ux: float, uy: float, d_xz: float, d_zy: float, d_xy: float) -> float:
        return max(ux, uy) + tol

    return _sampled_check(u, samples, seed, bound)


def sublevel_set(u: PWCFunction, alpha: float) -> tuple[Subset, bool]:
    """Nodes and edges with values <= alpha, plus a geodesic convexity flag.

    The flag compares the hull of the sublevel vertex set with the subset
    itself; under the same-edge assumption every contained edge is itself
    a minimal path, so equality is exactly geodesic convexity.
    """
    g = u.graph
    verts = {v for v in range(g.n_vertices) if u.vertex_values[v] <= alpha}
    edges = {
        e
        for e in range(g.n_edges)
        if u.edge_values[e] <= alpha and g.edges[e].tail in verts and g.edges[e].head in verts
    }
    subset = Subset.create(g, verts, edges)
    if not verts:
        return subset, True
    return subset, convex_hull(g, verts) == subset
