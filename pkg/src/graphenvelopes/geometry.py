"""Geodesic geometry on a metric graph.

Distances between arbitrary points come from the cached all-pairs vertex
distance table plus the two exit coordinates of interior points.  Minimal
paths between nodes are enumerated exhaustively (all ties), which is what
hulls and the path-membership predicate are built on.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .graph import EdgePoint, GraphPoint, MetricGraph, VertexPoint

__all__ = [
    "NodePath",
    "Subset",
    "SameEdgeReport",
    "distance_matrix",
    "distance",
    "check_same_edge_assumption",
    "all_minimal_paths",
    "on_minimal_path",
    "convex_hull",
    "is_whole_graph",
]


@dataclass(frozen=True)
class NodePath:
    """A walk between two nodes: (edge id, traversed tail->head?) steps."""

    steps: tuple[tuple[int, bool], ...]
    nodes: tuple[int, ...]
    length: float


@dataclass(frozen=True)
class Subset:
    """Vertex set plus fully contained edges."""

    vertices: frozenset[int]
    edges: frozenset[int]

    @classmethod
    def create(cls, g: MetricGraph, vertices: Iterable[int], edges: Iterable[int]) -> "Subset":
        vset = frozenset(vertices)
        eset = frozenset(edges)
        for e in eset:
            tail, head = g.edge_ends(e)
            if tail not in vset or head not in vset:
                raise ValueError(f"edge {g.edge_names[e]} has an endpoint outside the subset")
        return cls(vset, eset)

    @property
    def is_empty(self) -> bool:
        return not self.vertices and not self.edges


def distance_matrix(g: MetricGraph) -> np.ndarray:
    """All-pairs vertex distances; computed once and cached on the graph."""
    if g._dist_matrix is None:
        n = g.n_vertices
        best: dict[tuple[int, int], float] = {}
        for e in g.edges:
            key = (min(e.tail, e.head), max(e.tail, e.head))
            if key not in best or e.length < best[key]:
                best[key] = e.length
        rows = [k[0] for k in best]
        cols = [k[1] for k in best]
        vals = [best[k] for k in best]
        m = csr_matrix((vals, (rows, cols)), shape=(n, n))
        g._dist_matrix = _csgraph_dijkstra(m, directed=False)
    return g._dist_matrix


def _exits(g: MetricGraph, p: GraphPoint) -> tuple[tuple[int, float], ...]:
    if isinstance(p, VertexPoint):
        return ((p.vertex, 0.0),)
    edge = g.edges[p.edge]
    return ((edge.tail, p.t), (edge.head, edge.length - p.t))


def distance(g: MetricGraph, x: GraphPoint, y: GraphPoint) -> float:
    """Length of a shortest path between two points of the graph."""
    x = g.canonical(x)
    y = g.canonical(y)
    dm = distance_matrix(g)
    best = min(
        cx + dm[vx, vy] + cy
        for vx, cx in _exits(g, x)
        for vy, cy in _exits(g, y)
    )
    if isinstance(x, EdgePoint) and isinstance(y, EdgePoint) and x.edge == y.edge:
        best = min(best, abs(x.t - y.t))
    return float(best)


def _dijkstra_skipping(g: MetricGraph, source: int, skip_edge: int) -> list[float]:
    dist = [float("inf")] * g.n_vertices
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for eid in g.incident_edges(v):
            if eid == skip_edge:
                continue
            w = g.other_end(eid, v)
            nd = d + g.edge_length(eid)
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


@dataclass(frozen=True)
class SameEdgeReport:
    """Outcome of the per-edge detour check.

    An edge passes when its length does not exceed the shortest path
    between its endpoints in the graph with that edge removed (infinite
    for bridges).  When all edges pass, the distance of two points on a
    common edge is exactly their coordinate difference.
    """

    violations: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def check_same_edge_assumption(g: MetricGraph) -> SameEdgeReport:
    tol = g.path_tolerance
    bad = []
    for eid, edge in enumerate(g.edges):
        around = _dijkstra_skipping(g, edge.tail, eid)[edge.head]
        if around < edge.length - tol:
            bad.append(eid)
    return SameEdgeReport(tuple(bad))


def all_minimal_paths(g: MetricGraph, p: int, q: int) -> list[NodePath]:
    """Every shortest path between two vertices, lexicographic by edge ids.

    Ties are all enumerated; parallel edges of equal length give distinct
    paths.  Admissible edge directions strictly increase the distance from
    ``p``, so the search space is a DAG.
    """
    dm = distance_matrix(g)
    if p == q:
        return [NodePath((), (p,), 0.0)]
    dp = dm[p]
    dq = dm[q]
    target = dp[q]
    tol = g.path_tolerance

    results: list[NodePath] = []

    def extend(node: int, steps: list[tuple[int, bool]], nodes: list[int], acc: float):
        if node == q:
            results.append(NodePath(tuple(steps), tuple(nodes), acc))
            return
        if abs(dp[node] - acc) > tol:
            return
        for eid in sorted(g.incident_edges(node)):
            other = g.other_end(eid, node)
            length = g.edge_length(eid)
            if acc + length + dq[other] <= target + tol:
                steps.append((eid, g.edges[eid].tail == node))
                nodes.append(other)
                extend(other, steps, nodes, acc + length)
                steps.pop()
                nodes.pop()

    extend(p, [], [p], 0.0)
    results.sort(key=lambda path: path.steps)
    return results


def on_minimal_path(g: MetricGraph, p: int, z: int, q: int, tol: float | None = None) -> bool:
    """True when vertex ``z`` lies on some shortest path from ``p`` to ``q``."""
    dm = distance_matrix(g)
    if tol is None:
        tol = g.path_tolerance
    return bool(dm[p, z] + dm[z, q] <= dm[p, q] + tol)


def convex_hull(g: MetricGraph, seeds: Iterable[int]) -> Subset:
    """Smallest node subset containing the seeds and closed under minimal paths.

    Pairs of hull vertices are expanded by all their minimal paths until a
    fixed point; interior points of contained edges reach everything
    through the edge endpoints, so vertex-pair closure suffices.
    """
    verts: set[int] = set(seeds)
    edges: set[int] = set()
    processed: set[tuple[int, int]] = set()
    while True:
        todo = [
            (u, v)
            for u, v in combinations(sorted(verts), 2)
            if (u, v) not in processed
        ]
        if not todo:
            break
        for u, v in todo:
            processed.add((u, v))
            for path in all_minimal_paths(g, u, v):
                verts.update(path.nodes)
                edges.update(eid for eid, _fwd in path.steps)
    return Subset.create(g, verts, edges)


def is_whole_graph(g: MetricGraph, s: Subset) -> bool:
    return len(s.vertices) == g.n_vertices and len(s.edges) == g.n_edges
