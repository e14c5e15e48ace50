"""Immutable metric-graph model: vertices, length-weighted edges, points.

A graph is a finite set of vertices plus oriented edges carrying positive
finite lengths.  Orientation only fixes the coordinate along each edge; no
envelope quantity depends on it.  Self-loops are rejected, parallel edges
are allowed, and every graph must be connected with minimum degree one.

Locations on the graph are ``VertexPoint``/``EdgePoint`` values.  The
canonical form maps edge coordinates 0 and length onto the corresponding
endpoint vertices, so distinct canonical points are distinct locations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DisconnectedGraphError,
    DuplicatePointError,
    EmptyGraphError,
    LoopEdgeError,
    NonpositiveLengthError,
)

__all__ = [
    "Edge",
    "MetricGraph",
    "VertexPoint",
    "EdgePoint",
    "GraphPoint",
    "Datum",
    "SubdivisionMap",
    "build_graph",
    "terminal_vertices",
    "subdivide_at",
    "point_sort_key",
]


@dataclass(frozen=True)
class Edge:
    """Oriented edge from ``tail`` to ``head`` with a positive length."""

    tail: int
    head: int
    length: float


@dataclass(frozen=True)
class VertexPoint:
    vertex: int


@dataclass(frozen=True)
class EdgePoint:
    """Interior location on an edge, at coordinate ``t`` from the tail."""

    edge: int
    t: float


GraphPoint = VertexPoint | EdgePoint


def point_sort_key(p: GraphPoint) -> tuple:
    """Total order on canonical points: vertices first, then edge points."""
    if isinstance(p, VertexPoint):
        return (0, p.vertex, 0.0)
    return (1, p.edge, p.t)


class MetricGraph:
    """Validated immutable metric graph.

    Construct through :func:`build_graph`; the constructor itself runs the
    full validation so no code path can produce an invalid instance.
    """

    __slots__ = (
        "vertex_names",
        "edge_names",
        "edges",
        "_incident",
        "_vertex_index",
        "_edge_index",
        "_total_length",
        "_dist_matrix",
    )

    def __init__(
        self,
        vertex_names: Sequence[str],
        edges: Sequence[Edge],
        edge_names: Sequence[str],
    ):
        vertex_names = tuple(vertex_names)
        edges = tuple(edges)
        edge_names = tuple(edge_names)
        if not vertex_names or not edges:
            raise EmptyGraphError("a metric graph needs at least one vertex and one edge")
        if len(edge_names) != len(edges):
            raise ValueError("edge_names and edges must have equal length")
        if len(set(vertex_names)) != len(vertex_names):
            raise ValueError("vertex names must be unique")
        if len(set(edge_names)) != len(edge_names):
            raise ValueError("edge names must be unique")

        n = len(vertex_names)
        incident: list[list[int]] = [[] for _ in range(n)]
        for eid, e in enumerate(edges):
            if not (0 <= e.tail < n and 0 <= e.head < n):
                raise ValueError(f"edge {edge_names[eid]} references an undeclared vertex")
            if e.tail == e.head:
                raise LoopEdgeError(f"edge {edge_names[eid]} is a self-loop")
            if not (isinstance(e.length, (int, float)) and math.isfinite(e.length)) or e.length <= 0:
                raise NonpositiveLengthError(
                    f"edge {edge_names[eid]} has non-positive or non-finite length {e.length!r}"
                )
            incident[e.tail].append(eid)
            incident[e.head].append(eid)

        # Connectivity (also rejects isolated vertices).
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for eid in incident[v]:
                w = edges[eid].head if edges[eid].tail == v else edges[eid].tail
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise DisconnectedGraphError(
                f"graph is not connected; unreachable vertices {[vertex_names[v] for v in missing]}"
            )

        self.vertex_names = vertex_names
        self.edge_names = edge_names
        self.edges = edges
        self._incident = tuple(tuple(lst) for lst in incident)
        self._vertex_index = {name: i for i, name in enumerate(vertex_names)}
        self._edge_index = {name: i for i, name in enumerate(edge_names)}
        self._total_length = float(sum(e.length for e in edges))
        self._dist_matrix = None  # filled lazily by geometry.distance_matrix

    # -- basic queries -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_names)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return self._total_length

    @property
    def min_edge_length(self) -> float:
        return min(e.length for e in self.edges)

    @property
    def path_tolerance(self) -> float:
        """Absolute slack used when comparing path lengths and distances."""
        return 1e-9 * self._total_length

    def incident_edges(self, v: int) -> tuple[int, ...]:
        return self._incident[v]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def adjacent_vertices(self, v: int) -> tuple[int, ...]:
        """Distinct neighbouring vertices, ascending (parallel edges merge)."""
        return tuple(sorted({self.other_end(eid, v) for eid in self._incident[v]}))

    def edge_length(self, e: int) -> float:
        return self.edges[e].length

    def edge_ends(self, e: int) -> tuple[int, int]:
        edge = self.edges[e]
        return edge.tail, edge.head

    def other_end(self, e: int, v: int) -> int:
        edge = self.edges[e]
        if edge.tail == v:
            return edge.head
        if edge.head == v:
            return edge.tail
        raise ValueError(f"edge {self.edge_names[e]} is not incident to vertex {self.vertex_names[v]}")

    def vertex_index(self, name: str) -> int:
        return self._vertex_index[name]

    def edge_index(self, name: str) -> int:
        return self._edge_index[name]

    # -- points ----------------------------------------------------------

    def canonical(self, p: GraphPoint) -> GraphPoint:
        """Canonical form of a point; endpoint coordinates become vertices."""
        if isinstance(p, VertexPoint):
            if not (0 <= p.vertex < self.n_vertices):
                raise ValueError(f"vertex id {p.vertex} out of range")
            return p
        if not (0 <= p.edge < self.n_edges):
            raise ValueError(f"edge id {p.edge} out of range")
        length = self.edges[p.edge].length
        t = float(p.t)
        if not (0.0 <= t <= length):
            raise ValueError(
                f"coordinate {t!r} outside [0, {length!r}] on edge {self.edge_names[p.edge]}"
            )
        if t == 0.0:
            return VertexPoint(self.edges[p.edge].tail)
        if t == length:
            return VertexPoint(self.edges[p.edge].head)
        return EdgePoint(p.edge, t)

    def point_from_reversed(self, e: int, s: float) -> GraphPoint:
        """Point described on the reversal of ``e`` at coordinate ``s``."""
        return self.canonical(EdgePoint(e, self.edges[e].length - s))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"MetricGraph({self.n_vertices} vertices, {self.n_edges} edges)"


def build_graph(
    vertices: int | Sequence[str],
    edges: Iterable[tuple],
    edge_names: Sequence[str] | None = None,
) -> MetricGraph:
    """Build and validate a metric graph.

    ``vertices`` is either a vertex count (names default to v1..vn) or a
    sequence of names.  Each edge is a ``(tail, head, length)`` triple whose
    endpoints may be indices or names.
    """
    if isinstance(vertices, int):
        names = tuple(f"v{i + 1}" for i in range(vertices))
    else:
        names = tuple(vertices)
    index = {name: i for i, name in enumerate(names)}

    def resolve(endpoint) -> int:
        if isinstance(endpoint, str):
            if endpoint not in index:
                raise ValueError(f"unknown vertex name {endpoint!r}")
            return index[endpoint]
        return int(endpoint)

    edge_objs = [Edge(resolve(t), resolve(h), float(length)) for t, h, length in edges]
    if edge_names is None:
        edge_names = tuple(f"e{i + 1}" for i in range(len(edge_objs)))
    return MetricGraph(names, edge_objs, edge_names)


def terminal_vertices(g: MetricGraph) -> frozenset[int]:
    """Vertices of degree exactly one."""
    return frozenset(v for v in range(g.n_vertices) if g.degree(v) == 1)


@dataclass(frozen=True)
class Datum:
    """Finite point set A with one real value per point, canonicalized."""

    points: tuple[GraphPoint, ...]
    values: tuple[float, ...]

    @classmethod
    def build(cls, g: MetricGraph, pairs: Iterable[tuple[GraphPoint, float]]) -> "Datum":
        points: list[GraphPoint] = []
        values: list[float] = []
        seen: set[tuple] = set()
        for p, value in pairs:
            cp = g.canonical(p)
            key = point_sort_key(cp)
            if key in seen:
                raise DuplicatePointError(f"datum point {cp} listed twice")
            seen.add(key)
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"datum value {value!r} is not finite")
            points.append(cp)
            values.append(value)
        order = sorted(range(len(points)), key=lambda i: point_sort_key(points[i]))
        return cls(tuple(points[i] for i in order), tuple(values[i] for i in order))

    def __len__(self) -> int:
        return len(self.points)

    def items(self):
        return zip(self.points, self.values)


class SubdivisionMap:
    """Point and function translation between a graph and its subdivision.

    Every cut point becomes a degree-2 vertex of the result graph; each
    source edge maps to an ordered run of pieces that keep the source
    orientation, so coordinates translate by plain offsets.
    """

    __slots__ = ("source", "result", "new_vertex_points", "pieces", "piece_of")

    def __init__(self, source, result, new_vertex_points, pieces, piece_of):
        self.source = source
        self.result = result
        # result vertex id -> source point (only for vertices created here)
        self.new_vertex_points: dict[int, EdgePoint] = new_vertex_points
        # source edge id -> ((result edge id, t0, t1), ...)
        self.pieces: dict[int, tuple[tuple[int, float, float], ...]] = pieces
        # result edge id -> (source edge id, t0, t1)
        self.piece_of: dict[int, tuple[int, float, float]] = piece_of

    @property
    def identity(self) -> bool:
        return not self.new_vertex_points

    def to_result(self, p: GraphPoint) -> GraphPoint:
        p = self.source.canonical(p)
        if isinstance(p, VertexPoint):
            return p  # source vertices keep their ids
        for rid, t0, t1 in self.pieces[p.edge]:
            if t0 <= p.t <= t1:
                return self.result.canonical(EdgePoint(rid, p.t - t0))
        raise AssertionError("unreachable: pieces cover the whole edge")

    def to_source(self, p: GraphPoint) -> GraphPoint:
        p = self.result.canonical(p)
        if isinstance(p, VertexPoint):
            if p.vertex < self.source.n_vertices:
                return p
            return self.new_vertex_points[p.vertex]
        src, t0, _t1 = self.piece_of[p.edge]
        return self.source.canonical(EdgePoint(src, t0 + p.t))

    def node_of(self, p: GraphPoint) -> int:
        """Result vertex id of a source point that became (or was) a node."""
        rp = self.to_result(p)
        if not isinstance(rp, VertexPoint):
            raise ValueError(f"{p} is not a node of the subdivided graph")
        return rp.vertex

    def pullback_breakpoints(self, result_breakpoints) -> list:
        """Merge per-piece breakpoint runs back onto source edges.

        ``result_breakpoints`` is indexed by result edge id and holds
        ``((t, value), ...)`` runs. Returns the same structure indexed by
        source edge id.
        """
        out = []
        for eid in range(self.source.n_edges):
            run: list[tuple[float, float]] = []
            for rid, t0, _t1 in self.pieces[eid]:
                for t, value in result_breakpoints[rid]:
                    pt = (t0 + t, value)
                    if run and abs(run[-1][0] - pt[0]) == 0.0:
                        continue
                    run.append(pt)
            out.append(tuple(run))
        return out


def subdivide_at(g: MetricGraph, points: Iterable[GraphPoint]) -> tuple[MetricGraph, SubdivisionMap]:
    """Split edges so every given point becomes a vertex.

    Vertex points map to themselves; distances are preserved exactly since
    piece lengths are formed by exact coordinate differences.
    """
    cuts: dict[int, list[float]] = {}
    for p in points:
        cp = g.canonical(p)
        if isinstance(cp, EdgePoint):
            cuts.setdefault(cp.edge, [])
            if cp.t not in cuts[cp.edge]:
                cuts[cp.edge].append(cp.t)
    if not cuts:
        identity = SubdivisionMap(
            g,
            g,
            {},
            {e: ((e, 0.0, g.edge_length(e)),) for e in range(g.n_edges)},
            {e: (e, 0.0, g.edge_length(e)) for e in range(g.n_edges)},
        )
        return g, identity

    vertex_names = list(g.vertex_names)
    new_vertex_points: dict[int, EdgePoint] = {}
    cut_vertex: dict[tuple[int, float], int] = {}
    for eid in sorted(cuts):
        for t in sorted(cuts[eid]):
            vid = len(vertex_names)
            vertex_names.append(f"{g.edge_names[eid]}:{t:.12g}")
            new_vertex_points[vid] = EdgePoint(eid, t)
            cut_vertex[(eid, t)] = vid

    new_edges: list[Edge] = []
    new_edge_names: list[str] = []
    pieces: dict[int, tuple[tuple[int, float, float], ...]] = {}
    piece_of: dict[int, tuple[int, float, float]] = {}
    for eid, edge in enumerate(g.edges):
        ts = sorted(cuts.get(eid, []))
        if not ts:
            rid = len(new_edges)
            new_edges.append(edge)
            new_edge_names.append(g.edge_names[eid])
            pieces[eid] = ((rid, 0.0, edge.length),)
            piece_of[rid] = (eid, 0.0, edge.length)
            continue
        bounds = [0.0] + ts + [edge.length]
        nodes = [edge.tail] + [cut_vertex[(eid, t)] for t in ts] + [edge.head]
        run = []
        for k in range(len(bounds) - 1):
            rid = len(new_edges)
            t0, t1 = bounds[k], bounds[k + 1]
            new_edges.append(Edge(nodes[k], nodes[k + 1], t1 - t0))
            new_edge_names.append(f"{g.edge_names[eid]}.{k + 1}")
            run.append((rid, t0, t1))
            piece_of[rid] = (eid, t0, t1)
        pieces[eid] = tuple(run)

    result = MetricGraph(vertex_names, new_edges, new_edge_names)
    return result, SubdivisionMap(g, result, new_vertex_points, pieces, piece_of)
