"""Problem file parsing and JSON result documents.

Problem files are line oriented with two sections::

    # comment lines and blank lines are ignored
    GRAPH
    vertex <name>
    edge <name> <tail> <head> <length>
    DATUM
    <point> <value>

A point is a vertex name or ``<edge>:<coordinate>`` for an interior
location.  Names must not contain whitespace, ``:`` or ``#``.

Result documents are JSON.  Floats serialize through ``repr`` (shortest
exact round trip), every collection is emitted in a fixed order, and no
volatile data (timestamps, paths) is included, so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

from .errors import (
    DuplicatePointError,
    GraphValidationError,
    NonpositiveLengthError,
    ProblemSyntaxError,
    UnknownReferenceError,
)
from .functions import PWCFunction, PWLFunction
from .graph import Datum, EdgePoint, GraphPoint, MetricGraph, VertexPoint, build_graph

__all__ = [
    "parse_problem",
    "format_point",
    "parse_point",
    "graph_to_dict",
    "graph_from_dict",
    "problem_to_dict",
    "function_to_dict",
    "function_from_dict",
    "json_dumps",
    "LoadedResult",
    "load_result",
]

SCHEMA_VERSION = 1

_NAME_RE = re.compile(r"^[^\s:#]+$")


def _parse_real(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ProblemSyntaxError(f"expected a number, got {token!r}", line) from None
    if not math.isfinite(value):
        raise ProblemSyntaxError(f"non-finite number {token!r}", line)
    return value


def parse_problem(text: str) -> tuple[MetricGraph, Datum]:
    """Parse a problem file into a validated graph and datum."""
    vertex_names: list[str] = []
    edge_specs: list[tuple[str, str, float]] = []
    edge_names: list[str] = []
    datum_lines: list[tuple[str, float, int]] = []
    section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("GRAPH", "DATUM"):
            section = line
            continue
        tokens = line.split()
        if section == "GRAPH":
            if tokens[0] == "vertex":
                if len(tokens) != 2:
                    raise ProblemSyntaxError("vertex lines are 'vertex <name>'", lineno)
                name = tokens[1]
                if not _NAME_RE.match(name):
                    raise ProblemSyntaxError(f"invalid vertex name {name!r}", lineno)
                if name in vertex_names:
                    raise ProblemSyntaxError(f"vertex {name!r} declared twice", lineno)
                vertex_names.append(name)
            elif tokens[0] == "edge":
                if len(tokens) != 5:
                    raise ProblemSyntaxError(
                        "edge lines are 'edge <name> <tail> <head> <length>'", lineno
                    )
                name, tail, head = tokens[1], tokens[2], tokens[3]
                if not _NAME_RE.match(name):
                    raise ProblemSyntaxError(f"invalid edge name {name!r}", lineno)
                if name in edge_names:
                    raise ProblemSyntaxError(f"edge {name!r} declared twice", lineno)
                for endpoint in (tail, head):
                    if endpoint not in vertex_names:
                        raise UnknownReferenceError(f"unknown vertex {endpoint!r}", lineno)
                length = _parse_real(tokens[4], lineno)
                if length <= 0:
                    raise NonpositiveLengthError(f"line {lineno}: edge {name!r} has length {length!r} <= 0")
                edge_names.append(name)
                edge_specs.append((tail, head, length))
            else:
                raise ProblemSyntaxError(f"unknown GRAPH directive {tokens[0]!r}", lineno)
        elif section == "DATUM":
            if len(tokens) != 2:
                raise ProblemSyntaxError("datum lines are '<point> <value>'", lineno)
            datum_lines.append((tokens[0], _parse_real(tokens[1], lineno), lineno))
        else:
            raise ProblemSyntaxError("content before the GRAPH section", lineno)

    if not vertex_names:
        raise ProblemSyntaxError("no GRAPH section or no vertices", None)
    graph = build_graph(vertex_names, edge_specs, edge_names=edge_names)

    pairs = []
    for token, value, lineno in datum_lines:
        point = parse_point(graph, token, line=lineno)
        pairs.append((point, value))
    try:
        datum = Datum.build(graph, pairs)
    except DuplicatePointError as exc:
        raise DuplicatePointError(str(exc)) from None
    return graph, datum


def parse_point(g: MetricGraph, token: str, line: int | None = None) -> GraphPoint:
    """Vertex name, or ``edge:t`` for an interior coordinate."""
    if ":" in token:
        edge_name, _, coord = token.partition(":")
        try:
            eid = g.edge_index(edge_name)
        except KeyError:
            raise UnknownReferenceError(f"unknown edge {edge_name!r}", line) from None
        t = _parse_real(coord, line if line is not None else 0)
        try:
            return g.canonical(EdgePoint(eid, t))
        except ValueError as exc:
            raise ProblemSyntaxError(str(exc), line) from None
    try:
        return VertexPoint(g.vertex_index(token))
    except KeyError:
        raise UnknownReferenceError(f"unknown vertex {token!r}", line) from None


def format_point(g: MetricGraph, p: GraphPoint) -> str:
    p = g.canonical(p)
    if isinstance(p, VertexPoint):
        return g.vertex_names[p.vertex]
    return f"{g.edge_names[p.edge]}:{p.t!r}"


def graph_to_dict(g: MetricGraph) -> dict:
    return {
        "vertices": list(g.vertex_names),
        "edges": [
            {
                "name": g.edge_names[e],
                "tail": g.vertex_names[g.edges[e].tail],
                "head": g.vertex_names[g.edges[e].head],
                "length": g.edges[e].length,
            }
            for e in range(g.n_edges)
        ],
    }


def graph_from_dict(d: dict) -> MetricGraph:
    return build_graph(
        d["vertices"],
        [(e["tail"], e["head"], e["length"]) for e in d["edges"]],
        edge_names=[e["name"] for e in d["edges"]],
    )


def problem_to_dict(g: MetricGraph, datum: Datum) -> dict:
    return {
        "graph": graph_to_dict(g),
        "datum": [
            {"point": format_point(g, p), "value": value} for p, value in datum.items()
        ],
    }


def problem_from_dict(d: dict) -> tuple[MetricGraph, Datum]:
    g = graph_from_dict(d["graph"])
    datum = Datum.build(
        g, [(parse_point(g, item["point"]), item["value"]) for item in d["datum"]]
    )
    return g, datum


def function_to_dict(fn: PWLFunction | PWCFunction) -> dict:
    g = fn.graph
    if isinstance(fn, PWLFunction):
        return {
            "kind": "piecewise-linear",
            "edges": [
                {
                    "edge": g.edge_names[e],
                    "breakpoints": [[t, u] for t, u in fn.edge_breakpoints[e]],
                }
                for e in range(g.n_edges)
            ],
            "vertices": [
                {"vertex": g.vertex_names[v], "value": fn.vertex_values[v]}
                for v in range(g.n_vertices)
            ],
        }
    return {
        "kind": "piecewise-constant",
        "edges": [
            {"edge": g.edge_names[e], "value": fn.edge_values[e]} for e in range(g.n_edges)
        ],
        "vertices": [
            {"vertex": g.vertex_names[v], "value": fn.vertex_values[v]}
            for v in range(g.n_vertices)
        ],
    }


def function_from_dict(g: MetricGraph, d: dict) -> PWLFunction | PWCFunction:
    vertex_values = [0.0] * g.n_vertices
    for item in d["vertices"]:
        vertex_values[g.vertex_index(item["vertex"])] = float(item["value"])
    if d["kind"] == "piecewise-linear":
        runs: list[tuple] = [()] * g.n_edges
        for item in d["edges"]:
            runs[g.edge_index(item["edge"])] = tuple(
                (float(t), float(u)) for t, u in item["breakpoints"]
            )
        return PWLFunction(g, runs)
    if d["kind"] == "piecewise-constant":
        edge_values = [0.0] * g.n_edges
        for item in d["edges"]:
            edge_values[g.edge_index(item["edge"])] = float(item["value"])
        return PWCFunction(g, edge_values, vertex_values)
    raise ProblemSyntaxError(f"unknown function kind {d['kind']!r}", None)


def json_dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


@dataclass
class LoadedResult:
    raw: dict
    problem_graph: MetricGraph
    datum: Datum
    solve_graph: MetricGraph
    function: PWLFunction | PWCFunction
    solver: str


def load_result(text: str) -> LoadedResult:
    """Reconstruct graph, datum and function from a result document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(f"invalid JSON: {exc}", None) from None
    for key in ("schema_version", "problem", "solve_graph", "function", "solver"):
        if key not in raw:
            raise ProblemSyntaxError(f"result document lacks {key!r}", None)
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ProblemSyntaxError(
            f"unsupported schema_version {raw['schema_version']!r}", None
        )
    try:
        problem_graph, datum = problem_from_dict(raw["problem"])
        solve_graph = graph_from_dict(raw["solve_graph"])
        fn = function_from_dict(solve_graph, raw["function"])
    except (KeyError, TypeError, ValueError, GraphValidationError) as exc:
        raise ProblemSyntaxError(f"malformed result document: {exc}", None) from None
    return LoadedResult(
        raw=raw,
        problem_graph=problem_graph,
        datum=datum,
        solve_graph=solve_graph,
        function=fn,
        solver=raw["solver"],
    )
