"""Command line interface.

Commands: ``validate``, ``distance``, ``hull``, ``solve convex|quasiconvex``,
``check <result-file>``, ``oracle-compare``.  Exit codes: 0 success,
1 invalid input or failed check, 2 unbounded envelope, 3 no convergence.
Output is a human-readable summary, or one deterministic JSON document
with ``--json``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import problem_io as pio
from .convex import ConvexSolveParams, EnvelopeReport, solve_convex
from .errors import (
    GraphEnvelopeError,
    NoConvergenceError,
    ProblemFormatError,
    UnboundedEnvelopeError,
)
from .functions import (
    PWCFunction,
    PWLFunction,
    check_convex_local,
    check_convex_sampled,
    check_quasiconvex_sampled,
    slope_tolerance,
)
from .geometry import Subset, check_same_edge_assumption, convex_hull, distance, is_whole_graph
from .graph import Datum, MetricGraph, subdivide_at, terminal_vertices
from .oracle import run_oracle_comparison
from .quasiconvex import QuasiSolveReport, solve_quasiconvex, _vertex_relation

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNBOUNDED = 2
EXIT_NO_CONVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="problem file to read")
    common.add_argument("--json", action="store_true", help="emit one JSON document on stdout")
    common.add_argument("--tolerance", type=float, default=1e-12, help="solver sweep tolerance")
    common.add_argument("--max-sweeps", type=int, default=1_000_000, help="solver sweep budget")
    common.add_argument("--samples", type=int, default=10_000, help="sampled check budget")
    common.add_argument("--seed", type=int, default=0, help="sampled check seed")

    parser = argparse.ArgumentParser(
        prog="graphenvelopes",
        description="Convex and quasiconvex envelopes of point data on metric graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="parse and validate a problem file")
    p_dist = sub.add_parser("distance", parents=[common], help="geodesic distance between two points")
    p_dist.add_argument("p")
    p_dist.add_argument("q")
    sub.add_parser("hull", parents=[common], help="geodesic hull of the datum points")
    p_solve = sub.add_parser("solve", parents=[common], help="solve an envelope")
    p_solve.add_argument("kind", choices=("convex", "quasiconvex"))
    p_check = sub.add_parser("check", parents=[common], help="re-validate a result document")
    p_check.add_argument("function_file", metavar="function-file")
    p_oracle = sub.add_parser(
        "oracle-compare", parents=[common], help="cross-check solvers against the grid oracle"
    )
    p_oracle.add_argument("kind", nargs="?", choices=("convex", "quasiconvex", "both"), default="both")
    p_oracle.add_argument("--h", type=float, default=None, help="oracle mesh width")
    p_oracle.add_argument("--compare-tol", type=float, default=1e-6, help="solver/oracle agreement bound")
    return parser


def _read_problem(args) -> tuple[MetricGraph, Datum]:
    if not args.input:
        raise ProblemFormatError("--input is required for this command")
    text = Path(args.input).read_text(encoding="utf-8")
    return pio.parse_problem(text)


def _emit(doc: dict, args, human: list[str]) -> None:
    if args.json:
        sys.stdout.write(pio.json_dumps(doc))
    else:
        sys.stdout.write("\n".join(human) + "\n")


def _subset_dict(g: MetricGraph, s: Subset) -> dict:
    return {
        "vertices": sorted(g.vertex_names[v] for v in s.vertices),
        "edges": sorted(g.edge_names[e] for e in s.edges),
    }


def _convex_result_doc(g: MetricGraph, datum: Datum, report: EnvelopeReport) -> dict:
    g2 = report.graph
    cert = {
        "slope_tolerance": report.slope_tol,
        "local_convexity_ok": report.local_check.passed,
        "equation_residuals": [
            {"vertex": g2.vertex_names[v], "residual": report.equation_residuals[v]}
            for v in sorted(report.equation_residuals)
        ],
        "complementarity": [
            {"vertex": g2.vertex_names[v], "value": report.complementarity[v]}
            for v in sorted(report.complementarity)
        ],
        "datum_slack": [
            {"vertex": g2.vertex_names[v], "slack": report.datum_slack[v]}
            for v in sorted(report.datum_slack)
        ],
        "value_min": report.value_min,
        "value_max": report.value_max,
        "bounds_ok": report.bounds_ok,
        "certificate_ok": report.certificate_ok,
    }
    return {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "solve",
        "solver": "convex",
        "status": "ok",
        "problem": pio.problem_to_dict(g, datum),
        "solve_graph": pio.graph_to_dict(g2),
        "function": pio.function_to_dict(report.function),
        "certificate": cert,
        "convergence": {
            "sweeps": report.sweeps,
            "final_change": report.final_change,
            "tolerance": report.params.tolerance,
        },
    }


def _quasi_result_doc(g: MetricGraph, datum: Datum, report: QuasiSolveReport) -> dict:
    g2 = report.graph
    cert = {
        "relations_ok": report.relations_ok,
        "value_set_ok": report.value_set_ok,
        "sampled_ok": report.sampled.passed,
        "sampled_checked": report.sampled.checked,
        "datum_slack": [
            {"vertex": g2.vertex_names[v], "slack": report.datum_slack[v]}
            for v in sorted(report.datum_slack)
        ],
        "convex_minorant_ok": report.convex_minorant_ok,
        "convex_minorant_gap": report.convex_minorant_gap,
        "certificate_ok": report.certificate_ok,
    }
    return {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "solve",
        "solver": "quasiconvex",
        "status": "ok",
        "problem": pio.problem_to_dict(g, datum),
        "solve_graph": pio.graph_to_dict(g2),
        "function": pio.function_to_dict(report.function),
        "certificate": cert,
        "convergence": {"sweeps": report.sweeps, "exact": True},
    }


def _human_function_lines(doc: dict) -> list[str]:
    lines = ["vertex values:"]
    for item in doc["function"]["vertices"]:
        lines.append(f"  {item['vertex']} = {item['value']!r}")
    lines.append("edges:")
    for item in doc["function"]["edges"]:
        if "breakpoints" in item:
            pieces = ", ".join(f"({t!r}, {u!r})" for t, u in item["breakpoints"])
            lines.append(f"  {item['edge']}: {pieces}")
        else:
            lines.append(f"  {item['edge']}: {item['value']!r}")
    return lines


def _cmd_validate(args) -> int:
    g, datum = _read_problem(args)
    same_edge = check_same_edge_assumption(g)
    doc = {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "validate",
        "status": "ok",
        "problem": pio.problem_to_dict(g, datum),
        "terminal_vertices": sorted(g.vertex_names[v] for v in terminal_vertices(g)),
        "same_edge_assumption": {
            "passed": same_edge.passed,
            "violations": sorted(g.edge_names[e] for e in same_edge.violations),
        },
    }
    human = [
        f"graph ok: {g.n_vertices} vertices, {g.n_edges} edges, {len(datum)} datum points",
        f"terminal vertices: {', '.join(doc['terminal_vertices']) or '(none)'}",
        f"same-edge assumption: {'pass' if same_edge.passed else 'VIOLATED on ' + ', '.join(doc['same_edge_assumption']['violations'])}",
    ]
    _emit(doc, args, human)
    return EXIT_OK


def _cmd_distance(args) -> int:
    g, _datum = _read_problem(args)
    p = pio.parse_point(g, args.p)
    q = pio.parse_point(g, args.q)
    d = distance(g, p, q)
    doc = {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "distance",
        "status": "ok",
        "from": pio.format_point(g, p),
        "to": pio.format_point(g, q),
        "distance": d,
    }
    _emit(doc, args, [f"distance({doc['from']}, {doc['to']}) = {d!r}"])
    return EXIT_OK


def _cmd_hull(args) -> int:
    g, datum = _read_problem(args)
    g2, mapping = subdivide_at(g, datum.points)
    seeds = [mapping.node_of(p) for p in datum.points]
    hull = convex_hull(g2, seeds)
    covers = is_whole_graph(g2, hull)
    doc = {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "hull",
        "status": "ok",
        "problem": pio.problem_to_dict(g, datum),
        "solve_graph": pio.graph_to_dict(g2),
        "hull": _subset_dict(g2, hull),
        "covers_graph": covers,
    }
    human = [
        f"hull vertices: {', '.join(doc['hull']['vertices'])}",
        f"hull edges: {', '.join(doc['hull']['edges']) or '(none)'}",
        f"covers graph: {covers}",
    ]
    _emit(doc, args, human)
    return EXIT_OK


def _cmd_solve(args) -> int:
    g, datum = _read_problem(args)
    if args.kind == "convex":
        params = ConvexSolveParams(tolerance=args.tolerance, max_sweeps=args.max_sweeps)
        report = solve_convex(g, datum, params)
        doc = _convex_result_doc(g, datum, report)
        human = [
            "status: ok (convex envelope)",
            f"sweeps: {report.sweeps}, final change: {report.final_change!r}",
            f"certificate: {'ok' if report.certificate_ok else 'FAILED'}",
        ] + _human_function_lines(doc)
    else:
        report = solve_quasiconvex(g, datum, certificate_samples=min(args.samples, 4096), seed=args.seed)
        doc = _quasi_result_doc(g, datum, report)
        human = [
            "status: ok (quasiconvex envelope)",
            f"sweeps: {report.sweeps} (exact termination)",
            f"certificate: {'ok' if report.certificate_ok else 'FAILED'}",
        ] + _human_function_lines(doc)
    _emit(doc, args, human)
    return EXIT_OK


def _check_convex(fn: PWLFunction, a_nodes: dict[int, float], args) -> tuple[dict, bool, object]:
    g2 = fn.graph
    tol = slope_tolerance(fn)
    local = check_convex_local(fn, tol)
    sampled = check_convex_sampled(fn, samples=args.samples, seed=args.seed, tol=tol)
    slack_ok = all(a_nodes[v] - fn.vertex_values[v] >= -tol for v in a_nodes)
    residual_ok = True
    terminals = terminal_vertices(g2)
    for v in range(g2.n_vertices):
        if v in a_nodes or v in terminals:
            continue
        if abs(fn.min_pair_slope(v)) > tol:
            residual_ok = False
    inf_f = min(a_nodes.values())
    sup_f = max(a_nodes.values())
    bounds_ok = (
        min(fn.vertex_values) >= inf_f - tol and max(fn.vertex_values) <= sup_f + tol
    )
    checks = {
        "local_convexity_ok": local.passed,
        "sampled_convexity_ok": sampled.passed,
        "datum_slack_ok": slack_ok,
        "equation_residuals_ok": residual_ok,
        "bounds_ok": bounds_ok,
    }
    return checks, all(checks.values()), sampled.counterexample


def _check_quasi(fn: PWCFunction, a_nodes: dict[int, float], args) -> tuple[dict, bool, object]:
    g2 = fn.graph
    u = list(fn.vertex_values)
    relations_ok = True
    for v in range(g2.n_vertices):
        if v in a_nodes:
            continue
        expected = _vertex_relation(g2, u, v)
        if expected is not None and expected != u[v]:
            relations_ok = False
    edge_rule_ok = all(
        fn.edge_values[e] == max(u[g2.edges[e].tail], u[g2.edges[e].head])
        for e in range(g2.n_edges)
    )
    sampled = check_quasiconvex_sampled(fn, samples=args.samples, seed=args.seed)
    slack_ok = all(a_nodes[v] - u[v] >= 0 for v in a_nodes)
    checks = {
        "relations_ok": relations_ok,
        "edge_rule_ok": edge_rule_ok,
        "sampled_quasiconvexity_ok": sampled.passed,
        "datum_slack_ok": slack_ok,
    }
    return checks, all(checks.values()), sampled.counterexample


def _cmd_check(args) -> int:
    text = Path(args.function_file).read_text(encoding="utf-8")
    loaded = pio.load_result(text)
    g, datum = loaded.problem_graph, loaded.datum
    g2, mapping = subdivide_at(g, datum.points)
    if pio.graph_to_dict(g2) != pio.graph_to_dict(loaded.solve_graph):
        raise ProblemFormatError("solve_graph does not match the problem's subdivision")
    a_nodes = {mapping.node_of(p): value for p, value in datum.items()}
    fn = loaded.function
    if loaded.solver == "convex":
        if not isinstance(fn, PWLFunction):
            raise ProblemFormatError("convex results must carry a piecewise-linear function")
        checks, ok, counterexample = _check_convex(fn, a_nodes, args)
    elif loaded.solver == "quasiconvex":
        if not isinstance(fn, PWCFunction):
            raise ProblemFormatError("quasiconvex results must carry a piecewise-constant function")
        checks, ok, counterexample = _check_quasi(fn, a_nodes, args)
    else:
        raise ProblemFormatError(f"unknown solver kind {loaded.solver!r}")
    doc = {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "check",
        "status": "ok" if ok else "rejected",
        "solver": loaded.solver,
        "checks": checks,
        "counterexample": None
        if counterexample is None
        else {
            "x": pio.format_point(g2, counterexample.x),
            "y": pio.format_point(g2, counterexample.y),
            "z": pio.format_point(g2, counterexample.z),
            "value": counterexample.value,
            "bound": counterexample.bound,
        },
    }
    human = [f"check: {doc['status']}"]
    human += [f"  {name}: {'ok' if passed else 'FAILED'}" for name, passed in checks.items()]
    if doc["counterexample"] is not None:
        ce = doc["counterexample"]
        human.append(
            f"  counterexample: u({ce['z']}) = {ce['value']!r} > {ce['bound']!r} "
            f"along [{ce['x']}, {ce['y']}]"
        )
    _emit(doc, args, human)
    return EXIT_OK if ok else EXIT_INPUT


def _cmd_oracle_compare(args) -> int:
    g, datum = _read_problem(args)
    kinds = ("convex", "quasiconvex") if args.kind == "both" else (args.kind,)
    params = ConvexSolveParams(tolerance=args.tolerance, max_sweeps=args.max_sweeps)
    results = []
    exit_code = EXIT_OK
    for kind in kinds:
        try:
            rep = run_oracle_comparison(g, datum, kind, h=args.h, tol=args.compare_tol, params=params)
        except UnboundedEnvelopeError as exc:
            results.append({"solver": kind, "status": "unbounded"})
            if args.kind != "both":
                exit_code = EXIT_UNBOUNDED
            continue
        results.append(
            {
                "solver": kind,
                "status": "pass" if rep.passed else "fail",
                "max_deviation": rep.max_deviation,
                "nodes_compared": rep.nodes_compared,
                "tol": rep.tol,
            }
        )
        if not rep.passed:
            exit_code = EXIT_INPUT
    doc = {
        "schema_version": pio.SCHEMA_VERSION,
        "command": "oracle-compare",
        "status": "ok" if exit_code == EXIT_OK else "failed",
        "results": results,
    }
    human = []
    for r in results:
        if r["status"] == "unbounded":
            human.append(f"{r['solver']}: unbounded envelope, skipped")
        else:
            human.append(
                f"{r['solver']}: {r['status']} (max deviation {r['max_deviation']!r} over {r['nodes_compared']} nodes)"
            )
    _emit(doc, args, human)
    return exit_code


def run_command(argv) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    handlers = {
        "validate": _cmd_validate,
        "distance": _cmd_distance,
        "hull": _cmd_hull,
        "solve": _cmd_solve,
        "check": _cmd_check,
        "oracle-compare": _cmd_oracle_compare,
    }
    try:
        return handlers[args.command](args)
    except UnboundedEnvelopeError as exc:
        witness: dict
        if isinstance(exc.witness, Subset):
            # Witness subsets live on the subdivided solve graph.
            g, datum = _read_problem(args)
            g2, _ = subdivide_at(g, datum.points)
            witness = {"hull": _subset_dict(g2, exc.witness)}
        else:
            g, _ = _read_problem(args)
            witness = {"terminal_vertex": g.vertex_names[exc.witness]}
        doc = {
            "schema_version": pio.SCHEMA_VERSION,
            "command": args.command,
            "status": "unbounded",
            "solver": getattr(args, "kind", None),
            "witness": witness,
        }
        _emit(doc, args, [f"unbounded envelope: {witness}"])
        return EXIT_UNBOUNDED
    except NoConvergenceError as exc:
        doc = {
            "schema_version": pio.SCHEMA_VERSION,
            "command": args.command,
            "status": "no-convergence",
            "sweeps": getattr(exc.report, "sweeps", None),
            "final_change": getattr(exc.report, "final_change", None),
        }
        _emit(doc, args, [f"no convergence: {exc}"])
        return EXIT_NO_CONVERGENCE
    except (GraphEnvelopeError, OSError, ValueError) as exc:
        if getattr(args, "json", False):
            sys.stdout.write(
                pio.json_dumps(
                    {
                        "schema_version": pio.SCHEMA_VERSION,
                        "command": args.command,
                        "status": "error",
                        "error": str(exc),
                    }
                )
            )
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
