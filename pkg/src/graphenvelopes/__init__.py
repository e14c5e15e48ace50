"""Convex and quasiconvex envelopes of point data on compact metric graphs.

The package models metric graphs (finite graphs whose edges are real
intervals), computes geodesic distances, minimal paths and hulls, and
solves for the largest convex / quasiconvex function lying below finitely
many prescribed values.  Solutions come with machine-checkable
certificates and can be cross-validated against an independent
brute-force grid oracle.
"""

from .convex import (
    BoundednessReport,
    ConvexSolveParams,
    EnvelopeReport,
    check_boundedness_convex,
    solve_convex,
)
from .errors import (
    AssumptionViolatedError,
    DegreeTooSmallError,
    DisconnectedGraphError,
    DuplicatePointError,
    EdgeNotIncidentError,
    EmptyDatumError,
    EmptyGraphError,
    GraphEnvelopeError,
    GraphValidationError,
    LoopEdgeError,
    NoConvergenceError,
    NonpositiveLengthError,
    ProblemFormatError,
    ProblemSyntaxError,
    UnboundedEnvelopeError,
    UnknownReferenceError,
)
from .functions import (
    Counterexample,
    LocalConvexityReport,
    PWCFunction,
    PWLFunction,
    SampledCheckReport,
    check_convex_local,
    check_convex_sampled,
    check_quasiconvex_sampled,
    ingoing_derivative,
    min_pair_slope,
    sample_points,
    slope_tolerance,
    sublevel_set,
)
from .geometry import (
    NodePath,
    SameEdgeReport,
    Subset,
    all_minimal_paths,
    check_same_edge_assumption,
    convex_hull,
    distance,
    distance_matrix,
    is_whole_graph,
    on_minimal_path,
)
from .graph import (
    Datum,
    Edge,
    EdgePoint,
    GraphPoint,
    MetricGraph,
    SubdivisionMap,
    VertexPoint,
    build_graph,
    point_sort_key,
    subdivide_at,
    terminal_vertices,
)
from .oracle import (
    ComparisonReport,
    GridRefinement,
    compare,
    oracle_convex_envelope,
    oracle_quasiconvex_envelope,
    refine,
    run_oracle_comparison,
)
from .problem_io import format_point, load_result, parse_point, parse_problem
from .quasiconvex import (
    QuasiBoundednessReport,
    QuasiSolveReport,
    check_boundedness_quasi,
    solve_quasiconvex,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolatedError",
    "BoundednessReport",
    "ComparisonReport",
    "ConvexSolveParams",
    "Counterexample",
    "Datum",
    "DegreeTooSmallError",
    "DisconnectedGraphError",
    "DuplicatePointError",
    "Edge",
    "EdgeNotIncidentError",
    "EdgePoint",
    "EmptyDatumError",
    "EmptyGraphError",
    "EnvelopeReport",
    "GraphEnvelopeError",
    "GraphPoint",
    "GraphValidationError",
    "GridRefinement",
    "LocalConvexityReport",
    "LoopEdgeError",
    "MetricGraph",
    "NoConvergenceError",
    "NodePath",
    "NonpositiveLengthError",
    "PWCFunction",
    "PWLFunction",
    "ProblemFormatError",
    "ProblemSyntaxError",
    "QuasiBoundednessReport",
    "QuasiSolveReport",
    "SameEdgeReport",
    "SampledCheckReport",
    "SubdivisionMap",
    "Subset",
    "UnboundedEnvelopeError",
    "UnknownReferenceError",
    "VertexPoint",
    "all_minimal_paths",
    "build_graph",
    "check_boundedness_convex",
    "check_boundedness_quasi",
    "check_convex_local",
    "check_convex_sampled",
    "check_quasiconvex_sampled",
    "check_same_edge_assumption",
    "compare",
    "convex_hull",
    "distance",
    "distance_matrix",
    "format_point",
    "ingoing_derivative",
    "is_whole_graph",
    "load_result",
    "min_pair_slope",
    "on_minimal_path",
    "oracle_convex_envelope",
    "oracle_quasiconvex_envelope",
    "parse_point",
    "parse_problem",
    "point_sort_key",
    "refine",
    "run_oracle_comparison",
    "sample_points",
    "slope_tolerance",
    "solve_convex",
    "solve_quasiconvex",
    "subdivide_at",
    "sublevel_set",
    "terminal_vertices",
]
