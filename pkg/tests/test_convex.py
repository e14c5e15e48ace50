import pytest

from graphenvelopes import (
    AssumptionViolatedError,
    ConvexSolveParams,
    Datum,
    EdgePoint,
    EmptyDatumError,
    NoConvergenceError,
    UnboundedEnvelopeError,
    VertexPoint,
    build_graph,
    check_boundedness_convex,
    check_convex_local,
    solve_convex,
)
from helpers import (
    binary_tree_graph,
    cycle_graph,
    datum_at_vertices,
    h_graph,
    pendant_triangle_graph,
    star_graph,
    triangle_graph,
)

TOL = 1e-8


def vertex_values(report):
    g = report.graph
    return {g.vertex_names[v]: report.function.vertex_values[v] for v in range(g.n_vertices)}


class TestBoundedness:
    def test_pendant_triangle_terminals_covered(self):
        g = pendant_triangle_graph()
        datum = datum_at_vertices(g, {"v4": 0.0, "v5": 1.0})
        assert check_boundedness_convex(g, datum).bounded

    def test_star_all_tips(self):
        g = star_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v4": 2.0})
        assert check_boundedness_convex(g, datum).bounded

    def test_star_missing_tip(self):
        g = star_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v2": 1.0})
        report = check_boundedness_convex(g, datum)
        assert not report.bounded
        assert report.witness == g.vertex_index("v4")

    def test_solve_raises_unbounded(self):
        g = star_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v2": 1.0})
        with pytest.raises(UnboundedEnvelopeError) as exc:
            solve_convex(g, datum)
        assert exc.value.witness == g.vertex_index("v4")


class TestGoldenStar:
    def test_values_and_slopes(self):
        g = star_graph()
        report = solve_convex(g, datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v4": 2.0}))
        values = vertex_values(report)
        assert values["v3"] == pytest.approx(0.5, abs=TOL)
        fn = report.function
        assert fn.edge_slopes(g.edge_index("e1")) == pytest.approx((-0.5,), abs=TOL)
        assert fn.edge_slopes(g.edge_index("e2")) == pytest.approx((0.5,), abs=TOL)
        assert fn.edge_slopes(g.edge_index("e3")) == pytest.approx((1.5,), abs=TOL)
        assert report.certificate_ok


class TestGoldenHGraph:
    def test_values_and_slopes(self):
        g = h_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v3": 2.0, "v5": 1.0, "v6": 3.0})
        report = solve_convex(g, datum)
        values = vertex_values(report)
        assert values["v2"] == pytest.approx(1 / 3, abs=TOL)
        assert values["v4"] == pytest.approx(2 / 3, abs=TOL)
        fn = report.function
        expected = {
            "e1": 1 / 3,
            "e2": -5 / 3,
            "e3": 1 / 3,
            "e4": -1 / 3,
            "e5": -7 / 3,
        }
        for name, slope in expected.items():
            assert fn.edge_slopes(g.edge_index(name))[0] == pytest.approx(slope, abs=TOL)
        assert report.certificate_ok


class TestGoldenBinaryTree:
    def test_values(self):
        g = binary_tree_graph()
        datum = datum_at_vertices(g, {"v4": 0.0, "v5": 1.0, "v6": 2.0, "v7": 3.0})
        report = solve_convex(g, datum)
        values = vertex_values(report)
        assert values["v1"] == pytest.approx(1.0, abs=TOL)
        assert values["v2"] == pytest.approx(0.5, abs=TOL)
        assert values["v3"] == pytest.approx(1.5, abs=TOL)
        fn = report.function
        expected = {"e1": 0.5, "e2": -0.5, "e3": 0.5, "e4": -0.5, "e5": -0.5, "e6": -1.5}
        for name, slope in expected.items():
            assert fn.edge_slopes(g.edge_index(name))[0] == pytest.approx(slope, abs=TOL)
        assert report.certificate_ok


class TestCycles:
    def test_triangle_single_datum_constant(self):
        g = triangle_graph()
        report = solve_convex(g, datum_at_vertices(g, {"v1": 5.0}))
        assert all(v == pytest.approx(5.0, abs=1e-10) for v in report.function.vertex_values)

    def test_triangle_full_data_collapses_to_min(self):
        # Convex functions are constant on the cycle, so the envelope is the
        # smallest prescribed value everywhere.
        g = triangle_graph()
        report = solve_convex(g, datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v3": 2.0}))
        assert all(v == pytest.approx(0.0, abs=TOL) for v in report.function.vertex_values)
        assert report.certificate_ok

    def test_pendant_triangle_flat_on_cycle(self):
        # The chord from v4 through v1 into the triangle caps the cycle at the
        # smaller datum; only the edge towards the larger datum rises.
        g = pendant_triangle_graph()
        report = solve_convex(g, datum_at_vertices(g, {"v4": 0.0, "v5": 1.0}))
        values = vertex_values(report)
        for name in ("v1", "v2", "v3", "v4"):
            assert values[name] == pytest.approx(0.0, abs=TOL)
        assert values["v5"] == pytest.approx(1.0, abs=TOL)
        fn = report.function
        assert fn.edge_slopes(g.edge_index("e4"))[0] == pytest.approx(0.0, abs=TOL)
        assert fn.edge_slopes(g.edge_index("e5"))[0] == pytest.approx(1.0, abs=TOL)
        assert report.certificate_ok

    def test_two_data_cycle_constant_at_min(self):
        g = cycle_graph(4)
        report = solve_convex(g, datum_at_vertices(g, {"v1": 0.25, "v3": 1.0}))
        assert all(v == pytest.approx(0.25, abs=1e-6) for v in report.function.vertex_values)


class TestSolverBehaviour:
    def test_constant_datum(self):
        g = h_graph()
        datum = datum_at_vertices(g, {"v1": 2.0, "v3": 2.0, "v5": 2.0, "v6": 2.0})
        report = solve_convex(g, datum)
        assert all(v == 2.0 for v in report.function.vertex_values)

    def test_interior_datum_point(self):
        g = build_graph(2, [(0, 1, 1.0)])
        datum = Datum.build(
            g, [(VertexPoint(0), 0.0), (VertexPoint(1), 1.0), (EdgePoint(0, 0.5), 5.0)]
        )
        report = solve_convex(g, datum)
        mid = report.mapping.node_of(EdgePoint(0, 0.5))
        assert report.function.vertex_values[mid] == pytest.approx(0.5, abs=TOL)
        assert report.eval_source(EdgePoint(0, 0.25)) == pytest.approx(0.25, abs=TOL)
        # Complementarity: the datum is inactive, the vertex equation binds.
        assert abs(report.complementarity[mid]) <= report.slope_tol

    def test_empty_datum_rejected(self):
        g = triangle_graph()
        with pytest.raises(EmptyDatumError):
            solve_convex(g, Datum((), ()))

    def test_assumption_violation_rejected(self):
        g = build_graph(2, [(0, 1, 1.0), (0, 1, 3.0)])
        datum = Datum.build(g, [(VertexPoint(0), 0.0), (VertexPoint(1), 1.0)])
        with pytest.raises(AssumptionViolatedError) as exc:
            solve_convex(g, datum)
        assert exc.value.edges == (1,)

    def test_no_convergence_carries_partial_report(self):
        g = pendant_triangle_graph()
        datum = datum_at_vertices(g, {"v4": 0.0, "v5": 1.0})
        with pytest.raises(NoConvergenceError) as exc:
            solve_convex(g, datum, ConvexSolveParams(max_sweeps=1))
        assert exc.value.report.sweeps == 1
        assert exc.value.report.final_change > 1e-12

    def test_jacobi_matches_gauss_seidel(self):
        g = h_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v3": 2.0, "v5": 1.0, "v6": 3.0})
        gs = solve_convex(g, datum, ConvexSolveParams(sweep="gauss-seidel"))
        ja = solve_convex(g, datum, ConvexSolveParams(sweep="jacobi"))
        for a, b in zip(gs.function.vertex_values, ja.function.vertex_values):
            assert a == pytest.approx(b, abs=1e-9)

    def test_report_certificate_contents(self):
        g = star_graph()
        report = solve_convex(g, datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v4": 2.0}))
        centre = g.vertex_index("v3")
        assert abs(report.equation_residuals[centre]) <= 1e-8
        assert all(s >= -report.slope_tol for s in report.datum_slack.values())
        assert report.bounds_ok
        assert check_convex_local(report.function).passed

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            ConvexSolveParams(tolerance=0.0)
        with pytest.raises(ValueError):
            ConvexSolveParams(sweep="chaotic")
