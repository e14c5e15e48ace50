from itertools import combinations

import pytest

from graphenvelopes import (
    Datum,
    EdgePoint,
    UnboundedEnvelopeError,
    VertexPoint,
    check_boundedness_quasi,
    check_quasiconvex_sampled,
    solve_quasiconvex,
    sublevel_set,
)
from helpers import (
    binary_tree_graph,
    datum_at_vertices,
    h_graph,
    path_graph,
    pendant_triangle_graph,
    star_graph,
    triangle_graph,
)


def by_name(report):
    g = report.graph
    return (
        {g.vertex_names[v]: report.function.vertex_values[v] for v in range(g.n_vertices)},
        {g.edge_names[e]: report.function.edge_values[e] for e in range(g.n_edges)},
    )


class TestBoundedness:
    def test_pendant_triangle_unbounded_with_hull_witness(self):
        g = pendant_triangle_graph()
        datum = datum_at_vertices(g, {"v4": 0.0, "v5": 1.0})
        report = check_boundedness_quasi(g, datum)
        assert not report.bounded
        assert report.hull.vertices == {g.vertex_index(n) for n in ("v1", "v4", "v5")}
        assert report.hull.edges == {g.edge_index(n) for n in ("e4", "e5")}
        with pytest.raises(UnboundedEnvelopeError) as exc:
            solve_quasiconvex(g, datum)
        assert exc.value.witness == report.hull

    def test_triangle_full_bounded(self):
        g = triangle_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v3": 2.0})
        assert check_boundedness_quasi(g, datum).bounded

    def test_triangle_single_unbounded(self):
        g = triangle_graph()
        datum = datum_at_vertices(g, {"v1": 5.0})
        report = check_boundedness_quasi(g, datum)
        assert not report.bounded
        assert report.hull.vertices == {g.vertex_index("v1")}


class TestGolden:
    def test_triangle_ordered_values(self):
        g = triangle_graph()
        report = solve_quasiconvex(g, datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v3": 2.0}))
        values, edges = by_name(report)
        assert values == {"v1": 0.0, "v2": 1.0, "v3": 2.0}
        assert edges == {"e1": 1.0, "e2": 2.0, "e3": 2.0}
        assert report.certificate_ok

    def test_star(self):
        g = star_graph()
        report = solve_quasiconvex(g, datum_at_vertices(g, {"v1": 0.0, "v2": 1.0, "v4": 2.0}))
        values, edges = by_name(report)
        assert values["v3"] == 1.0
        assert edges == {"e1": 1.0, "e2": 1.0, "e3": 2.0}
        assert report.certificate_ok

    def test_h_graph_regression(self):
        # The adjacent-pair relations alone also admit the value 2 at both
        # fork vertices; the true envelope is 1 there.
        g = h_graph()
        report = solve_quasiconvex(
            g, datum_at_vertices(g, {"v1": 0.0, "v3": 2.0, "v5": 1.0, "v6": 3.0})
        )
        values, edges = by_name(report)
        assert values["v2"] == 1.0
        assert values["v4"] == 1.0
        assert edges == {"e1": 1.0, "e2": 2.0, "e3": 1.0, "e4": 1.0, "e5": 3.0}
        assert report.certificate_ok

    def test_binary_tree(self):
        g = binary_tree_graph()
        report = solve_quasiconvex(
            g, datum_at_vertices(g, {"v4": 0.0, "v5": 1.0, "v6": 2.0, "v7": 3.0})
        )
        values, edges = by_name(report)
        assert values["v2"] == 1.0
        assert values["v1"] == 2.0
        assert values["v3"] == 2.0
        assert edges == {"e1": 2.0, "e2": 2.0, "e3": 1.0, "e4": 1.0, "e5": 2.0, "e6": 3.0}
        assert report.certificate_ok

    def test_constant_datum(self):
        g = triangle_graph()
        report = solve_quasiconvex(g, datum_at_vertices(g, {"v1": 7.0, "v2": 7.0, "v3": 7.0}))
        assert set(report.function.vertex_values) == {7.0}
        assert set(report.function.edge_values) == {7.0}


def adjacent_pair_fixed_point(g, a_values: dict[int, float]) -> list[float]:
    """Sweep only the local min-max relation over adjacent vertices.

    This is the demonstrably insufficient local iteration; it exists only
    to document the spurious fixed point the real solver must avoid.
    """
    sup = max(a_values.values())
    u = [a_values.get(v, sup) for v in range(g.n_vertices)]
    while True:
        changed = False
        for v in range(g.n_vertices):
            neighbours = g.adjacent_vertices(v)
            if len(neighbours) < 2:
                continue
            candidate = min(max(u[a], u[b]) for a, b in combinations(neighbours, 2))
            if v in a_values:
                candidate = min(candidate, a_values[v])
            if candidate < u[v]:
                u[v] = candidate
                changed = True
        if not changed:
            return u


class TestSpuriousFixedPoint:
    def test_local_relation_stalls_at_two(self):
        g = h_graph()
        a_values = {
            g.vertex_index("v1"): 0.0,
            g.vertex_index("v3"): 2.0,
            g.vertex_index("v5"): 1.0,
            g.vertex_index("v6"): 3.0,
        }
        u = adjacent_pair_fixed_point(g, a_values)
        assert u[g.vertex_index("v2")] == 2.0
        assert u[g.vertex_index("v4")] == 2.0

    def test_sampler_rejects_spurious_function(self):
        from graphenvelopes import PWCFunction

        g = h_graph()
        vertex_values = [0.0, 2.0, 2.0, 2.0, 1.0, 3.0]
        edge_values = [
            max(vertex_values[g.edges[e].tail], vertex_values[g.edges[e].head])
            for e in range(g.n_edges)
        ]
        u = PWCFunction(g, edge_values, vertex_values)
        report = check_quasiconvex_sampled(u, samples=5000)
        assert not report.passed
        ce = report.counterexample
        # The violation lives on the path v5 - v4 - v2 - v1.
        path_vertices = {g.vertex_index(n) for n in ("v1", "v2", "v4", "v5")}
        path_edges = {g.edge_index(n) for n in ("e1", "e3", "e4")}
        for p in (ce.x, ce.y, ce.z):
            if isinstance(p, VertexPoint):
                assert p.vertex in path_vertices
            else:
                assert p.edge in path_edges
        assert ce.value == 2.0
        assert ce.bound == 1.0


class TestSolverProperties:
    def test_datum_value_can_drop(self):
        g = path_graph(3)
        datum = datum_at_vertices(g, {"v1": 0.0, "v2": 10.0, "v3": 0.0})
        report = solve_quasiconvex(g, datum)
        assert report.function.vertex_values[1] == 0.0
        assert report.datum_slack[1] == 10.0

    def test_values_stay_in_value_set(self):
        g = h_graph()
        datum = datum_at_vertices(g, {"v1": -1.5, "v3": 0.25, "v5": 3.125, "v6": 2.5})
        report = solve_quasiconvex(g, datum)
        value_set = set(datum.values)
        assert set(report.function.vertex_values) <= value_set
        assert set(report.function.edge_values) <= value_set
        assert report.value_set_ok

    def test_interior_datum_point(self):
        g = path_graph(2)
        datum = Datum.build(
            g, [(VertexPoint(0), 0.0), (VertexPoint(1), 2.0), (EdgePoint(0, 0.25), 1.0)]
        )
        report = solve_quasiconvex(g, datum)
        # Left piece carries max(0, 1) = 1, right piece max(1, 2) = 2.
        assert report.eval_source(EdgePoint(0, 0.125)) == 1.0
        assert report.eval_source(EdgePoint(0, 0.75)) == 2.0

    def test_monotone_transform_equivariance(self):
        g = binary_tree_graph()
        base = {"v4": 0.0, "v5": 1.0, "v6": 2.0, "v7": 3.0}
        t = lambda x: x**3 + 2 * x
        r1 = solve_quasiconvex(g, datum_at_vertices(g, base))
        r2 = solve_quasiconvex(g, datum_at_vertices(g, {k: t(v) for k, v in base.items()}))
        assert [t(v) for v in r1.function.vertex_values] == list(r2.function.vertex_values)
        assert [t(v) for v in r1.function.edge_values] == list(r2.function.edge_values)

    def test_all_sublevel_sets_convex(self):
        g = h_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v3": 2.0, "v5": 1.0, "v6": 3.0})
        report = solve_quasiconvex(g, datum)
        for alpha in report.function.value_set:
            _subset, convex = sublevel_set(report.function, alpha)
            assert convex

    def test_idempotence(self):
        g = h_graph()
        datum = datum_at_vertices(g, {"v1": 0.0, "v3": 2.0, "v5": 1.0, "v6": 3.0})
        report = solve_quasiconvex(g, datum)
        g2 = report.graph
        datum2 = Datum.build(
            g2,
            [(VertexPoint(v), report.function.vertex_values[v]) for v in range(g2.n_vertices)],
        )
        report2 = solve_quasiconvex(g2, datum2)
        assert report2.function.vertex_values == report.function.vertex_values
        assert report2.function.edge_values == report.function.edge_values
