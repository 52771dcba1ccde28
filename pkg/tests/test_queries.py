import pytest
from hypothesis import given, settings, strategies as st

from gqnarrow import frontend
from gqnarrow.errors import CheckMismatch, EmptySelectList, InvalidPattern
from gqnarrow.fixtures import G_A, G_EX, L_EX, Q_CS_EX, Q_C_EX, Q_EMPTY, Q_JOIN_COUNT, Q_S_EX
from gqnarrow.frontend import (evaluate_query, oracle_query, result_conselect, result_construct,
                               result_select, results_equivalent)
from gqnarrow.graph import Const, Graph, Var
from gqnarrow.patterns import Basic
from gqnarrow.queries import (GraphResult, Select, SolutionTable, TableResult, check_query,
                              graph_of_vars, wrapped_pattern)
from gqnarrow.syntax import parse_graph, parse_query
from oracles import c, is_renaming_equal
from test_syntax import _random_query


def test_graph_of_vars():
    g, row = graph_of_vars((Var("p"), Var("s")))
    assert row == Var("__row")
    assert g == Graph([("?__row", "__col_p", "?p"), ("?__row", "__col_s", "?s")])
    g1, _ = graph_of_vars((Var("x"),))
    assert len(g1.triples) == 1
    with pytest.raises(EmptySelectList):
        graph_of_vars(())


def test_graph_of_vars_avoids_collisions():
    g, row = graph_of_vars((Var("p"),), avoid={Var("__row"), Const("__col_p")})
    assert row == Var("__row1")
    assert Const("__col_p") not in g.labels


def test_construct_result():
    g = result_construct(Q_C_EX, G_EX)
    expected = parse_graph("""
        Alice teaches ?z1 . Charlie studies ?z1 .
        Alice teaches ?z2 . David studies ?z2 .
        Bob teaches ?z3 . Eric studies ?z3 .""")
    assert len(g.triples) == 6
    assert is_renaming_equal(g, expected, g.variables, expected.variables)


def test_select_result():
    t = result_select(Q_S_EX, G_EX)
    assert t.columns == (Var("p"), Var("s"))
    assert t.rows == (c("Alice", "Charlie"), c("Alice", "David"), c("Bob", "Eric"))


def test_conselect_result_keeps_multiplicities():
    res = result_conselect(Q_CS_EX, G_EX)
    assert res.graph == parse_graph("""
        David supervisedby Alice . Charlie supervisedby Alice . Eric supervisedby Bob .""")
    assert res.table.rows == (c("Alice", 2), c("Alice", 2), c("Bob", 1))
    assert dict(set(res.table.rows)) == {Const("Alice"): Const(2), Const("Bob"): Const(1)}


def test_select_keeps_one_row_per_match():
    q = parse_query("SELECT ?p WHERE BASIC { ?p teaches ?t . ?s studies ?t . }")
    t = result_select(q, G_EX)
    assert t.rows == (c("Alice"), c("Alice"), c("Bob"))


def test_select_over_empty():
    t = result_select(Q_EMPTY, G_EX)
    assert t.rows == () and t.columns == (Var("p"),)


def test_join_count_query():
    t = result_select(Q_JOIN_COUNT, G_A)
    assert t.rows == (c("David", "Lab1"), c("Eric", "Lab2"))


def test_query_validation():
    with pytest.raises(InvalidPattern):
        check_query(Select((Var("nope"),), Basic(L_EX)))
    with pytest.raises(EmptySelectList):
        check_query(Select((), Basic(L_EX)))


def test_wrapped_patterns():
    assert wrapped_pattern(Q_C_EX).graph == Q_C_EX.template
    assert len(wrapped_pattern(Q_S_EX).graph.triples) == 2
    assert len(wrapped_pattern(Q_CS_EX).graph.triples) == 3


def test_engines_agree_on_examples():
    for q, g in ((Q_C_EX, G_EX), (Q_S_EX, G_EX), (Q_CS_EX, G_EX), (Q_JOIN_COUNT, G_A), (Q_EMPTY, G_EX)):
        res, trace = evaluate_query(q, g, "check")
        assert trace is not None
        assert results_equivalent(res, oracle_query(q, g), g.variables)
        assert evaluate_query(q, g, "oracle")[1] is None


def test_check_reports_mismatch(monkeypatch):
    monkeypatch.setattr(frontend, "oracle_query",
                        lambda q, g, gen=None, lenient=False: TableResult(SolutionTable((Var("p"), Var("s")), ())))
    with pytest.raises(CheckMismatch):
        evaluate_query(Q_S_EX, G_EX, "check")


def test_unknown_engine():
    with pytest.raises(ValueError):
        evaluate_query(Q_S_EX, G_EX, "fast")


def test_results_equivalence_is_renaming_aware():
    a = GraphResult(parse_graph("a p ?u . ?u q b ."))
    b = GraphResult(parse_graph("a p ?v . ?v q b ."))
    assert results_equivalent(a, b)
    assert not results_equivalent(a, b, fixed={Var("u"), Var("v")})
    t1 = TableResult(SolutionTable((Var("x"),), (c("a"), c("a"))))
    t2 = TableResult(SolutionTable((Var("x"),), (c("a"),)))
    assert not results_equivalent(t1, t2)


@settings(max_examples=60)
@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_query_engines_agree(seed, gseed):
    from gqnarrow.props import Generator
    q = _random_query(seed)
    g = Generator(gseed).graph()
    try:
        expected = oracle_query(q, g)
    except Exception as exc:
        with pytest.raises(type(exc)):
            evaluate_query(q, g)
        return
    got, _ = evaluate_query(q, g)
    assert results_equivalent(got, expected, g.variables)
    if isinstance(got, TableResult):
        n = len(frontend.eval_pattern(q.where, g).matches)
        assert len(got.table.rows) == n
