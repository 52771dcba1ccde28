"""Query evaluation with a selectable engine, plus result comparison."""
from __future__ import annotations

from collections import Counter

from .errors import CheckMismatch
from .graph import Graph, Var
from .matching import FreshVarGen, find_renaming
from .narrowing import solve_query
from .patterns import eval_pattern
from .queries import (Conselect, Construct, GraphResult, PairResult, Select, TableResult,
                      check_query, extract_result, wrapped_pattern)

ENGINES = ("narrowing", "oracle", "check")


def oracle_query(q, g: Graph, gen: FreshVarGen = None, lenient: bool = False):
    """Result of ``q`` computed by the denotational evaluator."""
    check_query(q)
    res = eval_pattern(wrapped_pattern(q), g, gen, lenient)
    return extract_result(q, res.matches)


def _result_facts(result, fixed):
    facts = set()
    graph = getattr(result, "graph", None)
    if graph is not None:
        facts |= {("t",) + tuple(t) for t in graph.triples}
        facts |= {("n", n) for n in graph.nodes}
    table = getattr(result, "table", None)
    if table is not None:
        facts.add(("cols",) + tuple(table.columns))
        facts |= {("row", k) + r for r, k in Counter(table.rows).items()}
    free = {x for f in facts for x in f[1:] if isinstance(x, Var) and x not in fixed}
    return facts, free


def results_equivalent(a, b, fixed=()) -> bool:
    """Equality of query results up to a bijective renaming of variables not
    in ``fixed``; tables are compared as multisets."""
    if type(a) is not type(b):
        return False
    if a == b:
        return True
    fixed = set(fixed)
    fa, va = _result_facts(a, fixed)
    fb, vb = _result_facts(b, fixed)
    return find_renaming(fa, va, fb, vb) is not None


def evaluate_query(q, g: Graph, engine: str = "narrowing", lenient: bool = False):
    """Evaluate ``q`` over ``g``. Returns ``(result, trace)``; the trace is None
    for the oracle engine."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "oracle":
        return oracle_query(q, g, FreshVarGen(), lenient), None
    result, trace = solve_query(q, g, FreshVarGen(), lenient)
    if engine == "check":
        expected = oracle_query(q, g, FreshVarGen(), lenient)
        if not results_equivalent(result, expected, g.variables):
            raise CheckMismatch("narrowing and oracle results differ", result, expected)
    return result, trace


def result_construct(q: Construct, g: Graph, engine: str = "narrowing") -> Graph:
    return evaluate_query(q, g, engine)[0].graph


def result_select(q: Select, g: Graph, engine: str = "narrowing"):
    return evaluate_query(q, g, engine)[0].table


def result_conselect(q: Conselect, g: Graph, engine: str = "narrowing") -> PairResult:
    return evaluate_query(q, g, engine)[0]


__all__ = ["ENGINES", "GraphResult", "TableResult", "PairResult", "evaluate_query",
           "oracle_query", "results_equivalent", "result_construct", "result_select",
           "result_conselect"]
