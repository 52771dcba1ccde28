"""The six operations of the graph query algebra over match sets.

Every operation returns a match set whose target contains the target of its
first argument.
"""
from __future__ import annotations

from .errors import EvaluationError, ExprTypeError, SourceMismatch, UnboundVariable
from .expressions import eval_values, expr_vars
from .graph import Const, Graph, graph_union, label_key
from .matching import FreshVarGen, MatchSet, build_match, enumerate_matches


def op_match(l: Graph, g: Graph) -> MatchSet:
    return enumerate_matches(l, g)


def op_join(a: MatchSet, b: MatchSet) -> MatchSet:
    source = graph_union(a.source, b.source)
    target = graph_union(a.target, b.target)
    shared = sorted(a.source.variables & b.source.variables, key=label_key)
    # hash join on the shared variables
    buckets = {}
    for row in b.rows:
        d = dict(row)
        buckets.setdefault(tuple(d[x] for x in shared), []).append(row)
    out = []
    for row in a.rows:
        d = dict(row)
        for other in buckets.get(tuple(d[x] for x in shared), ()):
            merged = dict(d)
            merged.update(other)
            out.append(merged)
    return MatchSet(source, target, out)


def _checked_values(a: MatchSet, e, lenient: bool):
    missing = expr_vars(e) - a.source.variables
    if missing:
        names = ", ".join(sorted(str(v) for v in missing))
        raise UnboundVariable(f"expression uses variables outside the match source: {names}")
    for m, v in eval_values(a, e):
        if isinstance(v, EvaluationError):
            if lenient:
                continue
            raise v
        yield m, v


def op_bind(a: MatchSet, e, x, lenient: bool = False) -> MatchSet:
    """Extend each match with ``x -> value of e``; when ``x`` is already in
    scope, keep only the matches where it already has that value."""
    source = graph_union(a.source, Graph(nodes=[x]))
    in_scope = x in a.source.variables
    rows, values = [], set()
    for m, v in _checked_values(a, e, lenient):
        if in_scope:
            if m[x] != v:
                continue
            rows.append(m.items)
        else:
            d = m.assignment
            d[x] = v
            rows.append(d)
        values.add(v)
    target = graph_union(a.target, Graph(nodes=values))
    return MatchSet(source, target, rows)


def op_filter(a: MatchSet, e, lenient: bool = False) -> MatchSet:
    keep = []
    for m, v in _checked_values(a, e, lenient):
        if not (isinstance(v, Const) and isinstance(v.value, bool)):
            if lenient:
                continue
            raise ExprTypeError(f"FILTER condition evaluated to a non-boolean: {v}")
        if v.value:
            keep.append(m.items)
    return MatchSet._raw(a.source, a.target, keep)


def op_build(a: MatchSet, r: Graph, gen: FreshVarGen) -> MatchSet:
    # canonical order so fresh names are reproducible
    built, triples, nodes = [], set(), set()
    for m in a.sorted():
        bm, h = build_match(m, r, gen)
        built.append(bm.items)
        triples |= h.triples
        nodes |= h.nodes
    target = graph_union(a.target, Graph(triples, nodes))
    return MatchSet._raw(r, target, built)


def op_union(a: MatchSet, b: MatchSet) -> MatchSet:
    if a.source != b.source:
        raise SourceMismatch("UNION operands have different sources")
    return MatchSet._raw(a.source, graph_union(a.target, b.target), a.rows | b.rows)
