"""Patterns, their scope graphs, and the denotational evaluator.

``eval_pattern`` computes the value of a pattern by structural recursion; it
is the reference the rewriting engine in :mod:`gqnarrow.narrowing` is checked
against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union as _Either

from . import algebra
from .errors import InvalidPattern
from .expressions import all_vars, expr_problems
from .graph import EMPTY_GRAPH, Graph, Var, graph_union
from .matching import FreshVarGen, MatchSet, empty_set


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Basic:
    graph: Graph


@dataclass(frozen=True)
class Join:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Bind:
    sub: "Pattern"
    expr: object
    var: Var


@dataclass(frozen=True)
class Filter:
    sub: "Pattern"
    expr: object


@dataclass(frozen=True)
class Build:
    sub: "Pattern"
    graph: Graph


@dataclass(frozen=True)
class Union:
    left: "Pattern"
    right: "Pattern"


Pattern = _Either[Empty, Basic, Join, Bind, Filter, Build, Union]
EMPTY = Empty()


@dataclass(frozen=True)
class EvalResult:
    matches: MatchSet
    graph: Graph


def scope_graph(p) -> Graph:
    if isinstance(p, Empty):
        return EMPTY_GRAPH
    if isinstance(p, Basic):
        return p.graph
    if isinstance(p, Join):
        return graph_union(scope_graph(p.left), scope_graph(p.right))
    if isinstance(p, Union):
        return scope_graph(p.left)
    if isinstance(p, Bind):
        return graph_union(scope_graph(p.sub), Graph(nodes=[p.var]))
    if isinstance(p, Filter):
        return scope_graph(p.sub)
    if isinstance(p, Build):
        return p.graph
    raise TypeError(f"not a pattern: {p!r}")


def subpatterns(p):
    if isinstance(p, (Join, Union)):
        return (p.left, p.right)
    if isinstance(p, (Bind, Filter, Build)):
        return (p.sub,)
    return ()


def pattern_height(p) -> int:
    return 1 + max((pattern_height(q) for q in subpatterns(p)), default=0)


def pattern_labels(p) -> frozenset:
    """All labels mentioned by the pattern, including those inside expressions."""
    out = set()
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, Basic):
            out |= q.graph.labels
        elif isinstance(q, Build):
            out |= q.graph.labels
        elif isinstance(q, Bind):
            out.add(q.var)
            out |= all_vars(q.expr)
        elif isinstance(q, Filter):
            out |= all_vars(q.expr)
        stack.extend(subpatterns(q))
    return frozenset(out)


def pattern_vars(p) -> frozenset:
    return frozenset(x for x in pattern_labels(p) if isinstance(x, Var))


def validate(p) -> list:
    """Static errors of a pattern; an empty list means it is well formed."""
    errors = []

    def walk(q):
        for s in subpatterns(q):
            walk(s)
        if isinstance(q, (Bind, Filter)):
            scope = scope_graph(q.sub).variables
            kind = "BIND" if isinstance(q, Bind) else "FILTER"
            loose = all_vars(q.expr) - scope
            if loose:
                names = ", ".join(sorted(str(v) for v in loose))
                errors.append(f"{kind} expression uses out-of-scope variables: {names}")
            errors.extend(f"{kind}: {msg}" for msg in expr_problems(q.expr))
            if isinstance(q, Bind) and not isinstance(q.var, Var):
                errors.append("BIND target must be a variable")
        elif isinstance(q, Union):
            if scope_graph(q.left) != scope_graph(q.right):
                errors.append("UNION operands have different scope graphs")

    walk(p)
    return errors


def check_pattern(p):
    problems = validate(p)
    if problems:
        raise InvalidPattern(problems)


def eval_pattern(p, g: Graph, gen: FreshVarGen = None, lenient: bool = False) -> EvalResult:
    """Value of ``p`` over ``g`` by direct structural recursion."""
    check_pattern(p)
    if gen is None:
        gen = FreshVarGen()
    gen.reserve(g.variables | pattern_vars(p))
    ms = _eval(p, g, gen, lenient)
    return EvalResult(ms, ms.target)


def _eval(p, g, gen, lenient) -> MatchSet:
    if isinstance(p, Empty):
        return empty_set(g)
    if isinstance(p, Basic):
        return algebra.op_match(p.graph, g)
    if isinstance(p, Join):
        left = _eval(p.left, g, gen, lenient)
        right = _eval(p.right, left.target, gen, lenient)
        return algebra.op_join(left, right)
    if isinstance(p, Union):
        left = _eval(p.left, g, gen, lenient)
        right = _eval(p.right, left.target, gen, lenient)
        return algebra.op_union(left, right)
    if isinstance(p, Bind):
        return algebra.op_bind(_eval(p.sub, g, gen, lenient), p.expr, p.var, lenient)
    if isinstance(p, Filter):
        return algebra.op_filter(_eval(p.sub, g, gen, lenient), p.expr, lenient)
    if isinstance(p, Build):
        return algebra.op_build(_eval(p.sub, g, gen, lenient), p.graph, gen)
    raise TypeError(f"not a pattern: {p!r}")
