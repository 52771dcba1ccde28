"""Seeded random instances and the engine-vs-oracle property harness.

Every case draws a small graph and a well-formed pattern, evaluates it with
both engines and checks that the results agree up to renaming, that every
derivation step had exactly one redex, that derivations stay within their
step bound with a decreasing measure, and that aggregates are constant on
their groups.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import EvaluationError, GQLError, NonDeterminismDetected, StuckTerm, TerminationViolation
from .expressions import Agg, Binary, Unary, _family, aggregate, eval_values, group_classes
from .graph import Const, Graph, Triple, Var
from .matching import FreshVarGen, equal_up_to_renaming
from .narrowing import derive, step_bound
from .patterns import Basic, Bind, Build, Empty, Filter, Join, Union, eval_pattern, scope_graph, subpatterns

CONSTANTS = (Const("a"), Const("b"), Const("c"), Const(1), Const(2))
PREDICATES = (Const("p"), Const("q"))
PATTERN_VARS = (Var("x"), Var("y"), Var("z"), Var("w"))
GRAPH_VARS = (Var("g0"),)


class Generator:
    """Random graphs, expressions and patterns from one seeded stream."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        # graph the next patterns are aimed at; basic patterns sometimes
        # abstract its triples so that matches are not rare
        self.target = None

    def graph(self, max_triples=8) -> Graph:
        r = self.rng
        pool = CONSTANTS + (GRAPH_VARS if r.random() < 0.3 else ())
        triples = [Triple(r.choice(pool), r.choice(PREDICATES), r.choice(pool))
                   for _ in range(r.randint(min(3, max_triples), max_triples))]
        nodes = [r.choice(pool) for _ in range(r.randint(0, 1))]
        self.target = Graph(triples, nodes)
        return self.target

    def label(self, variables):
        r = self.rng
        if variables and r.random() < 0.85:
            return r.choice(variables)
        return r.choice(CONSTANTS)

    def basic(self, variables=PATTERN_VARS) -> Graph:
        r = self.rng
        if self.target is not None and self.target.triples and r.random() < 0.5:
            return self.abstracted(variables)
        vs = list(variables[: r.randint(min(2, len(variables)), len(variables))])
        triples = [Triple(self.label(vs), r.choice(PREDICATES), self.label(vs))
                   for _ in range(r.choice((1, 1, 2, 2, 3)))]
        nodes = [r.choice(vs)] if r.random() < 0.15 else []
        return Graph(triples, nodes)

    def abstracted(self, variables) -> Graph:
        """One to three triples of the target with most labels replaced by variables."""
        r = self.rng
        picked = r.sample(sorted(self.target.triples, key=Triple.key),
                          min(len(self.target.triples), r.choice((1, 2, 2, 3))))
        names = {}
        free = list(variables)

        def abstract(x):
            if x in names:
                return names[x]
            if free and r.random() < 0.8:
                names[x] = free.pop(0)
                return names[x]
            return x if isinstance(x, Const) else r.choice(CONSTANTS)

        return Graph(Triple(abstract(s), p, abstract(o)) for s, p, o in picked)

    def expr(self, scope: list, boolean: bool):
        """Comparisons, connectives and COUNT / COUNT-BY over ``scope``."""
        r = self.rng
        if not boolean:
            if not scope or r.random() < 0.25:
                return r.choice(CONSTANTS)
            roll = r.random()
            if roll < 0.35:
                return r.choice(scope)
            if roll < 0.6 or len(scope) < 2:
                return Agg("COUNT", r.choice(scope), distinct=r.random() < 0.4)
            x, g = r.sample(scope, 2)
            return Agg("COUNT", x, distinct=r.random() < 0.3, by=(g,))
        roll = r.random()
        if roll < 0.15:
            return Unary("NOT", self.expr(scope, True))
        if roll < 0.25:
            return Binary(r.choice(("AND", "OR")), self.expr(scope, True), self.expr(scope, True))
        return Binary(r.choice(("=", "=", "<", ">")), self.expr(scope, False), self.expr(scope, False))

    def pattern(self, depth: int = 3):
        """A well-formed pattern of height at most ``depth``."""
        r = self.rng
        if depth <= 1:
            return Empty() if r.random() < 0.1 else Basic(self.basic())
        kind = r.choice(("basic", "join", "union", "bind", "filter", "build"))
        if kind == "basic":
            return self.pattern(1)
        if kind == "join":
            return Join(self.pattern(depth - 1), self.pattern(depth - 1))
        sub = self.pattern(depth - 1)
        scope = sorted(scope_graph(sub).variables, key=lambda v: v.name)
        if kind == "union":
            return Union(sub, self.same_scope(scope_graph(sub), scope, depth - 1))
        if kind == "bind":
            fresh = [v for v in PATTERN_VARS if v not in scope]
            if fresh and (r.random() < 0.85 or not scope):
                target = r.choice(fresh)
            else:
                target = r.choice(scope)
            return Bind(sub, self.expr(scope, r.random() < 0.3), target)
        if kind == "filter":
            return Filter(sub, self.expr(scope, True))
        return Build(sub, self.basic(tuple(scope) + PATTERN_VARS[:1] if scope else PATTERN_VARS))

    def same_scope(self, sc: Graph, scope: list, depth: int):
        """A pattern of height at most ``depth`` whose scope graph is exactly ``sc``."""
        r = self.rng
        options = ["basic"] if (sc.triples or sc.nodes) else ["empty"]
        if depth >= 2:
            options.append("build")
            if sc.triples or sc.nodes:
                options.append("filter")
        kind = r.choice(options)
        if kind == "empty":
            return Empty()
        if kind == "basic":
            return Basic(sc)
        if kind == "filter":
            return Filter(Basic(sc), self.expr(scope, True))
        return Build(self.pattern(depth - 1), sc)


@dataclass
class CaseOutcome:
    index: int
    agreed: bool
    steps: int = 0
    bound: int = 0
    max_redexes: int = 0
    aggregates_ok: bool = True
    error: str = ""


@dataclass
class Report:
    seed: int
    cases: int
    outcomes: list = field(default_factory=list)

    def count(self, pred) -> int:
        return sum(1 for o in self.outcomes if pred(o))

    @property
    def agreements(self) -> int:
        return self.count(lambda o: o.agreed)

    @property
    def determinism_violations(self) -> int:
        return self.count(lambda o: o.max_redexes > 1 or "NonDeterminism" in o.error)

    @property
    def termination_violations(self) -> int:
        return self.count(lambda o: o.steps > o.bound or "Termination" in o.error or "Stuck" in o.error)

    @property
    def aggregate_violations(self) -> int:
        return self.count(lambda o: not o.aggregates_ok)

    @property
    def failures(self) -> list:
        return [o for o in self.outcomes if not o.agreed or not o.aggregates_ok or o.error]

    @property
    def ok(self) -> bool:
        return not self.failures

    def format(self) -> str:
        lines = [
            f"seed: {self.seed}",
            f"cases: {self.cases}",
            f"agreement up to renaming: {self.agreements}/{self.cases}",
            f"determinism violations: {self.determinism_violations}",
            f"termination violations: {self.termination_violations}",
            f"aggregate invariant violations: {self.aggregate_violations}",
            f"total steps: {sum(o.steps for o in self.outcomes)}",
        ]
        for o in self.failures[:20]:
            lines.append(f"FAIL case {o.index}: {o.error or 'results differ'}")
        lines.append("result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"


def _aggregates(e):
    if isinstance(e, Agg):
        yield e
        yield from _aggregates(e.arg)
    elif isinstance(e, Unary):
        yield from _aggregates(e.arg)
    elif isinstance(e, Binary):
        yield from _aggregates(e.left)
        yield from _aggregates(e.right)


def aggregate_invariants_hold(ms, agg: Agg) -> bool:
    """An aggregate takes one value on the whole set, or one value per BY class
    equal to the aggregate over that class."""
    pairs = eval_values(ms, agg)
    if any(isinstance(v, EvaluationError) for _, v in pairs):
        return True
    if agg.by is None:
        return len({v for _, v in pairs}) <= 1
    value = dict(pairs)
    for cls in group_classes(ms, agg.by):
        vals = {value[m] for m in cls}
        if len(vals) != 1:
            return False
        expected = aggregate(agg.func, _family(cls, agg.arg), agg.distinct)
        if vals != {expected}:
            return False
    return True


def check_aggregates(p, g: Graph) -> bool:
    stack = [p]
    while stack:
        q = stack.pop()
        stack.extend(subpatterns(q))
        if isinstance(q, (Bind, Filter)):
            aggs = list(_aggregates(q.expr))
            if not aggs:
                continue
            try:
                ms = eval_pattern(q.sub, g).matches
            except EvaluationError:
                continue
            if not all(aggregate_invariants_hold(ms, a) for a in aggs):
                return False
    return True


def run_case(index: int, g: Graph, p) -> CaseOutcome:
    out = CaseOutcome(index, False, bound=step_bound(p))
    try:
        expected = eval_pattern(p, g, FreshVarGen()).matches
    except EvaluationError as exc:
        expected = exc
    try:
        got, trace = derive(g, p, FreshVarGen())
        out.steps = len(trace)
        out.max_redexes = max((s.redexes for s in trace.steps), default=0)
    except (NonDeterminismDetected, TerminationViolation, StuckTerm) as exc:
        out.error = f"{type(exc).__name__}: {exc}"
        return out
    except EvaluationError as exc:
        got = exc
    except GQLError as exc:
        out.error = f"{type(exc).__name__}: {exc}"
        return out
    if isinstance(expected, Exception) or isinstance(got, Exception):
        out.agreed = type(expected) is type(got)
    else:
        out.agreed = equal_up_to_renaming(expected, got, g.variables)
    out.aggregates_ok = check_aggregates(p, g)
    return out


def generate_cases(seed: int, cases: int):
    gen = Generator(seed)
    for i in range(cases):
        yield i, gen.graph(), gen.pattern(3)


def run_properties(seed: int = 1, cases: int = 200) -> Report:
    """Run ``cases`` seeded random cases; identical arguments give identical reports."""
    if cases < 1:
        raise ValueError("cases must be at least 1")
    report = Report(seed, cases)
    for i, g, p in generate_cases(seed, cases):
        report.outcomes.append(run_case(i, g, p))
    return report
