"""Rule-based operational semantics: gql-narrowing over explicit terms.

Terms are first-order trees. Patterns are encoded with the constructor heads
``EMPTY, BASIC, JOIN, BIND, FILTER, BUILD, UNION``; graphs, match sets,
expressions and variables sit in :class:`Lit` leaves tagged with their sort.

One narrowing step finds the (unique) redex, instantiates the right-hand
side of the matching rule and evaluates every algebra call inside that
right-hand side before splicing it back at the redex position. The
substitution is applied to the right-hand side only.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import algebra
from .errors import NonDeterminismDetected, StuckTerm, TerminationViolation
from .expressions import format_expr
from .graph import Graph, graph_union
from .matching import FreshVarGen, MatchSet, empty_set, identity_set
from .patterns import (Basic, Bind, Build, Empty, Filter, Join, Union,
                       check_pattern, pattern_labels, pattern_vars, subpatterns)
from .queries import (Conselect, Construct, Select, check_query, graph_of_vars, print_conselect,
                      print_construct, print_select, query_labels)


@dataclass(frozen=True)
class Term:
    head: str
    args: tuple = ()

    def __repr__(self):
        return format_term(self)


@dataclass(frozen=True)
class Lit:
    """A leaf carrying a value of sort ``Gr``, ``Som``, ``Exp``, ``Var``, ``Vars`` or ``Result``."""

    sort: str
    value: object

    def __repr__(self):
        return format_term(self)


def T(head, *args) -> Term:
    return Term(head, tuple(args))


PATTERN_HEADS = frozenset({"EMPTY", "BASIC", "JOIN", "BIND", "FILTER", "BUILD", "UNION"})
QUERY_HEADS = frozenset({"CONSTRUCT", "SELECT", "CONSELECT"})


# -- patterns and queries as terms ------------------------------------------

def pattern_term(p) -> Term:
    if isinstance(p, Empty):
        return T("EMPTY")
    if isinstance(p, Basic):
        return T("BASIC", Lit("Gr", p.graph))
    if isinstance(p, Join):
        return T("JOIN", pattern_term(p.left), pattern_term(p.right))
    if isinstance(p, Union):
        return T("UNION", pattern_term(p.left), pattern_term(p.right))
    if isinstance(p, Bind):
        return T("BIND", pattern_term(p.sub), Lit("Exp", p.expr), Lit("Var", p.var))
    if isinstance(p, Filter):
        return T("FILTER", pattern_term(p.sub), Lit("Exp", p.expr))
    if isinstance(p, Build):
        return T("BUILD", pattern_term(p.sub), Lit("Gr", p.graph))
    raise TypeError(f"not a pattern: {p!r}")


def term_pattern(t: Term):
    h, a = t.head, t.args
    if h == "EMPTY":
        return Empty()
    if h == "BASIC":
        return Basic(a[0].value)
    if h == "JOIN":
        return Join(term_pattern(a[0]), term_pattern(a[1]))
    if h == "UNION":
        return Union(term_pattern(a[0]), term_pattern(a[1]))
    if h == "BIND":
        return Bind(term_pattern(a[0]), a[1].value, a[2].value)
    if h == "FILTER":
        return Filter(term_pattern(a[0]), a[1].value)
    if h == "BUILD":
        return Build(term_pattern(a[0]), a[1].value)
    raise TypeError(f"not a pattern term: {t!r}")


def query_term(q) -> Term:
    if isinstance(q, Construct):
        return T("CONSTRUCT", Lit("Gr", q.template), pattern_term(q.where))
    if isinstance(q, Select):
        return T("SELECT", Lit("Vars", tuple(q.variables)), pattern_term(q.where))
    return T("CONSELECT", Lit("Vars", tuple(q.variables)), Lit("Gr", q.template),
             pattern_term(q.where))


# -- rules --------------------------------------------------------------------

@dataclass(frozen=True)
class PVar:
    """A rule variable constrained to one sort."""

    name: str
    sort: str


def _has_sort(t, sort) -> bool:
    if sort == "Pat":
        return isinstance(t, Term) and t.head in PATTERN_HEADS
    return isinstance(t, Lit) and t.sort == sort


P, P1, P2 = PVar("P", "Pat"), PVar("P1", "Pat"), PVar("P2", "Pat")
M, M2 = PVar("m", "Som"), PVar("m'", "Som")
L, R, G = PVar("L", "Gr"), PVar("R", "Gr"), PVar("G", "Gr")
E, X, S = PVar("e", "Exp"), PVar("x", "Var"), PVar("S", "Vars")
EMPTY_T = T("EMPTY")


def _solve(p, m):
    return T("Solve", T("Config", p, m))


def _done(m):
    return T("Config", EMPTY_T, m)


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Term
    rhs: Term


RULES = (
    Rule("r0", _solve(EMPTY_T, M), _done(T("EmptyOf", M))),
    Rule("r1", _solve(T("BASIC", L), M), _done(T("Match", L, T("Target", M)))),
    Rule("r2", _solve(T("JOIN", P1, P2), M), T("Solve_JL", _solve(P1, M), P2)),
    Rule("r3", T("Solve_JL", _done(M), P), T("Solve_JR", M, _solve(P, M))),
    Rule("r4", T("Solve_JR", M, _done(M2)), _done(T("Join", M, M2))),
    Rule("r5", _solve(T("BIND", P, E, X), M), T("Solve_BI", _solve(P, M), E, X)),
    Rule("r6", T("Solve_BI", _done(M), E, X), _done(T("Bind", M, E, X))),
    Rule("r7", _solve(T("FILTER", P, E), M), T("Solve_FR", _solve(P, M), E)),
    Rule("r8", T("Solve_FR", _done(M), E), _done(T("Filter", M, E))),
    Rule("r9", _solve(T("BUILD", P, R), M), T("Solve_BU", _solve(P, M), R)),
    Rule("r10", T("Solve_BU", _done(M), R), _done(T("Build", M, R))),
    Rule("r11", _solve(T("UNION", P1, P2), M), T("Solve_UL", _solve(P1, M), P2)),
    Rule("r12", T("Solve_UL", _done(M), P), T("Solve_UR", M, _solve(P, M))),
    Rule("r13", T("Solve_UR", M, _done(M2)), _done(T("Union", M, M2))),
    Rule("r14", T("Solve_Q", T("CONSTRUCT", R, P), G),
         T("Display_C", R, _solve(T("BUILD", P, R), T("I", G)))),
    Rule("r15", T("Display_C", R, _done(M)), T("Print_C", R, M)),
    Rule("r16", T("Solve_Q", T("SELECT", S, P), G),
         T("Display_S", S, _solve(T("BUILD", P, T("GraphOf", S, P)), T("I", G)))),
    Rule("r17", T("Display_S", S, _done(M)), T("Print_S", S, M)),
    Rule("r18", T("Solve_Q", T("CONSELECT", S, R, P), G),
         T("Display_CS", S, R,
           _solve(T("BUILD", P, T("GraphUnion", T("GraphOf", S, P, R), R)), T("I", G)))),
    Rule("r19", T("Display_CS", S, R, _done(M)), T("Print_CS", S, R, M)),
)
RULES_BY_NAME = {r.name: r for r in RULES}
_RULES_BY_HEAD = {}
for _r in RULES:
    _RULES_BY_HEAD.setdefault(_r.lhs.head, []).append(_r)


def match_lhs(pat, t, sigma=None) -> Optional[dict]:
    """First-order matching of a rule left-hand side against ``t``."""
    if sigma is None:
        sigma = {}
    if isinstance(pat, PVar):
        if not _has_sort(t, pat.sort):
            return None
        bound = sigma.get(pat)
        if bound is not None and bound != t:
            return None
        sigma[pat] = t
        return sigma
    if not isinstance(t, Term) or t.head != pat.head or len(t.args) != len(pat.args):
        return None
    for a, b in zip(pat.args, t.args):
        if match_lhs(a, b, sigma) is None:
            return None
    return sigma


def instantiate(pat, sigma):
    if isinstance(pat, PVar):
        return sigma[pat]
    if isinstance(pat, Lit):
        return pat
    return Term(pat.head, tuple(instantiate(a, sigma) for a in pat.args))


# -- built-in evaluation of algebra calls ------------------------------------

class _Ctx:
    def __init__(self, gen: FreshVarGen, lenient: bool):
        self.gen = gen
        self.lenient = lenient


def _avoid_labels(args) -> set:
    out = set()
    for a in args:
        if isinstance(a, Term):
            out |= pattern_labels(term_pattern(a))
        elif a.sort == "Gr":
            out |= a.value.labels
        elif a.sort == "Vars":
            out |= set(a.value)
    return out


def _builtin(head, args, ctx: _Ctx):
    v = [a.value if isinstance(a, Lit) else a for a in args]
    if head == "EmptyOf":
        return Lit("Som", empty_set(v[0].target))
    if head == "Target":
        return Lit("Gr", v[0].target)
    if head == "I":
        return Lit("Som", identity_set(v[0]))
    if head == "Match":
        return Lit("Som", algebra.op_match(v[0], v[1]))
    if head == "Join":
        return Lit("Som", algebra.op_join(v[0], v[1]))
    if head == "Bind":
        return Lit("Som", algebra.op_bind(v[0], v[1], v[2], ctx.lenient))
    if head == "Filter":
        return Lit("Som", algebra.op_filter(v[0], v[1], ctx.lenient))
    if head == "Build":
        return Lit("Som", algebra.op_build(v[0], v[1], ctx.gen))
    if head == "Union":
        return Lit("Som", algebra.op_union(v[0], v[1]))
    if head == "GraphOf":
        g, _ = graph_of_vars(v[0], _avoid_labels(args))
        return Lit("Gr", g)
    if head == "GraphUnion":
        return Lit("Gr", graph_union(v[0], v[1]))
    if head == "Print_C":
        return Lit("Result", print_construct(v[0], v[1]))
    if head == "Print_S":
        return Lit("Result", print_select(v[0], v[1]))
    if head == "Print_CS":
        return Lit("Result", print_conselect(v[0], v[1], v[2]))
    raise KeyError(head)


BUILTINS = frozenset({"EmptyOf", "Target", "I", "Match", "Join", "Bind", "Filter", "Build",
                      "Union", "GraphOf", "GraphUnion", "Print_C", "Print_S", "Print_CS"})


def normalize_gq(t, ctx: _Ctx):
    """Evaluate every built-in algebra call in ``t``, innermost first."""
    if isinstance(t, Lit):
        return t
    args = tuple(normalize_gq(a, ctx) for a in t.args)
    if t.head in BUILTINS:
        return _builtin(t.head, args, ctx)
    return Term(t.head, args)


# -- positions and redexes ---------------------------------------------------

def subterm(t, pos: tuple):
    for i in pos:
        t = t.args[i - 1]
    return t


def replace(t, pos: tuple, s):
    if not pos:
        return s
    i = pos[0]
    args = list(t.args)
    args[i - 1] = replace(args[i - 1], pos[1:], s)
    return Term(t.head, tuple(args))


def positions(t, prefix=()):
    """All positions of ``t`` in post-order (innermost first, left to right)."""
    if isinstance(t, Term):
        for i, a in enumerate(t.args, 1):
            yield from positions(a, prefix + (i,))
    yield prefix


def all_redexes(t) -> list:
    """Every ``(position, rule, substitution)`` at which some rule applies."""
    out = []
    for pos in positions(t):
        s = subterm(t, pos)
        if not isinstance(s, Term):
            continue
        for rule in _RULES_BY_HEAD.get(s.head, ()):
            sigma = match_lhs(rule.lhs, s)
            if sigma is not None:
                out.append((pos, rule, sigma))
    return out


def find_redex(t):
    """The unique redex ``(position, rule_name)`` of ``t``, or None for a normal form.

    Every position is scanned; finding two redexes raises
    :class:`NonDeterminismDetected`.
    """
    found = all_redexes(t)
    if len(found) > 1:
        where = ", ".join(f"{r.name}@{format_position(p)}" for p, r, _ in found)
        raise NonDeterminismDetected(f"several redexes: {where}")
    if not found:
        return None
    pos, rule, _ = found[0]
    return pos, rule.name


def format_position(pos: tuple) -> str:
    return ".".join(str(i) for i in pos) if pos else "Λ"


# -- termination measure -----------------------------------------------------

def term_height(t) -> int:
    if isinstance(t, Lit) or not t.args:
        return 1
    return 1 + max(term_height(a) for a in t.args)


def pattern_heights(t) -> Counter:
    """Multiset of the heights of every pattern subterm of ``t``."""
    out = Counter()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Term):
            if s.head in PATTERN_HEADS:
                out[term_height(s)] += 1
            stack.extend(s.args)
    return out


def _pending_queries(t) -> int:
    n = 0
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Term):
            if s.head == "Solve_Q":
                n += 2
            elif s.head.startswith("Display_"):
                n += 1
            stack.extend(s.args)
    return n


def term_size(t) -> int:
    if isinstance(t, Lit):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def measure(t) -> tuple:
    """``(pending query work, multiset of pattern heights, term height)``.

    For pattern terms the first component is 0. This ordering decreases from
    a rule's instantiated left-hand side to its contractum, but term height
    is not monotone under contexts, so on whole terms use :func:`global_measure`.
    """
    return (_pending_queries(t), pattern_heights(t), term_height(t))


def global_measure(t) -> tuple:
    """Like :func:`measure` with term size in place of height.

    Every component is monotone under contexts, so a decrease at the redex
    implies a decrease of the whole term.
    """
    return (_pending_queries(t), pattern_heights(t), term_size(t))


def multiset_greater(a: Counter, b: Counter) -> bool:
    """Multiset extension of ``>`` on integers."""
    if a == b:
        return False
    diff_a = a - b
    diff_b = b - a
    return all(any(x > y for x in diff_a) for y in diff_b)


def measure_greater(m1, m2) -> bool:
    k1, ms1, h1 = m1
    k2, ms2, h2 = m2
    if k1 != k2:
        return k1 > k2
    if ms1 != ms2:
        return multiset_greater(ms1, ms2)
    return h1 > h2


def step_bound(p) -> int:
    """Exact length of the derivation of ``p``: 3 per JOIN/UNION, 2 per
    BIND/FILTER/BUILD, 1 per BASIC/EMPTY."""
    if isinstance(p, (Join, Union)):
        own = 3
    elif isinstance(p, (Bind, Filter, Build)):
        own = 2
    else:
        own = 1
    return own + sum(step_bound(q) for q in subpatterns(p))


def query_step_bound(q) -> int:
    """Two query steps around the derivation of the wrapped BUILD pattern."""
    return step_bound(q.where) + 4


# -- derivations ---------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    index: int
    before: object
    position: tuple
    rule: str
    after: object
    redexes: int = 1
    # whether the whole-term (pattern heights, height) measure also dropped
    height_decreased: bool = True


@dataclass
class Trace:
    initial: object
    steps: list = field(default_factory=list)

    @property
    def final(self):
        return self.steps[-1].after if self.steps else self.initial

    @property
    def rules(self) -> list:
        return [s.rule for s in self.steps]

    def __len__(self):
        return len(self.steps)

    def format(self, verbose: bool = False) -> str:
        lines = [format_term(self.initial, verbose)]
        for s in self.steps:
            lines.append(f"({s.index}) ⇝_{{{s.rule}}} @ {format_position(s.position)} : "
                         f"{format_term(s.after, verbose)}")
        return "\n".join(lines)


def initial_term(g: Graph, p) -> Term:
    check_pattern(p)
    return _solve(pattern_term(p), Lit("Som", identity_set(g)))


def step(t, gen: FreshVarGen, lenient: bool = False):
    """One gql-narrowing step: ``t[sigma(rhs)↓gq]_u`` at the unique redex ``u``."""
    found = all_redexes(t)
    if not found:
        raise StuckTerm("no redex: the term is in normal form")
    if len(found) > 1:
        where = ", ".join(f"{r.name}@{format_position(p)}" for p, r, _ in found)
        raise NonDeterminismDetected(f"several redexes: {where}")
    pos, rule, sigma = found[0]
    return replace(t, pos, normalize_gq(instantiate(rule.rhs, sigma), _Ctx(gen, lenient)))


def _run(t, gen, lenient, bound, check):
    trace = Trace(t)
    ctx = _Ctx(gen, lenient)
    while True:
        found = all_redexes(t)
        if len(found) > 1:
            where = ", ".join(f"{r.name}@{format_position(p)}" for p, r, _ in found)
            raise NonDeterminismDetected(f"several redexes: {where}")
        if not found:
            return trace
        pos, rule, sigma = found[0]
        redex = subterm(t, pos)
        contractum = normalize_gq(instantiate(rule.rhs, sigma), ctx)
        after = replace(t, pos, contractum)
        n = len(trace.steps) + 1
        dropped = measure_greater(measure(t), measure(after))
        trace.steps.append(Step(n, t, pos, rule.name, after, len(found), dropped))
        if check:
            if not measure_greater(measure(redex), measure(contractum)):
                raise TerminationViolation(f"redex measure did not decrease at step {n} ({rule.name})")
            if not measure_greater(global_measure(t), global_measure(after)):
                raise TerminationViolation(f"term measure did not decrease at step {n} ({rule.name})")
        if n > bound:
            raise TerminationViolation(f"derivation exceeded its bound of {bound} steps")
        t = after


def _is_terminal(t) -> bool:
    return (isinstance(t, Term) and t.head == "Config" and t.args[0] == EMPTY_T
            and isinstance(t.args[1], Lit) and t.args[1].sort == "Som")


def derive(g: Graph, p, gen: FreshVarGen = None, lenient: bool = False, check: bool = True):
    """Narrow ``Solve(<P | i_G>)`` to a terminal configuration.

    Returns the final match set and the full trace. With ``check`` the
    termination measure is asserted to decrease at every step.
    """
    t = initial_term(g, p)
    if gen is None:
        gen = FreshVarGen()
    gen.reserve(g.variables | pattern_vars(p))
    trace = _run(t, gen, lenient, step_bound(p), check)
    final = trace.final
    if not _is_terminal(final):
        raise StuckTerm(f"normal form is not a terminal configuration: {format_term(final)}")
    return final.args[1].value, trace


def solve_query(q, g: Graph, gen: FreshVarGen = None, lenient: bool = False, check: bool = True):
    """Run the query rules: wrap, derive, then display. Returns ``(result, trace)``."""
    check_query(q)
    if gen is None:
        gen = FreshVarGen()
    gen.reserve(g.variables | {x for x in query_labels(q) if hasattr(x, "name")})
    t = T("Solve_Q", query_term(q), Lit("Gr", g))
    trace = _run(t, gen, lenient, query_step_bound(q), check)
    final = trace.final
    if not (isinstance(final, Lit) and final.sort == "Result"):
        raise StuckTerm(f"query derivation did not produce a result: {format_term(final)}")
    return final.value, trace


# -- rendering -------------------------------------------------------------------

def _format_matchset(ms: MatchSet, verbose: bool) -> str:
    if not verbose:
        return f"{{{len(ms)} match{'es' if len(ms) != 1 else ''}}}"
    from .syntax import format_label
    cols = ms.columns
    rows = ["(" + ", ".join(format_label(m[c]) for c in cols) + ")" for m in ms.sorted()]
    head = ", ".join(str(c) for c in cols)
    return f"Tab[{head}: {'; '.join(rows)}]"


def format_term(t, verbose: bool = False) -> str:
    from .syntax import format_graph_block, format_label, format_pattern
    if isinstance(t, Lit):
        if t.sort == "Som":
            return _format_matchset(t.value, verbose)
        if t.sort == "Gr":
            return format_graph_block(t.value)
        if t.sort == "Exp":
            return format_expr(t.value)
        if t.sort == "Var":
            return format_label(t.value)
        if t.sort == "Vars":
            return ", ".join(format_label(v) for v in t.value)
        return "Result"
    if t.head in PATTERN_HEADS:
        return "□" if t.head == "EMPTY" else format_pattern(term_pattern(t))
    if t.head == "Config":
        return f"⟨{format_term(t.args[0], verbose)} | {format_term(t.args[1], verbose)}⟩"
    if t.head in QUERY_HEADS:
        from .syntax import format_query
        q = {"CONSTRUCT": lambda a: Construct(a[0].value, term_pattern(a[1])),
             "SELECT": lambda a: Select(a[0].value, term_pattern(a[1])),
             "CONSELECT": lambda a: Conselect(a[0].value, a[1].value, term_pattern(a[2]))}[t.head](t.args)
        return format_query(q)
    return f"{t.head}(" + ", ".join(format_term(a, verbose) for a in t.args) + ")"
