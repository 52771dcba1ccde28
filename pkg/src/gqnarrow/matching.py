"""Matches (constant-fixing graph homomorphisms) and homogeneous sets of them."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import IncompatibleMatches, SourceMismatch, UnboundVariable
from .graph import EMPTY_GRAPH, Const, Graph, Label, Triple, Var, format_label, graph_union, label_key


def _items(binding) -> tuple:
    pairs = binding.items() if isinstance(binding, Mapping) else binding
    return tuple(sorted(pairs, key=lambda kv: label_key(kv[0])))


class Match:
    """A match ``source -> target`` given by its values on the source variables.

    Constants are fixed, so the variable assignment determines the whole
    label function.
    """

    __slots__ = ("source", "target", "_items", "_map", "_hash")

    def __init__(self, source: Graph, target: Graph, binding):
        items = binding if isinstance(binding, tuple) else _items(binding)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_map", dict(items))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Match is immutable")

    def __call__(self, label: Label) -> Label:
        if isinstance(label, Var):
            try:
                return self._map[label]
            except KeyError:
                raise UnboundVariable(f"{label} is not a variable of the match source") from None
        return label

    def __getitem__(self, var: Var) -> Label:
        return self._map[var]

    def __eq__(self, other):
        if not isinstance(other, Match):
            return NotImplemented
        return (self._items == other._items and self.source == other.source
                and self.target == other.target)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self._items, self.source, self.target))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        inner = ", ".join(f"{k}->{format_label(v)}" for k, v in self._items)
        return f"Match({inner})"

    @property
    def assignment(self) -> dict:
        return dict(self._map)

    @property
    def items(self) -> tuple:
        return self._items

    def row_key(self):
        return tuple(label_key(v) for _, v in self._items)

    def image(self, graph: Graph) -> Graph:
        f = self
        return Graph((Triple(f(s), f(p), f(o)) for s, p, o in graph.triples),
                     (f(n) for n in graph.nodes))

    def retarget(self, target: Graph) -> "Match":
        return Match(self.source, target, self._items)

    def is_valid(self) -> bool:
        """Check the homomorphism conditions directly."""
        if set(self._map) != set(self.source.variables):
            return False
        if any(self(n) not in self.target.nodes for n in self.source.nodes):
            return False
        return all(Triple(self(s), self(p), self(o)) in self.target.triples
                   for s, p, o in self.source.triples)


class MatchSet:
    """A homogeneous set of matches ``source => target``."""

    __slots__ = ("source", "target", "_rows", "_hash")

    def __init__(self, source: Graph, target: Graph, matches: Iterable = ()):
        cols = source.variables
        rows = set()
        for m in matches:
            if isinstance(m, Match):
                if m.source != source:
                    raise SourceMismatch("match source differs from the set source")
                items = m.items
            else:
                items = _items(m)
            if len(items) != len(cols) or any(k not in cols for k, _ in items):
                raise SourceMismatch("match domain differs from the source variables")
            rows.add(items)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "_rows", frozenset(rows))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("MatchSet is immutable")

    @classmethod
    def _raw(cls, source, target, rows) -> "MatchSet":
        ms = object.__new__(cls)
        object.__setattr__(ms, "source", source)
        object.__setattr__(ms, "target", target)
        object.__setattr__(ms, "_rows", frozenset(rows))
        object.__setattr__(ms, "_hash", None)
        return ms

    def __eq__(self, other):
        if not isinstance(other, MatchSet):
            return NotImplemented
        return (self._rows == other._rows and self.source == other.source
                and self.target == other.target)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self._rows, self.source, self.target))
            object.__setattr__(self, "_hash", h)
        return h

    def __len__(self):
        return len(self._rows)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, m):
        return (isinstance(m, Match) and m.source == self.source
                and m.target == self.target and m.items in self._rows)

    def __repr__(self):
        return f"MatchSet({len(self)} matches, columns={[str(v) for v in self.columns]})"

    @property
    def columns(self) -> list:
        return sorted(self.source.variables, key=label_key)

    @property
    def rows(self) -> frozenset:
        return self._rows

    @property
    def members(self) -> frozenset:
        return frozenset(Match(self.source, self.target, r) for r in self._rows)

    def sorted(self) -> list:
        """Members in canonical order (lexicographic over printed labels)."""
        rows = sorted(self._rows, key=lambda r: tuple(label_key(v) for _, v in r))
        return [Match(self.source, self.target, r) for r in rows]

    def retarget(self, target: Graph) -> "MatchSet":
        return MatchSet._raw(self.source, target, self._rows)


def identity_set(g: Graph) -> MatchSet:
    """``Match(empty, G)``: the single inclusion of the empty graph into ``g``."""
    return MatchSet._raw(EMPTY_GRAPH, g, [()])


def empty_set(g: Graph) -> MatchSet:
    """The empty subset of ``Match(empty, G)``."""
    return MatchSet._raw(EMPTY_GRAPH, g, [])


class FreshVarGen:
    """Sequential source of fresh variables ``?_f1, ?_f2, ...``.

    Names listed as reserved (every variable of the graphs and patterns of the
    current run) are skipped. ``var_for(m, x)`` is memoized so each
    (match, variable) pair gets exactly one fresh variable.
    """

    def __init__(self, prefix: str = "_f", reserved: Iterable = ()):
        self.prefix = prefix
        self.counter = 0
        self.reserved = set()
        self._memo = {}
        self.reserve(reserved)

    def reserve(self, names: Iterable):
        for n in names:
            self.reserved.add(n.name if isinstance(n, Var) else str(n))

    def fresh(self) -> Var:
        while True:
            self.counter += 1
            name = f"{self.prefix}{self.counter}"
            if name not in self.reserved:
                self.reserved.add(name)
                return Var(name)

    def var_for(self, m: Match, x: Var) -> Var:
        key = (m, x)
        v = self._memo.get(key)
        if v is None:
            v = self._memo[key] = self.fresh()
        return v


def enumerate_matches(l: Graph, g: Graph) -> MatchSet:
    """All constant-fixing homomorphisms from ``l`` to ``g``.

    Backtracking over the source triples, always extending with the triple
    that currently has the fewest candidate images.
    """
    for c in l.nodes:
        if isinstance(c, Const) and c not in g.nodes:
            return MatchSet._raw(l, g, [])

    index = defaultdict(list)
    all_triples = g.sorted_triples()
    for t in all_triples:
        for pos in range(3):
            index[pos, t[pos]].append(t)

    def fixed(label, binding):
        if isinstance(label, Var):
            return binding.get(label)
        return label

    def candidates(t, binding):
        best = all_triples
        for pos in range(3):
            v = fixed(t[pos], binding)
            if v is not None:
                lst = index.get((pos, v), ())
                if len(lst) < len(best):
                    best = lst
                    if not best:
                        break
        return best

    def extend(t, image, binding):
        new = None
        for a, b in zip(t, image):
            if isinstance(a, Var):
                cur = binding.get(a) if new is None else new.get(a, binding.get(a))
                if cur is None:
                    if new is None:
                        new = {}
                    new[a] = b
                elif cur != b:
                    return None
            elif a != b:
                return None
        return new or {}

    source_vars = sorted(l.variables, key=label_key)
    free_nodes = [n for n in sorted(l.nodes, key=label_key) if isinstance(n, Var)]
    target_nodes = sorted(g.nodes, key=label_key)
    results = []

    def finish(binding):
        unbound = [x for x in free_nodes if x not in binding]
        def rec(i, b):
            if i == len(unbound):
                if all(fixed(n, b) in g.nodes for n in l.nodes):
                    results.append(tuple((x, b[x]) for x in source_vars))
                return
            x = unbound[i]
            for n in target_nodes:
                b[x] = n
                rec(i + 1, b)
            b.pop(x, None)
        rec(0, binding)

    def search(remaining, binding):
        if not remaining:
            finish(dict(binding))
            return
        best_i, best_c = 0, None
        for i, t in enumerate(remaining):
            c = candidates(t, binding)
            if best_c is None or len(c) < len(best_c):
                best_i, best_c = i, c
                if not c:
                    return
        t = remaining[best_i]
        rest = remaining[:best_i] + remaining[best_i + 1:]
        for image in best_c:
            new = extend(t, image, binding)
            if new is None:
                continue
            binding.update(new)
            search(rest, binding)
            for k in new:
                del binding[k]

    search(sorted(l.triples, key=Triple.key), {})
    return MatchSet._raw(l, g, results)


def compatible(m1: Match, m2: Match) -> bool:
    common = m1.source.variables & m2.source.variables
    return all(m1[x] == m2[x] for x in common)


def join_match(m1: Match, m2: Match) -> Match:
    if not compatible(m1, m2):
        raise IncompatibleMatches(f"{m1!r} and {m2!r} disagree on a shared variable")
    binding = m1.assignment
    binding.update(m2.assignment)
    return Match(graph_union(m1.source, m2.source), graph_union(m1.target, m2.target), binding)


def build_match(m: Match, r: Graph, gen: FreshVarGen) -> tuple:
    """``Build(m, R)`` and the image ``H`` of ``R`` under it.

    Variables of ``R`` shared with the source of ``m`` keep their value; the
    others are sent to fresh variables.
    """
    known = m.source.variables
    binding = {x: (m[x] if x in known else gen.var_for(m, x)) for x in r.variables}
    built = Match(r, m.target, binding)
    h = built.image(r)
    return Match(r, graph_union(m.target, h), built.items), h


def image(ms: MatchSet, sub: Graph) -> Graph:
    if not (sub.nodes <= ms.source.nodes and sub.triples <= ms.source.triples):
        raise SourceMismatch("graph is not a subgraph of the match source")
    triples, nodes = set(), set()
    for m in ms.sorted():
        h = m.image(sub)
        triples |= h.triples
        nodes |= h.nodes
    return Graph(triples, nodes)


@dataclass(frozen=True)
class AssignmentTable:
    columns: tuple
    rows: tuple

    def __str__(self):
        from .syntax import format_table
        return format_table(self.columns, self.rows)


def tab(ms: MatchSet) -> AssignmentTable:
    cols = tuple(ms.columns)
    rows = tuple(tuple(m[c] for c in cols) for m in ms.sorted())
    return AssignmentTable(cols, rows)


def _structure(ms: MatchSet, fixed):
    """Facts describing a match set with renameable variables exposed."""
    cols = ms.columns
    facts = {("row",) + tuple(m[c] for c in cols) for m in ms.sorted()}
    facts |= {("t",) + tuple(t) for t in ms.target.triples}
    facts |= {("n", n) for n in ms.target.nodes}
    free = set()
    for f in facts:
        free.update(x for x in f[1:] if isinstance(x, Var) and x not in fixed)
    return facts, free


def find_renaming(facts_a, free_a, facts_b, free_b):
    """Search a bijection ``free_a -> free_b`` sending ``facts_a`` onto ``facts_b``."""
    if len(facts_a) != len(facts_b) or len(free_a) != len(free_b):
        return None

    def mask(f, free):
        return tuple("*" if x in free else x for x in f)

    by_mask = defaultdict(list)
    for f in facts_b:
        by_mask[mask(f, free_b)].append(f)
    groups_a = defaultdict(int)
    for f in facts_a:
        groups_a[mask(f, free_a)] += 1
    if any(len(by_mask.get(k, ())) != n for k, n in groups_a.items()):
        return None

    pending = sorted(facts_a, key=lambda f: (sum(x in free_a for x in f), repr(f)))
    phi, used = {}, set()

    def bound_count(f):
        return sum(1 for x in f if x in free_a and x in phi)

    def rec(todo):
        if not todo:
            return True
        # prefer the fact whose renameable labels are most determined
        i = max(range(len(todo)), key=lambda k: (bound_count(todo[k]), -len(todo[k])))
        f = todo[i]
        rest = todo[:i] + todo[i + 1:]
        for g in by_mask[mask(f, free_a)]:
            added = []
            ok = True
            for x, y in zip(f, g):
                if x in free_a:
                    cur = phi.get(x)
                    if cur is None:
                        if y in used:
                            ok = False
                            break
                        phi[x] = y
                        used.add(y)
                        added.append(x)
                    elif cur != y:
                        ok = False
                        break
            if ok and rec(rest):
                return True
            for x in added:
                used.discard(phi.pop(x))
        return False

    return dict(phi) if rec(pending) else None


def equal_up_to_renaming(a: MatchSet, b: MatchSet, fixed: Iterable = ()) -> bool:
    """True when ``a`` and ``b`` coincide up to a bijective renaming of the
    variables occurring in their targets (variables in ``fixed`` excepted).

    Sources must be identical.
    """
    if a.source != b.source or len(a) != len(b):
        return False
    if a == b:
        return True
    fixed = set(fixed)
    fa, va = _structure(a, fixed)
    fb, vb = _structure(b, fixed)
    return find_renaming(fa, va, fb, vb) is not None
