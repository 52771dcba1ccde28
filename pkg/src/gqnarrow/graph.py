"""Generalized RDF graphs: labels, triples and graphs with isolated nodes.

Labels are either constants (ints, floats, strings, booleans) or variables.
A graph is a set of nodes plus a set of triples whose subjects and objects are
nodes; predicates need not be nodes.
"""
from __future__ import annotations

import json
import math
import re
from typing import Iterable, NamedTuple, Union

# Words that cannot be printed as bare identifiers because the parser reads
# them as keywords or literals.
RESERVED_WORDS = frozenset({
    "CONSTRUCT", "SELECT", "CONSELECT", "WHERE", "BASIC", "JOIN", "UNION",
    "BIND", "AS", "FILTER", "BUILD", "EMPTY", "NOT", "AND", "OR", "BY",
    "DISTINCT", "COUNT", "SUM", "AVG", "MIN", "MAX", "true", "false", "node",
})

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_VARNAME = re.compile(r"\w+\Z")


class Const:
    """A constant label. Identity is syntactic: ``Const(3) != Const(3.0)``."""

    __slots__ = ("value",)

    def __init__(self, value):
        if not isinstance(value, (bool, int, float, str)):
            raise TypeError(f"unsupported constant value {value!r}")
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError("non-finite floats are not constants")
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Const is immutable")

    def __eq__(self, other):
        return (isinstance(other, Const)
                and type(self.value) is type(other.value)
                and self.value == other.value)

    def __hash__(self):
        return hash((type(self.value).__name__, self.value))

    def __repr__(self):
        return f"Const({self.value!r})"

    def __str__(self):
        return format_label(self)

    def __reduce__(self):
        return (Const, (self.value,))


class Var:
    """A variable label, written ``?name`` in surface syntax."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        if not isinstance(name, str) or not _VARNAME.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("Var is immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return hash(("?", self.name))

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return "?" + self.name

    def __reduce__(self):
        return (Var, (self.name,))


Label = Union[Const, Var]


def is_var(label) -> bool:
    return isinstance(label, Var)


def format_label(label: Label) -> str:
    """Surface form of a label; parsing it back yields an equal label."""
    if isinstance(label, Var):
        return "?" + label.name
    v = label.value
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if _IDENT.match(v) and v not in RESERVED_WORDS:
        return v
    return json.dumps(v, ensure_ascii=False)


def label_key(label: Label):
    """Total order on labels: constants first, then printed form."""
    return (1 if isinstance(label, Var) else 0, format_label(label))


def as_label(x) -> Label:
    """Coerce a python value or ``"?name"`` string into a label."""
    if isinstance(x, (Const, Var)):
        return x
    if isinstance(x, str) and x.startswith("?"):
        return Var(x[1:])
    return Const(x)


class Triple(NamedTuple):
    subject: Label
    predicate: Label
    object: Label

    def key(self):
        return (label_key(self.subject), label_key(self.predicate), label_key(self.object))

    def __str__(self):
        return " ".join(format_label(x) for x in self) + " ."


class Graph:
    """Immutable generalized RDF graph.

    Subjects and objects of the given triples are added to the node set
    automatically, so ``Graph(triples)`` is always well formed.
    """

    __slots__ = ("nodes", "triples", "_hash")

    def __init__(self, triples: Iterable = (), nodes: Iterable = ()):
        ts = frozenset(t if isinstance(t, Triple) else Triple(*map(as_label, t))
                       for t in triples)
        ns = set(as_label(n) for n in nodes)
        for t in ts:
            ns.add(t.subject)
            ns.add(t.object)
        object.__setattr__(self, "triples", ts)
        object.__setattr__(self, "nodes", frozenset(ns))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (self.triples, self.nodes))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.triples == other.triples and self.nodes == other.nodes

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.nodes, self.triples))
            object.__setattr__(self, "_hash", h)
        return h

    def __or__(self, other: "Graph") -> "Graph":
        return graph_union(self, other)

    def __le__(self, other: "Graph") -> bool:
        return is_subgraph(self, other)

    def __bool__(self):
        return bool(self.nodes) or bool(self.triples)

    def __len__(self):
        return len(self.triples)

    def __repr__(self):
        items = [str(t)[:-2] for t in self.sorted_triples()]
        items += ["node " + format_label(n) for n in sorted(self.isolated_nodes(), key=label_key)]
        return "Graph{" + " . ".join(items) + "}"

    @property
    def predicates(self) -> frozenset:
        return frozenset(t.predicate for t in self.triples)

    @property
    def labels(self) -> frozenset:
        return self.nodes | self.predicates

    @property
    def variables(self) -> frozenset:
        return frozenset(x for x in self.labels if isinstance(x, Var))

    @property
    def constants(self) -> frozenset:
        return frozenset(x for x in self.labels if isinstance(x, Const))

    def isolated_nodes(self) -> frozenset:
        used = set()
        for t in self.triples:
            used.add(t.subject)
            used.add(t.object)
        return self.nodes - used

    def sorted_triples(self) -> list:
        return sorted(self.triples, key=Triple.key)

    def rename(self, mapping) -> "Graph":
        """Apply a label substitution (dict) to every node and triple."""
        f = lambda x: mapping.get(x, x)
        return Graph((Triple(f(s), f(p), f(o)) for s, p, o in self.triples),
                     (f(n) for n in self.nodes))


EMPTY_GRAPH = Graph()


def graph_union(g1: Graph, g2: Graph) -> Graph:
    if not g2.nodes and not g2.triples:
        return g1
    if not g1.nodes and not g1.triples:
        return g2
    return Graph(g1.triples | g2.triples, g1.nodes | g2.nodes)


def is_subgraph(g1: Graph, g2: Graph) -> bool:
    return g1.nodes <= g2.nodes and g1.triples <= g2.triples


def isolated_nodes(g: Graph) -> frozenset:
    return g.isolated_nodes()


def graph_vars(g: Graph) -> frozenset:
    return g.variables


def graph_consts(g: Graph) -> frozenset:
    return g.constants
