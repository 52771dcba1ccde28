"""CONSTRUCT, SELECT and CONSELECT queries and the extraction of their results.

Each query is reduced to a BUILD pattern; its result is read off the value of
that pattern.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union as _Either

from .errors import EmptySelectList, InvalidPattern
from .graph import Const, Graph, Triple, Var, graph_union, label_key
from .matching import MatchSet, image
from .patterns import Build, check_pattern, pattern_labels, scope_graph


@dataclass(frozen=True)
class Construct:
    template: Graph
    where: object


@dataclass(frozen=True)
class Select:
    variables: tuple
    where: object


@dataclass(frozen=True)
class Conselect:
    variables: tuple
    template: Graph
    where: object


Query = _Either[Construct, Select, Conselect]


@dataclass(frozen=True)
class SolutionTable:
    """A multiset of solutions; rows are kept in canonical order, duplicates included."""

    columns: tuple
    rows: tuple

    @classmethod
    def of(cls, columns, rows):
        rows = sorted((tuple(r) for r in rows), key=lambda r: tuple(label_key(v) for v in r))
        return cls(tuple(columns), tuple(rows))

    def __str__(self):
        from .syntax import format_table
        return format_table(self.columns, self.rows)


@dataclass(frozen=True)
class GraphResult:
    graph: Graph


@dataclass(frozen=True)
class TableResult:
    table: SolutionTable


@dataclass(frozen=True)
class PairResult:
    graph: Graph
    table: SolutionTable


QueryResult = _Either[GraphResult, TableResult, PairResult]


def query_labels(q) -> frozenset:
    out = set(pattern_labels(q.where))
    if not isinstance(q, Construct):
        out |= set(q.variables)
    if not isinstance(q, Select):
        out |= q.template.labels
    return frozenset(out)


def graph_of_vars(variables, avoid=()) -> tuple:
    """Star-shaped graph ``{(?r, c_j, s_j)}`` encoding a list of variables.

    Returns ``(graph, row_variable)``. The row variable and the column
    constants ``"__col_<name>"`` are chosen to avoid every label in ``avoid``.
    """
    variables = tuple(variables)
    if not variables:
        raise EmptySelectList("SELECT needs at least one variable")
    if len(set(variables)) != len(variables):
        raise EmptySelectList("SELECT variables must be distinct")
    avoid = set(avoid) | set(variables)
    row = Var("__row")
    k = 0
    while row in avoid:
        k += 1
        row = Var(f"__row{k}")
    triples = []
    for v in variables:
        col = Const(f"__col_{v.name}")
        while col in avoid:
            col = Const(col.value + "_")
        avoid.add(col)
        triples.append(Triple(row, col, v))
    return Graph(triples), row


def check_query(q):
    check_pattern(q.where)
    if not isinstance(q, Construct):
        if not q.variables:
            raise EmptySelectList("SELECT needs at least one variable")
        if len(set(q.variables)) != len(q.variables):
            raise InvalidPattern(["SELECT variables must be distinct"])
        scope = scope_graph(q.where).variables
        loose = [v for v in q.variables if v not in scope]
        if loose:
            names = ", ".join(str(v) for v in loose)
            raise InvalidPattern([f"selected variables are not in scope: {names}"])


def select_graph(q) -> Graph:
    g, _ = graph_of_vars(q.variables, query_labels(q))
    return g


def wrapped_pattern(q):
    """The BUILD pattern whose value determines the result of ``q``."""
    if isinstance(q, Construct):
        return Build(q.where, q.template)
    if isinstance(q, Select):
        return Build(q.where, select_graph(q))
    return Build(q.where, graph_union(select_graph(q), q.template))


def _table(variables, ms: MatchSet) -> SolutionTable:
    return SolutionTable.of(variables, (tuple(m[v] for v in variables) for m in ms.sorted()))


def print_construct(template: Graph, ms: MatchSet) -> GraphResult:
    return GraphResult(image(ms, template))


def print_select(variables, ms: MatchSet) -> TableResult:
    return TableResult(_table(variables, ms))


def print_conselect(variables, template: Graph, ms: MatchSet) -> PairResult:
    return PairResult(image(ms, template), _table(variables, ms))


def extract_result(q, ms: MatchSet):
    if isinstance(q, Construct):
        return print_construct(q.template, ms)
    if isinstance(q, Select):
        return print_select(q.variables, ms)
    return print_conselect(q.variables, q.template, ms)
