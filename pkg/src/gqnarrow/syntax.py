"""Surface syntax: a tokenizer, recursive-descent parsers and canonical printers.

Printers produce the canonical form; parsing a canonical text and printing it
again gives back the same text.
"""
from __future__ import annotations

import json
import re

from .errors import GQLSyntaxError
from .expressions import AGG_FUNCS, Agg, Binary, Unary, format_expr
from .graph import Const, Graph, Triple, Var, format_label, label_key
from .patterns import Basic, Bind, Build, Empty, Filter, Join, Union
from .queries import Conselect, Construct, Select, SolutionTable

KEYWORDS = frozenset({
    "CONSTRUCT", "SELECT", "CONSELECT", "WHERE", "BASIC", "JOIN", "UNION", "BIND", "AS",
    "FILTER", "BUILD", "EMPTY", "NOT", "AND", "OR", "BY", "DISTINCT",
}) | frozenset(AGG_FUNCS)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<var>\?\w+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}().,|+\-*/=<>×])
""", re.VERBOSE)


class Token:
    __slots__ = ("kind", "text", "line", "col", "end")

    def __init__(self, kind, text, line, col, end):
        self.kind, self.text, self.line, self.col, self.end = kind, text, line, col, end

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text: str) -> list:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise GQLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "ident" and tok in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, tok, line, pos - line_start + 1, m.end()))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1, pos))
    return out


def _number(text: str):
    if "." in text or "e" in text or "E" in text:
        return float(text)
    return int(text)


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = tok.text if tok.kind != "eof" else "end of input"
        raise GQLSyntaxError(f"{msg}, found {found!r}", tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.kind in ("kw", "punct", "ident") and self.tok.text == text

    def eat(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")

    # -- labels and graphs ----------------------------------------------------

    def _negative_literal(self) -> bool:
        nxt = self.peek()
        return self.at("-") and nxt.kind == "num" and nxt.line == self.tok.line and nxt.col == self.tok.col + 1

    def label(self):
        t = self.tok
        if t.kind == "var":
            self.i += 1
            return Var(t.text[1:])
        if t.kind == "num":
            self.i += 1
            return Const(_number(t.text))
        if t.kind == "str":
            self.i += 1
            return Const(json.loads(t.text))
        if t.kind == "ident":
            self.i += 1
            if t.text == "true":
                return Const(True)
            if t.text == "false":
                return Const(False)
            return Const(t.text)
        if self._negative_literal():
            self.i += 2
            return Const(-_number(self.toks[self.i - 1].text))
        self.error("expected a label")

    def graph_items(self, closer) -> Graph:
        triples, nodes = [], []
        while self.tok.kind != "eof" and not self.at(closer):
            if self.tok.kind == "ident" and self.tok.text == "node":
                self.i += 1
                nodes.append(self.label())
            else:
                s = self.label()
                p = self.label()
                o = self.label()
                triples.append(Triple(s, p, o))
            if not self.eat(".") and not self.at(closer) and self.tok.kind != "eof":
                self.error("expected '.' after a graph item")
        return Graph(triples, nodes)

    def graph_block(self) -> Graph:
        self.expect("{")
        g = self.graph_items("}")
        self.expect("}")
        return g

    def variable(self) -> Var:
        if self.tok.kind != "var":
            self.error("expected a variable")
        t = self.tok
        self.i += 1
        return Var(t.text[1:])

    # -- expressions -----------------------------------------------------------

    def expr(self):
        e = self.and_expr()
        while self.eat("OR"):
            e = Binary("OR", e, self.and_expr())
        return e

    def and_expr(self):
        e = self.cmp_expr()
        while self.eat("AND"):
            e = Binary("AND", e, self.cmp_expr())
        return e

    def cmp_expr(self):
        e = self.add_expr()
        if self.tok.kind == "punct" and self.tok.text in "=<>":
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.add_expr())
            if self.tok.kind == "punct" and self.tok.text in "=<>":
                self.error("comparisons do not chain; add parentheses")
        return e

    def add_expr(self):
        e = self.mul_expr()
        while self.tok.kind == "punct" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.mul_expr())
        return e

    def mul_expr(self):
        e = self.unary_expr()
        while self.tok.kind == "punct" and self.tok.text in ("*", "×", "/"):
            op = "/" if self.tok.text == "/" else "*"
            self.i += 1
            e = Binary(op, e, self.unary_expr())
        return e

    def unary_expr(self):
        if self.eat("NOT"):
            return Unary("NOT", self.unary_expr())
        if self.at("-") and not self._negative_literal():
            self.i += 1
            return Unary("-", self.unary_expr())
        return self.primary_expr()

    def primary_expr(self):
        t = self.tok
        if self.eat("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "kw" and t.text in AGG_FUNCS:
            self.i += 1
            self.expect("(")
            distinct = self.eat("DISTINCT")
            arg = self.expr()
            by = None
            if self.eat("BY"):
                by = [self.expr()]
                while self.eat(","):
                    by.append(self.expr())
            self.expect(")")
            return Agg(t.text, arg, distinct, tuple(by) if by else None)
        if t.kind in ("var", "num", "str", "ident") or self._negative_literal():
            return self.label()
        self.error("expected an expression")

    # -- patterns and queries ------------------------------------------------------

    def pattern(self):
        p = self.postfix_pattern()
        op = None
        while self.at("JOIN") or self.at("UNION"):
            t = self.tok
            if op is not None and t.text != op:
                self.error("JOIN and UNION cannot be mixed without parentheses", t)
            op = t.text
            self.i += 1
            rhs = self.postfix_pattern()
            p = Join(p, rhs) if op == "JOIN" else Union(p, rhs)
        return p

    def postfix_pattern(self):
        p = self.primary_pattern()
        while True:
            if self.eat("BIND"):
                e = self.expr()
                self.expect("AS")
                p = Bind(p, e, self.variable())
            elif self.eat("FILTER"):
                p = Filter(p, self.expr())
            elif self.eat("BUILD"):
                p = Build(p, self.graph_block())
            else:
                return p

    def primary_pattern(self):
        if self.eat("EMPTY"):
            return Empty()
        if self.eat("BASIC"):
            return Basic(self.graph_block())
        if self.eat("("):
            p = self.pattern()
            self.expect(")")
            return p
        self.error("expected a pattern (EMPTY, BASIC or '(')")

    def var_list(self):
        out = [self.variable()]
        while True:
            if self.at(",") and self.peek().kind == "var":
                self.i += 1
            if self.tok.kind != "var":
                return tuple(out)
            out.append(self.variable())

    def query(self):
        if self.eat("CONSTRUCT"):
            r = self.graph_block()
            self.expect("WHERE")
            return Construct(r, self.pattern())
        if self.eat("SELECT"):
            s = self.var_list()
            self.expect("WHERE")
            return Select(s, self.pattern())
        if self.eat("CONSELECT"):
            s = self.var_list()
            self.eat(",")
            r = self.graph_block()
            self.expect("WHERE")
            return Conselect(s, r, self.pattern())
        self.error("expected CONSTRUCT, SELECT or CONSELECT")


def _whole(text, method, *args):
    p = Parser(text)
    out = getattr(p, method)(*args)
    p.expect_eof()
    return out


def parse_label(text: str):
    return _whole(text, "label")


def parse_graph(text: str) -> Graph:
    """Parse the triple file format (``s p o .`` and ``node n .`` lines)."""
    return _whole(text, "graph_items", None)


def parse_expr(text: str):
    return _whole(text, "expr")


def parse_pattern(text: str):
    return _whole(text, "pattern")


def parse_query(text: str):
    return _whole(text, "query")


def parse_table(text: str) -> SolutionTable:
    """Parse the grid printed by :func:`format_table`."""
    lines = [ln for ln in text.split("\n") if ln.strip() and not ln.lstrip().startswith("+")]
    if not lines:
        raise GQLSyntaxError("empty table", 1, 1)
    rows = []
    for n, ln in enumerate(lines):
        p = Parser(ln)
        p.expect("|")
        cells = []
        while p.tok.kind != "eof":
            cells.append(p.variable() if n == 0 else p.label())
            p.expect("|")
        rows.append(tuple(cells))
    columns, body = rows[0], rows[1:]
    for r in body:
        if len(r) != len(columns):
            raise GQLSyntaxError("row width differs from header", None, None)
    return SolutionTable(columns, tuple(body))


# -- printers -----------------------------------------------------------------------

def _graph_items(g: Graph) -> list:
    items = [str(t) for t in g.sorted_triples()]
    items += ["node " + format_label(n) + " ." for n in sorted(g.isolated_nodes(), key=label_key)]
    return items


def format_graph(g: Graph) -> str:
    """Triple file format: sorted triples, then isolated nodes, one per line."""
    return "".join(line + "\n" for line in _graph_items(g))


def format_graph_block(g: Graph) -> str:
    items = _graph_items(g)
    return "{ " + " ".join(items) + " }" if items else "{ }"


def format_pattern(p) -> str:
    if isinstance(p, Empty):
        return "EMPTY"
    if isinstance(p, Basic):
        return "BASIC " + format_graph_block(p.graph)
    if isinstance(p, Join):
        return f"({format_pattern(p.left)} JOIN {format_pattern(p.right)})"
    if isinstance(p, Union):
        return f"({format_pattern(p.left)} UNION {format_pattern(p.right)})"
    if isinstance(p, Bind):
        return f"{format_pattern(p.sub)} BIND {format_expr(p.expr)} AS {format_label(p.var)}"
    if isinstance(p, Filter):
        return f"{format_pattern(p.sub)} FILTER {format_expr(p.expr)}"
    if isinstance(p, Build):
        return f"{format_pattern(p.sub)} BUILD {format_graph_block(p.graph)}"
    raise TypeError(f"not a pattern: {p!r}")


def format_query(q) -> str:
    if isinstance(q, Construct):
        return f"CONSTRUCT {format_graph_block(q.template)} WHERE {format_pattern(q.where)}"
    cols = ", ".join(format_label(v) for v in q.variables)
    if isinstance(q, Select):
        return f"SELECT {cols} WHERE {format_pattern(q.where)}"
    return f"CONSELECT {cols}, {format_graph_block(q.template)} WHERE {format_pattern(q.where)}"


def format_table(columns, rows) -> str:
    """ASCII grid with a ``?name`` header row; rows are printed in the given order."""
    head = [format_label(c) for c in columns]
    body = [[format_label(v) for v in r] for r in rows]
    widths = [max([len(h)] + [len(r[j]) for r in body]) for j, h in enumerate(head)]
    rule = "+" + "+".join("-" * (w + 2) for w in widths) + "+"

    def line(cells):
        return "|" + "|".join(f" {c.ljust(w)} " for c, w in zip(cells, widths)) + "|"

    out = [rule, line(head), rule]
    out += [line(r) for r in body]
    if body:
        out.append(rule)
    return "\n".join(out) + "\n"


def format_solution_table(t: SolutionTable) -> str:
    return format_table(t.columns, t.rows)


def format_pair(g: Graph, t: SolutionTable) -> str:
    return format_graph(g) + "\n" + format_solution_table(t)


def format_result(result) -> str:
    from .queries import GraphResult, TableResult
    if isinstance(result, GraphResult):
        return format_graph(result.graph)
    if isinstance(result, TableResult):
        return format_solution_table(result.table)
    return format_pair(result.graph, result.table)


# -- JSON ------------------------------------------------------------------------------

def label_to_json(x):
    """Constants become native JSON values; variables become ``{"var": name}``."""
    if isinstance(x, Var):
        return {"var": x.name}
    return x.value


def label_from_json(v):
    if isinstance(v, dict):
        return Var(v["var"])
    return Const(v)


def graph_to_json(g: Graph) -> dict:
    return {
        "nodes": [label_to_json(n) for n in sorted(g.nodes, key=label_key)],
        "triples": [[label_to_json(x) for x in t] for t in g.sorted_triples()],
    }


def table_to_json(t: SolutionTable) -> dict:
    return {
        "columns": [format_label(c) for c in t.columns],
        "rows": [[label_to_json(v) for v in r] for r in t.rows],
    }


def result_to_json(result) -> dict:
    from .queries import GraphResult, TableResult
    if isinstance(result, GraphResult):
        return {"graph": graph_to_json(result.graph)}
    if isinstance(result, TableResult):
        return {"table": table_to_json(result.table)}
    return {"graph": graph_to_json(result.graph), "table": table_to_json(result.table)}


def trace_to_json(trace) -> dict:
    from .narrowing import format_position
    return {"steps": [{"rule": s.rule, "position": format_position(s.position)} for s in trace.steps]}
