"""Expressions over match sets, with aggregation and BY-grouping.

Atomic expressions are labels themselves: a ``Const`` evaluates to itself and
a ``Var`` to its image under the match. Values are labels, so a variable bound
to a fresh variable can flow through ``=`` comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import DivisionByZero, EmptyAggregate, EvaluationError, ExprTypeError, UnboundVariable
from .graph import Const, Var, format_label, label_key
from .matching import Match, MatchSet

UNARY_OPS = ("-", "NOT")
BINARY_OPS = ("+", "-", "*", "/", "=", ">", "<", "AND", "OR")
AGG_FUNCS = ("MAX", "MIN", "SUM", "AVG", "COUNT")


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")


@dataclass(frozen=True)
class Agg:
    """``func(arg)``, ``func(DISTINCT arg)`` or ``func(arg BY g1, ..., gk)``."""

    func: str
    arg: "Expr"
    distinct: bool = False
    by: Optional[tuple] = None

    def __post_init__(self):
        if self.func not in AGG_FUNCS:
            raise ValueError(f"unknown aggregate {self.func!r}")
        if self.by is not None:
            if not isinstance(self.by, tuple):
                object.__setattr__(self, "by", tuple(self.by))
            if not self.by:
                raise ValueError("a BY group must be a non-empty list of expressions")


Expr = Union[Const, Var, Unary, Binary, Agg]


def expr_vars(e) -> frozenset:
    """In-scope variables; the BY group of an aggregate does not contribute."""
    if isinstance(e, Var):
        return frozenset([e])
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Unary):
        return expr_vars(e.arg)
    if isinstance(e, Binary):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, Agg):
        return expr_vars(e.arg)
    raise TypeError(f"not an expression: {e!r}")


def all_vars(e) -> frozenset:
    """Every variable occurring anywhere in ``e``, group expressions included."""
    if isinstance(e, Agg) and e.by is not None:
        out = expr_vars(e.arg) | all_vars(e.arg)
        for g in e.by:
            out |= all_vars(g)
        return out
    if isinstance(e, Agg):
        return all_vars(e.arg)
    if isinstance(e, Unary):
        return all_vars(e.arg)
    if isinstance(e, Binary):
        return all_vars(e.left) | all_vars(e.right)
    return expr_vars(e)


def expr_problems(e) -> list:
    """Static problems: BY groups sharing variables with the aggregated expression."""
    out = []
    if isinstance(e, Agg):
        out += expr_problems(e.arg)
        if e.by is not None:
            inner = all_vars(e.arg)
            for g in e.by:
                out += expr_problems(g)
                clash = inner & all_vars(g)
                if clash:
                    names = ", ".join(sorted(str(v) for v in clash))
                    out.append(f"BY group shares variables with the aggregated expression: {names}")
    elif isinstance(e, Unary):
        out += expr_problems(e.arg)
    elif isinstance(e, Binary):
        out += expr_problems(e.left) + expr_problems(e.right)
    return out


def _is_num(c) -> bool:
    return isinstance(c, Const) and isinstance(c.value, (int, float)) and not isinstance(c.value, bool)


def _is_bool(c) -> bool:
    return isinstance(c, Const) and isinstance(c.value, bool)


def _is_str(c) -> bool:
    return isinstance(c, Const) and isinstance(c.value, str)


def _num(c, op):
    if not _is_num(c):
        raise ExprTypeError(f"{op} expects numbers, got {format_label(c)}")
    return c.value


def _bool(c, op):
    if not _is_bool(c):
        raise ExprTypeError(f"{op} expects booleans, got {format_label(c)}")
    return c.value


def apply_unary(op: str, v):
    if op == "-":
        return Const(-_num(v, op))
    return Const(not _bool(v, op))


def apply_binary(op: str, a, b):
    if op == "=":
        return Const(a == b)
    if op in ("AND", "OR"):
        x, y = _bool(a, op), _bool(b, op)
        return Const(x and y if op == "AND" else x or y)
    if op in ("<", ">"):
        if _is_num(a) and _is_num(b):
            x, y = a.value, b.value
        elif _is_str(a) and _is_str(b):
            x, y = a.value, b.value
        else:
            raise ExprTypeError(f"cannot compare {format_label(a)} {op} {format_label(b)}")
        return Const(x < y if op == "<" else x > y)
    x, y = _num(a, op), _num(b, op)
    if op == "/":
        if y == 0:
            raise DivisionByZero(f"{format_label(a)} / {format_label(b)}")
        return Const(x / y)
    both_int = isinstance(x, int) and isinstance(y, int)
    if not both_int:
        x, y = float(x), float(y)
    if op == "+":
        return Const(x + y)
    if op == "-":
        return Const(x - y)
    return Const(x * y)


def aggregate(func: str, values: list, distinct: bool = False):
    """Apply an aggregation function to a multiset (list) of labels."""
    if distinct:
        seen, uniq = set(), []
        for v in values:
            if v not in seen:
                seen.add(v)
                uniq.append(v)
        values = uniq
    if func == "COUNT":
        return Const(len(values))
    if func in ("SUM", "AVG"):
        nums = [_num(v, func) for v in values]
        if func == "SUM":
            if all(isinstance(n, int) for n in nums):
                return Const(sum(nums))
            return Const(float(sum(nums)))
        if not nums:
            raise EmptyAggregate("AVG over an empty multiset")
        return Const(sum(nums) / len(nums))
    if not values:
        raise EmptyAggregate(f"{func} over an empty multiset")
    if all(_is_num(v) for v in values) or all(_is_str(v) for v in values):
        pick = max if func == "MAX" else min
        return pick(values, key=lambda c: (c.value, label_key(c)))
    raise ExprTypeError(f"{func} over values of mixed or unordered types")


def _family(members: list, e) -> list:
    """Per-member values of ``e`` over ``members``; failures are returned, not raised."""
    if isinstance(e, Const):
        return [e] * len(members)
    if isinstance(e, Var):
        out = []
        for m in members:
            try:
                out.append(m(e))
            except UnboundVariable as exc:
                out.append(exc)
        return out
    if isinstance(e, Unary):
        return [_guard(apply_unary, e.op, v) for v in _family(members, e.arg)]
    if isinstance(e, Binary):
        ls, rs = _family(members, e.left), _family(members, e.right)
        return [_guard(apply_binary, e.op, a, b) for a, b in zip(ls, rs)]
    if isinstance(e, Agg):
        if e.by is None:
            value = _aggregate_all(members, e)
            return [value] * len(members)
        keys = _group_keys(members, e.by)
        classes = {}
        for m, k in zip(members, keys):
            if not isinstance(k, EvaluationError):
                classes.setdefault(k, []).append(m)
        results = {k: _aggregate_all(cls, e) for k, cls in classes.items()}
        return [k if isinstance(k, EvaluationError) else results[k] for k in keys]
    raise TypeError(f"not an expression: {e!r}")


def _guard(fn, *args):
    for a in args[1:]:
        if isinstance(a, EvaluationError):
            return a
    try:
        return fn(*args)
    except EvaluationError as exc:
        return exc


def _aggregate_all(members, e):
    vals = _family(members, e.arg)
    for v in vals:
        if isinstance(v, EvaluationError):
            return v
    try:
        return aggregate(e.func, vals, e.distinct)
    except EvaluationError as exc:
        return exc


def _group_keys(members, group) -> list:
    cols = [_family(members, g) for g in group]
    keys = []
    for row in zip(*cols):
        err = next((v for v in row if isinstance(v, EvaluationError)), None)
        keys.append(err if err is not None else tuple(row))
    return keys


def eval_values(ms: MatchSet, e) -> list:
    """``(match, value-or-error)`` pairs in canonical match order."""
    members = ms.sorted()
    return list(zip(members, _family(members, e)))


def eval_family(ms: MatchSet, e) -> dict:
    """The value family of ``e`` over ``ms`` as a dict ``Match -> label``.

    Raises the first evaluation error met in canonical match order.
    """
    missing = expr_vars(e) - ms.source.variables
    if missing:
        names = ", ".join(sorted(str(v) for v in missing))
        raise UnboundVariable(f"expression uses variables outside the match source: {names}")
    out = {}
    for m, v in eval_values(ms, e):
        if isinstance(v, EvaluationError):
            raise v
        out[m] = v
    return out


def group_classes(ms: MatchSet, group) -> list:
    """Partition ``ms`` by the value of the group tuple, classes in canonical order."""
    members = ms.sorted()
    keys = _group_keys(members, tuple(group))
    classes = {}
    for m, k in zip(members, keys):
        if isinstance(k, EvaluationError):
            raise k
        classes.setdefault(k, []).append(m)
    return list(classes.values())


def format_expr(e) -> str:
    """Canonical surface form; every compound subexpression is parenthesized."""
    if isinstance(e, (Const, Var)):
        return format_label(e)
    if isinstance(e, Unary):
        inner = format_expr(e.arg)
        if isinstance(e.arg, Const) and _is_num(e.arg):
            inner = f"({inner})"
        return f"-{inner}" if e.op == "-" else f"NOT {inner}"
    if isinstance(e, Binary):
        return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"
    if isinstance(e, Agg):
        inner = ("DISTINCT " if e.distinct else "") + format_expr(e.arg)
        if e.by is not None:
            inner += " BY " + ", ".join(format_expr(g) for g in e.by)
        return f"{e.func}({inner})"
    raise TypeError(f"not an expression: {e!r}")
