"""The bundled example graphs, patterns and queries."""
from __future__ import annotations

from importlib import resources

from .graph import Graph
from .patterns import Basic, Build, Join
from .syntax import parse_graph, parse_query


def data_path(name: str):
    return resources.files("gqnarrow") / "data" / name


def read_data(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def load_graph(name: str) -> Graph:
    return parse_graph(read_data(name))


def load_query(name: str):
    return parse_query(read_data(name))


G_EX = load_graph("gex.triples")
G_A = load_graph("ga.triples")

L_EX = parse_graph("?p teaches ?t . ?s studies ?t .")
R_EX = parse_graph("?p teaches ?z . ?s studies ?z .")
P_EX = Build(Basic(L_EX), R_EX)

L_1 = parse_graph("?x supervisedby ?p . ?p member ?l .")
R_1 = parse_graph("?x member ?l .")
L_2 = parse_graph("?x member ?t . ?x is Student .")
R_2 = parse_graph("?x is Intern .")
PI_A = Join(Build(Basic(L_1), R_1), Build(Basic(L_2), R_2))

Q_C_EX = load_query("qcons.gql")
Q_S_EX = load_query("qsel.gql")
Q_CS_EX = load_query("qcs.gql")
Q_JOIN_COUNT = load_query("joincount.gql")
Q_EMPTY = load_query("empty.gql")
