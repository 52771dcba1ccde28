"""Walk through the teaching graph: one BASIC pattern, one BUILD, three queries.

    python3 demos/teaching_example.py
"""
from gqnarrow import Graph, enumerate_matches, eval_pattern, format_graph, format_query, format_result, tab
from gqnarrow.fixtures import G_EX, L_EX, P_EX, Q_CS_EX, Q_C_EX, Q_S_EX
from gqnarrow.frontend import evaluate_query


def section(title):
    print()
    print(title)
    print("-" * len(title))


section("The graph")
print(format_graph(G_EX), end="")

section("Matches of the basic pattern")
print(format_graph(L_EX), end="")
print(tab(enumerate_matches(L_EX, G_EX)))

section("BUILD: one fresh course variable per match")
res = eval_pattern(P_EX, G_EX)
print(tab(res.matches))
print("added triples:")
print(format_graph(Graph(res.graph.triples - G_EX.triples)), end="")

for q in (Q_C_EX, Q_S_EX, Q_CS_EX):
    section(format_query(q).split(" ", 1)[0])
    print(format_query(q))
    print()
    # "check" runs the rewriting engine and the direct evaluator and compares them
    result, _ = evaluate_query(q, G_EX, "check")
    print(format_result(result), end="")
