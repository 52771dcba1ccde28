"""Replay the nine-step derivation of the join/intern pattern.

The left operand adds membership triples that the right operand then reads,
so the right side must be evaluated over the graph built on the left.

    python3 demos/intern_derivation.py
"""
from gqnarrow import derive, format_graph, format_pattern, step_bound, tab
from gqnarrow.fixtures import G_A, PI_A

print("pattern:", format_pattern(PI_A))
print("step bound:", step_bound(PI_A))
print()

matches, trace = derive(G_A, PI_A)
print(trace.format(verbose=True))
print()

added = matches.target.triples - G_A.triples
print(f"{len(added)} triples added to the {len(G_A.triples)} of the input:")
for t in sorted(added, key=lambda t: t.key()):
    print("  ", *t)
print()
print("final matches:")
print(tab(matches))
