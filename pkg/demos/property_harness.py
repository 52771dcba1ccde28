"""Run the seeded engine-vs-oracle harness and show one sample case.

    python3 demos/property_harness.py [seed] [cases]
"""
import sys

from gqnarrow import derive, eval_pattern, format_graph, format_pattern, tab
from gqnarrow.props import generate_cases, run_properties

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
cases = int(sys.argv[2]) if len(sys.argv) > 2 else 500

# a case with a non-empty answer makes a better illustration
for i, g, p in generate_cases(seed, cases):
    try:
        if eval_pattern(p, g).matches:
            break
    except Exception:
        continue

print(f"sample case {i}")
print(format_graph(g), end="")
print("pattern:", format_pattern(p))
ms, trace = derive(g, p)
print(f"{len(trace)} steps:", " ".join(trace.rules))
print(tab(ms))
print()

print(run_properties(seed, cases).format(), end="")
