"""How access graphs summarize unbounded path sets, and where they lose
precision.

    python3 demos/summarization.py
"""

from __future__ import annotations

from hra import load_fixture
from hra.access_graph import EMPTY_GRAPH, contains_path, to_text, union
from hra.access_path import path
from hra.ir import IN, ProgramPoint
from hra.liveness import explicit_liveness, flow
from hra.nullifier import analyze
from hra.report import dot_for

# A loop that follows the same field again and again gets one node with a
# self-loop.  Straight-line code that uses the same field in two statements
# gets two nodes, since labels carry the block they come from.
for name in ("loop", "seq"):
    g = explicit_liveness(load_fixture(name)).at(1, IN, "x")
    print(f"{name:5} {to_text(g)}")
    print(f"      accepts x->r->r->r: {contains_path(g, path('x->r->r->r'))}")

print("\nDOT for the loop summary:")
print(dot_for(analyze(load_fixture("loop")), ProgramPoint(1, IN), "live", "x"))

# Merging two branches before pushing the result through a statement can
# join a path prefix from one branch with a suffix from the other.
program = load_fixture("appendix")
res = explicit_liveness(program)
g2, g4 = res.at(2, IN, "x"), res.at(4, IN, "x")


def f1(g):
    return flow(program.block(1), {"x": g}).get("x", EMPTY_GRAPH)


spurious = path("x->r->n->r")
print(f"f1(G2 u G4) accepts {spurious}: {contains_path(f1(union(g2, g4)), spurious)}")
print(f"f1(G2) u f1(G4) accepts {spurious}: {contains_path(union(f1(g2), f1(g4)), spurious)}")
print("The first form is what the fixpoint computes: safe, but less precise.")
