"""Walk through the tree-traversal example end to end.

The program walks down the right spine of a binary tree, then reads two
links below the final node and allocates a fresh object.  We compute which
heap links are still needed, insert null assignments for the rest, and
check the result on a concrete heap.

    python3 demos/running_example.py
"""

from __future__ import annotations

from hra import fixture_text, load_fixture
from hra.access_graph import enumerate_paths
from hra.interp import check_equivalence, loop_schedule
from hra.ir import IN
from hra.nullifier import insert_nulls

program = load_fixture("run")
print("-- source " + "-" * 50)
print(fixture_text("run"))

# Liveness before the first statement is an access graph: a finite graph
# standing for the infinitely many paths x->rptr->...->rptr->lptr->lptr.
res = insert_nulls(program)
live_x = res.analyses.explicit.at(1, IN, "x")
print("-- paths below x that are live on entry (up to length 4) " + "-" * 3)
for p in sorted(enumerate_paths(live_x, 4), key=lambda p: (len(p.fields), str(p))):
    print("  ", p)

print("\n-- null assignments inserted " + "-" * 31)
for ins in res.insertions:
    print("  ", ins)

print("\n-- transformed program " + "-" * 37)
print(res.text)

# Run both programs on a full tree for 0..4 loop iterations.  The probe
# before the allocation (block 5) counts reachable objects.
verdict = check_equivalence(program, res.program, [loop_schedule(k) for k in range(5)])
print(f"-- concrete check: {'equivalent' if verdict.ok else verdict.divergence}")
for schedule, (tag, occ), before, after in verdict.reductions:
    if tag == 5:
        print(f"   loop runs {len(schedule) - 1}x: {before} objects reachable before"
              f" the allocation, {after} after nullification")
