"""Why a dead link is not always safe to null.

After `x = y`, both variables name the same object.  If only one branch
allocates `x.n`, the link `y.n` may be dead on the other branch, yet
assigning null to it would also clear `x.n`, which is read later.  The
analysis only nulls paths that are available or anticipable, so it
leaves this link alone.  A hand-made edit that does null it crashes on the
concrete heap.

    python3 demos/unsafe_nullification.py
"""

from __future__ import annotations

from hra import fixture_text, load_fixture
from hra.interp import align, check_equivalence, completed_schedules, execute
from hra.ir import parse_program
from hra.nullifier import insert_nulls

program = load_fixture("pn")
print(fixture_text("pn"))

res = insert_nulls(program)
print("inserted by the analysis:", [str(i) for i in res.insertions] or "nothing")
schedules = completed_schedules(program, 4)
print("analysis result equivalent:", check_equivalence(program, res.program, schedules).ok)

broken = align(program, parse_program(
    fixture_text("pn").replace("L6: skip\n", "L6: skip\n    y.n = null\n")))
for s in schedules:
    exc = execute(broken, s).exception
    print(f"hand edit, branches {s}: "
          + (f"null dereference at statement {exc.tag}" if exc else "runs to the end"))
