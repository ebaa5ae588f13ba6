from __future__ import annotations

import json

import pytest

from hra import FIXTURES, fixture_text, load_fixture
from hra.access_graph import enumerate_paths
from hra.access_path import EMPTY, path
from hra.interp import (
    LIVE, ScheduleExhausted, align, check_equivalence, completed_schedules, execute,
    initial_heap, loop_schedule, mop_oracle, transfer_path,
)
from hra.ir import parse_program
from hra.liveness import explicit_liveness
from hra.nullifier import insert_nulls
from hra.randprog import random_program

HEADER = "class C { n r }\nlocal x: C\nlocal y: C\n"


def stmt(text):
    return parse_program(HEADER + text + "\n").block(1).stmt


def kinds(trace):
    return [(e.kind, e.path) for e in trace.observable()]


# -- execution ---------------------------------------------------------------

def test_allocation_then_use():
    p = parse_program("class C { n }\nlocal x: C\nx = new C\nuse x.d\n")
    t = execute(p)
    assert ("use", "x->d") in kinds(t)
    assert t.completed and t.exception is None
    # before the use only the fresh object is reachable
    assert t.probes()[(2, 0)] == 1


def test_initial_heap_is_a_full_tree():
    p = parse_program("class C { n r }\nlocal x: C\nskip\n")
    heap = initial_heap(p, depth=3)
    assert len(heap.reachable()) == 1 + 2 + 4 + 8
    heap.check()


def test_null_dereference_halts_with_exception():
    p = parse_program(HEADER + "x.n = null\nuse x.n.d\nuse y.d\n")
    t = execute(p)
    assert t.exception is not None and t.exception.tag == 2
    assert not t.completed
    assert ("use", "y->d") not in kinds(t)


def test_schedule_drives_loops():
    run = load_fixture("run")
    body = [e for e in execute(run, loop_schedule(3)).events if e.kind == "deref" and e.tag == 3]
    assert len(body) == 3
    with pytest.raises(ScheduleExhausted):
        execute(run, [])


def test_completed_schedules_of_running_example():
    # at most three branch outcomes: the loop runs zero to two times
    assert completed_schedules(load_fixture("run"), 3) == [
        (True,), (False, True), (False, False, True)]


def test_trace_json():
    t = execute(load_fixture("seq"), [])
    rows = json.loads(json.dumps(t.to_json()))
    assert rows[-1]["kind"] == "exit"


# -- equivalence -------------------------------------------------------------

def test_identical_programs_are_equivalent():
    run = load_fixture("run")
    v = check_equivalence(run, run, [loop_schedule(k) for k in range(5)])
    assert v.ok and v.reductions == []


def test_golden_transformation_shrinks_running_example():
    run = load_fixture("run")
    golden = align(run, parse_program(fixture_text("run_nullified")))
    v = check_equivalence(run, golden, [loop_schedule(k) for k in range(5)])
    assert v.ok, v.divergence
    before_alloc = [r for r in v.reductions if r[1][0] == 5]
    assert len(before_alloc) == 5
    assert all(n2 < n1 for _, _, n1, n2 in before_alloc)


def test_unsafe_insertion_raises():
    pn = load_fixture("pn")
    broken = align(pn, parse_program(fixture_text("pn").replace(
        "L6: skip\n", "L6: skip\n    y.n = null\n")))
    for s in completed_schedules(pn, 4):
        exc = execute(broken, s).exception
        # c2 taken leads through block 7, which dereferences x.n
        assert (exc is not None and exc.tag == 7) == s[1]
    v = check_equivalence(pn, broken, completed_schedules(pn, 4))
    assert not v.ok and "exception" in v.divergence


def test_align_rejects_other_edits():
    pn = load_fixture("pn")
    with pytest.raises(ValueError):
        align(pn, parse_program(fixture_text("pn").replace("x = y", "x = new C")))


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_transformation_is_safe(name):
    program = load_fixture(name)
    res = insert_nulls(program)
    v = check_equivalence(program, res.program, completed_schedules(program, 5))
    assert v.ok, v.divergence


@pytest.mark.parametrize("seed", range(30))
def test_random_transformation_is_safe(seed):
    program = random_program(seed, loops=seed % 2 == 0, calls=seed % 3 == 0)
    if any(d.severity == "error" for d in program.diagnostics):
        pytest.skip("generated program has type errors")
    res = insert_nulls(program)
    v = check_equivalence(program, res.program, completed_schedules(program, 4))
    assert v.ok, v.divergence


# -- T(s, rho) ---------------------------------------------------------------

def test_transfer_table():
    assert transfer_path(stmt("use x.d"), path("x->n")) == path("x->n")
    assert transfer_path(stmt("x = y"), path("x->n")) == path("y->n")
    assert transfer_path(stmt("x = new C"), path("x->n")) == EMPTY
    assert transfer_path(stmt("x.n = null"), path("x->n->r")) == EMPTY
    assert transfer_path(stmt("x.n = y.r"), path("x->n->n")) == path("y->r->n")
    assert transfer_path(stmt("x = y"), path("y->n")) == path("y->n")
    assert transfer_path(stmt("x = call f(y)"), path("x->n")) == EMPTY


def test_transfer_composes_backwards():
    seq = [stmt("y = x.n"), stmt("x = y")]
    assert transfer_path(seq, path("x->r")) == path("x->n->r")
    assert transfer_path(seq, path("x->r")) == transfer_path(seq[0], transfer_path(seq[1], path("x->r")))


# -- meet over paths ---------------------------------------------------------

def test_mop_equals_mfp_on_one_statement():
    p = parse_program("class C { n }\nlocal x: C\nuse x.n.d\n")
    mop = mop_oracle(p, LIVE, k=3)
    res = explicit_liveness(p)
    assert mop.at(1, "in") == {path("x"), path("x->n")}
    assert enumerate_paths(res.at(1, "in", "x"), 3) == mop.at(1, "in")


def test_mop_needs_unroll_on_cycles():
    with pytest.raises(ValueError):
        mop_oracle(load_fixture("loop"), LIVE)
