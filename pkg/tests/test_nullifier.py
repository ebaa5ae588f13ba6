from __future__ import annotations

import pytest

from expected import RUN_INSERTIONS, run_insertion_sets
from hra import FIXTURES, load_fixture
from hra.access_path import path
from hra.ir import IN, OUT, ProgramPoint, is_null_assign, lhs_of, parse_program
from hra.nullifier import (
    Nullifier, analyze, candidates, insert_nulls, insertions_by_point, nullable, nullify_in,
    transp,
)
from hra.randprog import random_program


@pytest.fixture(scope="module")
def run():
    return analyze(load_fixture("run"))


def inserted_blocks(program):
    """Blocks of a transformed program that hold inserted null stores."""
    return [k for k in program.cfg.ids
            if program.block(k).tag is None and is_null_assign(program.block(k).stmt)]


def clean_random(seed):
    p = random_program(seed, loops=seed % 2 == 0, calls=seed % 3 == 0)
    if any(d.severity == "error" for d in p.diagnostics):
        pytest.skip("generated program has type errors")
    return p


# -- running example ---------------------------------------------------------

@pytest.mark.parametrize("point", sorted(RUN_INSERTIONS), ids=str)
def test_running_example_insertions_at_point(run, point):
    got = insertions_by_point(Nullifier(run).insertions())
    assert set(got.get(point, [])) == run_insertion_sets()[point]


def test_running_example_inserts_only_expected_statements(run):
    want = run_insertion_sets()
    for point, paths in insertions_by_point(Nullifier(run).insertions()).items():
        assert set(paths) <= want.get(point, set()), point


def test_nullable_examples(run):
    assert not nullable(run, path("x->lptr->lptr"), ProgramPoint(6, IN))
    assert nullable(run, path("x->rptr"), ProgramPoint(4, IN))
    pn = analyze(load_fixture("pn"))
    assert not nullable(pn, path("x->n->n"), ProgramPoint(2, OUT))


def test_nullify_in_loop_body(run):
    assert nullify_in(run, path("x->lptr"), 3)


def test_nullify_in_earliest_point_only(run):
    assert nullify_in(run, path("x->rptr"), 4)
    assert not nullify_in(run, path("x->rptr"), 7)


def test_nullify_in_skips_assigned_path(run):
    # y is dead before `y = x.lptr`, but the statement overwrites it anyway
    assert nullable(run, path("y"), ProgramPoint(4, IN))
    assert not nullify_in(run, path("y"), 4)


def test_transp_examples(run):
    assert transp(run, path("x->lptr"), 7)  # use statement
    assert not transp(run, path("x->rptr"), 3)  # x = x.rptr rewrites the prefix x
    p = parse_program("class C { n }\nlocal w: C\nlocal x: C\nlocal y: C\nw = x\nuse y.n.d\n")
    assert transp(analyze(p), path("y->n"), 1)


def test_null_store_is_transparent():
    p = parse_program("class C { n }\nlocal x: C\nlocal y: C\ny = x\ny.n = null\nuse x.d\n")
    assert transp(analyze(p), path("x->n"), 2)


def test_candidates(run):
    assert {path("x->lptr"), path("x->rptr")} <= set(candidates(run, ProgramPoint(4, IN)))
    out7 = candidates(run, ProgramPoint(7, OUT))
    assert {path(v) for v in "wxyz"} <= set(out7)
    assert out7 == sorted(out7, key=lambda p: (len(p.fields), str(p)))
    bare = analyze(parse_program("class C { n }\nlocal x: C\nskip\n"))
    assert candidates(bare, ProgramPoint(1, IN)) == [path("x")]


def test_empty_program():
    assert insert_nulls(parse_program("")).insertions == []


# -- properties --------------------------------------------------------------

def check_safety(program):
    res = insert_nulls(program)
    n = Nullifier(res.analyses)
    for ins in res.insertions:
        assert n.nullable(ins.path, ins.point), str(ins)
    again = Nullifier(analyze(res.program))
    for k in inserted_blocks(res.program):
        lhs = lhs_of(res.program.block(k).stmt)
        assert not again.live(lhs, ProgramPoint(k, OUT)), (k, str(lhs))
    return res


def check_idempotent(res):
    """A second pass never nulls again a path the first pass nulled.  (It may
    nullify new paths: inserted stores dereference their bases, which makes
    more paths available.)"""
    done = {i.path for i in res.insertions}
    again = insert_nulls(res.program).insertions
    assert [str(i) for i in again if i.path in done] == []


@pytest.mark.parametrize("name", FIXTURES)
def test_second_pass_adds_nothing_on_fixtures(name):
    res = insert_nulls(load_fixture(name))
    assert insert_nulls(res.program).insertions == []


def check_no_straight_line_repeats(program):
    """Along a run of blocks with no merge or branch, inserted stores never
    null a link twice without it being written in between.  Null stores that
    were already in the source are not counted."""
    cfg = program.cfg
    for start in cfg.ids:
        preds = cfg.pred[start]
        if len(preds) == 1 and len(cfg.succ[preds[0]]) == 1:
            continue  # not the head of a run
        nulled, b = set(), start
        while True:
            stmt = program.block(b).stmt
            if is_null_assign(stmt):
                if program.block(b).tag is None:
                    assert stmt.lhs not in nulled, (b, str(stmt))
                    nulled.add(stmt.lhs)
            elif lhs_of(stmt) is not None:
                nulled.clear()
            succ = cfg.succ[b]
            if len(succ) != 1 or len(cfg.pred[succ[0]]) != 1:
                break
            b = succ[0]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_properties(name):
    res = check_safety(load_fixture(name))
    check_idempotent(res)
    check_no_straight_line_repeats(res.program)


@pytest.mark.parametrize("seed", range(30))
def test_random_properties(seed):
    res = check_safety(clean_random(seed))
    check_idempotent(res)
    check_no_straight_line_repeats(res.program)


def test_output_is_deterministic():
    a = insert_nulls(load_fixture("appendix")).text
    b = insert_nulls(load_fixture("appendix")).text
    assert a == b
