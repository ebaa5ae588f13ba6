from __future__ import annotations

import pytest

from expected import RUN_ALIASES, pair
from hra import FIXTURES, load_fixture
from hra.access_graph import (
    EMPTY_GRAPH, LAST_FINAL, contains_path, from_text, lng, make_graph, walk_paths,
)
from hra.access_path import path
from hra.alias import (
    AliasPair, Side, complete_liveness, lna, lna_covers, may_alias, pairs_of,
)
from hra.ir import IN, OUT, parse_program
from hra.liveness import explicit_liveness

X_Y = pair("x: final={x}", "y: final={y}")


@pytest.mark.parametrize("block", sorted(RUN_ALIASES))
def test_running_example_alias_rows(block):
    res = may_alias(load_fixture("run"))
    want_in, want_out = RUN_ALIASES[block]
    assert set(res.ain[block]) == want_in
    assert set(res.aout[block]) == want_out


def test_pairs_generated_by_statements():
    run = load_fixture("run")
    assert pairs_of(run.block(1)) == {pair("w: final={w}", "x: final={x}")}
    assert pairs_of(run.block(5)) == set()  # z = new T
    assert pairs_of(run.block(7)) == set()  # use


def test_straight_line_without_copies_has_no_aliases():
    p = parse_program("class C { n }\nlocal x: C\nx = new C\nuse x.n.d\n")
    res = may_alias(p)
    assert all(not s for s in res.ain.values()) and all(not s for s in res.aout.values())


@pytest.mark.parametrize("name", FIXTURES)
def test_alias_sets_grow_along_edges(name):
    program = load_fixture(name)
    res = may_alias(program)
    for b in program.cfg.ids:
        assert res.ain[b] <= res.aout[b]
        for s in program.cfg.succ[b]:
            assert res.aout[b] <= res.ain[s]


def test_pairs_are_unordered():
    a = make_graph(path("x->f"), 1, LAST_FINAL)
    b = make_graph(path("y"), 1, LAST_FINAL)
    assert AliasPair.of(a, b) == AliasPair.of(b, a)
    with pytest.raises(ValueError):
        AliasPair.of(make_graph(path("x->f"), 1), b)


def test_call_pairs_cover_argument_extensions():
    p = parse_program("class T { f }\nlocal x: T\nlocal y: T\nglobal g: T\nx = call h(y)\n")
    sides = {tuple(map(str, pr.sides)) for pr in pairs_of(p.block(1), p.globals)}
    assert ("x", "y->*") in sides or ("y->*", "x") in sides
    assert ("g", "x") in sides or ("x", "g") in sides


# -- link aliases ------------------------------------------------------------

def test_lna_reflexive():
    assert lna(path("x"), []) == {Side(path("x"))}


def test_lna_through_root_alias():
    got = lna(path("y->n"), [X_Y])
    assert {Side(path("x->n")), Side(path("y->n"))} <= got


def test_lna_running_example_at_block_seven():
    ain7 = may_alias(load_fixture("run")).ain[7]
    assert lna_covers(lna(path("x->lptr->lptr"), ain7), path("y->lptr"))


def _covered(family, s):
    """A single path must lie in the family; a starred side must sit inside
    some starred member."""
    if not s.star:
        return lna_covers(family, s.path)
    return any(f.star and f.path.is_prefix_of(s.path) for f in family)


@pytest.mark.parametrize("block", sorted(RUN_ALIASES))
def test_lna_is_closed(block):
    # long paths are widened to a starred prefix, so closure holds up to coverage
    pairs = RUN_ALIASES[block][0]
    for start in ("x->lptr->lptr", "y->rptr", "w->lptr", "x->rptr->rptr"):
        first = lna(path(start), pairs)
        for s in first:
            if not s.star:
                assert all(_covered(first, t) for t in lna(s.path, pairs)), (start, s)


# -- LnG ---------------------------------------------------------------------

def test_lng_without_remainders_returns_target():
    target = make_graph(path("y"), 1)
    source = make_graph(path("x"), 1)  # x is final but has no successors
    assert lng(target, source, X_Y.directions()[0]) == target


def test_lng_moves_suffix_across_root_pair():
    g_x = from_text("x: x->n@5#0; final={x,n@5#0}")
    g_s, g_t = (X_Y.first, X_Y.second) if X_Y.first.root == "x" else (X_Y.second, X_Y.first)
    out = lng(EMPTY_GRAPH, g_x, (g_s, g_t))
    assert contains_path(out, path("y->n"))
    assert not contains_path(out, path("y"))  # y itself comes in as intermediate


def test_lng_running_example_moves_lptr_under_y():
    live_x = make_graph(path("x->lptr->lptr"), 7)
    p = pair("y: final={y}", "x: x->lptr@4#0; final={lptr@4#0}")
    g_x, g_y = (p.first, p.second) if p.first.root == "x" else (p.second, p.first)
    out = lng(EMPTY_GRAPH, live_x, (g_x, g_y))
    assert contains_path(out, path("y->lptr"))


# -- complete liveness -------------------------------------------------------

def test_running_example_implicit_liveness():
    program = load_fixture("run")
    p = path("w->lptr->lptr")
    assert not contains_path(explicit_liveness(program).at(5, IN, "w"), p)
    assert contains_path(complete_liveness(program).at(5, IN, "w"), p)


def test_copy_makes_field_of_other_root_live():
    program = load_fixture("pn")
    assert contains_path(complete_liveness(program).at(6, OUT, "y"), path("y->n"))


def test_no_aliases_means_no_change():
    p = parse_program("class C { n }\nlocal x: C\nlocal y: C\nx = new C\n"
                      "y = new C\nuse x.n.d, y.d\n")
    assert complete_liveness(p).lin == explicit_liveness(p).lin


@pytest.mark.parametrize("name", FIXTURES)
def test_complete_dominates_explicit(name):
    program = load_fixture(name)
    fields = program.fields()
    ex, co = explicit_liveness(program), complete_liveness(program)
    for b in program.cfg.ids:
        for side in (IN, OUT):
            for v in program.variables:
                g = co.at(b, side, v)
                for p in walk_paths(ex.at(b, side, v), 4, fields):
                    assert contains_path(g, p), (b, side, p)
