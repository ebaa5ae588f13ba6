"""Expected values for the running example: the alias pairs at each point
and the null assignments of the hand-transformed program."""

from __future__ import annotations

from hra.access_graph import from_text
from hra.access_path import path
from hra.alias import AliasPair
from hra.ir import IN, OUT, ProgramPoint


# alias graphs by their canonical text: only the last node is final
X = "x: final={x}"
W = "w: final={w}"
Y = "y: final={y}"
X_R3 = "x: x->rptr@3#0; final={rptr@3#0}"
Y_L6 = "y: y->lptr@6#0; final={lptr@6#0}"
X_L4 = "x: x->lptr@4#0; final={lptr@4#0}"


def pair(a: str, b: str) -> AliasPair:
    return AliasPair.of(from_text(a), from_text(b))


_XW, _XR, _YL4, _YL6 = pair(X, W), pair(X, X_R3), pair(Y, X_L4), pair(Y, Y_L6)

RUN_ALIASES = {
    1: (set(), {_XW}),
    2: ({_XW, _XR}, {_XW, _XR}),
    3: ({_XW, _XR}, {_XW, _XR}),
    4: ({_XW, _XR}, {_XW, _XR, _YL4}),
    5: ({_XW, _XR, _YL4}, {_XW, _XR, _YL4}),
    6: ({_XW, _XR, _YL4}, {_XW, _XR, _YL4, _YL6}),
    7: ({_XW, _XR, _YL4, _YL6}, {_XW, _XR, _YL4, _YL6}),
}

# The null assignments of the hand-transformed running example, keyed by
# the program point where each one sits.  A statement printed right after
# block i (and before i + 1, which has i as its only predecessor) is Out(i).
RUN_INSERTIONS = {
    ProgramPoint(1, IN): ["y", "z"],
    ProgramPoint(1, OUT): ["w"],
    ProgramPoint(3, IN): ["x->lptr"],
    ProgramPoint(4, IN): ["x->rptr", "x->lptr->rptr", "x->lptr->lptr->lptr",
                          "x->lptr->lptr->rptr"],
    ProgramPoint(4, OUT): ["y->rptr", "y->lptr->lptr", "y->lptr->rptr"],
    ProgramPoint(5, OUT): ["z->lptr", "z->rptr"],
    ProgramPoint(6, OUT): ["y->lptr", "y->rptr", "x->lptr->lptr"],
    ProgramPoint(7, OUT): ["x", "y", "z"],
}


def run_insertion_sets() -> dict[ProgramPoint, set]:
    return {pt: {path(t) for t in ps} for pt, ps in RUN_INSERTIONS.items()}
