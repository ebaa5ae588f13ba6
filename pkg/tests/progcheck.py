"""Fixpoint results compared with meet-over-paths enumeration."""

from __future__ import annotations

import random

from hra.access_graph import contains_path, walk_paths
from hra.alias import may_alias
from hra.avail_ant import anticipability, availability
from hra.interp import ANT, AVAIL, LIVE, mop_oracle, transfer_path
from hra.ir import IN, OUT, Program
from hra.liveness import explicit_liveness
from hra.randprog import random_program

SIDES = (IN, OUT)


def liveness_violations(program: Program, k: int = 3, unroll: int | None = None) -> list[str]:
    """Paths live on some path to Exit but missing from the fixpoint graph."""
    mfp = explicit_liveness(program)
    mop = mop_oracle(program, LIVE, k=k, unroll=unroll)
    out = []
    for b in program.cfg.ids:
        for side in SIDES:
            for p in mop.at(b, side):
                if not contains_path(mfp.at(b, side, p.root), p):
                    out.append(f"live {side}({b}): {p}")
    return out


def all_paths_violations(program: Program, unroll: int | None = None) -> list[str]:
    """Fixpoint availability/anticipability members not found on every path."""
    aliases = may_alias(program)
    out = []
    for kind, res in ((AVAIL, availability(program, aliases)),
                      (ANT, anticipability(program, aliases))):
        mop = mop_oracle(program, kind, unroll=unroll, aliases=aliases)
        for b in program.cfg.ids:
            for side in SIDES:
                got = res.at(b, side)
                if got.is_universal:
                    out.append(f"{kind} {side}({b}) still universal")
                    continue
                extra = set(got) - mop.at(b, side)
                if extra:
                    out.append(f"{kind} {side}({b}): {sorted(map(str, extra))}")
    return out


def acyclic_program(seed: int) -> Program:
    """A random acyclic, call-free program with at most 12 blocks, 4
    variables and 3 fields and no error diagnostics."""
    while True:
        p = random_program(seed)
        if not any(d.severity == "error" for d in p.diagnostics):
            return p
        seed += 1_000_003


def mop_mfp_violations(seed: int) -> list[str]:
    p = acyclic_program(seed)
    return liveness_violations(p) + all_paths_violations(p)


def propagation_violations(program: Program, rng: random.Random, walks: int = 20,
                           k: int = 3) -> list[str]:
    """Walk forward along the CFG; every path live after the walk whose
    transfer through the walked statements is non-empty must be live before
    it."""
    mfp = explicit_liveness(program)
    cfg = program.cfg
    fields = program.fields()
    out = []
    for _ in range(walks):
        b = rng.choice(cfg.ids)
        walk = [b]
        while cfg.succ[walk[-1]] and rng.random() < 0.8 and len(walk) < 8:
            walk.append(rng.choice(cfg.succ[walk[-1]]))
        stmts = [cfg.blocks[i].stmt for i in walk]
        for var in program.variables:
            g = mfp.at(walk[-1], OUT, var)
            for p in walk_paths(g, k, fields):
                q = transfer_path(stmts, p, program.globals)
                if q.is_empty:
                    continue
                if not contains_path(mfp.at(walk[0], IN, q.root), q):
                    out.append(f"{p} after {walk} maps to {q}, not live before")
    return out
