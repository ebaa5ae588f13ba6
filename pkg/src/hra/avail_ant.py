"""Availability (forward) and anticipability (backward) of access paths.

Both are all-paths problems over finite, prefix-closed path sets, merged by
intersection and started from the universal set.  Kills remove every path
having a link alias of the assigned path as a prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from hra.access_path import AccessPath, PathSet
from hra.alias import AliasPair, AliasResult, Side, lna, may_alias
from hra.fixpoint import round_robin
from hra.ir import Assign, Block, Call, New, Program, Return, Use, is_null_assign


def _prefixes(p: AccessPath | None) -> set[AccessPath]:
    if p is None or p.is_empty:
        return set()
    return set(p.iter_prefixes())


def _base_prefixes(p: AccessPath) -> set[AccessPath]:
    return _prefixes(p.base) if not p.is_simple else set()


def kill_sides(block: Block, pairs: Iterable[AliasPair]) -> frozenset[Side]:
    stmt = block.stmt
    if isinstance(stmt, (Assign, Call)):
        return lna(stmt.lhs, pairs)
    return frozenset()


def _killed(p: AccessPath, sides: Iterable[Side]) -> bool:
    """Does ``p`` run through a possibly rewritten link?"""
    return any(s.is_prefix_of(p) for s in sides)


def _crosses(start: AccessPath, sigma: tuple[str, ...], kill: Iterable[Side]) -> bool:
    """Does walking ``sigma`` from ``Target(start)`` cross a rewritten link?"""
    kill = list(kill)
    for k in range(1, len(sigma) + 1):
        probe = Side(start.extend(*sigma[:k]))
        if any(probe.overlaps(s) for s in kill):
            return True
    return False


def _call_clobbered(p: AccessPath, globals_: Iterable[str]) -> bool:
    """A callee may rewrite any heap link and any global."""
    return not p.is_simple or p.root in set(globals_)


def _apply(x: PathSet, kill: frozenset[Side], keep: set[AccessPath] | None = None,
           extra_kill=None) -> set[AccessPath]:
    out = set(x.paths) if keep is None else keep
    return {p for p in out if not _killed(p, kill) and not (extra_kill and extra_kill(p))}


def avail_flow(block: Block, x: PathSet, ain: Iterable[AliasPair],
               globals_: Iterable[str] = ()) -> PathSet:
    """Availability after ``block`` given ``x`` before it."""
    if x.is_universal:
        return x
    stmt = block.stmt
    if isinstance(stmt, Use):
        return PathSet.of(set(x.paths).union(*(_prefixes(p) for p in stmt.paths)))
    if isinstance(stmt, Return):
        return PathSet.of(set(x.paths) | _base_prefixes(stmt.expr))
    if not isinstance(stmt, (Assign, Call)):
        return x
    lhs = stmt.lhs
    kill = kill_sides(block, ain)
    pre = set(x.paths) | _base_prefixes(lhs)
    if isinstance(stmt, Call):
        clobber = lambda p: _call_clobbered(p, globals_)  # noqa: E731
        return PathSet.of(_apply(x, kill, pre, clobber))
    rhs = stmt.rhs
    if isinstance(rhs, AccessPath):
        pre |= _base_prefixes(rhs)
    out = _apply(x, kill, pre)
    if isinstance(rhs, New) and not _lhs_moved(lhs, kill):
        out.add(lhs)
    elif isinstance(rhs, AccessPath):
        out |= _copied(x, lhs, rhs, kill)
    return PathSet.of(out)


def _lhs_moved(lhs: AccessPath, kill: frozenset[Side]) -> bool:
    """Was a proper prefix of the lhs itself rewritten by the statement?"""
    return any(_killed(q, kill) for q in lhs.iter_prefixes(proper=True))


def _copied(x: PathSet, lhs: AccessPath, rhs: AccessPath, kill: frozenset[Side]) -> set[AccessPath]:
    """Facts about ``rhs->s`` before ``lhs = rhs`` that hold for ``lhs->s`` after it."""
    if _lhs_moved(lhs, kill):
        return set()
    return {p.replace_prefix(rhs, lhs) for p in x.paths
            if rhs.is_prefix_of(p) and not _crosses(rhs, p.suffix_after(rhs), kill)}


def ant_flow(block: Block, x: PathSet, aout: Iterable[AliasPair],
             globals_: Iterable[str] = ()) -> PathSet:
    """Anticipability before ``block`` given ``x`` after it."""
    if x.is_universal:
        return x
    stmt = block.stmt
    if isinstance(stmt, Use):
        return PathSet.of(set(x.paths).union(*(_prefixes(p) for p in stmt.paths)))
    if isinstance(stmt, Return):
        return PathSet.of(set(x.paths) | _base_prefixes(stmt.expr))
    if not isinstance(stmt, (Assign, Call)):
        return x
    lhs = stmt.lhs
    kill = kill_sides(block, aout)
    direct = _base_prefixes(lhs)
    if isinstance(stmt, Call):
        for a in stmt.args:
            direct |= _base_prefixes(a)
        clobber = lambda p: _call_clobbered(p, globals_)  # noqa: E731
        return PathSet.of(_apply(x, kill, extra_kill=clobber) | direct)
    rhs = stmt.rhs
    out = _apply(x, kill) | direct
    if isinstance(rhs, AccessPath):
        out |= _base_prefixes(rhs)
        if not any(_killed(q, kill) for q in lhs.iter_prefixes(proper=True)):
            for p in x.paths:
                if lhs.is_prefix_of(p) and not _crosses(rhs, p.suffix_after(lhs), kill):
                    out.add(p.replace_prefix(lhs, rhs))
    return PathSet.of(out)


@dataclass
class PathSetResult:
    pin: dict[int, PathSet]
    pout: dict[int, PathSet]
    iterations: int

    def at(self, block: int, side: str) -> PathSet:
        return self.pin[block] if side == "in" else self.pout[block]


def _bound(program: Program) -> int:
    return 4 * len(program.cfg.blocks) + 8


def _forward(program: Program, aliases: AliasResult,
             flow: Callable[[Block, PathSet, Iterable[AliasPair], Iterable[str]], PathSet],
             name: str) -> PathSetResult:
    cfg = program.cfg
    top = PathSet.universal()
    pin = {b: top for b in cfg.blocks}
    pout = {b: top for b in cfg.blocks}

    def step(b: int) -> bool:
        if b == cfg.entry:
            new_in = PathSet.of()
        else:
            new_in = top
            for p in cfg.pred[b]:
                new_in = new_in & pout[p]
        new_out = flow(cfg.blocks[b], new_in, aliases.ain[b], program.globals)
        changed = new_in != pin[b] or new_out != pout[b]
        pin[b], pout[b] = new_in, new_out
        return changed

    passes = round_robin(cfg.reverse_postorder(), step, _bound(program) * _height(program), name)
    return PathSetResult(pin, pout, passes)


def availability(program: Program, aliases: AliasResult | None = None) -> PathSetResult:
    return _forward(program, aliases or may_alias(program), avail_flow, "availability")


def null_flow(block: Block, x: PathSet, ain: Iterable[AliasPair],
              globals_: Iterable[str] = ()) -> PathSet:
    """Paths whose link is null on every path, after ``block``."""
    if x.is_universal:
        return x
    stmt = block.stmt
    if is_null_assign(stmt):
        # storing null never makes a null link non-null
        return PathSet.of(set(x.paths) | {stmt.lhs})
    if isinstance(stmt, Call):
        clobber = lambda p: _call_clobbered(p, globals_)  # noqa: E731
        return PathSet.of(_apply(x, kill_sides(block, ain), extra_kill=clobber))
    if isinstance(stmt, Assign):
        kill = kill_sides(block, ain)
        out = _apply(x, kill)
        if isinstance(stmt.rhs, AccessPath):
            out |= _copied(x, stmt.lhs, stmt.rhs, kill)
        return PathSet.of(out)
    return x


def known_null(program: Program, aliases: AliasResult | None = None) -> PathSetResult:
    """Forward all-paths analysis of links already set to null."""
    return _forward(program, aliases or may_alias(program), null_flow, "known_null")


def anticipability(program: Program, aliases: AliasResult | None = None) -> PathSetResult:
    cfg = program.cfg
    aliases = aliases or may_alias(program)
    top = PathSet.universal()
    pin = {b: top for b in cfg.blocks}
    pout = {b: top for b in cfg.blocks}

    def step(b: int) -> bool:
        if b == cfg.exit:
            new_out = PathSet.of()
        else:
            new_out = top
            for s in cfg.succ[b]:
                new_out = new_out & pin[s]
        new_in = ant_flow(cfg.blocks[b], new_out, aliases.aout[b], program.globals)
        changed = new_in != pin[b] or new_out != pout[b]
        pin[b], pout[b] = new_in, new_out
        return changed

    passes = round_robin(cfg.reverse_postorder(reverse_graph=True), step,
                         _bound(program) * _height(program), "anticipability")
    return PathSetResult(pin, pout, passes)


def _height(program: Program) -> int:
    """Loose bound on how often a cell can shrink after turning finite."""
    n = sum(len(e.fields) + 1 for b in program.cfg.blocks.values() for e in b.stmt.exprs())
    return n * n + 2
