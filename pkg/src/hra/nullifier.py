"""Insert ``rho = null`` where a link is dead and its base is accessible.

A path is *nullable* at a point when it is not (completely) live there and
its base is available or anticipable.  Among nullable paths we keep the
profitable ones: no proper prefix is nullable at the same point, and the
point is the earliest one (for In) or the only one (for Out) along the
block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from hra.access_graph import contains_path
from hra.access_path import AccessPath, PathSet
from hra.alias import AliasResult, complete_liveness, lna, lna_covers, may_alias
from hra.avail_ant import PathSetResult, anticipability, availability, known_null
from hra.ir import (
    IN, NULL, OUT, Assign, Item, Program, ProgramPoint, Return, build_program,
    emit_items, is_null_assign, lhs_of, out_fields,
)
from hra.liveness import LivenessResult, explicit_liveness


@dataclass
class Analyses:
    program: Program
    explicit: LivenessResult
    aliases: AliasResult
    complete: LivenessResult
    avail: PathSetResult
    ant: PathSetResult
    nulled: PathSetResult

    def iterations(self) -> dict[str, int]:
        return {
            "explicit_liveness": self.explicit.iterations,
            "may_alias": self.aliases.iterations,
            "complete_liveness": self.complete.iterations,
            "availability": self.avail.iterations,
            "anticipability": self.ant.iterations,
            "known_null": self.nulled.iterations,
        }


def analyze(program: Program) -> Analyses:
    aliases = may_alias(program)
    return Analyses(
        program,
        explicit_liveness(program),
        aliases,
        complete_liveness(program, aliases),
        availability(program, aliases),
        anticipability(program, aliases),
        known_null(program, aliases),
    )


@dataclass(frozen=True, order=True)
class Insertion:
    point: ProgramPoint
    path: AccessPath

    def __str__(self) -> str:
        return f"{self.point}: {self.path} = null"


class Nullifier:
    """The decision procedures over one set of analysis results."""

    def __init__(self, analyses: Analyses, suppress_redundant: bool = False) -> None:
        self.a = analyses
        self.program = analyses.program
        self.cfg = analyses.program.cfg
        self.suppress_redundant = suppress_redundant
        self._nullable: dict[tuple[AccessPath, ProgramPoint], bool] = {}

    # -- basic predicates ---------------------------------------------------
    def live(self, p: AccessPath, point: ProgramPoint) -> bool:
        g = self.a.complete.at(point.block, point.side, p.root)
        return contains_path(g, p)

    def accessible_set(self, point: ProgramPoint) -> tuple[PathSet, PathSet]:
        return (self.a.avail.at(point.block, point.side), self.a.ant.at(point.block, point.side))

    def accessible(self, p: AccessPath, point: ProgramPoint) -> bool:
        base = p.base
        if base.is_empty:
            return True
        av, an = self.accessible_set(point)
        return base in av or base in an

    def nullable(self, p: AccessPath, point: ProgramPoint) -> bool:
        key = (p, point)
        if key not in self._nullable:
            self._nullable[key] = not self.live(p, point) and self.accessible(p, point)
        return self._nullable[key]

    def no_prefix_nullable(self, p: AccessPath, point: ProgramPoint) -> bool:
        return not any(self.nullable(q, point) for q in p.iter_prefixes(proper=True))

    def transp(self, p: AccessPath, block: int) -> bool:
        stmt = self.cfg.blocks[block].stmt
        lhs = lhs_of(stmt)
        if lhs is None or is_null_assign(stmt):
            # a null store either cuts a prefix of p (p is then unreachable)
            # or leaves p's link as it was
            return True
        sides = lna(lhs, self.a.aliases.ain[block])
        return not any(lna_covers(sides, q) for q in p.iter_prefixes())

    # -- placement -----------------------------------------------------------
    def _null_run(self, block: int) -> tuple[set[AccessPath], int | None]:
        """Follow the straight-line run of null stores starting at ``block``.
        Returns the paths they null and the first other block on the run."""
        nulled: set[AccessPath] = set()
        seen: set[int] = set()
        while block not in seen and is_null_assign(self.cfg.blocks[block].stmt):
            seen.add(block)
            nulled.add(self.cfg.blocks[block].stmt.lhs)
            succ = self.cfg.succ[block]
            if len(succ) != 1 or len(self.cfg.pred[succ[0]]) != 1:
                return nulled, None
            block = succ[0]
        return nulled, None if block in seen else block

    def _ahead(self, block: int) -> set[AccessPath]:
        """Paths nulled or overwritten before anything else runs at In(block)."""
        nulled, nxt = self._null_run(block)
        lhs = lhs_of(self.cfg.blocks[nxt].stmt) if nxt is not None else None
        return nulled | ({lhs} if lhs is not None else set())

    def _nulled_after(self, block: int) -> set[AccessPath]:
        succ = self.cfg.succ[block]
        if len(succ) != 1 or len(self.cfg.pred[succ[0]]) != 1:
            return set()
        return self._null_run(succ[0])[0]

    def nullify_out(self, p: AccessPath, block: int) -> bool:
        b = self.cfg.blocks[block]
        if isinstance(b.stmt, Return):
            return False  # nothing after a return executes
        out = ProgramPoint(block, OUT)
        if p in self.a.nulled.at(block, OUT) or p in self._nulled_after(block):
            return False  # already null, or about to be
        return (self.nullable(p, out)
                and self.no_prefix_nullable(p, out)
                and (not self.nullable(p, ProgramPoint(block, IN)) or not self.transp(p, block)))

    def nullify_in(self, p: AccessPath, block: int) -> bool:
        point = ProgramPoint(block, IN)
        if not (self.nullable(p, point) and self.no_prefix_nullable(p, point)):
            return False
        if p in self.a.nulled.at(block, IN) or p in self._ahead(block):
            return False  # already null, or overwritten before anything else runs
        preds = self.cfg.pred[block]
        return not preds or not all(self.nullable(p, ProgramPoint(j, OUT)) for j in preds)

    def candidates(self, point: ProgramPoint) -> list[AccessPath]:
        out = {AccessPath(v) for v in self.program.variables}
        for s in self.accessible_set(point):
            if s.is_universal:
                continue
            for base in s:
                try:
                    fields = out_fields(self.program, base)
                except ValueError:
                    continue
                out.update(base.extend(f) for f in fields)
        return sorted(out, key=AccessPath.sort_key)

    def redundant(self, p: AccessPath, block: int) -> bool:
        """``x = y`` followed by ``x->s = null`` when ``y->s`` was already
        nullable before the statement."""
        stmt = self.cfg.blocks[block].stmt
        if not (isinstance(stmt, Assign) and isinstance(stmt.rhs, AccessPath)):
            return False
        if not stmt.lhs.is_prefix_of(p):
            return False
        q = p.replace_prefix(stmt.lhs, stmt.rhs)
        return self.nullable(q, ProgramPoint(block, IN))

    def insertions(self) -> list[Insertion]:
        found: list[Insertion] = []
        for b in self.cfg.ids:
            pin, pout = ProgramPoint(b, IN), ProgramPoint(b, OUT)
            for p in self.candidates(pin):
                if self.nullify_in(p, b):
                    found.append(Insertion(pin, p))
            for p in self.candidates(pout):
                if self.nullify_out(p, b) and not (self.suppress_redundant and self.redundant(p, b)):
                    found.append(Insertion(pout, p))
        return found


def insertions_by_point(ins: Iterable[Insertion]) -> dict[ProgramPoint, list[AccessPath]]:
    out: dict[ProgramPoint, list[AccessPath]] = {}
    for i in ins:
        out.setdefault(i.point, []).append(i.path)
    return out


@dataclass
class NullifyResult:
    original: Program
    program: Program
    insertions: list[Insertion]
    analyses: Analyses
    text: str = field(default="")


def _null_items(paths: Iterable[AccessPath]) -> Iterator[Item]:
    for p in paths:
        yield Item("stmt", Assign(p, NULL), tag=None)


def transformed_items(program: Program, insertions: Iterable[Insertion]) -> list[Item]:
    """Source items of ``program`` with the null assignments spliced in."""
    at = insertions_by_point(insertions)
    items: list[Item] = []
    for i in program.cfg.ids:
        b = program.cfg.blocks[i]
        before = at.get(ProgramPoint(i, IN), [])
        after = at.get(ProgramPoint(i, OUT), [])
        if b.synthetic:
            items.extend(_null_items(before + after))
            continue
        items.extend(Item("label", lab) for lab in b.labels)
        items.extend(_null_items(before))
        items.append(Item("stmt", b.stmt, b.line, b.tag))
        items.extend(_null_items(after))
        if b.terminator is not None:
            items.append(Item("term", b.terminator, b.line))
    return items


def insert_nulls(program: Program, analyses: Analyses | None = None,
                 suppress_redundant: bool = False) -> NullifyResult:
    analyses = analyses or analyze(program)
    ins = Nullifier(analyses, suppress_redundant).insertions()
    items = transformed_items(program, ins)
    new = build_program(program.types, program.variables, items)
    text = emit_items(program.types, program.variables, items)
    return NullifyResult(program, new, ins, analyses, text)


def nullable(analyses: Analyses, p: AccessPath, point: ProgramPoint) -> bool:
    return Nullifier(analyses).nullable(p, point)


def candidates(analyses: Analyses, point: ProgramPoint) -> list[AccessPath]:
    return Nullifier(analyses).candidates(point)


def transp(analyses: Analyses, p: AccessPath, block: int) -> bool:
    return Nullifier(analyses).transp(p, block)


def nullify_in(analyses: Analyses, p: AccessPath, block: int) -> bool:
    return Nullifier(analyses).nullify_in(p, block)


def nullify_out(analyses: Analyses, p: AccessPath, block: int) -> bool:
    return Nullifier(analyses).nullify_out(p, block)
