"""Concrete execution of heap IR programs, and oracles built on it.

The interpreter runs a program on a model heap whose initial state gives
every declared variable its own complete tree of objects.  Branch outcomes
come from a schedule.  Execution records a trace of observable events:
dereferences, uses, values handed to calls and returns, the state visible
at Exit, exceptions, and reachability probes.

Besides execution the module provides the backward path transfer ``T`` and
meet-over-paths oracles for the data-flow analyses on small CFGs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from hra.access_path import EMPTY, AccessPath, PathSet
from hra.alias import AliasResult, may_alias
from hra.avail_ant import ant_flow, avail_flow
from hra.ir import (
    Assign, Block, Call, CondBranch, Goto, Item, New, Null, Program, Return, Skip,
    Statement, Use, build_program, is_null_assign,
)

INIT_DEPTH = 6
EXIT_TAG = -1  # tag of the event recording the state left at Exit
MAX_STEPS = 10000


class ScheduleExhausted(RuntimeError):
    """The program reached a branch after the schedule ran out."""


class StepLimit(RuntimeError):
    """Execution ran longer than the step limit."""


# ---------------------------------------------------------------------------
# heap

@dataclass
class HeapObject:
    record: str
    fields: dict[str, int | None]


@dataclass
class HeapState:
    objects: dict[int, HeapObject] = field(default_factory=dict)
    roots: dict[str, int | None] = field(default_factory=dict)

    def alloc(self, record: str, ref_fields: Iterable[str]) -> int:
        oid = len(self.objects) + 1
        self.objects[oid] = HeapObject(record, {f: None for f in ref_fields})
        return oid

    def target(self, p: AccessPath) -> int | None:
        """Object reached by ``p``, or ``None`` if some hop is null."""
        cur = self.roots.get(p.root)
        for f in p.fields:
            if cur is None:
                return None
            cur = self.objects[cur].fields.get(f)
        return cur

    def reachable(self, roots: Iterable[str] | None = None) -> set[int]:
        names = self.roots if roots is None else roots
        seen: set[int] = set()
        work = [self.roots.get(r) for r in names]
        while work:
            o = work.pop()
            if o is None or o in seen:
                continue
            seen.add(o)
            work.extend(self.objects[o].fields.values())
        return seen

    def digest(self, roots: Iterable[str]) -> tuple:
        """Everything a caller could observe through ``roots``."""
        roots = sorted(roots)
        objs = self.reachable(roots)
        links = tuple(sorted((o, f, t if t is not None else 0)
                             for o in objs for f, t in self.objects[o].fields.items()))
        return tuple((r, self.roots.get(r)) for r in roots), links

    def check(self) -> None:
        """Every non-null slot refers to an existing object."""
        for o in self.objects.values():
            for t in o.fields.values():
                if t is not None and t not in self.objects:
                    raise AssertionError(f"dangling reference to object {t}")
        for t in self.roots.values():
            if t is not None and t not in self.objects:
                raise AssertionError(f"dangling root reference to object {t}")


def _ref_fields(program: Program, record: str) -> tuple[str, ...]:
    t = program.types.get(record)
    return t.ref_fields if t else ()


def _tree(program: Program, heap: HeapState, record: str, depth: int) -> int:
    oid = heap.alloc(record, _ref_fields(program, record))
    if depth > 0:
        t = program.types.get(record)
        for f in _ref_fields(program, record):
            heap.objects[oid].fields[f] = _tree(program, heap, t.target(f), depth - 1)
    return oid


def initial_heap(program: Program, depth: int = INIT_DEPTH) -> HeapState:
    """Every declared variable starts on a fresh complete tree."""
    heap = HeapState()
    for v in program.variables.values():
        heap.roots[v.name] = _tree(program, heap, v.declared_type, depth)
    return heap


# ---------------------------------------------------------------------------
# traces

DEREF, USE, CALL, RETURN, EXIT, EXCEPTION, PROBE = (
    "deref", "use", "call", "return", "exit", "exception", "probe")


@dataclass(frozen=True)
class Event:
    kind: str
    tag: int | None
    path: str = ""
    value: object = None


@dataclass
class Trace:
    events: list[Event] = field(default_factory=list)
    completed: bool = False
    consumed: int = 0

    def observable(self) -> list[Event]:
        """Events compared by equivalence: no probes, and nothing done by
        inserted statements except an exception."""
        return [e for e in self.events
                if e.kind != PROBE and (e.tag is not None or e.kind == EXCEPTION)]

    def probes(self) -> dict[tuple[int, int], int]:
        """``(tag, occurrence) -> reachable count``."""
        out: dict[tuple[int, int], int] = {}
        seen: dict[int, int] = {}
        for e in self.events:
            if e.kind == PROBE:
                k = seen.get(e.tag, 0)
                seen[e.tag] = k + 1
                out[(e.tag, k)] = e.value
        return out

    @property
    def exception(self) -> Event | None:
        return next((e for e in self.events if e.kind == EXCEPTION), None)

    def to_json(self) -> list[dict]:
        return [{"kind": e.kind, "tag": e.tag, "path": e.path,
                 "value": e.value if not isinstance(e.value, tuple) else repr(e.value)}
                for e in self.events]


class _Fault(Exception):
    def __init__(self, path: AccessPath) -> None:
        self.path = path


class _Machine:
    def __init__(self, program: Program, heap: HeapState, trace: Trace) -> None:
        self.program = program
        self.heap = heap
        self.trace = trace
        self.tag: int | None = None

    def emit(self, kind: str, path: object = "", value: object = None) -> None:
        self.trace.events.append(Event(kind, self.tag, str(path), value))

    def deref(self, p: AccessPath) -> int:
        """Object of ``Target(p)`` for reading one of its fields."""
        cur = self.heap.roots.get(p.root)
        for k in range(len(p.fields) + 1):
            prefix = AccessPath(p.root, p.fields[:k])
            if cur is None:
                raise _Fault(prefix)
            if k == len(p.fields):
                break
            self.emit(DEREF, prefix, cur)
            cur = self.heap.objects[cur].fields.get(p.fields[k])
        self.emit(DEREF, p, cur)
        return cur

    def read(self, p: AccessPath) -> int | None:
        if p.is_simple:
            return self.heap.roots.get(p.root)
        return self.heap.objects[self.deref(p.base)].fields.get(p.frontier)

    def write(self, p: AccessPath, value: int | None) -> None:
        if p.is_simple:
            self.heap.roots[p.root] = value
        else:
            self.heap.objects[self.deref(p.base)].fields[p.frontier] = value

    def alloc(self, record: str) -> int:
        return self.heap.alloc(record, _ref_fields(self.program, record))

    def run(self, stmt: Statement) -> None:
        if isinstance(stmt, Assign):
            rhs = stmt.rhs
            if isinstance(rhs, New):
                self.write(stmt.lhs, self.alloc(rhs.record))
            elif isinstance(rhs, Null):
                self.write(stmt.lhs, None)
            else:
                self.write(stmt.lhs, self.read(rhs))
        elif isinstance(stmt, Call):
            args = [self.read(a) for a in stmt.args]
            scope = [f"#{i}" for i in range(len(args))]
            for name, val in zip(scope, args):
                self.heap.roots[name] = val
            self.emit(CALL, stmt.callee, self.heap.digest(scope + self.program.globals))
            for name in scope:
                del self.heap.roots[name]
            record = self.program.type_of(stmt.lhs) or ""
            self.write(stmt.lhs, self.alloc(record))
        elif isinstance(stmt, Use):
            for p, data in stmt.items:
                if data is None:
                    self.emit(USE, p, self.heap.roots.get(p.root))
                else:
                    self.emit(USE, p.extend(data), self.deref(p))
        elif isinstance(stmt, Return):
            val = self.read(stmt.expr)
            self.heap.roots["#ret"] = val
            self.emit(RETURN, stmt.expr, self.heap.digest(["#ret"] + self.program.globals))
            del self.heap.roots["#ret"]
        elif not isinstance(stmt, Skip):
            raise TypeError(f"unknown statement {stmt!r}")


def _branch_target(program: Program, block: Block) -> int | None:
    t = block.terminator
    if t is None:
        return None
    for b in program.cfg.blocks.values():
        if t.target in b.labels:
            return b.id
    return None


def execute(program: Program, schedule: Sequence[bool] = (), probes: bool = True,
            depth: int = INIT_DEPTH, max_steps: int = MAX_STEPS,
            heap: HeapState | None = None) -> Trace:
    """Run ``program`` once.  ``schedule`` gives the outcome of each
    conditional branch in the order they are reached; ``True`` takes the
    jump.  A null dereference records an exception and halts."""
    cfg = program.cfg
    heap = heap if heap is not None else initial_heap(program, depth)
    trace = Trace()
    m = _Machine(program, heap, trace)
    pending = list(schedule)
    b = cfg.entry
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise StepLimit(f"more than {max_steps} steps")
        block = cfg.blocks[b]
        m.tag = block.tag
        if probes and block.tag is not None and not block.synthetic:
            m.emit(PROBE, "", len(heap.reachable(program.variables)))
        try:
            m.run(block.stmt)
        except _Fault as f:
            m.emit(EXCEPTION, f.path, block.tag)
            return trace
        if isinstance(block.stmt, Return) or b == cfg.exit:
            break
        succ = cfg.succ[b]
        if isinstance(block.terminator, CondBranch):
            if not pending:
                raise ScheduleExhausted(f"schedule exhausted at block {b}")
            taken = pending.pop(0)
            trace.consumed += 1
            target = _branch_target(program, block)
            if taken:
                b = target
            else:
                fall = [s for s in succ if s != target]
                b = fall[0] if fall else target
        elif isinstance(block.terminator, Goto):
            b = _branch_target(program, block)
        else:
            b = succ[0]
    m.tag = EXIT_TAG
    m.emit(EXIT, "", heap.digest(program.globals + program.params))
    trace.completed = True
    return trace


def loop_schedule(iterations: int) -> list[bool]:
    """Stay in a loop whose exit branch is taken on ``True``."""
    return [False] * iterations + [True]


def all_schedules(max_len: int) -> Iterator[tuple[bool, ...]]:
    for n in range(max_len + 1):
        yield from itertools.product((False, True), repeat=n)


def completed_schedules(program: Program, max_len: int = 5) -> list[tuple[bool, ...]]:
    """Schedules of at most ``max_len`` branches on which ``program`` uses
    every outcome and reaches its end (or an exception)."""
    out = []
    for s in all_schedules(max_len):
        try:
            t = execute(program, s, probes=False)
        except ScheduleExhausted:
            continue
        if t.consumed == len(s):
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# equivalence

@dataclass
class Verdict:
    ok: bool
    schedules: int = 0
    reductions: list[tuple[tuple[bool, ...], tuple[int, int], int, int]] = field(default_factory=list)
    divergence: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _diverge(o1: list[Event], o2: list[Event]) -> int:
    return next((i for i, (a, b) in enumerate(zip(o1, o2)) if a != b), min(len(o1), len(o2)))


def align(original: Program, modified: Program) -> Program:
    """Tag the statements of ``modified`` as :func:`check_equivalence`
    expects: statements matching the original in order keep its tags, and
    the remaining null stores are marked inserted.  Raises ``ValueError``
    when ``modified`` is not the original plus null stores."""
    orig = [b for b in (original.cfg.blocks[i] for i in original.cfg.ids) if not b.synthetic]
    items: list[Item] = []
    j = 0
    for i in modified.cfg.ids:
        b = modified.cfg.blocks[i]
        if b.synthetic:
            continue
        if j < len(orig) and str(b.stmt) == str(orig[j].stmt):
            tag = orig[j].tag
            j += 1
        elif is_null_assign(b.stmt):
            tag = None
        else:
            raise ValueError(f"line {b.line}: {b.stmt} does not occur in the original")
        items.extend(Item("label", lab) for lab in b.labels)
        items.append(Item("stmt", b.stmt, b.line, tag))
        if b.terminator is not None:
            items.append(Item("term", b.terminator, b.line))
    if j != len(orig):
        raise ValueError(f"statement {orig[j].stmt} of the original is missing")
    return build_program(modified.types, modified.variables, items)


def check_equivalence(original: Program, modified: Program,
                      schedules: Iterable[Sequence[bool]]) -> Verdict:
    """Same observable behaviour, and never more reachable objects at a probe.

    When the original raises an exception on a schedule, the modified
    program may raise it earlier on the same run: it must raise too, and
    what it observed before must be a prefix of what the original observed.
    """
    verdict = Verdict(True)
    for s in schedules:
        s = tuple(s)
        verdict.schedules += 1
        t1 = execute(original, s)
        t2 = execute(modified, s)
        o1, o2 = t1.observable(), t2.observable()
        where = f"schedule {list(map(int, s))}"
        if t1.exception is None or t2.exception is None:
            same = o1 == o2
        else:
            head1, head2 = o1[:-1], o2[:-1]
            same = head1[:len(head2)] == head2
            o1, o2 = head1, head2
        if not same:
            k = _diverge(o1, o2)
            a = o1[k] if k < len(o1) else None
            b = o2[k] if k < len(o2) else None
            return Verdict(False, verdict.schedules, verdict.reductions,
                           f"{where}: event {k} differs: {a} vs {b}")
        p1, p2 = t1.probes(), t2.probes()
        for key, n1 in sorted(p1.items()):
            n2 = p2.get(key)
            if n2 is None:
                continue
            if n2 > n1:
                return Verdict(False, verdict.schedules, verdict.reductions,
                               f"{where}: probe {key} reaches {n2} > {n1}")
            if n2 < n1:
                verdict.reductions.append((s, key, n1, n2))
    return verdict


# ---------------------------------------------------------------------------
# T(s, rho)

def transfer_path(stmt: Statement | Sequence[Statement], p: AccessPath,
                  globals_: Iterable[str] = ()) -> AccessPath:
    """The path before ``stmt`` naming the link that ``p`` names after it,
    or ``EMPTY`` when there is none.  A sequence applies its statements
    from last to first."""
    if isinstance(stmt, (list, tuple)):
        for s in reversed(stmt):
            p = transfer_path(s, p, globals_)
        return p
    if p.is_empty:
        return EMPTY
    if isinstance(stmt, Assign):
        if not stmt.lhs.is_prefix_of(p):
            return p
        if isinstance(stmt.rhs, (New, Null)):
            return EMPTY
        return stmt.rhs.extend(*p.suffix_after(stmt.lhs))
    if isinstance(stmt, Call):
        if p.root in set(globals_):
            return p
        # the callee produced the value stored in the lhs
        return EMPTY if stmt.lhs.is_prefix_of(p) else p
    return p


# ---------------------------------------------------------------------------
# meet-over-paths oracles

def _paths(program: Program, start: int, forward: bool, unroll: int | None) -> Iterator[list[int]]:
    """Block sequences from ``start`` to Exit (forward) or from Entry to
    ``start`` (backward, returned in execution order)."""
    cfg = program.cfg
    if not cfg.is_acyclic() and unroll is None:
        raise ValueError("cyclic CFG needs an unroll bound")
    limit = 1 + (unroll or 0)
    nxt = cfg.succ if forward else cfg.pred
    goal = cfg.exit if forward else cfg.entry
    stack = [(start, [start], {start: 1})]
    while stack:
        b, path, count = stack.pop()
        if b == goal:
            yield path if forward else path[::-1]
            if not nxt[b]:
                continue
        for m in nxt[b]:
            if count.get(m, 0) < limit:
                c = dict(count)
                c[m] = c.get(m, 0) + 1
                stack.append((m, path + [m], c))


def _prefixes(p: AccessPath) -> set[AccessPath]:
    return set(p.iter_prefixes()) if not p.is_empty else set()


def _cone(p: AccessPath, fields: Sequence[str], k: int) -> set[AccessPath]:
    """``p`` and its extensions up to length ``k``."""
    out = {p} if len(p.fields) <= k else set()
    frontier = [p]
    while frontier:
        q = frontier.pop()
        if len(q.fields) >= k:
            continue
        for f in fields:
            r = q.extend(f)
            out.add(r)
            frontier.append(r)
    return out


def live_set_flow(block: Block, live: set[AccessPath], fields: Sequence[str], k: int,
                  globals_: Iterable[str] = ()) -> set[AccessPath]:
    """Explicit liveness before ``block`` given the set after it, on
    explicit path sets truncated at ``k`` fields."""
    stmt = block.stmt
    out = set(live)
    gen: set[AccessPath] = set()
    if isinstance(stmt, (Assign, Call)):
        lhs = stmt.lhs
        out = {p for p in out if not lhs.is_prefix_of(p)}
        if not lhs.is_simple:
            gen |= _prefixes(lhs.base)
        if isinstance(stmt, Assign) and isinstance(stmt.rhs, AccessPath):
            rhs = stmt.rhs
            if not rhs.is_simple:
                gen |= _prefixes(rhs.base)
            for p in live:
                if lhs.is_prefix_of(p):
                    gen.add(rhs.extend(*p.suffix_after(lhs)))
        elif isinstance(stmt, Call):
            for a in stmt.args:
                gen |= _prefixes(a) | _cone(a, fields, k)
            for g in globals_:
                gen |= _cone(AccessPath(g), fields, k)
    elif isinstance(stmt, Use):
        for p in stmt.paths:
            gen |= _prefixes(p)
    elif isinstance(stmt, Return):
        gen |= _prefixes(stmt.expr) | _cone(stmt.expr, fields, k)
        for g in globals_:
            gen |= _cone(AccessPath(g), fields, k)
    return {p for p in out | gen if len(p.fields) <= k}


@dataclass
class MopResult:
    kind: str
    pin: dict[int, set[AccessPath]]
    pout: dict[int, set[AccessPath]]
    k: int | None = None

    def at(self, block: int, side: str) -> set[AccessPath]:
        return self.pin[block] if side == "in" else self.pout[block]


LIVE, AVAIL, ANT = "live", "avail", "ant"


def mop_oracle(program: Program, kind: str, k: int = 4, unroll: int | None = None,
               aliases: AliasResult | None = None,
               exit_live: Iterable[str] | None = None) -> MopResult:
    """Meet over all paths, by enumeration.

    ``live``: union over paths to Exit, paths truncated at ``k`` fields.
    ``avail``: intersection over paths from Entry.  ``ant``: intersection
    over paths to Exit.  Cyclic CFGs need ``unroll``, the number of extra
    visits allowed per block.
    """
    cfg = program.cfg
    globals_ = program.globals
    blocks = cfg.blocks
    pin: dict[int, set[AccessPath]] = {}
    pout: dict[int, set[AccessPath]] = {}
    if kind == LIVE:
        fields = program.fields()
        boundary: set[AccessPath] = set()
        for v in (globals_ if exit_live is None else exit_live):
            boundary |= _cone(AccessPath(v), fields, k) - {AccessPath(v)}
        for b in blocks:
            acc_in: set[AccessPath] = set()
            acc_out: set[AccessPath] = set()
            for path in _paths(program, b, True, unroll):
                live = set(boundary)
                for i in reversed(path[1:]):
                    live = live_set_flow(blocks[i], live, fields, k, globals_)
                acc_out |= live
                acc_in |= live_set_flow(blocks[b], live, fields, k, globals_)
            pin[b], pout[b] = acc_in, acc_out
        return MopResult(kind, pin, pout, k)

    aliases = aliases or may_alias(program)
    if kind == AVAIL:
        for b in blocks:
            meet_in: PathSet | None = None
            meet_out: PathSet | None = None
            for path in _paths(program, b, False, unroll):
                x = PathSet.of()
                for i in path[:-1]:
                    x = avail_flow(blocks[i], x, aliases.ain[i], globals_)
                y = avail_flow(blocks[b], x, aliases.ain[b], globals_)
                meet_in = x if meet_in is None else meet_in & x
                meet_out = y if meet_out is None else meet_out & y
            pin[b] = set(meet_in.paths) if meet_in is not None else set()
            pout[b] = set(meet_out.paths) if meet_out is not None else set()
        return MopResult(kind, pin, pout)
    if kind == ANT:
        for b in blocks:
            meet_in = meet_out = None
            for path in _paths(program, b, True, unroll):
                x = PathSet.of()
                for i in reversed(path[1:]):
                    x = ant_flow(blocks[i], x, aliases.aout[i], globals_)
                y = ant_flow(blocks[b], x, aliases.aout[b], globals_)
                meet_out = x if meet_out is None else meet_out & x
                meet_in = y if meet_in is None else meet_in & y
            pin[b] = set(meet_in.paths) if meet_in is not None else set()
            pout[b] = set(meet_out.paths) if meet_out is not None else set()
        return MopResult(kind, pin, pout)
    raise ValueError(f"unknown analysis kind {kind!r}")
