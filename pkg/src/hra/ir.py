"""The analyzed language: record types, variables, statements, and the
single-statement-per-block control-flow graph.

Text format, one item per line (``#`` starts a comment)::

    class T { lptr rptr }        # reference fields; ``f: D`` gives a target type
    global g: T
    param  p: T
    local  x: T
    L2: use x.d                  # a label may prefix a statement
    x = x.rptr
    x.f = y | x = new T | x = null | x = call f(y) | return x | skip
    if c goto L2 | goto L2

``if``/``goto`` are terminators of the block holding the preceding
statement.  Condition variables that are not declared are opaque scalars.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from hra.access_path import AccessPath

GLOBAL, PARAM, LOCAL = "global", "param", "local"
IN, OUT = "in", "out"


class IRSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class CFGError(ValueError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    message: str
    block: int | None = None
    line: int | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = []
        if self.block is not None:
            where.append(f"B{self.block}")
        if self.line is not None:
            where.append(f"line {self.line}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.severity}: {self.message}{loc}"


# ---------------------------------------------------------------------------
# types and variables

@dataclass(frozen=True)
class RecordType:
    name: str
    ref_fields: tuple[str, ...] = ()
    field_types: tuple[tuple[str, str], ...] = ()
    has_data: bool = True

    def target(self, f: str) -> str:
        return dict(self.field_types)[f]


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    declared_type: str


# ---------------------------------------------------------------------------
# statements

@dataclass(frozen=True)
class New:
    record: str

    def __str__(self) -> str:
        return f"new {self.record}"


@dataclass(frozen=True)
class Null:
    def __str__(self) -> str:
        return "null"


NULL = Null()
Rhs = Union[AccessPath, New, Null]


def _expr(p: AccessPath) -> str:
    return ".".join((p.root,) + p.fields)


@dataclass(frozen=True)
class Assign:
    lhs: AccessPath
    rhs: Rhs

    def exprs(self) -> tuple[AccessPath, ...]:
        if isinstance(self.rhs, AccessPath):
            return (self.lhs, self.rhs)
        return (self.lhs,)

    def __str__(self) -> str:
        rhs = _expr(self.rhs) if isinstance(self.rhs, AccessPath) else str(self.rhs)
        return f"{_expr(self.lhs)} = {rhs}"


@dataclass(frozen=True)
class Call:
    lhs: AccessPath
    callee: str
    args: tuple[AccessPath, ...] = ()

    def exprs(self) -> tuple[AccessPath, ...]:
        return (self.lhs,) + self.args

    def __str__(self) -> str:
        args = ", ".join(_expr(a) for a in self.args)
        return f"{_expr(self.lhs)} = call {self.callee}({args})"


@dataclass(frozen=True)
class Use:
    """Reads the data ``d`` of each ``(path, d)``; ``d`` is ``None`` for a
    bare variable."""

    items: tuple[tuple[AccessPath, str | None], ...]

    @property
    def paths(self) -> tuple[AccessPath, ...]:
        return tuple(p for p, _ in self.items)

    def exprs(self) -> tuple[AccessPath, ...]:
        return self.paths

    def __str__(self) -> str:
        parts = [_expr(p) + (f".{d}" if d else "") for p, d in self.items]
        return "use " + ", ".join(parts)


@dataclass(frozen=True)
class Return:
    expr: AccessPath

    def exprs(self) -> tuple[AccessPath, ...]:
        return (self.expr,)

    def __str__(self) -> str:
        return f"return {_expr(self.expr)}"


@dataclass(frozen=True)
class Skip:
    def exprs(self) -> tuple[AccessPath, ...]:
        return ()

    def __str__(self) -> str:
        return "skip"


Statement = Union[Assign, Call, Use, Return, Skip]


@dataclass(frozen=True)
class CondBranch:
    var: AccessPath
    target: str

    def __str__(self) -> str:
        return f"if {_expr(self.var)} goto {self.target}"


@dataclass(frozen=True)
class Goto:
    target: str

    def __str__(self) -> str:
        return f"goto {self.target}"


Terminator = Union[CondBranch, Goto]


def lhs_of(stmt: Statement) -> AccessPath | None:
    if isinstance(stmt, (Assign, Call)):
        return stmt.lhs
    return None


def is_null_assign(stmt: Statement) -> bool:
    return isinstance(stmt, Assign) and isinstance(stmt.rhs, Null)


# ---------------------------------------------------------------------------
# source items: the flat form shared by the parser and the transformer

AUTO = "auto"


@dataclass(frozen=True)
class Item:
    """A label, a statement or a terminator in source order.  ``tag`` names
    the original block a statement came from; ``AUTO`` means "its own
    block id" and ``None`` marks inserted statements."""

    kind: str  # "label" | "stmt" | "term"
    value: object
    line: int = 0
    tag: object = AUTO


@dataclass(frozen=True)
class Block:
    id: int
    stmt: Statement
    labels: tuple[str, ...] = ()
    terminator: Terminator | None = None
    tag: int | None = None
    line: int = 0
    synthetic: bool = False

    def expr_instances(self, index: int) -> dict[str, int]:
        """Instance counters in effect at the start of expression ``index``."""
        counts: dict[str, int] = {}
        for p in self.stmt.exprs()[:index]:
            for f in p.fields:
                counts[f] = counts.get(f, 0) + 1
        return counts


@dataclass
class CFG:
    blocks: dict[int, Block]
    succ: dict[int, tuple[int, ...]]
    pred: dict[int, tuple[int, ...]]
    entry: int
    exit: int
    pruned: tuple[int, ...] = ()

    @property
    def ids(self) -> list[int]:
        return sorted(self.blocks)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, bs in self.succ.items() for b in bs)

    def postorder(self, reverse_graph: bool = False) -> list[int]:
        succ = self.pred if reverse_graph else self.succ
        start = self.exit if reverse_graph else self.entry
        seen: set[int] = set()
        order: list[int] = []
        stack: list[tuple[int, Iterator[int]]] = [(start, iter(succ[start]))]
        seen.add(start)
        while stack:
            node, it = stack[-1]
            for m in it:
                if m not in seen:
                    seen.add(m)
                    stack.append((m, iter(succ[m])))
                    break
            else:
                stack.pop()
                order.append(node)
        # blocks that cannot reach the start (e.g. endless loops) go last
        order.extend(b for b in sorted(self.blocks, reverse=True) if b not in seen)
        return order

    def reverse_postorder(self, reverse_graph: bool = False) -> list[int]:
        return list(reversed(self.postorder(reverse_graph)))

    def is_acyclic(self) -> bool:
        color: dict[int, int] = {}

        def visit(n: int) -> bool:
            color[n] = 1
            for m in self.succ[n]:
                c = color.get(m, 0)
                if c == 1 or (c == 0 and not visit(m)):
                    return False
            color[n] = 2
            return True

        return all(color.get(b, 0) or visit(b) for b in self.ids)

    def paths_to_exit(self, start: int, limit: int = 100000) -> Iterator[list[int]]:
        """All block sequences from ``start`` to Exit (acyclic CFGs only)."""
        count = 0
        stack = [(start, [start])]
        while stack:
            n, walk = stack.pop()
            if n == self.exit:
                count += 1
                if count > limit:
                    raise CFGError("too many paths")
                yield walk
                continue
            for m in reversed(self.succ[n]):
                stack.append((m, walk + [m]))

    def paths_from_entry(self, end: int, limit: int = 100000) -> Iterator[list[int]]:
        count = 0
        stack = [(end, [end])]
        while stack:
            n, walk = stack.pop()
            if n == self.entry:
                count += 1
                if count > limit:
                    raise CFGError("too many paths")
                yield list(reversed(walk))
                continue
            for m in reversed(self.pred[n]):
                stack.append((m, walk + [m]))


@dataclass
class Program:
    types: dict[str, RecordType]
    variables: dict[str, Variable]
    items: tuple[Item, ...]
    cfg: CFG
    diagnostics: list[Diagnostic] = field(default_factory=list)

    # -- queries ---------------------------------------------------------
    @property
    def globals(self) -> list[str]:
        return [v.name for v in self.variables.values() if v.kind == GLOBAL]

    @property
    def params(self) -> list[str]:
        return [v.name for v in self.variables.values() if v.kind == PARAM]

    @property
    def ref_vars(self) -> list[str]:
        return list(self.variables)

    def block(self, i: int) -> Block:
        return self.cfg.blocks[i]

    def type_of(self, p: AccessPath) -> str | None:
        """Record type of ``Target(p)``, or ``None`` if ``p`` does not type."""
        var = self.variables.get(p.root) if p.root else None
        if var is None:
            return None
        t = var.declared_type
        for f in p.fields:
            rt = self.types.get(t)
            if rt is None or f not in rt.ref_fields:
                return None
            t = rt.target(f)
        return t

    def field_labels(self) -> set[tuple[str, int, int]]:
        out = set()
        for b in self.cfg.blocks.values():
            for i, p in enumerate(b.stmt.exprs()):
                counts = b.expr_instances(i)
                for f in p.fields:
                    out.add((f, b.id, counts.get(f, 0)))
                    counts[f] = counts.get(f, 0) + 1
        return out

    def fields(self) -> list[str]:
        return sorted({f for t in self.types.values() for f in t.ref_fields})

    def structure(self) -> tuple:
        """Comparable shape used for round-trip checks.  Blocks are named by
        their rank in source order, so pruning gaps do not matter."""
        rank = {b: i for i, b in enumerate(self.cfg.ids)}
        blocks = tuple((rank[b.id], str(b.stmt), b.terminator is not None and str(type(b.terminator).__name__),
                        b.synthetic) for b in (self.cfg.blocks[i] for i in self.cfg.ids))
        edges = tuple((rank[a], rank[b]) for a, b in self.cfg.edges())
        return (tuple(sorted(self.types.items())), tuple(self.variables.items()),
                blocks, edges, rank[self.cfg.entry], rank[self.cfg.exit])


def out_fields(program: Program, p: AccessPath) -> frozenset[str]:
    """Reference fields of ``Target(p)``'s record type."""
    t = program.type_of(p)
    if t is None:
        raise ValueError(f"cannot type access path {p}")
    return frozenset(program.types[t].ref_fields)


# ---------------------------------------------------------------------------
# parsing

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_EXPR = rf"{_IDENT}(?:\s*\.\s*{_IDENT})*"
_CLASS = re.compile(rf"^class\s+({_IDENT})\s*\{{(.*)\}}$")
_DECL = re.compile(rf"^(global|param|local)\s+({_IDENT})\s*:\s*({_IDENT})$")
_LABEL = re.compile(rf"^({_IDENT})\s*:\s*(.*)$")
_IF = re.compile(rf"^if\s+(\S.*?)\s+goto\s+({_IDENT})$")
_GOTO = re.compile(rf"^goto\s+({_IDENT})$")
_CALL = re.compile(rf"^call\s+({_IDENT})\s*\((.*)\)$")
_KEYWORDS = {"class", "global", "param", "local", "if", "goto", "use", "return",
             "new", "null", "call", "skip"}


def _parse_expr(text: str, line: int, col: int) -> AccessPath:
    text = text.strip()
    if not re.fullmatch(_EXPR, text):
        bad = 0
        for i, ch in enumerate(text):
            if not (ch.isalnum() or ch in "_. "):
                bad = i
                break
        if text.startswith(".") or not text:
            bad = 0
        raise IRSyntaxError(line, col + bad, f"malformed access expression {text!r}")
    parts = [s.strip() for s in text.split(".")]
    if parts[0] in _KEYWORDS:
        raise IRSyntaxError(line, col, f"keyword {parts[0]!r} used as a variable")
    return AccessPath(parts[0], tuple(parts[1:]))


def _parse_class(m: re.Match, line: int) -> RecordType:
    name, body = m.group(1), m.group(2)
    refs: list[str] = []
    targets: list[tuple[str, str]] = []
    tokens = re.findall(rf"({_IDENT})\s*(?::\s*({_IDENT}))?", body.replace(",", " ").replace(";", " "))
    leftover = re.sub(rf"{_IDENT}\s*(?::\s*{_IDENT})?", "", body).replace(",", "").replace(";", "")
    if leftover.strip():
        raise IRSyntaxError(line, 1, f"malformed class body {body.strip()!r}")
    for fname, target in tokens:
        if fname in refs:
            raise IRSyntaxError(line, 1, f"duplicate field {fname!r} in class {name}")
        refs.append(fname)
        targets.append((fname, target or name))
    return RecordType(name, tuple(refs), tuple(targets))


def _parse_statement(text: str, line: int, col: int) -> Item:
    if text == "skip":
        return Item("stmt", Skip(), line)
    m = _IF.match(text)
    if m:
        return Item("term", CondBranch(_parse_expr(m.group(1), line, col + 3), m.group(2)), line)
    m = _GOTO.match(text)
    if m:
        return Item("term", Goto(m.group(1)), line)
    if text.startswith("use ") or text == "use":
        body = text[3:]
        if not body.strip():
            raise IRSyntaxError(line, col + 3, "use needs at least one expression")
        items = []
        offset = col + 4
        for part in body.split(","):
            p = _parse_expr(part, line, offset)
            offset += len(part) + 1
            if p.fields:
                items.append((AccessPath(p.root, p.fields[:-1]), p.fields[-1]))
            else:
                items.append((p, None))
        return Item("stmt", Use(tuple(items)), line)
    if text.startswith("return ") or text == "return":
        return Item("stmt", Return(_parse_expr(text[6:], line, col + 7)), line)
    if "=" in text:
        lhs_text, rhs_text = text.split("=", 1)
        lhs = _parse_expr(lhs_text, line, col)
        rhs_text = rhs_text.strip()
        rcol = col + len(lhs_text) + 2
        if rhs_text == "null":
            return Item("stmt", Assign(lhs, NULL), line)
        if rhs_text.startswith("new "):
            rec = rhs_text[4:].strip()
            if not re.fullmatch(_IDENT, rec):
                raise IRSyntaxError(line, rcol + 4, f"malformed class name {rec!r}")
            return Item("stmt", Assign(lhs, New(rec)), line)
        m = _CALL.match(rhs_text)
        if m:
            args = tuple(_parse_expr(a, line, rcol) for a in m.group(2).split(",") if a.strip())
            return Item("stmt", Call(lhs, m.group(1), args), line)
        return Item("stmt", Assign(lhs, _parse_expr(rhs_text, line, rcol)), line)
    raise IRSyntaxError(line, col, f"unrecognized statement {text!r}")


def parse_items(text: str) -> tuple[dict[str, RecordType], dict[str, Variable], list[Item]]:
    types: dict[str, RecordType] = {}
    variables: dict[str, Variable] = {}
    items: list[Item] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        m = _CLASS.match(stripped)
        if m:
            rt = _parse_class(m, lineno)
            if rt.name in types:
                raise IRSyntaxError(lineno, col, f"duplicate class {rt.name!r}")
            types[rt.name] = rt
            continue
        m = _DECL.match(stripped)
        if m:
            kind, name, tname = m.groups()
            if name in variables:
                raise IRSyntaxError(lineno, col, f"duplicate variable {name!r}")
            variables[name] = Variable(name, kind, tname)
            continue
        while True:
            m = _LABEL.match(stripped)
            if not m or m.group(1) in _KEYWORDS:
                break
            items.append(Item("label", m.group(1), lineno))
            rest = m.group(2)
            col += len(stripped) - len(rest)
            stripped = rest.strip()
        if stripped:
            items.append(_parse_statement(stripped, lineno, col))
    return types, variables, items


def parse_program(text: str) -> Program:
    """Parse the text IR and build its CFG (diagnostics are attached)."""
    types, variables, items = parse_items(text)
    prog = build_program(types, variables, items)
    if not items:
        prog.diagnostics.append(Diagnostic("empty program", severity="warning"))
    return prog


# ---------------------------------------------------------------------------
# CFG construction

@dataclass
class _Proto:
    stmt: Statement
    labels: list[str]
    line: int
    tag: object
    terminator: Terminator | None = None


def _group(items: Sequence[Item]) -> list[_Proto]:
    protos: list[_Proto] = []
    pending: list[str] = []
    for it in items:
        if it.kind == "label":
            pending.append(it.value)  # type: ignore[arg-type]
        elif it.kind == "stmt":
            protos.append(_Proto(it.value, pending, it.line, it.tag))  # type: ignore[arg-type]
            pending = []
        else:
            if pending or not protos or protos[-1].terminator is not None:
                protos.append(_Proto(Skip(), pending, it.line, it.tag))
                pending = []
            protos[-1].terminator = it.value  # type: ignore[assignment]
    if pending:
        protos.append(_Proto(Skip(), pending, items[-1].line if items else 0, AUTO))
    return protos


def build_program(types: dict[str, RecordType], variables: dict[str, Variable],
                  items: Sequence[Item]) -> Program:
    protos = _group(items)
    diags: list[Diagnostic] = []
    labels: dict[str, int] = {}
    for i, p in enumerate(protos, start=1):
        for lab in p.labels:
            if lab in labels:
                raise CFGError(f"duplicate label {lab!r}")
            labels[lab] = i

    n = len(protos)
    succ: dict[int, list[int]] = {}
    sinks: list[int] = []
    for i, p in enumerate(protos, start=1):
        nxt = [i + 1] if i < n else []
        t = p.terminator
        targets: list[int] = []
        if t is not None:
            if t.target not in labels:
                raise CFGError(f"unresolved label {t.target!r} (line {p.line})")
            targets = [labels[t.target]]
        if isinstance(p.stmt, Return):
            out: list[int] = []
            sinks.append(i)
        elif isinstance(t, Goto):
            out = targets
        elif isinstance(t, CondBranch):
            out = list(dict.fromkeys(nxt + targets))
            if not nxt:
                sinks.append(i)  # falls off the end when the branch is not taken
        else:
            out = nxt
        if not out and i not in sinks:
            sinks.append(i)
        succ[i] = out

    blocks: dict[int, Block] = {}
    for i, p in enumerate(protos, start=1):
        tag = i if p.tag is AUTO else p.tag
        blocks[i] = Block(i, p.stmt, tuple(p.labels), p.terminator, tag, p.line)

    if n == 0:
        blocks[0] = Block(0, Skip(), synthetic=True)
        succ[0] = []
        entry = exit_ = 0
    else:
        entry = 1
        if any(1 in s for s in succ.values()):
            entry = 0
            blocks[0] = Block(0, Skip(), synthetic=True)
            succ[0] = [1]
        if len(sinks) == 1 and not succ[sinks[0]]:
            exit_ = sinks[0]
        else:
            exit_ = n + 1
            blocks[exit_] = Block(exit_, Skip(), synthetic=True)
            succ[exit_] = []
            for s in sinks:
                succ[s] = succ[s] + [exit_]

    # prune blocks unreachable from Entry
    seen = {entry}
    work = [entry]
    while work:
        b = work.pop()
        for m in succ[b]:
            if m not in seen:
                seen.add(m)
                work.append(m)
    pruned = tuple(sorted(b for b in blocks if b not in seen))
    for b in pruned:
        if b == exit_:
            diags.append(Diagnostic("Exit is unreachable from Entry", b))
            continue
        diags.append(Diagnostic("unreachable statement pruned", b, blocks[b].line, "warning"))
    for b in pruned:
        if b != exit_:
            del blocks[b]
            del succ[b]
    succ = {b: [m for m in ms if m in blocks] for b, ms in succ.items()}
    pred: dict[int, list[int]] = {b: [] for b in blocks}
    for b in sorted(blocks):
        for m in succ[b]:
            pred[m].append(b)

    # every block must reach Exit
    back = {exit_}
    work = [exit_]
    while work:
        b = work.pop()
        for m in pred[b]:
            if m not in back:
                back.add(m)
                work.append(m)
    for b in sorted(set(blocks) - back):
        diags.append(Diagnostic("block cannot reach Exit", b, blocks[b].line))

    cfg = CFG(blocks, {b: tuple(s) for b, s in succ.items()},
              {b: tuple(p) for b, p in pred.items()}, entry, exit_, pruned)
    prog = Program(dict(types), dict(variables), tuple(items), cfg, diags)
    prog.diagnostics.extend(validate(prog))
    return prog


def build_cfg(text_or_items: str | Sequence[Item]) -> CFG:
    if isinstance(text_or_items, str):
        return parse_program(text_or_items).cfg
    return build_program({}, {}, text_or_items).cfg


# ---------------------------------------------------------------------------
# validation

def validate(program: Program) -> list[Diagnostic]:
    """Type and shape checks; one diagnostic per violation."""
    out: list[Diagnostic] = []
    for name, rt in program.types.items():
        for f, target in rt.field_types:
            if target not in program.types:
                out.append(Diagnostic(f"field {name}.{f} has unknown type {target!r}"))
    for v in program.variables.values():
        if v.declared_type not in program.types:
            out.append(Diagnostic(f"variable {v.name} has unknown type {v.declared_type!r}"))

    def check(p: AccessPath, b: Block) -> str | None:
        var = program.variables.get(p.root)
        if var is None:
            out.append(Diagnostic(f"undeclared variable {p.root!r}", b.id, b.line))
            return None
        t = var.declared_type
        for f in p.fields:
            rt = program.types.get(t)
            if rt is None:
                return None
            if f not in rt.ref_fields:
                out.append(Diagnostic(f"unknown field {f!r} of {t}", b.id, b.line))
                return None
            t = rt.target(f)
        return t

    for i in program.cfg.ids:
        b = program.cfg.blocks[i]
        s = b.stmt
        if isinstance(s, Assign):
            lt = check(s.lhs, b)
            if isinstance(s.rhs, AccessPath):
                rt_ = check(s.rhs, b)
                if lt and rt_ and lt != rt_:
                    out.append(Diagnostic(f"type mismatch: {lt} = {rt_}", b.id, b.line))
            elif isinstance(s.rhs, New):
                if s.rhs.record not in program.types:
                    out.append(Diagnostic(f"unknown class {s.rhs.record!r}", b.id, b.line))
                elif lt and lt != s.rhs.record:
                    out.append(Diagnostic(f"type mismatch: {lt} = new {s.rhs.record}", b.id, b.line))
        elif isinstance(s, Call):
            check(s.lhs, b)
            for a in s.args:
                check(a, b)
        elif isinstance(s, Use):
            for p, d in s.items:
                check(p, b)
                t = program.type_of(p)
                if d is not None and t is not None and d in program.types[t].ref_fields:
                    out.append(Diagnostic(f"use of reference field {d!r} as data", b.id, b.line,
                                          "warning"))
        elif isinstance(s, Return):
            check(s.expr, b)
        if isinstance(b.terminator, CondBranch) and not b.terminator.var.is_simple:
            out.append(Diagnostic("non-simple condition", b.id, b.line))
    return out


# ---------------------------------------------------------------------------
# emission

def emit_items(types: dict[str, RecordType], variables: dict[str, Variable],
               items: Iterable[Item]) -> str:
    lines: list[str] = []
    for rt in types.values():
        fields = " ".join(f if t == rt.name else f"{f}: {t}" for f, t in rt.field_types)
        lines.append(f"class {rt.name} {{ {fields} }}" if fields else f"class {rt.name} {{ }}")
    for v in variables.values():
        lines.append(f"{v.kind} {v.name}: {v.declared_type}")
    if lines:
        lines.append("")
    pending: list[str] = []
    for it in items:
        if it.kind == "label":
            pending.append(f"{it.value}:")
            continue
        text = str(it.value)
        indent = "" if pending else "    "
        lines.append(" ".join(pending + [text]) if pending else indent + text)
        pending = []
    if pending:
        lines.append(" ".join(pending + ["skip"]))
    return "\n".join(lines) + "\n"


def emit(program: Program) -> str:
    """Text IR for ``program`` (blocks in id order; synthetic blocks omitted)."""
    items: list[Item] = []
    for i in program.cfg.ids:
        b = program.cfg.blocks[i]
        if b.synthetic:
            continue
        items.extend(Item("label", lab) for lab in b.labels)
        items.append(Item("stmt", b.stmt))
        if b.terminator is not None:
            items.append(Item("term", b.terminator))
    return emit_items(program.types, program.variables, items)


# ---------------------------------------------------------------------------
# program points

@dataclass(frozen=True, order=True)
class ProgramPoint:
    block: int
    side: str  # "in" < "out" orders In before Out

    def __str__(self) -> str:
        return f"{'In' if self.side == IN else 'Out'}({self.block})"


def parse_point(text: str) -> ProgramPoint:
    """``B4:in``, ``4:out`` or ``In(4)``."""
    text = text.strip()
    m = re.fullmatch(r"(?i)(in|out)\((\d+)\)", text)
    if m:
        return ProgramPoint(int(m.group(2)), m.group(1).lower())
    m = re.fullmatch(r"(?i)B?(\d+):(in|out)", text)
    if not m:
        raise ValueError(f"malformed program point {text!r}")
    return ProgramPoint(int(m.group(1)), m.group(2).lower())
