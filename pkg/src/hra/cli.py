"""Command-line driver: ``hra analyze|nullify|run|dot FILE``.

Exit status is 0 on success, 1 when the input has diagnostics (syntax,
control flow, types, or an unknown point or variable), and 2 when an
internal invariant breaks (an analysis fails to converge or a transformed
program behaves differently).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from hra.fixpoint import NonConvergence
from hra.interp import ScheduleExhausted, check_equivalence, completed_schedules, execute
from hra.ir import CFGError, IRSyntaxError, Program, parse_point, parse_program
from hra.nullifier import analyze, insert_nulls
from hra.report import KINDS, build_report, dot_for, to_json

OK, DIAGNOSTICS, INTERNAL = 0, 1, 2


class UsageError(Exception):
    """Bad point, variable or schedule given on the command line."""


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> Program:
    program = parse_program(Path(path).read_text())
    errors = [d for d in program.diagnostics if d.severity == "error"]
    for d in program.diagnostics:
        print(f"{path}: {d}", file=sys.stderr)
    if errors:
        raise UsageError(f"{len(errors)} error(s) in {path}")
    return program


def _schedule(text: str | None) -> tuple[bool, ...] | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return ()
    try:
        values = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed schedule {text!r}") from None
    if any(v not in (0, 1) for v in values):
        raise UsageError(f"schedule entries must be 0 or 1: {text!r}")
    return tuple(bool(v) for v in values)


def cmd_analyze(args: argparse.Namespace) -> int:
    program = _load(args.file)
    result = insert_nulls(program)
    _write(to_json(build_report(result.analyses, result.insertions)), args.out)
    return OK


def cmd_nullify(args: argparse.Namespace) -> int:
    program = _load(args.file)
    result = insert_nulls(program)
    _write(result.text, args.out)
    for ins in result.insertions:
        print(ins, file=sys.stderr)
    return OK


def cmd_run(args: argparse.Namespace) -> int:
    program = _load(args.file)
    result = insert_nulls(program)
    given = _schedule(args.schedule)
    schedules = [given] if given is not None else completed_schedules(program)
    rows = []
    for s in schedules:
        try:
            t1 = execute(program, s)
            t2 = execute(result.program, s)
        except ScheduleExhausted as e:
            raise UsageError(str(e)) from None
        p1, p2 = t1.probes(), t2.probes()
        sched = ",".join(str(int(b)) for b in s) or "-"
        for (tag, k), n1 in sorted(p1.items()):
            rows.append(f"{sched:>12} {tag:>5} {k:>4} {n1:>9} {p2.get((tag, k), '-'):>9}")
        end1 = "exception" if t1.exception else "exit"
        end2 = "exception" if t2.exception else "exit"
        rows.append(f"{sched:>12} {'end':>5} {'':>4} {end1:>9} {end2:>9}")
    verdict = check_equivalence(program, result.program, schedules)
    text = [f"{'schedule':>12} {'block':>5} {'occ':>4} {'original':>9} {'nullified':>9}", *rows,
            f"verdict: {'OK' if verdict.ok else 'DIFFERENT'} over {verdict.schedules} schedule(s)"]
    if not verdict.ok:
        text.append(verdict.divergence)
    _write("\n".join(text) + "\n", args.out)
    return OK if verdict.ok else INTERNAL


def cmd_dot(args: argparse.Namespace) -> int:
    program = _load(args.file)
    if args.point is None:
        raise UsageError("dot needs --point")
    try:
        point = parse_point(args.point)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if point.block not in program.cfg.blocks:
        raise UsageError(f"unknown block {point.block}")
    if args.var is not None and args.var not in program.variables:
        raise UsageError(f"unknown variable {args.var!r}")
    try:
        text = dot_for(analyze(program), point, args.kind, args.var)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _write(text, args.out)
    return OK


COMMANDS = {"analyze": cmd_analyze, "nullify": cmd_nullify, "run": cmd_run, "dot": cmd_dot}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        # bad arguments are input diagnostics; 2 is kept for internal errors
        self.print_usage(sys.stderr)
        self.exit(DIAGNOSTICS, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hra", description="Heap reference analysis for a small heap IR.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("file")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--schedule", help="branch outcomes in encounter order, e.g. 0,0,1")
    p.add_argument("--point", help="program point, e.g. B4:in")
    p.add_argument("--var", help="root variable")
    p.add_argument("--kind", choices=KINDS, default="live")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # --help, or a usage error already reported
        return e.code if isinstance(e.code, int) else DIAGNOSTICS
    try:
        return COMMANDS[args.command](args)
    except (IRSyntaxError, CFGError, UsageError, OSError) as e:
        print(f"hra: {e}", file=sys.stderr)
        return DIAGNOSTICS
    except (NonConvergence, AssertionError) as e:
        print(f"hra: internal error: {e}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
