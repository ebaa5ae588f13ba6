"""Explicit liveness: a backward analysis whose values are access graphs,
one per root variable and program point.

The per-variable maps store only non-empty graphs; a missing variable means
the empty graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from hra.access_graph import (
    ALL_FINAL, EMPTY_GRAPH, SUMMARY_STAR, AccessGraph, extend,
    factorize, from_labels, labels_for, last_node, path_remove, union,
)
from hra.access_path import AccessPath
from hra.fixpoint import round_robin
from hra.ir import Assign, Block, Call, Program, Return, Use

GraphMap = dict[str, AccessGraph]


def expr_graph(block: Block, index: int, policy: str = ALL_FINAL,
               base: bool = False) -> AccessGraph:
    """Graph of access expression ``index`` of ``block`` (or of its base),
    labelled with the block id and the statement's instance counters."""
    p = block.stmt.exprs()[index]
    labels = labels_for(p, block.id, block.expr_instances(index))
    if base:
        if p.is_simple:
            return EMPTY_GRAPH
        labels = labels[:-1]
    return from_labels(p.root, labels, policy)


def star_graph(var: str) -> AccessGraph:
    """``G(v->*)``."""
    return from_labels(var, (), SUMMARY_STAR)


def _add(out: GraphMap, var: str, g: AccessGraph) -> None:
    if not g.is_empty:
        out[var] = union(out.get(var, EMPTY_GRAPH), g)


def transfer(block: Block, lout_x: AccessGraph) -> AccessGraph:
    """``(G(rho_y), last) # (LOut_x / (G(rho_x), last))`` for ``x = y``."""
    gx = expr_graph(block, 0)
    gy = expr_graph(block, 1)
    rs = factorize(lout_x, gx, [last_node(gx)])
    return extend(gy, [last_node(gy)], rs)


def flow(block: Block, lout: Mapping[str, AccessGraph],
         globals_: Iterable[str] = ()) -> GraphMap:
    """``LIn`` of ``block`` from ``LOut``, per variable."""
    stmt = block.stmt
    lin: GraphMap = dict(lout)
    gen: GraphMap = {}
    if isinstance(stmt, (Assign, Call)):
        x = stmt.lhs.root
        killed = path_remove(lout.get(x, EMPTY_GRAPH), stmt.lhs)
        if killed.is_empty:
            lin.pop(x, None)
        else:
            lin[x] = killed
        _add(gen, x, expr_graph(block, 0, base=True))
        if isinstance(stmt, Assign) and isinstance(stmt.rhs, AccessPath):
            y = stmt.rhs.root
            _add(gen, y, expr_graph(block, 1, base=True))
            _add(gen, y, transfer(block, lout.get(x, EMPTY_GRAPH)))
        elif isinstance(stmt, Call):
            for i, arg in enumerate(stmt.args, start=1):
                _add(gen, arg.root, expr_graph(block, i, SUMMARY_STAR))
            for g in globals_:
                _add(gen, g, star_graph(g))
    elif isinstance(stmt, Use):
        for i, p in enumerate(stmt.paths):
            _add(gen, p.root, expr_graph(block, i))
    elif isinstance(stmt, Return):
        _add(gen, stmt.expr.root, expr_graph(block, 0, SUMMARY_STAR))
        for g in globals_:
            _add(gen, g, star_graph(g))
    for v, g in gen.items():
        _add(lin, v, g)
    return lin


def merge(maps: Iterable[Mapping[str, AccessGraph]]) -> GraphMap:
    out: GraphMap = {}
    for m in maps:
        for v, g in m.items():
            _add(out, v, g)
    return out


def exit_boundary(variables: Iterable[str]) -> GraphMap:
    return {v: star_graph(v) for v in variables}


def iteration_bound(program: Program) -> int:
    """Generous cap on round-robin passes: each non-final pass grows some
    graph by at least one node, edge or final mark."""
    n = len(program.field_labels()) + len(program.variables) + 1
    cells = 2 * len(program.cfg.blocks) * max(1, len(program.variables))
    return cells * (n * n + 2 * n) + 2


def backward_order(program: Program) -> list[int]:
    return program.cfg.reverse_postorder(reverse_graph=True)


@dataclass
class LivenessResult:
    lin: dict[int, GraphMap]
    lout: dict[int, GraphMap]
    iterations: int

    def at(self, block: int, side: str, var: str) -> AccessGraph:
        table = self.lin if side == "in" else self.lout
        return table[block].get(var, EMPTY_GRAPH)

    def graphs(self) -> Iterable[AccessGraph]:
        for table in (self.lin, self.lout):
            for m in table.values():
                yield from m.values()


def explicit_liveness(program: Program, exit_live: Iterable[str] | None = None) -> LivenessResult:
    """``exit_live`` names the variables whose every path is live after
    Exit (the globals by default)."""
    cfg = program.cfg
    globals_ = program.globals
    lin: dict[int, GraphMap] = {b: {} for b in cfg.blocks}
    lout: dict[int, GraphMap] = {b: {} for b in cfg.blocks}
    boundary = exit_boundary(globals_ if exit_live is None else exit_live)

    def step(b: int) -> bool:
        out = boundary if b == cfg.exit else merge(lin[s] for s in cfg.succ[b])
        new_in = flow(cfg.blocks[b], out, globals_)
        changed = out != lout[b] or new_in != lin[b]
        lout[b], lin[b] = out, new_in
        return changed

    passes = round_robin(backward_order(program), step, iteration_bound(program),
                         "explicit liveness")
    return LivenessResult(lin, lout, passes)


def flow_assign(block: Block, lout: Mapping[str, AccessGraph]) -> GraphMap:
    return flow(block, lout)


def flow_call(block: Block, lout: Mapping[str, AccessGraph], globals_: Iterable[str]) -> GraphMap:
    return flow(block, lout, globals_)


def flow_use(block: Block, lout: Mapping[str, AccessGraph]) -> GraphMap:
    return flow(block, lout)


def flow_return(block: Block, lout: Mapping[str, AccessGraph], globals_: Iterable[str]) -> GraphMap:
    return flow(block, lout, globals_)

