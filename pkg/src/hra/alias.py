"""May-aliases without kills, link-alias closure, and complete liveness.

Alias pairs relate two access graphs with a single final node each.  A pair
``<a, b>`` states that the paths of ``a`` and ``b`` may name the same object.
Pairs are stored unordered.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from hra.access_graph import (
    EMPTY_GRAPH, FIELD, LAST_FINAL, SUMMARY_STAR, AccessGraph, from_labels,
    lng, to_text,
)
from hra.access_path import AccessPath
from hra.fixpoint import round_robin
from hra.ir import Assign, Block, Call, Program
from hra.liveness import (
    GraphMap, LivenessResult, backward_order, exit_boundary,
    expr_graph, flow, iteration_bound, merge,
)


@dataclass(frozen=True)
class Side:
    """One side of an alias pair in path form: ``path`` itself, or (with
    ``star``) the non-empty extensions of ``path``.  A starred side with
    ``last`` set keeps only the extensions whose final field is ``last``."""

    path: AccessPath
    star: bool = False
    last: str | None = None

    def __str__(self) -> str:
        if not self.star:
            return str(self.path)
        return f"{self.path}->*" + (f"->{self.last}" if self.last else "")

    def contains(self, p: AccessPath) -> bool:
        if not self.star:
            return p == self.path
        return (self.path.is_prefix_of(p) and p != self.path
                and (self.last is None or p.frontier == self.last))

    def is_prefix_of(self, p: AccessPath) -> bool:
        """Is some member of this family a prefix of ``p``?"""
        if not self.star:
            return self.path.is_prefix_of(p)
        if not self.path.is_prefix_of(p) or p == self.path:
            return False
        return self.last is None or self.last in p.suffix_after(self.path)

    def overlaps(self, other: "Side") -> bool:
        """Do the two path families share a member?"""
        a, b = self, other
        if not a.star:
            return b.contains(a.path)
        if not b.star:
            return a.contains(b.path)
        if not (a.path.is_prefix_of(b.path) or b.path.is_prefix_of(a.path)):
            return False
        return a.last is None or b.last is None or a.last == b.last

    def extend(self, f: str) -> "Side":
        if self.star:
            return Side(self.path, True, f)
        return Side(self.path.extend(f))


def side_of(g: AccessGraph) -> Side:
    """Path form of a linear alias graph (optionally ending in ``*``)."""
    succ = g.successors()
    n = g.entry
    fields: list[str] = []
    star = False
    while True:
        nxt = [m for m in succ.get(n, ()) if m != n]
        if not nxt:
            break
        (n,) = nxt
        if n.kind == FIELD:
            fields.append(n.name)
        else:
            star = True
            break
    return Side(AccessPath(g.root, tuple(fields)), star)


def star_only(var: str, labels: tuple = ()) -> AccessGraph:
    """Strict extensions of a path: path nodes intermediate, ``*`` final."""
    return from_labels(var, labels, SUMMARY_STAR, star_final_only=True)


@dataclass(frozen=True)
class AliasPair:
    first: AccessGraph
    second: AccessGraph

    @staticmethod
    def of(a: AccessGraph, b: AccessGraph) -> "AliasPair":
        if len(a.final) != 1 or len(b.final) != 1:
            raise ValueError("alias graphs must have exactly one final node")
        if to_text(b) < to_text(a):
            a, b = b, a
        return AliasPair(a, b)

    @property
    def sides(self) -> tuple[Side, Side]:
        return side_of(self.first), side_of(self.second)

    def directions(self) -> list[tuple[AccessGraph, AccessGraph]]:
        """(source, target) orientations used to carry liveness."""
        return [(self.first, self.second), (self.second, self.first)]

    def __str__(self) -> str:
        s1, s2 = self.sides
        return f"<{s1}, {s2}>"


AliasSet = frozenset  # of AliasPair


def pairs_of(block: Block, globals_: Iterable[str] = ()) -> set[AliasPair]:
    """Alias pairs generated by ``block``."""
    stmt = block.stmt
    out: set[AliasPair] = set()
    if isinstance(stmt, Assign) and isinstance(stmt.rhs, AccessPath):
        out.add(AliasPair.of(expr_graph(block, 0, LAST_FINAL), expr_graph(block, 1, LAST_FINAL)))
    elif isinstance(stmt, Call):
        lhs = expr_graph(block, 0, LAST_FINAL)
        roots: list[tuple[AccessGraph, AccessGraph]] = []
        for i in range(1, len(stmt.args) + 1):
            g = expr_graph(block, i, LAST_FINAL)
            labels = tuple(n for n in _chain(g)[1:])
            roots.append((g, star_only(g.root, labels)))
        for v in globals_:
            roots.append((from_labels(v, (), LAST_FINAL), star_only(v)))
        for only, star in roots:
            out.add(AliasPair.of(lhs, only))
            out.add(AliasPair.of(lhs, star))
        for i, (o1, s1) in enumerate(roots):
            for o2, s2 in roots[i + 1:]:
                if o1.root == o2.root and o1 == o2:
                    continue
                for a in (o1, s1):
                    for b in (o2, s2):
                        if a != b:
                            out.add(AliasPair.of(a, b))
    return out


def _chain(g: AccessGraph) -> list:
    succ = g.successors()
    n = g.entry
    out = [n]
    while succ.get(n):
        (n,) = succ[n]
        out.append(n)
    return out


@dataclass
class AliasResult:
    ain: dict[int, frozenset[AliasPair]]
    aout: dict[int, frozenset[AliasPair]]
    iterations: int

    def at(self, block: int, side: str) -> frozenset[AliasPair]:
        return self.ain[block] if side == "in" else self.aout[block]


def may_alias(program: Program) -> AliasResult:
    cfg = program.cfg
    gen = {b: frozenset(pairs_of(cfg.blocks[b], program.globals)) for b in cfg.blocks}
    ain: dict[int, frozenset[AliasPair]] = {b: frozenset() for b in cfg.blocks}
    aout: dict[int, frozenset[AliasPair]] = {b: frozenset() for b in cfg.blocks}

    def step(b: int) -> bool:
        new_in = frozenset().union(*(aout[p] for p in cfg.pred[b])) if b != cfg.entry else frozenset()
        new_out = new_in | gen[b]
        changed = new_in != ain[b] or new_out != aout[b]
        ain[b], aout[b] = new_in, new_out
        return changed

    total = sum(len(g) for g in gen.values())
    passes = round_robin(cfg.reverse_postorder(), step, len(cfg.blocks) * (total + 1) + 2,
                         "may-alias")
    return AliasResult(ain, aout, passes)


# ---------------------------------------------------------------------------
# link aliases

def node_aliases(p: AccessPath, pairs: frozenset[AliasPair]) -> frozenset[Side]:
    """Paths that may name the same object as ``p`` (``p`` included).

    Any prefix matching one side of a pair may be replaced by the other
    side, repeatedly.  Cyclic pairs such as ``<x, x->r>`` make that set
    infinite, so paths longer than a bound are widened to the starred
    family of their bounded prefix.
    """
    return _node_aliases(p, frozenset(pairs))


def _bound(p: AccessPath, pairs: frozenset[AliasPair]) -> int:
    longest = max((len(s.path.fields) for pair in pairs for s in pair.sides), default=0)
    return len(p.fields) + longest + 1


def _widen(s: Side, limit: int) -> Side:
    if len(s.path.fields) <= limit:
        return s
    return Side(AccessPath(s.path.root, s.path.fields[:limit]), True)


def _rewrite(s: Side, a: Side, b: Side) -> set[Side]:
    """What ``s`` may also name, given that ``a`` may name what ``b`` names."""
    out: set[Side] = set()
    if not a.star:
        if a.path.is_prefix_of(s.path):
            rest = s.path.suffix_after(a.path)
            if b.star:
                out.add(Side(b.path, True))
            else:
                out.add(Side(b.path.extend(*rest), s.star))
        elif s.star and s.path.is_prefix_of(a.path):
            # a lies inside the family s, so b and its extensions do too
            out.add(Side(b.path, True))
            if not b.star:
                out.add(Side(b.path))
        return out
    # a stands for the strict extensions of a.path; s may be one of them
    if not (a.path.is_prefix_of(s.path) or (s.star and s.path.is_prefix_of(a.path))):
        return out
    out.add(Side(b.path, True))
    if not b.star:
        out.add(Side(b.path))
        n = len(a.path.fields)
        for j in range(n + 1, len(s.path.fields) + 1):
            out.add(Side(b.path.extend(*s.path.fields[j:]), s.star))
    return out


@lru_cache(maxsize=65536)
def _node_aliases(p: AccessPath, pairs: frozenset[AliasPair]) -> frozenset[Side]:
    limit = _bound(p, pairs)
    orient = []
    for pair in sorted(pairs, key=str):
        a, b = pair.sides
        orient += [(a, b), (b, a)]
    result = {Side(p)}
    work = [Side(p)]
    while work:
        s = work.pop()
        for a, b in orient:
            for t in _rewrite(s, a, b):
                t = _widen(t, limit)
                if t not in result:
                    result.add(t)
                    work.append(t)
    return frozenset(result)


@lru_cache(maxsize=65536)
def _link_aliases(p: AccessPath, pairs: frozenset[AliasPair]) -> frozenset[Side]:
    if p.is_simple:
        return frozenset([Side(p)])
    out = set()
    for s in _node_aliases(p.base, pairs):
        # a link alias always ends in the same field as p
        out.add(s.extend(p.frontier))
    return frozenset(out)


def lna(p: AccessPath, pairs: Iterable[AliasPair]) -> frozenset[Side]:
    """Link aliases of ``p`` (``p`` included): the paths that may name
    the same link.  Only proper prefixes are rewritten."""
    if p.is_empty:
        raise ValueError("the empty access path has no link aliases")
    return _link_aliases(p, frozenset(pairs))


def lna_covers(sides: Iterable[Side], p: AccessPath) -> bool:
    """Is ``p`` one of the link-alias paths (or inside a starred family)?"""
    probe = Side(p)
    return any(probe.overlaps(s) for s in sides)


# ---------------------------------------------------------------------------
# complete liveness

def close(graphs: Mapping[str, AccessGraph], pairs: Iterable[AliasPair]) -> GraphMap:
    """Close per-variable liveness under link aliasing."""
    out: GraphMap = dict(graphs)
    dirs = [d for pair in sorted(pairs, key=str) for d in pair.directions()]
    changed = True
    while changed:
        changed = False
        for g_s, g_t in dirs:
            src = out.get(g_s.root, EMPTY_GRAPH)
            if src.is_empty:
                continue
            tgt = out.get(g_t.root, EMPTY_GRAPH)
            new = lng(tgt, src, (g_s, g_t))
            if new != tgt:
                out[g_t.root] = new
                changed = True
    return out


def complete_liveness(program: Program, aliases: AliasResult | None = None) -> LivenessResult:
    """Explicit liveness closed under link aliasing, to a fixpoint.

    The closed graphs after a block feed its backward flow, so liveness that
    holds only through an alias is itself transferred across statements.
    Closure happens before every block (under the pairs reaching it) and
    after Exit, where globals and parameters have every path live.
    """
    cfg = program.cfg
    aliases = aliases or may_alias(program)
    globals_ = program.globals
    lin: dict[int, GraphMap] = {b: {} for b in cfg.blocks}
    lout: dict[int, GraphMap] = {b: {} for b in cfg.blocks}
    boundary = close(exit_boundary(globals_ + program.params), aliases.aout[cfg.exit])

    def step(b: int) -> bool:
        out = boundary if b == cfg.exit else merge(lin[s] for s in cfg.succ[b])
        new_in = close(flow(cfg.blocks[b], out, globals_), aliases.ain[b])
        changed = out != lout[b] or new_in != lin[b]
        lout[b], lin[b] = out, new_in
        return changed

    passes = round_robin(backward_order(program), step, iteration_bound(program),
                         "complete liveness")
    return LivenessResult(lin, lout, passes)
