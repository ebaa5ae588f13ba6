"""Access graphs: bounded summaries of (possibly infinite) sets of access paths.

A graph is rooted at a variable.  Non-root nodes carry a label
``<field, block, instance>``; the summary node ``*`` stands for any field.
Nodes are either final or intermediate, and a graph accepts the paths that
spell a walk from the root to a final node.  The empty graph accepts nothing
and is the top of the ordering.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from hra.access_path import AccessPath

ROOT, FIELD, STAR = 0, 1, 2


class Label(NamedTuple):
    kind: int
    name: str
    block: int = 0
    instance: int = 0

    @property
    def is_root(self) -> bool:
        return self.kind == ROOT

    @property
    def is_star(self) -> bool:
        return self.kind == STAR

    def matches(self, field_name: str) -> bool:
        """Does this node stand for a link named ``field_name``?"""
        return self.kind == STAR or (self.kind == FIELD and self.name == field_name)

    def __str__(self) -> str:
        if self.kind == ROOT:
            return self.name
        if self.kind == STAR:
            return "*"
        return f"{self.name}@{self.block}#{self.instance}"

    def short(self) -> str:
        """Compact rendering used in DOT output (``r1`` for ``r@1#0``)."""
        if self.kind != FIELD:
            return str(self)
        if self.instance:
            return f"{self.name}{self.block}.{self.instance}"
        return f"{self.name}{self.block}"


STAR_LABEL = Label(STAR, "*")


def root_label(var: str) -> Label:
    return Label(ROOT, var)


def field_label(name: str, block: int, instance: int = 0) -> Label:
    return Label(FIELD, name, block, instance)


def parse_label(text: str) -> Label:
    text = text.strip()
    if text == "*":
        return STAR_LABEL
    if "@" in text:
        name, rest = text.split("@", 1)
        block, _, inst = rest.partition("#")
        return field_label(name, int(block), int(inst or 0))
    return root_label(text)


def _fields_match(a: Label, b: Label) -> bool:
    if a.kind == ROOT or b.kind == ROOT:
        return False
    return a.kind == STAR or b.kind == STAR or a.name == b.name


Edge = tuple[Label, Label]


def _successors(edges: Iterable[Edge]) -> dict[Label, list[Label]]:
    out: dict[Label, list[Label]] = {}
    for a, b in edges:
        out.setdefault(a, []).append(b)
    return out


def _reachable(start: Iterable[Label], succ: dict[Label, list[Label]]) -> set[Label]:
    seen = set(start)
    work = list(seen)
    while work:
        n = work.pop()
        for m in succ.get(n, ()):
            if m not in seen:
                seen.add(m)
                work.append(m)
    return seen


@dataclass(frozen=True)
class AccessGraph:
    root: str | None
    final: frozenset[Label] = frozenset()
    intermediate: frozenset[Label] = frozenset()
    edges: frozenset[Edge] = frozenset()

    @property
    def is_empty(self) -> bool:
        return self.root is None

    @property
    def entry(self) -> Label:
        if self.root is None:
            raise ValueError("the empty access graph has no entry node")
        return root_label(self.root)

    @property
    def nodes(self) -> frozenset[Label]:
        return self.final | self.intermediate

    def is_final(self, n: Label) -> bool:
        return n in self.final

    def successors(self) -> dict[Label, list[Label]]:
        return _successors(self.edges)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"AccessGraph({to_text(self)!r})"

    # convenience wrappers
    def accepts(self, p: AccessPath) -> bool:
        return contains_path(self, p)

    def __or__(self, other: "AccessGraph") -> "AccessGraph":
        return union(self, other)


EMPTY_GRAPH = AccessGraph(None)


def _graph(root: str, final: Iterable[Label], inter: Iterable[Label],
           edges: Iterable[Edge]) -> AccessGraph:
    final = frozenset(final)
    return AccessGraph(root, final, frozenset(inter) - final, frozenset(edges))


# ---------------------------------------------------------------------------
# constructors

ALL_FINAL = "AllFinal"
LAST_FINAL = "LastFinal"
SUMMARY_STAR = "SummaryStar"


def labels_for(p: AccessPath, block: int, start: dict[str, int] | None = None) -> tuple[Label, ...]:
    """Field labels for ``p`` in ``block``; repeated fields get rising instances."""
    counts = dict(start or {})
    out = []
    for f in p.fields:
        i = counts.get(f, 0)
        counts[f] = i + 1
        out.append(field_label(f, block, i))
    return tuple(out)


def from_labels(root: str, labels: Sequence[Label], policy: str = ALL_FINAL,
                star_final_only: bool = False) -> AccessGraph:
    """Linear graph ``root -> labels...`` (plus a summary node if requested).

    ``star_final_only`` marks only the summary node final; it is used for
    alias pairs whose side stands for the strict extensions of a path.
    """
    chain = [root_label(root), *labels]
    edges = set(zip(chain, chain[1:]))
    if policy == ALL_FINAL:
        return _graph(root, chain, (), edges)
    if policy == LAST_FINAL:
        return _graph(root, chain[-1:], chain[:-1], edges)
    if policy == SUMMARY_STAR:
        edges.add((chain[-1], STAR_LABEL))
        edges.add((STAR_LABEL, STAR_LABEL))
        if star_final_only:
            return _graph(root, [STAR_LABEL], chain, edges)
        return _graph(root, chain + [STAR_LABEL], (), edges)
    raise ValueError(f"unknown construction policy {policy!r}")


def make_graph(p: AccessPath, block: int = 0, policy: str = ALL_FINAL,
               start: dict[str, int] | None = None) -> AccessGraph:
    """``G(rho)`` (AllFinal), ``GOnly(rho)`` (LastFinal) or ``G(rho->*)``."""
    if p.is_empty:
        return EMPTY_GRAPH
    return from_labels(p.root, labels_for(p, block, start), policy)


def last_node(g: AccessGraph) -> Label:
    """The last node of a linear graph built from a path."""
    succ = g.successors()
    n = g.entry
    while succ.get(n):
        (n,) = succ[n]
    return n


# ---------------------------------------------------------------------------
# clean-up, union, correspondence

def cleanup(g: AccessGraph) -> AccessGraph:
    """Drop nodes unreachable from the entry and intermediate nodes from
    which no final node can be reached."""
    if g.is_empty:
        return g
    succ = g.successors()
    live = _reachable([g.entry], succ) & g.nodes
    pred: dict[Label, list[Label]] = {}
    for a, b in g.edges:
        if a in live and b in live:
            pred.setdefault(b, []).append(a)
    useful = _reachable([n for n in g.final if n in live], pred)
    keep = live & useful
    if g.entry not in keep:
        return EMPTY_GRAPH
    return AccessGraph(
        g.root,
        g.final & keep,
        g.intermediate & keep,
        frozenset((a, b) for a, b in g.edges if a in keep and b in keep),
    )


def union(*graphs: AccessGraph) -> AccessGraph:
    """``G1 (+) G2 (+) ...``: merge equal labels; final wins over intermediate."""
    present = [g for g in graphs if not g.is_empty]
    if not present:
        return EMPTY_GRAPH
    roots = {g.root for g in present}
    if len(roots) != 1:
        raise ValueError(f"union of graphs with different roots: {sorted(roots)}")
    if len(present) == 1:
        return present[0]
    final = frozenset().union(*(g.final for g in present))
    inter = frozenset().union(*(g.intermediate for g in present)) - final
    edges = frozenset().union(*(g.edges for g in present))
    return AccessGraph(present[0].root, final, inter, edges)


def corresponding_nodes(g: AccessGraph, h: AccessGraph) -> frozenset[tuple[Label, Label]]:
    """Least set of node pairs reachable by a common spelling (``CN``)."""
    if g.is_empty or h.is_empty or g.root != h.root:
        return frozenset()
    gs, hs = g.successors(), h.successors()
    start = (g.entry, h.entry)
    seen = {start}
    work = [start]
    while work:
        a, b = work.pop()
        for a2 in gs.get(a, ()):
            for b2 in hs.get(b, ()):
                if _fields_match(a2, b2) and (a2, b2) not in seen:
                    seen.add((a2, b2))
                    work.append((a2, b2))
    return frozenset(seen)


def acn(g: AccessGraph, h: AccessGraph, selected: Iterable[Label]) -> frozenset[Label]:
    """Nodes of ``g`` corresponding to the ``selected`` nodes of ``h``."""
    wanted = set(selected)
    return frozenset(a for a, b in corresponding_nodes(g, h) if b in wanted)


def unique_access_path(g: AccessGraph, n: Label) -> bool:
    """True iff every entry-to-``n`` walk spells the same field string."""
    if g.is_empty or n not in g.nodes:
        return False
    pred: dict[Label, list[Label]] = {}
    for a, b in g.edges:
        pred.setdefault(b, []).append(a)
    ancestors = _reachable([n], pred)
    succ = {a: [b for b in bs if b in ancestors]
            for a, bs in g.successors().items() if a in ancestors}
    # any cycle among the ancestors allows two spellings by pumping
    indeg = {a: 0 for a in ancestors}
    for a in ancestors:
        for b in succ.get(a, ()):
            indeg[b] += 1
    order = []
    queue = deque(a for a, d in indeg.items() if d == 0)
    while queue:
        a = queue.popleft()
        order.append(a)
        for b in succ.get(a, ()):
            indeg[b] -= 1
            if indeg[b] == 0:
                queue.append(b)
    if len(order) != len(ancestors):
        return False
    spelling: dict[Label, tuple[str, ...] | None] = {g.entry: ()}
    conflict = object()
    for a in order:
        s = spelling.get(a)
        if s is None or s is conflict:
            continue
        for b in succ.get(a, ()):
            cand = s + ("*" if b.is_star else b.name,)
            prev = spelling.get(b)
            if prev is None:
                spelling[b] = cand
            elif prev != cand:
                spelling[b] = conflict  # type: ignore[assignment]
    got = spelling.get(n)
    return got is not None and got is not conflict


# ---------------------------------------------------------------------------
# path removal

def path_remove(g: AccessGraph, p: AccessPath) -> AccessGraph:
    """``G (-) rho``: remove (conservatively) the paths having ``rho`` as prefix."""
    if g.is_empty or p.is_empty or p.root != g.root:
        return g
    if p.is_simple:
        return EMPTY_GRAPH
    base = make_graph(p.base, 0, ALL_FINAL)
    sources = acn(g, base, [last_node(base)])
    frontier = p.frontier
    doomed = set()
    for a, b in g.edges:
        # the summary node also stands for paths other than rho, so an edge
        # into it is never deleted
        if a in sources and b.kind == FIELD and b.name == frontier \
                and unique_access_path(g, a):
            doomed.add((a, b))
    if not doomed:
        return g
    return cleanup(AccessGraph(g.root, g.final, g.intermediate, g.edges - doomed))


# ---------------------------------------------------------------------------
# remainder graphs, factorization and extension

@dataclass(frozen=True)
class RemainderGraph:
    entry: Label | None
    final: frozenset[Label] = frozenset()
    intermediate: frozenset[Label] = frozenset()
    edges: frozenset[Edge] = frozenset()

    @property
    def is_empty(self) -> bool:
        return self.entry is None

    @property
    def nodes(self) -> frozenset[Label]:
        return self.final | self.intermediate

    def __str__(self) -> str:
        if self.entry is None:
            return "eps_RG"
        edges = "; ".join(f"{a}->{b}" for a, b in sorted(self.edges))
        final = ",".join(str(n) for n in sorted(self.final))
        return f"[{self.entry}] {edges}; final={{{final}}}"


EPS_RG = RemainderGraph(None)


def remainder_at(g: AccessGraph, m: Label,
                 succ: dict[Label, list[Label]] | None = None) -> RemainderGraph:
    """The subgraph of ``g`` rooted at ``m``."""
    keep = _reachable([m], succ if succ is not None else g.successors())
    return RemainderGraph(
        m,
        g.final & keep,
        g.intermediate & keep,
        frozenset((a, b) for a, b in g.edges if a in keep),
    )


def factorize(g: AccessGraph, base: AccessGraph, selected: Iterable[Label]) -> frozenset[RemainderGraph]:
    """``G / (G', M)``: remainder graphs of the successors of the nodes of
    ``g`` corresponding to ``M``.  A corresponding node that is final in
    ``g`` also contributes the empty remainder (the empty suffix is then
    contained in ``g``)."""
    nodes = acn(g, base, selected)
    if not nodes:
        return frozenset()
    succ = g.successors()
    out = set()
    heads: set[Label] = set()
    for n in nodes:
        if n in g.final:
            out.add(EPS_RG)
        heads.update(succ.get(n, ()))
    out.update(remainder_at(g, m, succ) for m in heads)
    return frozenset(out)


def append(g: AccessGraph, selected: Iterable[Label], r: RemainderGraph) -> AccessGraph:
    """``(G, M) . R``.  Nodes of ``g`` become intermediate unless ``r``
    shares them; ``(G, M) . eps_RG = G``."""
    if g.is_empty:
        return EMPTY_GRAPH
    if r.is_empty:
        return g
    final = set(r.final)
    inter = (set(g.nodes) - r.nodes) | set(r.intermediate)
    edges = set(g.edges) | set(r.edges) | {(n, r.entry) for n in selected}
    return cleanup(_graph(g.root, final, inter, edges))


def extend(g: AccessGraph, selected: Iterable[Label], rs: Iterable[RemainderGraph]) -> AccessGraph:
    """``(G, M) # S``."""
    rs = list(rs)
    if g.is_empty or not rs:
        return EMPTY_GRAPH
    selected = list(selected)
    parts = [r for r in rs if not r.is_empty]
    if not parts:
        return g
    # Remainders are closed under successors, so hanging them all off M at
    # once and cleaning up a single time gives the union of the appends.
    final = set().union(*(r.final for r in parts))
    r_nodes = set().union(*(r.nodes for r in parts))
    inter = (set(g.nodes) - r_nodes) | (set().union(*(r.intermediate for r in parts)) - final)
    edges = set(g.edges).union(*(r.edges for r in parts))
    edges |= {(n, r.entry) for r in parts for n in selected}
    joined = cleanup(_graph(g.root, final, inter, edges))
    return union(g, joined) if len(parts) < len(rs) else joined


# ---------------------------------------------------------------------------
# language

def contains_path(g: AccessGraph, p: AccessPath) -> bool:
    if g.is_empty or p.is_empty or p.root != g.root:
        return False
    succ = g.successors()
    states = {g.entry}
    for f in p.fields:
        states = {m for n in states for m in succ.get(n, ()) if m.matches(f)}
        if not states:
            return False
    return bool(states & g.final)


def field_names(g: AccessGraph | RemainderGraph) -> set[str]:
    return {n.name for n in g.nodes if n.kind == FIELD}


def walk_paths(g: AccessGraph, k: int, alphabet: Iterable[str] | None = None) -> Iterator[AccessPath]:
    """Accepted paths with at most ``k`` fields (summary edges expand over
    ``alphabet``; by default the graph's own fields plus ``"?"``)."""
    if g.is_empty:
        return
    alpha = sorted(set(alphabet) if alphabet is not None else field_names(g) | {"?"})
    succ = g.successors()
    frontier = {(): frozenset([g.entry])}
    for depth in range(k + 1):
        nxt: dict[tuple[str, ...], set[Label]] = {}
        for fields, states in frontier.items():
            if states & g.final:
                yield AccessPath(g.root, fields)
            if depth == k:
                continue
            for n in states:
                for m in succ.get(n, ()):
                    names = alpha if m.is_star else [m.name]
                    for f in names:
                        nxt.setdefault(fields + (f,), set()).add(m)
        frontier = {f: frozenset(s) for f, s in nxt.items()}


def enumerate_paths(g: AccessGraph, k: int, alphabet: Iterable[str] | None = None) -> frozenset[AccessPath]:
    return frozenset(walk_paths(g, k, alphabet))


def remainder_suffixes(r: RemainderGraph, k: int, alphabet: Iterable[str] | None = None) -> frozenset[tuple[str, ...]]:
    """Field strings (length <= k) spelled by walks from the entry of ``r``
    to a final node; the empty remainder yields only the empty string."""
    if r.is_empty:
        return frozenset([()])
    alpha = sorted(set(alphabet) if alphabet is not None else field_names(r) | {"?"})
    succ = _successors(r.edges)
    out = set()
    first = alpha if r.entry.is_star else [r.entry.name]
    frontier = {(f,): frozenset([r.entry]) for f in first}
    for depth in range(1, k + 1):
        nxt: dict[tuple[str, ...], set[Label]] = {}
        for fields, states in frontier.items():
            if states & r.final:
                out.add(fields)
            if depth == k:
                continue
            for n in states:
                for m in succ.get(n, ()):
                    names = alpha if m.is_star else [m.name]
                    for f in names:
                        nxt.setdefault(fields + (f,), set()).add(m)
        frontier = {f: frozenset(s) for f, s in nxt.items()}
    return frozenset(out)


# ---------------------------------------------------------------------------
# orders

def leq(g: AccessGraph, h: AccessGraph) -> bool:
    """``g`` below ``h``: ``g`` has every final node, node and edge of ``h``."""
    if h.is_empty:
        return True
    if g.is_empty or g.root != h.root:
        return False
    return (h.final <= g.final and h.intermediate <= g.nodes and h.edges <= g.edges)


def leq_remainder(r: RemainderGraph, s: RemainderGraph) -> bool:
    if r.is_empty or s.is_empty:
        return r.is_empty and s.is_empty
    if r.entry != s.entry:
        return False
    return s.final <= r.final and s.intermediate <= r.nodes and s.edges <= r.edges


def leq_sets(s1: Iterable[AccessGraph], s2: Iterable[AccessGraph]) -> bool:
    s1 = list(s1)
    return all(any(leq(g1, g2) for g1 in s1) for g2 in s2)


def leq_remainder_sets(s1: Iterable[RemainderGraph], s2: Iterable[RemainderGraph]) -> bool:
    s1 = list(s1)
    return all(any(leq_remainder(r1, r2) for r1 in s1) for r2 in s2)


# ---------------------------------------------------------------------------
# link-alias transfer

def lng(target: AccessGraph, source: AccessGraph, pair: tuple[AccessGraph, AccessGraph]) -> AccessGraph:
    """Add to ``target`` the link aliases of ``source`` seen through
    ``pair = (g_source, g_target)``; only non-empty suffixes move."""
    g_s, g_t = pair
    if len(g_s.final) != 1 or len(g_t.final) != 1:
        raise ValueError("alias graphs must have exactly one final node")
    rs = factorize(source, g_s, g_s.final) - {EPS_RG}
    return union(target, extend(g_t, g_t.final, rs))


# ---------------------------------------------------------------------------
# text and DOT

def to_text(g: AccessGraph) -> str:
    """Canonical form ``x: x->r@1#0; r@1#0->r@1#0; final={r@1#0}``."""
    if g.is_empty:
        return "<empty graph>"
    edges = "; ".join(f"{a}->{b}" for a, b in sorted(g.edges))
    final = ",".join(str(n) for n in sorted(g.final))
    head = f"{g.root}: " + (edges + "; " if edges else "")
    return head + "final={" + final + "}"


def from_text(text: str) -> AccessGraph:
    text = text.strip()
    if text == "<empty graph>":
        return EMPTY_GRAPH
    root, _, rest = text.partition(":")
    root = root.strip()
    parts = [s.strip() for s in rest.split(";") if s.strip()]
    edges: set[Edge] = set()
    final: set[Label] = set()
    for part in parts:
        if part.startswith("final="):
            body = part[len("final="):].strip().strip("{}")
            final = {parse_label(t) for t in body.split(",") if t.strip()}
        else:
            a, b = part.split("->")
            edges.add((parse_label(a), parse_label(b)))
    nodes = {root_label(root)} | {n for e in edges for n in e}
    return cleanup(_graph(root, final, nodes - final, edges))


def to_dot(g: AccessGraph, name: str = "G") -> str:
    """DOT with a double-arrow entry, solid final and dashed intermediate nodes."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;", '  node [shape=circle];']
    if g.is_empty:
        lines.append('  empty [shape=plaintext, label="(empty)"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    ids = {n: f"n{i}" for i, n in enumerate(sorted(g.nodes))}
    lines.append('  entry [shape=point, style=invis];')
    lines.append(f"  entry -> {ids[g.entry]} [color=\"black:invis:black\"];")
    for n in sorted(g.nodes):
        style = "solid" if n in g.final else "dashed"
        lines.append(f'  {ids[n]} [label="{n.short()}", style={style}];')
    for a, b in sorted(g.edges):
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def node_bound(labels: Iterable[Label], roots: int = 1) -> int:
    """Upper bound on graph size: distinct labels + roots + the summary node."""
    return len(set(labels)) + roots + 1
