"""Random access graphs and a brute-force language oracle for tests."""

from __future__ import annotations

import random
from typing import Iterable

from hra.access_graph import (
    STAR_LABEL, AccessGraph, Label, cleanup, field_label, from_labels, labels_for,
    root_label, union, LAST_FINAL,
)
from hra.access_path import AccessPath

ALPHABET = ("f", "g")
DEPTH = 6


def label_pool(star: bool = True) -> list[Label]:
    pool = [field_label(f, b) for f in ALPHABET for b in (1, 2, 3)]
    return pool + [STAR_LABEL] if star else pool


def random_graph(rng: random.Random, root: str = "x", max_nodes: int = 5,
                 star: bool = True) -> AccessGraph:
    nodes = rng.sample(label_pool(star), rng.randint(0, max_nodes))
    entry = root_label(root)
    edges = set()
    for a in [entry] + nodes:
        for b in nodes:
            if rng.random() < 0.3:
                edges.add((a, b))
    # every node gets at least one way in
    for i, b in enumerate(nodes):
        if not any(e[1] == b and e[0] != b for e in edges):
            edges.add((rng.choice([entry] + nodes[:i]), b))
    if STAR_LABEL in nodes:
        edges.add((STAR_LABEL, STAR_LABEL))
    all_nodes = [entry] + nodes
    final = {n for n in all_nodes if rng.random() < 0.5}
    if not final:
        final = {rng.choice(all_nodes)}
    inter = set(all_nodes) - final
    return cleanup(AccessGraph(root, frozenset(final), frozenset(inter), frozenset(edges)))


def random_path(rng: random.Random, root: str = "x", max_len: int = 3) -> AccessPath:
    return AccessPath(root, tuple(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len))))


def linear_graph(p: AccessPath, block: int = 1) -> AccessGraph:
    """``GOnly(p)``: only ``p`` is accepted."""
    return from_labels(p.root, labels_for(p, block), LAST_FINAL)


def weaken(rng: random.Random, g: AccessGraph) -> AccessGraph:
    """A graph below ``g`` in the order: ``g`` joined with another graph
    and with some intermediate nodes promoted to final."""
    h = union(g, random_graph(rng, g.root)) if not g.is_empty else random_graph(rng)
    promote = {n for n in h.intermediate if rng.random() < 0.3}
    return AccessGraph(h.root, h.final | promote, h.intermediate - promote, h.edges)


# ---------------------------------------------------------------------------
# oracle

def _succ(edges: Iterable) -> dict:
    out: dict = {}
    for a, b in edges:
        out.setdefault(a, []).append(b)
    return out


def _letters(n: Label) -> tuple[str, ...]:
    return ALPHABET if n.kind == STAR_LABEL.kind else (n.name,)


def walks(g, k: int = DEPTH, ends: set | None = None) -> set[tuple[str, ...]]:
    """Field strings of entry-rooted walks with at most ``k`` fields that
    end on a node of ``ends`` (default: the final nodes).  Works for access
    graphs (entry = root) and remainder graphs (entry's own field first)."""
    ends = set(g.final) if ends is None else set(ends)
    succ = _succ(g.edges)
    out: set[tuple[str, ...]] = set()
    if isinstance(g, AccessGraph):
        if g.is_empty:
            return out
        frontier = [(g.entry, ())]
    else:
        if g.is_empty:
            return {()}
        frontier = [(g.entry, (c,)) for c in _letters(g.entry)]
    seen = set()
    while frontier:
        n, s = frontier.pop()
        if (n, s) in seen or len(s) > k:
            continue
        seen.add((n, s))
        if n in ends:
            out.add(s)
        for m in succ.get(n, ()):
            for c in _letters(m):
                if len(s) < k:
                    frontier.append((m, s + (c,)))
    return out


def language(g: AccessGraph, k: int = DEPTH) -> set[AccessPath]:
    if g.is_empty:
        return set()
    return {AccessPath(g.root, s) for s in walks(g, k)}


# ---------------------------------------------------------------------------
# one randomized case per safety and monotonicity row; each returns a
# description of the violation, or None

from hra.access_graph import (  # noqa: E402
    EPS_RG, extend, factorize, leq, leq_remainder_sets, lng, path_remove,
)


def _cone(p: AccessPath, paths: set[AccessPath]) -> set[AccessPath]:
    return {q for q in paths if p.is_prefix_of(q)}


def safety_union(rng: random.Random) -> str | None:
    g1, g2 = random_graph(rng), random_graph(rng)
    missing = (language(g1) | language(g2)) - language(union(g1, g2))
    return f"union loses {sorted(map(str, missing))[:3]}" if missing else None


def safety_path_remove(rng: random.Random) -> str | None:
    g, p = random_graph(rng), random_path(rng)
    before = language(g)
    missing = (before - _cone(p, before)) - language(path_remove(g, p))
    return f"removing {p} loses {sorted(map(str, missing))[:3]}" if missing else None


def _remainder_strings(rs, k: int) -> set[tuple[str, ...]]:
    out: set[tuple[str, ...]] = set()
    for r in rs:
        out |= {() } if r == EPS_RG else walks(r, k)
    return out


def safety_factorize(rng: random.Random, k: int = DEPTH) -> str | None:
    """Remainders spell exactly the suffixes after the base path."""
    g = random_graph(rng)
    rho = random_path(rng, max_len=2)
    base = linear_graph(rho)
    rs = factorize(g, base, base.final)
    got = _remainder_strings(rs, k - len(rho.fields))
    want = {s[len(rho.fields):] for s in walks(g, k) if s[:len(rho.fields)] == rho.fields}
    # a walk spelling rho must exist for any remainder to be produced
    if not any(s[:len(rho.fields)] == rho.fields for s in walks(g, k, ends=g.nodes)):
        want = set()
    if got != want:
        return f"factorize by {rho}: extra {sorted(got - want)[:3]}, missing {sorted(want - got)[:3]}"
    return None


def safety_extend(rng: random.Random, k: int = DEPTH) -> str | None:
    """The extension accepts every base path followed by every remainder
    string."""
    g = random_graph(rng)
    src = random_graph(rng)
    rho = random_path(rng, max_len=1)
    base = linear_graph(rho)
    rs = factorize(src, base, base.final)
    if g.is_empty or not rs:
        return None
    m = sorted(g.final, key=str)[:rng.randint(1, len(g.final))]
    ext = extend(g, m, rs)
    heads = walks(g, k, ends=set(m))
    tails = _remainder_strings(rs, k)
    want = {AccessPath(g.root, h + t) for h in heads for t in tails if len(h + t) <= k}
    missing = want - language(ext, k)
    return f"extension loses {sorted(map(str, missing))[:3]}" if missing else None


def mono_union(rng: random.Random) -> str | None:
    a, b = random_graph(rng), random_graph(rng)
    a1, b1 = weaken(rng, a), weaken(rng, b)
    if not (leq(a1, a) and leq(b1, b)):
        return "generator produced incomparable graphs"
    return None if leq(union(a1, b1), union(a, b)) else f"union not monotone on {a1} / {a}"


def mono_path_remove(rng: random.Random) -> str | None:
    g = random_graph(rng)
    g1 = weaken(rng, g)
    p = random_path(rng)
    return None if leq(path_remove(g1, p), path_remove(g, p)) else f"path removal of {p} on {g1} / {g}"


def mono_factorize(rng: random.Random) -> str | None:
    g = random_graph(rng)
    g1 = weaken(rng, g)
    base = linear_graph(random_path(rng, max_len=2))
    s1, s2 = factorize(g1, base, base.final), factorize(g, base, base.final)
    return None if leq_remainder_sets(s1, s2) else f"factorization on {g1} / {g}"


def mono_extend(rng: random.Random) -> str | None:
    """RS1 below RS2, G1 below G2 and M1 a subset of M2."""
    g2 = random_graph(rng)
    if g2.is_empty:
        return None
    g1 = weaken(rng, g2)
    src2 = random_graph(rng)
    src1 = weaken(rng, src2)
    base = linear_graph(random_path(rng, max_len=1))
    rs1, rs2 = factorize(src1, base, base.final), factorize(src2, base, base.final)
    if not leq_remainder_sets(rs1, rs2):
        return None
    finals2 = sorted(g2.final, key=str)
    m2 = finals2[:rng.randint(1, len(finals2))]
    m1 = m2[:rng.randint(1, len(m2))]
    return None if leq(extend(g1, m1, rs1), extend(g2, m2, rs2)) else f"extension on {g1} / {g2}"


def mono_lng(rng: random.Random) -> str | None:
    t, s = random_graph(rng, "y"), random_graph(rng, "x")
    t1, s1 = weaken(rng, t) if not t.is_empty else t, weaken(rng, s)
    pair = (linear_graph(random_path(rng, "x", 2)), linear_graph(random_path(rng, "y", 2), 2))
    base_t = t1 if not t1.is_empty else t
    return None if leq(lng(base_t, s1, pair), lng(t, s, pair)) else f"LnG on {s1} / {s}"


SAFETY = {"union": safety_union, "path_remove": safety_path_remove,
          "factorize": safety_factorize, "extend": safety_extend}
MONOTONICITY = {"union": mono_union, "path_remove": mono_path_remove,
                "factorize": mono_factorize, "extend": mono_extend, "lng": mono_lng}


def run_cases(check, n: int, seed: int = 0) -> list[str]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        msg = check(rng)
        if msg:
            out.append(msg)
    return out


def mono_extend_superset(rng: random.Random) -> str | None:
    """Same row with the node-set condition flipped to M1 a superset of M2,
    which is the direction that agrees with the order on graphs."""
    g2 = random_graph(rng)
    if g2.is_empty:
        return None
    g1 = weaken(rng, g2)
    src2 = random_graph(rng)
    src1 = weaken(rng, src2)
    base = linear_graph(random_path(rng, max_len=1))
    rs1, rs2 = factorize(src1, base, base.final), factorize(src2, base, base.final)
    if not leq_remainder_sets(rs1, rs2):
        return None
    finals2 = sorted(g2.final, key=str)
    m2 = finals2[:rng.randint(1, len(finals2))]
    extra = [n for n in sorted(g1.final, key=str) if n not in m2 and rng.random() < 0.5]
    return None if leq(extend(g1, m2 + extra, rs1), extend(g2, m2, rs2)) else f"extension on {g1} / {g2}"
