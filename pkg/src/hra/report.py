"""Deterministic JSON reports and DOT renderings of analysis results."""

from __future__ import annotations

import hashlib
import json
from typing import Iterable

from hra.access_graph import AccessGraph, to_dot, to_text
from hra.access_path import AccessPath, PathSet
from hra.alias import AliasPair
from hra.ir import IN, OUT, Program, ProgramPoint, emit
from hra.liveness import LivenessResult
from hra.nullifier import Analyses, Insertion

LIVE, CLIVE, ALIAS, AVAIL, ANT = "live", "clive", "alias", "avail", "ant"
KINDS = (LIVE, CLIVE, ALIAS, AVAIL, ANT)


def points(program: Program) -> list[ProgramPoint]:
    """Every program point, by block id and then In before Out."""
    return [ProgramPoint(b, side) for b in program.cfg.ids for side in (IN, OUT)]


def digest(program: Program) -> str:
    return hashlib.sha256(emit(program).encode()).hexdigest()


def _graphs(res: LivenessResult, point: ProgramPoint) -> dict[str, str]:
    table = res.lin if point.side == IN else res.lout
    return {v: to_text(g) for v, g in sorted(table[point.block].items())}


def _paths(s: PathSet) -> list[str] | str:
    if s.is_universal:
        return "universal"
    return [str(p) for p in sorted(s, key=AccessPath.sort_key)]


def _pairs(pairs: Iterable[AliasPair]) -> list[str]:
    return sorted(str(p) for p in pairs)


def graph_stats(graphs: Iterable[AccessGraph]) -> dict[str, float]:
    """Max and average node and edge counts over the non-empty graphs."""
    sizes = [(len(g.nodes), len(g.edges)) for g in graphs if not g.is_empty]
    if not sizes:
        return {"graphs": 0, "max_nodes": 0, "max_edges": 0, "avg_nodes": 0.0, "avg_edges": 0.0}
    n = len(sizes)
    return {
        "graphs": n,
        "max_nodes": max(s[0] for s in sizes),
        "max_edges": max(s[1] for s in sizes),
        "avg_nodes": round(sum(s[0] for s in sizes) / n, 3),
        "avg_edges": round(sum(s[1] for s in sizes) / n, 3),
    }


def build_report(analyses: Analyses, insertions: Iterable[Insertion] = (),
                 verdicts: dict | None = None) -> dict:
    program = analyses.program
    per_point = {}
    for pt in points(program):
        per_point[str(pt)] = {
            LIVE: _graphs(analyses.explicit, pt),
            CLIVE: _graphs(analyses.complete, pt),
            ALIAS: _pairs(analyses.aliases.at(pt.block, pt.side)),
            AVAIL: _paths(analyses.avail.at(pt.block, pt.side)),
            ANT: _paths(analyses.ant.at(pt.block, pt.side)),
        }
    return {
        "program": digest(program),
        "blocks": len(program.cfg.blocks),
        "entry": program.cfg.entry,
        "exit": program.cfg.exit,
        "points": per_point,
        "insertions": [str(i) for i in insertions],
        "iterations": analyses.iterations(),
        "graph_stats": {
            "explicit_liveness": graph_stats(analyses.explicit.graphs()),
            "complete_liveness": graph_stats(analyses.complete.graphs()),
        },
        "verdicts": verdicts or {},
    }


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# DOT

def _quote(s: str) -> str:
    return '"' + s.replace('"', r'\"') + '"'


def pathset_dot(s: PathSet, name: str = "paths") -> str:
    """A path set drawn as a trie rooted at each variable."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    if s.is_universal:
        lines.append('  all [shape=plaintext, label="(all access paths)"];')
    else:
        members = sorted(s, key=AccessPath.sort_key)
        if not members:
            lines.append('  empty [shape=plaintext, label="(empty)"];')
        for p in members:
            label = p.frontier if not p.is_simple else p.root
            lines.append(f"  {_quote(str(p))} [label={_quote(label)}];")
            if not p.is_simple:
                lines.append(f"  {_quote(str(p.base))} -> {_quote(str(p))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def pairs_dot(pairs: Iterable[AliasPair], name: str = "aliases") -> str:
    """One cluster per alias pair holding its two graphs."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    pairs = sorted(pairs, key=str)
    if not pairs:
        lines.append('  empty [shape=plaintext, label="(no pairs)"];')
    for i, pair in enumerate(pairs):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_quote(str(pair))};")
        for j, g in enumerate((pair.first, pair.second)):
            ids = {n: f"p{i}g{j}n{k}" for k, n in enumerate(sorted(g.nodes))}
            for n in sorted(g.nodes):
                style = "solid" if n in g.final else "dashed"
                lines.append(f"    {ids[n]} [label={_quote(n.short())}, style={style}];")
            for a, b in sorted(g.edges):
                lines.append(f"    {ids[a]} -> {ids[b]};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_for(analyses: Analyses, point: ProgramPoint, kind: str, var: str | None = None) -> str:
    """DOT for one analysis value at ``point``."""
    name = f"{kind} {point}" + (f" {var}" if var else "")
    if kind in (LIVE, CLIVE):
        if var is None:
            raise ValueError(f"--var is required for --kind {kind}")
        res = analyses.explicit if kind == LIVE else analyses.complete
        return to_dot(res.at(point.block, point.side, var), name)
    if kind == ALIAS:
        return pairs_dot(analyses.aliases.at(point.block, point.side), name)
    if kind in (AVAIL, ANT):
        res = analyses.avail if kind == AVAIL else analyses.ant
        s = res.at(point.block, point.side)
        if var is not None and not s.is_universal:
            s = PathSet.of(p for p in s if p.root == var)
        return pathset_dot(s, name)
    raise ValueError(f"unknown kind {kind!r}")
