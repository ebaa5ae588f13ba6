"""Heap reference analysis with access graphs.

The pipeline: parse a program (:mod:`hra.ir`), compute explicit liveness
(:mod:`hra.liveness`), may-aliases and complete liveness (:mod:`hra.alias`),
availability and anticipability (:mod:`hra.avail_ant`), then insert null
assignments (:mod:`hra.nullifier`) and check them on a concrete heap
(:mod:`hra.interp`).
"""

from hra.access_path import EMPTY, AccessPath, PathSet, path, pathset
from hra.access_graph import EMPTY_GRAPH, AccessGraph, contains_path
from hra.ir import Program, parse_program

__version__ = "0.1.0"

FIXTURES = ("run", "loop", "seq", "appendix", "pn")


def fixture_text(name: str) -> str:
    """Source of a bundled example program (``run``, ``loop``, ...)."""
    from importlib.resources import files

    stem = name[:-3] if name.endswith(".ir") else name
    return files("hra").joinpath("fixtures", f"{stem}.ir").read_text()


def load_fixture(name: str) -> Program:
    return parse_program(fixture_text(name))

__all__ = [
    "EMPTY", "AccessPath", "PathSet", "path", "pathset",
    "EMPTY_GRAPH", "AccessGraph", "contains_path",
    "Program", "parse_program", "FIXTURES", "fixture_text", "load_fixture",
]
