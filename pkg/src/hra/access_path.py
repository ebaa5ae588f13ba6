"""Access paths and the prefix-closed path sets used by availability and
anticipability.

An access path is a root variable followed by a (possibly empty) sequence of
field names, written ``x->f->g``.  The empty path is a distinguished value
with no root.  ``PathSet`` is either a finite set of paths or the symbolic
universal set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

EMPTY_TEXT = "<empty>"


@dataclass(frozen=True, order=True)
class AccessPath:
    root: str | None
    fields: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.root is None and self.fields:
            raise ValueError("the empty access path has no fields")

    # -- structure -------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return self.root is None

    @property
    def is_simple(self) -> bool:
        return self.root is not None and not self.fields

    def __len__(self) -> int:
        """Number of names in the path (root included)."""
        return 0 if self.root is None else 1 + len(self.fields)

    @property
    def base(self) -> "AccessPath":
        if self.root is None:
            raise ValueError("the empty access path has no base")
        if not self.fields:
            return EMPTY
        return AccessPath(self.root, self.fields[:-1])

    @property
    def frontier(self) -> str:
        if self.root is None:
            raise ValueError("the empty access path has no frontier")
        return self.fields[-1] if self.fields else self.root

    def decompose(self) -> tuple["AccessPath", str]:
        return self.base, self.frontier

    def extend(self, *fields: str) -> "AccessPath":
        if self.root is None:
            raise ValueError("cannot extend the empty access path")
        return AccessPath(self.root, self.fields + tuple(fields))

    def is_prefix_of(self, other: "AccessPath") -> bool:
        if self.root is None or self.root != other.root:
            return False
        n = len(self.fields)
        return other.fields[:n] == self.fields

    def suffix_after(self, prefix: "AccessPath") -> tuple[str, ...]:
        if not prefix.is_prefix_of(self):
            raise ValueError(f"{prefix} is not a prefix of {self}")
        return self.fields[len(prefix.fields):]

    def replace_prefix(self, old: "AccessPath", new: "AccessPath") -> "AccessPath":
        return new.extend(*self.suffix_after(old))

    def prefixes(self, proper: bool = False) -> "PathSet":
        return PathSet.of(self.iter_prefixes(proper))

    def iter_prefixes(self, proper: bool = False) -> Iterator["AccessPath"]:
        if self.root is None:
            return
        stop = len(self.fields) if proper else len(self.fields) + 1
        for k in range(stop):
            yield AccessPath(self.root, self.fields[:k])

    def sort_key(self) -> tuple:
        return (len(self), str(self))

    def __str__(self) -> str:
        if self.root is None:
            return EMPTY_TEXT
        return "->".join((self.root,) + self.fields)

    def __repr__(self) -> str:
        return f"AccessPath({str(self)!r})"


EMPTY = AccessPath(None)


def path(text: str) -> AccessPath:
    """Parse ``x->f->g`` (dots are accepted too)."""
    text = text.strip()
    if text in ("", EMPTY_TEXT):
        return EMPTY
    parts = [p.strip() for p in text.replace(".", "->").split("->")]
    if not all(p.isidentifier() for p in parts):
        raise ValueError(f"malformed access path: {text!r}")
    return AccessPath(parts[0], tuple(parts[1:]))


def prefixes(p: AccessPath, proper: bool = False) -> "PathSet":
    return p.prefixes(proper)


def decompose(p: AccessPath) -> tuple[AccessPath, str]:
    return p.decompose()


@dataclass(frozen=True)
class SummaryMark:
    """``rho->*``: the path itself together with every extension of it."""

    path: AccessPath

    def covers(self, other: AccessPath) -> bool:
        return self.path.is_prefix_of(other)

    def __str__(self) -> str:
        return f"{self.path}->*"


def parse_mark(text: str) -> AccessPath | SummaryMark:
    text = text.strip()
    if text.endswith("->*"):
        return SummaryMark(path(text[:-3]))
    return path(text)


class PathSet:
    """A finite set of access paths, or the universal set.

    The universal set may carry removed cones (``rho->*``); it never gets
    enumerated.  Intersecting it with a finite set applies the removed cones
    and yields a finite set again.
    """

    __slots__ = ("_paths", "_cones", "_hash")

    def __init__(self, paths: Iterable[AccessPath] | None = None,
                 cones: Iterable[AccessPath] = ()) -> None:
        if paths is None:
            self._paths = None
            self._cones = frozenset(cones)
        else:
            items = frozenset(paths)
            if EMPTY in items:
                raise ValueError("path sets hold non-empty paths only")
            self._paths = items
            self._cones = frozenset()
        self._hash: int | None = None

    @classmethod
    def universal(cls) -> "PathSet":
        return cls(None)

    @classmethod
    def of(cls, paths: Iterable[AccessPath] = ()) -> "PathSet":
        return cls(list(paths))

    @property
    def is_universal(self) -> bool:
        return self._paths is None

    @property
    def paths(self) -> frozenset[AccessPath]:
        if self._paths is None:
            raise ValueError("the universal path set cannot be enumerated")
        return self._paths

    def __contains__(self, p: object) -> bool:
        if not isinstance(p, AccessPath):
            return False
        if self._paths is None:
            return not p.is_empty and not any(c.is_prefix_of(p) for c in self._cones)
        return p in self._paths

    def __iter__(self) -> Iterator[AccessPath]:
        return iter(sorted(self.paths, key=AccessPath.sort_key))

    def __len__(self) -> int:
        return len(self.paths)

    def __bool__(self) -> bool:
        return self._paths is None or bool(self._paths)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PathSet):
            return NotImplemented
        return self._paths == other._paths and self._cones == other._cones

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._paths, self._cones))
        return self._hash

    def __repr__(self) -> str:
        if self._paths is None:
            if self._cones:
                cones = ", ".join(sorted(f"{c}->*" for c in self._cones))
                return f"PathSet(Universal - {{{cones}}})"
            return "PathSet(Universal)"
        return "PathSet({" + ", ".join(str(p) for p in self) + "})"

    # -- lattice operations ----------------------------------------------
    def union(self, other: "PathSet | Iterable[AccessPath]") -> "PathSet":
        other = _as_set(other)
        if self._paths is None:
            return self
        if other._paths is None:
            return other
        return PathSet.of(self._paths | other._paths)

    __or__ = union

    def intersect(self, other: "PathSet") -> "PathSet":
        if self._paths is None and other._paths is None:
            return PathSet(None, self._cones | other._cones)
        if self._paths is None:
            return other._filtered(self._cones)
        if other._paths is None:
            return self._filtered(other._cones)
        return PathSet.of(self._paths & other._paths)

    __and__ = intersect

    def _filtered(self, cones: frozenset[AccessPath]) -> "PathSet":
        if not cones:
            return self
        return PathSet.of(p for p in self.paths
                          if not any(c.is_prefix_of(p) for c in cones))

    def remove_with_prefix(self, prefix: AccessPath) -> "PathSet":
        """Drop every member having ``prefix`` as a prefix."""
        if prefix.is_empty:
            return self
        if self._paths is None:
            return PathSet(None, self._cones | {prefix})
        return PathSet.of(p for p in self._paths if not prefix.is_prefix_of(p))

    def remove_star(self, mark: SummaryMark) -> "PathSet":
        return self.remove_with_prefix(mark.path)

    def member(self, p: AccessPath) -> bool:
        return p in self

    def is_prefix_closed(self) -> bool:
        if self._paths is None:
            return True
        return all(p.base in self._paths for p in self._paths if not p.is_simple)

    def sorted(self) -> list[AccessPath]:
        return list(self)

    def to_text(self) -> list[str] | str:
        if self._paths is None:
            return "Universal"
        return [str(p) for p in self]


def _as_set(value: "PathSet | Iterable[AccessPath]") -> PathSet:
    return value if isinstance(value, PathSet) else PathSet.of(value)


def pathset(*texts: str) -> PathSet:
    return PathSet.of(path(t) for t in texts)
