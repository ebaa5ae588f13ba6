"""Round-robin iteration shared by the data-flow analyses."""

from __future__ import annotations

from typing import Callable, Sequence


class NonConvergence(RuntimeError):
    """Raised when an analysis exceeds its iteration bound."""


def round_robin(order: Sequence[int], step: Callable[[int], bool], bound: int,
                name: str = "analysis") -> int:
    """Apply ``step`` to every block in ``order`` until a whole pass changes
    nothing.  Returns the number of passes, the final confirming pass
    included."""
    passes = 0
    while True:
        passes += 1
        if passes > bound:
            raise NonConvergence(f"{name} did not stabilize within {bound} passes")
        changed = False
        for b in order:
            if step(b):
                changed = True
        if not changed:
            return passes
