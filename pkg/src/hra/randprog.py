"""Random heap IR programs for property tests and demos."""

from __future__ import annotations

import random

from hra.ir import Program, parse_program

FIELD_NAMES = ("f", "g", "h")
VAR_NAMES = ("a", "b", "c", "d")


def random_program_text(seed: int, max_blocks: int = 12, max_vars: int = 4,
                        max_fields: int = 3, loops: bool = False, calls: bool = False,
                        max_depth: int = 2) -> str:
    """Source of a random program over one record type.

    Branches jump forward only unless ``loops`` is set.  ``calls`` enables
    call and return statements.
    """
    rng = random.Random(seed)
    fields = FIELD_NAMES[:rng.randint(1, max_fields)]
    names = VAR_NAMES[:rng.randint(1, max_vars)]
    kinds = {v: rng.choice(("local", "local", "param", "global")) for v in names}
    n = rng.randint(1, max_blocks)

    def expr(depth: int | None = None) -> str:
        d = rng.randint(0, max_depth) if depth is None else depth
        return ".".join([rng.choice(names)] + [rng.choice(fields) for _ in range(d)])

    lines = [f"class T {{ {' '.join(fields)} }}"]
    lines += [f"{kinds[v]} {v}: T" for v in names]
    for i in range(n):
        r = rng.random()
        if r < 0.3:
            stmt = f"{expr()} = {expr()}"
        elif r < 0.45:
            stmt = f"{expr()} = new T"
        elif r < 0.6:
            stmt = f"{expr()} = null"
        elif r < 0.8:
            stmt = "use " + ", ".join(f"{expr()}.d" for _ in range(rng.randint(1, 2)))
        elif calls and r < 0.88:
            args = ", ".join(expr() for _ in range(rng.randint(0, 2)))
            stmt = f"{expr()} = call f({args})"
        elif calls and r < 0.92 and i == n - 1:
            stmt = f"return {expr()}"
        else:
            stmt = "skip"
        lines.append(f"L{i}: {stmt}")
        if stmt.startswith("return"):
            break
        t = rng.random()
        if t < 0.3:
            j = rng.randint(i + 1, n) if not loops or rng.random() < 0.6 else rng.randint(0, i)
            target = f"L{j}" if j < n else "END"
            lines.append(f"    if c goto {target}")
        elif t < 0.38 and i + 2 <= n:
            j = rng.randint(i + 2, n)
            lines.append(f"    goto {f'L{j}' if j < n else 'END'}")
    lines.append("END: skip")
    return "\n".join(lines) + "\n"


def random_program(seed: int, **kw) -> Program:
    return parse_program(random_program_text(seed, **kw))
