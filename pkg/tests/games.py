"""Deterministic family of small GR(1) games written as spec text.

Every game has at most four state bits and at most two goals per side.
Each one comes with plain-Python predicates so the explicit reference
solver in ``oracles`` can decide it without touching the package.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from oracles import Expr, eval_expr, explicit_gr1, random_expr

SHAPES = ((1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1))


def render(e: Expr, names: Sequence[str]) -> str:
    tag = e[0]
    if tag == "const":
        return "TRUE" if e[1] else "FALSE"
    if tag == "var":
        return names[e[1]]
    if tag == "not":
        return f"!({render(e[1], names)})"
    if tag == "ite":
        c, a, b = (render(x, names) for x in e[1:])
        return f"(({c}) -> ({a})) && (!({c}) -> ({b}))"
    a, b = render(e[1], names), render(e[2], names)
    op = {"and": "&&", "or": "||", "implies": "->", "iff": "<->"}.get(tag)
    if op is None:
        return f"!(({a}) <-> ({b}))"
    return f"({a}) {op} ({b})"


def _vars(e: Expr) -> set:
    if e[0] == "var":
        return {e[1]}
    if e[0] == "const":
        return set()
    return set().union(*(_vars(c) for c in e[1:]))


def _restrict_vars(rng: random.Random, allowed: Sequence[int], depth: int) -> Expr:
    """Random expression whose variables are drawn from ``allowed``."""
    e = random_expr(rng, len(allowed), depth)

    def remap(x: Expr) -> Expr:
        if x[0] == "var":
            return ("var", allowed[x[1]])
        if x[0] == "const":
            return x
        return (x[0],) + tuple(remap(c) for c in x[1:])

    return remap(e)


@dataclass
class TemplateGame:
    seed: int
    nx: int
    ny: int
    text: str
    init_e: Expr
    init_s: Expr
    trans_e: Expr
    trans_s: Expr
    goals_e: List[Expr]
    goals_s: List[Expr]

    @property
    def x_names(self) -> List[str]:
        return [f"x{i}" for i in range(self.nx)]

    @property
    def y_names(self) -> List[str]:
        return [f"y{i}" for i in range(self.ny)]

    def predicates(self):
        """``(init_e, init_s, trans_e, trans_s, goals_e, goals_s)`` as
        Python callables over bool tuples."""
        nx, ny = self.nx, self.ny
        pad_y = (False,) * ny
        pad_x = (False,) * nx

        def ev(e: Expr, *parts: Tuple[bool, ...]) -> bool:
            bits: Tuple[bool, ...] = ()
            for p in parts:
                bits += tuple(p)
            return eval_expr(e, bits)

        if _vars(self.trans_e) <= set(range(nx)):
            # an env constraint on env bits alone binds the initial state
            # and every successor rather than the current state
            def init_e(x):
                return ev(self.init_e, x, pad_y, pad_x, pad_y) and ev(self.trans_e, x, pad_y, pad_x, pad_y)

            def trans_e(x, y, x2):
                return ev(self.trans_e, x2, pad_y, pad_x, pad_y)
        else:
            def init_e(x):
                return ev(self.init_e, x, pad_y, pad_x, pad_y)

            def trans_e(x, y, x2):
                return ev(self.trans_e, x, y, x2, pad_y)

        return (init_e,
                lambda x, y: ev(self.init_s, x, y, pad_x, pad_y),
                trans_e,
                lambda x, y, x2, y2: ev(self.trans_s, x, y, x2, y2),
                [lambda x, y, g=g: ev(g, x, y, pad_x, pad_y) for g in self.goals_e],
                [lambda x, y, g=g: ev(g, x, y, pad_x, pad_y) for g in self.goals_s])

    def explicit(self) -> Tuple[frozenset, bool]:
        return explicit_gr1(self.nx, self.ny, *self.predicates())

    def explicit_win_named(self) -> Tuple[frozenset, bool]:
        """Winning states as tuples in ``x_names + y_names`` order."""
        win, real = self.explicit()
        return frozenset(x + y for x, y in win), real


def template_game(seed: int) -> TemplateGame:
    rng = random.Random(seed)
    nx, ny = SHAPES[seed % len(SHAPES)]
    xs = list(range(nx))
    ys = list(range(nx, nx + ny))
    x2 = list(range(nx + ny, 2 * nx + ny))
    y2 = list(range(2 * nx + ny, 2 * nx + 2 * ny))
    names = ([f"x{i}" for i in range(nx)] + [f"y{i}" for i in range(ny)]
             + [f"X(x{i})" for i in range(nx)] + [f"X(y{i})" for i in range(ny)])

    def maybe(e: Expr, p: float) -> Expr:
        return e if rng.random() < p else ("const", True)

    init_e = maybe(_restrict_vars(rng, xs, 1), 0.5)
    init_s = maybe(_restrict_vars(rng, xs + ys, 1), 0.5)
    trans_e = maybe(_restrict_vars(rng, xs + ys + x2, 2), 0.7)
    trans_s = maybe(_restrict_vars(rng, xs + ys + x2 + y2, 2), 0.85)
    goals_e = [_restrict_vars(rng, xs + ys, 1) for _ in range(rng.randrange(3))]
    goals_s = [_restrict_vars(rng, xs + ys, 1) for _ in range(rng.randrange(3))]

    lines = ["[SIGNALS]"]
    lines += [f"x{i} : env : bool" for i in range(nx)]
    lines += [f"y{i} : sys : bool" for i in range(ny)]
    lines += ["", "[ENV_INIT]", render(init_e, names), "", "[SYS_INIT]", render(init_s, names)]
    lines += ["", "[ENV_TRANS]", f"G({render(trans_e, names)})"]
    lines += ["", "[SYS_TRANS]", f"G({render(trans_s, names)})"]
    lines += ["", "[ENV_FAIR]"] + [f"G(F({render(g, names)}))" for g in goals_e]
    lines += ["", "[SYS_FAIR]"] + [f"G(F({render(g, names)}))" for g in goals_s]
    text = "\n".join(lines) + "\n"
    return TemplateGame(seed, nx, ny, text, init_e, init_s, trans_e, trans_s, goals_e, goals_s)


def symbolic(game: TemplateGame):
    """Parse, build and solve; returns (game structure, certificate, realizable)."""
    from gr1forge.parser import parse_spec
    from gr1forge.pipeline import prepare_game
    from gr1forge.solver import is_realizable, solve

    doc = parse_spec(game.text, f"t{game.seed}")
    g = prepare_game(doc, order="declared")
    cert = solve(g)
    return g, cert, is_realizable(g, cert)


def reorder(states: frozenset, names: Sequence[str], target: Sequence[str]) -> frozenset:
    pos = [list(names).index(n) for n in target]
    return frozenset(tuple(s[p] for p in pos) for s in states)

