"""Symbolic game structure built from a normalized GR(1) specification."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .bdd import BDD, NodeRef
from .encode import bit_names, bit_width
from .formula import (
    And, Atom, Const, Formula, Iff, Implies, Next, Not, Or, SpecDocument, atoms,
)
from .monitors import NormalizedGR1
from .parser import SpecError

__all__ = [
    "GameStructure", "GameBuildError", "build_game", "cpre", "formula_to_bdd",
    "family_order", "env_viable", "env_fair_region", "env_safe_moves",
]

COUNTER = "_goal"


class GameBuildError(SpecError):
    pass


@dataclass
class GameStructure:
    """Variable partition plus transition, init and fairness diagrams.

    ``x_vars``/``y_vars`` hold current-state indices in the manager,
    ``x_primed``/``y_primed`` their next-state copies.  ``c_vars`` are the
    goal-counter bits reserved for strategy extraction (not part of the
    game itself).
    """

    bdd: BDD
    spec: NormalizedGR1
    x_names: List[str]
    y_names: List[str]
    x_vars: List[int]
    y_vars: List[int]
    x_primed: List[int]
    y_primed: List[int]
    c_vars: List[int]
    c_primed: List[int]
    init_e: NodeRef
    init_s: NodeRef
    trans_e: NodeRef
    trans_s: NodeRef
    fair_e: List[NodeRef]
    fair_s: List[NodeRef]

    @property
    def prime_map(self) -> Dict[int, int]:
        cur = self.x_vars + self.y_vars + self.c_vars
        nxt = self.x_primed + self.y_primed + self.c_primed
        return dict(zip(cur, nxt))

    @property
    def unprime_map(self) -> Dict[int, int]:
        return {b: a for a, b in self.prime_map.items()}

    def prime(self, f: NodeRef) -> NodeRef:
        return self.bdd.rename(f, self.prime_map)

    def unprime(self, f: NodeRef) -> NodeRef:
        return self.bdd.rename(f, self.unprime_map)

    @property
    def n_goals(self) -> int:
        return len(self.fair_s)

    def counter_value(self, j: int, primed: bool = False) -> NodeRef:
        bits = self.c_primed if primed else self.c_vars
        return self.bdd.cube({b: bool((j >> i) & 1) for i, b in enumerate(bits)})

    def counter_valid(self, primed: bool = False) -> NodeRef:
        return self.bdd.disj(self.counter_value(j, primed) for j in range(self.n_goals))

    def var_names(self, indices: Sequence[int]) -> List[str]:
        return [self.bdd.var_name(i) for i in indices]


def formula_to_bdd(bdd: BDD, f: Formula, current: Dict[str, int],
                   primed: Optional[Dict[str, int]] = None) -> NodeRef:
    """Diagram of a Boolean formula; ``Next`` switches atoms to ``primed``."""
    memo: Dict[tuple, NodeRef] = {}

    def go(g: Formula, nxt: bool) -> NodeRef:
        key = (g, nxt)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(g, Const):
            r = bdd.const(g.value)
        elif isinstance(g, Atom):
            table = primed if nxt else current
            if table is None or g.signal not in table:
                where = "next" if nxt else "current"
                raise GameBuildError(f"variable {g.signal!r} not available as {where}-state")
            r = bdd.mk_var(table[g.signal])
        elif isinstance(g, Not):
            r = ~go(g.arg, nxt)
        elif isinstance(g, And):
            r = bdd.true
            for a in g.args:
                r = r & go(a, nxt)
        elif isinstance(g, Or):
            r = bdd.false
            for a in g.args:
                r = r | go(a, nxt)
        elif isinstance(g, Implies):
            r = ~go(g.lhs, nxt) | go(g.rhs, nxt)
        elif isinstance(g, Iff):
            r = ~(go(g.lhs, nxt) ^ go(g.rhs, nxt))
        elif isinstance(g, Next):
            if nxt:
                raise GameBuildError(f"nested next in {g}")
            r = go(g.arg, True)
        else:
            raise GameBuildError(f"temporal operator survived normalization: {g}")
        memo[key] = r
        return r

    return go(f, False)


_INDEXED = re.compile(r"^(.*?[A-Za-z_])(\d+)$")


def family_order(doc: SpecDocument, spec: NormalizedGR1) -> List[str]:
    """Variable order that keeps indexed signal families together.

    A Boolean signal named like ``HBUSREQ3`` belongs to family 3, bit ``k``
    of a vector to family ``k``; enum bits and unindexed signals are
    shared.  A monitor joins the family of its source entry when that entry
    mentions exactly one family.  Shared variables come first, then each
    family in index order; within a block declaration order is kept.
    """
    family: Dict[str, int] = {}
    for d in doc.decls:
        if d.kind == "vec":
            for k, b in enumerate(bit_names(d)):
                family[b] = k
        elif d.kind == "bool":
            m = _INDEXED.match(d.name)
            if m:
                family[d.name] = int(m.group(2))
    for mon in spec.monitors:
        fams = {family[a.signal] for a in atoms(mon.source) if a.signal in family}
        if len(fams) == 1:
            (k,) = fams
            for b in mon.bits:
                family[b] = k
    names = spec.names()
    pos = {n: i for i, n in enumerate(names)}
    return sorted(names, key=lambda n: (family.get(n, -1), pos[n]))


def build_game(spec: NormalizedGR1, bdd: Optional[BDD] = None,
               order: Optional[Sequence[str]] = None) -> GameStructure:
    """Declare variables and compile every part of ``spec``.

    Each variable is immediately followed by its next-state copy.  The goal
    counter comes first; the rest follows ``order`` when given, else env
    signals, sys signals, env monitor bits, sys monitor bits.
    """
    bdd = bdd if bdd is not None else BDD()
    groups = [
        spec.names("env", monitor=False),
        spec.names("sys", monitor=False),
        spec.names("env", monitor=True),
        spec.names("sys", monitor=True),
    ]
    # counter bits go first so strategy relations split on the goal index
    # before anything else
    c_names = [f"{COUNTER}.{i}" for i in range(bit_width(len(spec.fair_s)))]
    c_vars, c_primed = [], []
    for name in c_names:
        c_vars.append(bdd.declare(name))
        c_primed.append(bdd.declare(name + "'"))
    names = [n for group in groups for n in group]
    if order is not None:
        if sorted(order) != sorted(names):
            raise GameBuildError("variable order must list every signal and monitor bit once")
        names = list(order)
    cur: Dict[str, int] = {}
    nxt: Dict[str, int] = {}
    for name in names:
        cur[name] = bdd.declare(name)
        nxt[name] = bdd.declare(name + "'")

    x_names = groups[0] + groups[2]
    y_names = groups[1] + groups[3]
    x_vars = sorted(cur[n] for n in x_names)
    y_vars = sorted(cur[n] for n in y_names)
    x_names = [bdd.var_name(i) for i in x_vars]
    y_names = [bdd.var_name(i) for i in y_vars]
    env_next = {n: nxt[n] for n in x_names}

    def conj_all(fs, primed):
        r = bdd.true
        for f in fs:
            try:
                r = r & formula_to_bdd(bdd, f, cur, primed)
            except GameBuildError as exc:
                raise GameBuildError(f"{exc.message} (in {f})") from None
        return r

    init_e = formula_to_bdd(bdd, spec.init_e, cur)
    init_s = formula_to_bdd(bdd, spec.init_s, cur)
    trans_e = conj_all(spec.trans_e, env_next)
    trans_s = conj_all(spec.trans_s, nxt)
    fair_e = [formula_to_bdd(bdd, f, cur) for f in spec.fair_e]
    fair_s = [formula_to_bdd(bdd, f, cur) for f in spec.fair_s]
    return GameStructure(
        bdd, spec, x_names, y_names, x_vars, y_vars,
        [nxt[n] for n in x_names], [nxt[n] for n in y_names],
        c_vars, c_primed, init_e, init_s, trans_e, trans_s, fair_e, fair_s,
    )


def cpre(g: GameStructure, target: NodeRef) -> NodeRef:
    """Controllable predecessor:
    ``forall X'. trans_e -> exists Y'. trans_s & target'``.

    States where the environment has no admissible move are included.
    """
    bdd = g.bdd
    tp = bdd.rename(target, g.prime_map)
    sys_ok = bdd.and_exists(g.trans_s, tp, g.y_primed)
    bad = bdd.and_exists(g.trans_e, ~sys_ok, g.x_primed)
    return ~bad


def env_viable(g: GameStructure) -> NodeRef:
    """States from which the environment can keep making admissible moves
    forever, whatever the system answers:
    ``nu Z. exists X'. trans_e & forall Y'. trans_s -> Z'``."""
    bdd = g.bdd
    z = bdd.true
    while True:
        escape = bdd.and_exists(g.trans_s, ~g.prime(z), g.y_primed)
        z_new = z & bdd.exists(g.x_primed, g.trans_e & ~escape)
        if z_new == z:
            return z
        z = z_new


def _env_pre(g: GameStructure, target: NodeRef) -> NodeRef:
    """States where some env move forces every system answer into ``target``."""
    bdd = g.bdd
    escape = bdd.and_exists(g.trans_s, ~g.prime(target), g.y_primed)
    return bdd.exists(g.x_primed, g.trans_e & ~escape)


def env_fair_region(g: GameStructure) -> NodeRef:
    """States from which the environment can keep its safety assumptions
    and still meet every fairness assumption infinitely often:
    ``nu Z. AND_i mu Y. (J_i & epre(Z)) | epre(Y)``.

    Contained in :func:`env_viable`; a policy that stays here never traps
    itself into giving up a fairness condition.
    """
    bdd = g.bdd
    z = bdd.true
    while True:
        z_new = bdd.true
        for j in g.fair_e:
            target = j & _env_pre(g, z)
            y = bdd.false
            while True:
                y_new = target | _env_pre(g, y)
                if y_new == y:
                    break
                y = y_new
            z_new = z_new & y
        if z_new == z:
            return z
        z = z_new


def env_safe_moves(g: GameStructure, viable: Optional[NodeRef] = None) -> NodeRef:
    """Env moves (over current state and ``X'``) after which no system
    answer leaves the viable region."""
    bdd = g.bdd
    v = env_viable(g) if viable is None else viable
    return g.trans_e & ~bdd.and_exists(g.trans_s, ~g.prime(v), g.y_primed)
