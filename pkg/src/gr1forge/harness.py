"""Trace semantics, simulation and cross-checks for synthesized controllers.

Two independent views of every specification are compared here: direct
evaluation of formulas on traces (``eval_formula``) and the compiled
monitors driven step by step.  Simulation drives a circuit (an in-memory
:class:`Netlist` or a parsed :class:`BlifModel`) against an environment
policy and judges every step against the source entries.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .bdd import NodeRef
from .circuit import BlifModel, Netlist
from .encode import bit_names, value_code
from .formula import (
    Always, And, Atom, Before, Const, Eventually, Formula, Iff, Implies, Next,
    Not, Or, SignalDecl, SpecDocument, UntilW, UntilWCount, next_depth, to_text,
)
from .game import GameStructure, env_fair_region, env_safe_moves
from .monitors import NormalizedGR1, compile_monitors
from .solver import StrategyRelation, WinningCertificate

__all__ = [
    "Trace", "Verdict", "SimResult", "eval_formula", "monitor_equiv",
    "ExplicitResult", "explicit_game_oracle", "state_set",
    "EnvPolicy", "RandomPolicy", "ScriptPolicy", "AdversarialPolicy",
    "PolicyError", "SignalMismatchError", "make_policy", "parse_script",
    "closed_loop", "cosimulate", "refinement_check", "blif_functions",
]

Circuit = Union[Netlist, BlifModel]


class PolicyError(RuntimeError):
    """The environment policy cannot produce an admissible input."""


class SignalMismatchError(ValueError):
    """Circuit wires do not match the variables of the game."""


# -- traces ----------------------------------------------------------------

@dataclass
class Trace:
    """A finite trace, or a lasso when ``loop`` is set (the step after the
    last one is ``steps[loop]``).

    Steps map names to values.  Bit-level names (``HTRANS.0``) and
    declared signals (``HTRANS`` with an enum value, vectors as integers)
    are both understood by :func:`eval_formula`; ``decls`` lets enum atoms
    be decoded from bits.
    """

    steps: List[Dict[str, object]]
    loop: Optional[int] = None
    decls: Tuple[SignalDecl, ...] = ()

    def __post_init__(self):
        if self.loop is not None and not 0 <= self.loop < len(self.steps):
            raise ValueError("loop index outside the trace")

    def __len__(self) -> int:
        return len(self.steps)

    def succ(self, i: int) -> Optional[int]:
        if i + 1 < len(self.steps):
            return i + 1
        return self.loop

    def prefix(self, n: int) -> "Trace":
        return Trace(self.steps[:n], None, self.decls)

    def decoded(self) -> List[Dict[str, object]]:
        """Steps in terms of declared signals (needs ``decls``)."""
        out = []
        for step in self.steps:
            row: Dict[str, object] = {}
            for d in self.decls:
                row[d.name] = _signal_value(step, d)
            out.append(row)
        return out

    def to_vcd_lite(self) -> str:
        """``t=<k> sig=val ...`` lines, one per step."""
        rows = self.decoded() if self.decls else self.steps
        lines = []
        for k, row in enumerate(rows):
            parts = [f"t={k}"]
            for name, v in row.items():
                if isinstance(v, bool):
                    v = int(v)
                parts.append(f"{name}={v}")
            lines.append(" ".join(parts))
        if self.loop is not None:
            lines.append(f"loop={self.loop}")
        return "\n".join(lines) + "\n"


def _signal_value(step: Mapping[str, object], d: SignalDecl) -> object:
    if d.name in step:
        return step[d.name]
    bits = bit_names(d)
    if d.kind == "bool":
        return bool(step[d.name])
    code = sum(int(bool(step[b])) << i for i, b in enumerate(bits))
    if d.kind == "vec":
        return code
    return d.values[code] if code < len(d.values) else f"?{code}"


def _atom(step: Mapping[str, object], a: Atom, decls: Sequence[SignalDecl]) -> bool:
    v = step.get(a.signal, _MISSING)
    if a.value is None:
        if v is _MISSING:
            raise KeyError(a.signal)
        return bool(v)
    if isinstance(a.value, int):
        if v is not _MISSING:
            return bool((int(v) >> a.value) & 1)
        return bool(step[f"{a.signal}.{a.value}"])
    if v is not _MISSING:
        return v == a.value
    for d in decls:
        if d.name == a.signal:
            return _signal_value(step, d) == a.value
    raise KeyError(a.signal)


_MISSING = object()


def _walk(t: Trace, i: int, limit: int) -> Iterator[int]:
    p: Optional[int] = i
    for _ in range(limit):
        if p is None:
            return
        yield p
        p = t.succ(p)


def eval_formula(f: Formula, t: Trace, pos: int = 0) -> bool:
    """Truth of ``f`` at ``pos``.

    Lassos get the usual infinite-word semantics.  On a finite trace the
    weak operators (``X``, ``G``, weak until, ``BEFORE``) hold when the
    trace ends before they are refuted, while ``F`` needs a witness.
    """
    n = len(t)
    if not 0 <= pos < n:
        raise IndexError(pos)

    def ev(g: Formula, i: int) -> bool:
        if isinstance(g, Const):
            return g.value
        if isinstance(g, Atom):
            return _atom(t.steps[i], g, t.decls)
        if isinstance(g, Not):
            return not ev(g.arg, i)
        if isinstance(g, And):
            return all(ev(a, i) for a in g.args)
        if isinstance(g, Or):
            return any(ev(a, i) for a in g.args)
        if isinstance(g, Implies):
            return (not ev(g.lhs, i)) or ev(g.rhs, i)
        if isinstance(g, Iff):
            return ev(g.lhs, i) == ev(g.rhs, i)
        if isinstance(g, Next):
            j = t.succ(i)
            return True if j is None else ev(g.arg, j)
        if isinstance(g, Always):
            return all(ev(g.arg, p) for p in _walk(t, i, 2 * n))
        if isinstance(g, Eventually):
            return any(ev(g.arg, p) for p in _walk(t, i, 2 * n))
        if isinstance(g, UntilW):
            for p in _walk(t, i, 2 * n):
                if not ev(g.lhs, p):
                    return False
                if ev(g.rhs, p):
                    return True
            return True
        if isinstance(g, UntilWCount):
            seen = 0
            for p in _walk(t, i, (g.count + 2) * n):
                if not ev(g.lhs, p):
                    return False
                if ev(g.rhs, p):
                    seen += 1
                    if seen == g.count:
                        return True
            return True
        if isinstance(g, Before):
            for p in _walk(t, i, 2 * n):
                if ev(g.rhs, p):
                    return False
                if ev(g.lhs, p):
                    return True
            return True
        raise TypeError(f"cannot evaluate {type(g).__name__}")

    return ev(f, pos)


# -- verdicts --------------------------------------------------------------

@dataclass
class Verdict:
    """Outcome of a check.

    ``kind`` is ``pass``, ``safety_violation``, ``pending_obligations``,
    ``fairness_starved`` or ``mismatch``.  Only violations and mismatches
    count as failures; pending obligations at the horizon and unseen env
    fairness are reported for information.
    """

    kind: str
    step: Optional[int] = None
    conjunct: Optional[str] = None
    pending: List[str] = field(default_factory=list)
    fairness: Dict[str, bool] = field(default_factory=dict)
    message: str = ""
    trace: Optional[Trace] = None
    formula: Optional[Formula] = None
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.kind not in ("safety_violation", "mismatch")

    def to_dict(self) -> Dict[str, object]:
        d: Dict[str, object] = {"verdict": self.kind, "ok": self.ok}
        if self.step is not None:
            d["step"] = self.step
        if self.conjunct is not None:
            d["conjunct"] = self.conjunct
        if self.pending:
            d["pending"] = self.pending
        if self.fairness:
            d["env_fairness_seen"] = self.fairness
        if self.message:
            d["message"] = self.message
        d.update(self.details)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- vectorised evaluation for exhaustive sweeps -----------------------------

def _shift(a: np.ndarray, loop: Optional[int]) -> np.ndarray:
    """``a`` read at the successor of every position (TRUE past the end)."""
    out = np.empty_like(a)
    out[:, :-1] = a[:, 1:]
    out[:, -1] = a[:, loop] if loop is not None else True
    return out


def _gfp(step, shape) -> np.ndarray:
    x = np.ones(shape, dtype=bool)
    while True:
        nx = step(x)
        if np.array_equal(nx, x):
            return x
        x = nx


def _batch_temporal(f: Formula, val: Mapping[str, np.ndarray], loop: Optional[int]) -> np.ndarray:
    """Truth of ``f`` at every position of many same-shaped traces at once.

    ``val`` maps Boolean atom names to ``(traces, length)`` arrays.
    """
    shape = next(iter(val.values())).shape
    n = shape[1]

    def go(g: Formula) -> np.ndarray:
        if isinstance(g, Const):
            return np.full(shape, g.value)
        if isinstance(g, Atom):
            if g.value is not None:
                raise TypeError("batch evaluation needs Boolean atoms")
            return val[g.signal]
        if isinstance(g, Not):
            return ~go(g.arg)
        if isinstance(g, And):
            r = np.ones(shape, dtype=bool)
            for a in g.args:
                r = r & go(a)
            return r
        if isinstance(g, Or):
            r = np.zeros(shape, dtype=bool)
            for a in g.args:
                r = r | go(a)
            return r
        if isinstance(g, Implies):
            return ~go(g.lhs) | go(g.rhs)
        if isinstance(g, Iff):
            return go(g.lhs) == go(g.rhs)
        if isinstance(g, Next):
            return _shift(go(g.arg), loop)
        if isinstance(g, (Always, Eventually)):
            a = go(g.arg)
            out = np.empty_like(a)
            red = np.all if isinstance(g, Always) else np.any
            comb = np.logical_and if isinstance(g, Always) else np.logical_or
            if loop is None:
                out[:, -1] = a[:, -1]
                start = n - 1
            else:
                cyc = red(a[:, loop:], axis=1)
                out[:, loop:] = cyc[:, None]
                start = loop
            for i in range(start - 1, -1, -1):
                out[:, i] = comb(a[:, i], out[:, i + 1])
            return out
        if isinstance(g, UntilW):
            b, c = go(g.lhs), go(g.rhs)
            return _gfp(lambda x: b & (c | _shift(x, loop)), shape)
        if isinstance(g, UntilWCount):
            b, c = go(g.lhs), go(g.rhs)
            prev = np.ones(shape, dtype=bool)
            for _ in range(g.count):
                lower = _shift(prev, loop)
                prev = _gfp(lambda x: b & np.where(c, lower, _shift(x, loop)), shape)
            return prev
        if isinstance(g, Before):
            p, q = go(g.lhs), go(g.rhs)
            return _gfp(lambda x: ~q & (p | _shift(x, loop)), shape)
        raise TypeError(f"cannot evaluate {type(g).__name__}")

    return go(f)


def _batch_bool(f: Formula, cur: Mapping[str, np.ndarray], nxt: Optional[Mapping[str, np.ndarray]],
                size: int) -> np.ndarray:
    def go(g: Formula, env: Optional[Mapping[str, np.ndarray]]) -> np.ndarray:
        if isinstance(g, Const):
            return np.full(size, g.value)
        if isinstance(g, Atom):
            if env is None:
                raise ValueError("next value read past the end")
            return env[g.signal]
        if isinstance(g, Not):
            return ~go(g.arg, env)
        if isinstance(g, And):
            r = np.ones(size, dtype=bool)
            for a in g.args:
                r = r & go(a, env)
            return r
        if isinstance(g, Or):
            r = np.zeros(size, dtype=bool)
            for a in g.args:
                r = r | go(a, env)
            return r
        if isinstance(g, Implies):
            return ~go(g.lhs, env) | go(g.rhs, env)
        if isinstance(g, Iff):
            return go(g.lhs, env) == go(g.rhs, env)
        if isinstance(g, Next):
            return go(g.arg, nxt)
        raise TypeError(f"{type(g).__name__} in a compiled conjunct")

    return go(f, cur)


def _split(f: Formula) -> List[Formula]:
    return list(f.args) if isinstance(f, And) else [f]


def _side_parts(spec: NormalizedGR1, side: str):
    if side == "sys":
        return spec.init_s, spec.trans_s, spec.fair_s
    return spec.init_e, spec.trans_e, spec.fair_e


def _monitored_accepts(spec: NormalizedGR1, side: str, val: Mapping[str, np.ndarray],
                       loop: Optional[int]) -> np.ndarray:
    """Whether the compiled side accepts each trace.

    Monitors are deterministic, so the run over a lasso becomes periodic
    once a (position, monitor state) pair repeats; fairness is judged on a
    window long enough to contain a full period.
    """
    size, n = next(iter(val.values())).shape
    mons = [m for m in spec.monitors if m.owner == side]
    bits = [b for m in mons for b in m.bits]
    init, trans, fair = _side_parts(spec, side)
    init_parts = _split(init)

    def signals_at(p: int) -> Dict[str, np.ndarray]:
        return {a: v[:, p] for a, v in val.items()}

    # initial monitor state: the first valuation of the bits meeting init
    sig0 = signals_at(0)
    chosen = {b: np.zeros(size, dtype=bool) for b in bits}
    found = np.zeros(size, dtype=bool)
    for combo in itertools.product((False, True), repeat=len(bits)):
        cur = dict(sig0)
        cur.update({b: np.full(size, v) for b, v in zip(bits, combo)})
        sat = np.ones(size, dtype=bool)
        for part in init_parts:
            sat &= _batch_bool(part, cur, None, size)
        take = sat & ~found
        for b, v in zip(bits, combo):
            chosen[b] = np.where(take, v, chosen[b])
        found |= sat
    ok = found.copy()
    m = chosen

    if loop is None:
        horizon, window = n, 0
    else:
        period = (n - loop) * (1 << len(bits))
        horizon = n + 2 * period + 1
        window = period
    seen = [np.zeros(size, dtype=bool) for _ in fair]
    p = 0
    for t in range(horizon):
        cur = signals_at(p)
        cur.update(m)
        q = p + 1 if p + 1 < n else loop
        last = t == horizon - 1 or q is None
        if last:
            for c in trans:
                if next_depth(c) == 0:
                    ok &= _batch_bool(c, cur, None, size)
        else:
            nxt = signals_at(q)
            m_next = {}
            for mon in mons:
                for b, upd in mon.update:
                    m_next[b] = _batch_bool(upd, cur, nxt, size)
            nxt.update(m_next)
            for c in trans:
                ok &= _batch_bool(c, cur, nxt, size)
        if loop is not None and t >= horizon - window - 1:
            for k, j in enumerate(fair):
                seen[k] |= _batch_bool(j, cur, None, size)
        if last:
            break
        m = m_next
        p = q
    if loop is not None:
        for s in seen:
            ok &= s
    return ok


_SWEEP_CAP = 1 << 22


def monitor_equiv(entry: Formula, atom_names: Sequence[str], max_len: int,
                  side: str = "sys", finite: Optional[bool] = None) -> Verdict:
    """Exhaustively compare an entry against its compiled monitors.

    Every lasso of length up to ``max_len`` over the Boolean ``atom_names``
    is checked.  Finite traces (weak semantics, safety only) are added
    when ``finite`` is true; by default they are used when the entry has no
    ``F``.  All atoms are owned by ``side``.
    """
    if side not in ("env", "sys"):
        raise ValueError("side must be env or sys")
    decls = tuple(SignalDecl(a, side) for a in atom_names)
    doc = SpecDocument(decls, **{f"{side}_trans": (entry,)})
    spec = compile_monitors(doc)
    if finite is None:
        finite = not any(isinstance(g, Eventually) for g in entry.walk())
    na = len(atom_names)
    checked = 0
    for n in range(1, max_len + 1):
        total = 1 << (na * n)
        if total * (n + 1) > _SWEEP_CAP * 8:
            raise ValueError(f"state-space cap exceeded at length {n}")
        idx = np.arange(total, dtype=np.int64)
        val = {}
        for k, a in enumerate(atom_names):
            cols = [((idx >> (p * na + k)) & 1).astype(bool) for p in range(n)]
            val[a] = np.stack(cols, axis=1)
        loops: List[Optional[int]] = list(range(n))
        if finite:
            loops.append(None)
        for loop in loops:
            expected = _batch_temporal(entry, val, loop)[:, 0]
            got = _monitored_accepts(spec, side, val, loop)
            bad = np.nonzero(expected != got)[0]
            checked += total
            if bad.size:
                i = int(bad[0])
                steps = [{a: bool(val[a][i, p]) for a in atom_names} for p in range(n)]
                tr = Trace(steps, loop)
                return Verdict(
                    "mismatch", conjunct=to_text(entry), trace=tr, formula=entry,
                    message=(f"formula says {bool(expected[i])}, monitors say "
                             f"{bool(got[i])}"),
                    details={"length": n, "loop": loop})
    return Verdict("pass", details={"traces": checked})


# -- explicit game oracle ----------------------------------------------------

@dataclass
class ExplicitResult:
    win: FrozenSet[Tuple[bool, ...]]
    realizable: bool
    names: Tuple[str, ...]


def _assignments(k: int) -> List[Tuple[bool, ...]]:
    return list(itertools.product((False, True), repeat=k))


def explicit_game_oracle(g: GameStructure, max_vars: int = 4) -> ExplicitResult:
    """Winning region and realizability by plain set iteration.

    States are tuples over ``g.x_names + g.y_names``.  Only usable for very
    small games; more than ``max_vars`` state bits raises ``ValueError``.
    """
    bdd = g.bdd
    xs, ys = list(g.x_vars), list(g.y_vars)
    if len(xs) + len(ys) > max_vars:
        raise ValueError(f"state-space cap exceeded: {len(xs) + len(ys)} > {max_vars} bits")
    xp, yp = list(g.x_primed), list(g.y_primed)
    states = _assignments(len(xs) + len(ys))
    xvals, yvals = _assignments(len(xs)), _assignments(len(ys))

    def env_of(s):
        return dict(zip(xs + ys, s))

    env_moves: Dict[tuple, List[tuple]] = {}
    sys_moves: Dict[Tuple[tuple, tuple], List[tuple]] = {}
    for s in states:
        base = env_of(s)
        env_moves[s] = []
        for xv in xvals:
            a = dict(base)
            a.update(zip(xp, xv))
            if not bdd.evaluate(g.trans_e, a):
                continue
            env_moves[s].append(xv)
            succ = []
            for yv in yvals:
                b = dict(a)
                b.update(zip(yp, yv))
                if bdd.evaluate(g.trans_s, b):
                    succ.append(xv + yv)
            sys_moves[(s, xv)] = succ

    def cpre(target: FrozenSet[tuple]) -> FrozenSet[tuple]:
        return frozenset(s for s in states
                         if all(any(t in target for t in sys_moves[(s, xv)])
                                for xv in env_moves[s]))

    def holds(f: NodeRef) -> FrozenSet[tuple]:
        return frozenset(s for s in states if bdd.evaluate(f, env_of(s)))

    je = [holds(f) for f in g.fair_e]
    js = [holds(f) for f in g.fair_s]
    every = frozenset(states)
    z = every
    while True:
        z_new = every
        cz = cpre(z)
        for goal in js:
            y: FrozenSet[tuple] = frozenset()
            while True:
                start = (goal & cz) | cpre(y)
                y_new: FrozenSet[tuple] = frozenset()
                for jn in je:
                    x = every
                    while True:
                        x_new = start | ((every - jn) & cpre(x))
                        if x_new == x:
                            break
                        x = x_new
                    y_new = y_new | x
                if y_new == y:
                    break
                y = y_new
            z_new = z_new & y
        if z_new == z:
            break
        z = z_new
    ie, isys = holds(g.init_e), holds(g.init_s)
    real = True
    for xv in xvals:
        cands = [xv + yv for yv in yvals]
        if any(s in ie for s in cands) and not any(s in ie and s in isys and s in z for s in cands):
            real = False
            break
    return ExplicitResult(z, real, tuple(g.x_names + g.y_names))


def state_set(g: GameStructure, f: NodeRef) -> FrozenSet[Tuple[bool, ...]]:
    """States of ``f`` (over current variables) in the oracle's tuple form."""
    vs = list(g.x_vars) + list(g.y_vars)
    return frozenset(s for s in _assignments(len(vs))
                     if g.bdd.evaluate(f, dict(zip(vs, s))))


# -- environment policies ----------------------------------------------------

_SAFE_CACHE: Dict[int, Tuple[GameStructure, NodeRef]] = {}


def _admissible(g: GameStructure, state: Mapping[str, bool]) -> NodeRef:
    """Admissible env inputs at ``state``.

    Moves that keep the environment able to meet its fairness assumptions
    come first, then moves that merely avoid deadlock, then anything
    ``trans_e`` allows.
    """
    names = g.x_names + g.y_names
    cur = {n: state[n] for n in names}
    hit = _SAFE_CACHE.get(id(g))
    if hit is None or hit[0] is not g:
        _SAFE_CACHE.clear()
        tiers = (env_safe_moves(g, env_fair_region(g)), env_safe_moves(g), g.trans_e)
        hit = (g, tiers)
        _SAFE_CACHE[id(g)] = hit
    for moves in hit[1]:
        here = g.bdd.let(cur, moves)
        if not here.is_false:
            return here
    return here


def _named(g: GameStructure, pick: Mapping[int, bool]) -> Dict[str, bool]:
    return {g.bdd.var_name(v): b for v, b in pick.items()}


class EnvPolicy:
    """Chooses the next env input: a map from primed env names to values.

    ``None`` means the environment has no admissible move.
    """

    name = "base"

    def choose(self, g: GameStructure, state: Mapping[str, bool], step: int) -> Optional[Dict[str, bool]]:
        raise NotImplementedError


class RandomPolicy(EnvPolicy):
    name = "random"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def choose(self, g, state, step):
        pick = g.bdd.pick_assignment(_admissible(g, state), g.x_primed, self.rng)
        return None if pick is None else _named(g, pick)


def parse_script(text: str, decls: Sequence[SignalDecl]) -> List[Dict[str, bool]]:
    """One constraint per non-empty line, as bit-level env assignments.

    Tokens are ``SIG`` / ``!SIG`` for Booleans, ``SIG=VAL`` (``0``/``1``,
    an enum value or an integer for vectors), ``SIG[k]=b`` for one vector
    bit, and ``*`` for no constraint.  ``#`` starts a comment.
    """
    table = {d.name: d for d in decls}
    out: List[Dict[str, bool]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        row: Dict[str, bool] = {}
        for tok in line.replace(",", " ").split():
            if tok == "*":
                continue
            neg = tok.startswith("!")
            name, _, value = tok.lstrip("!").partition("=")
            bit = None
            if name.endswith("]") and "[" in name:
                name, _, b = name[:-1].partition("[")
                bit = int(b)
            d = table.get(name)
            if d is None:
                raise ValueError(f"script line {lineno}: unknown signal {name!r}")
            if d.owner != "env":
                raise ValueError(f"script line {lineno}: {name} is not an env signal")
            try:
                if d.kind == "bool" or bit is not None:
                    if value == "":
                        v = not neg
                    elif value.lower() in ("0", "false"):
                        v = False
                    elif value.lower() in ("1", "true"):
                        v = True
                    else:
                        raise ValueError(value)
                    if bit is None:
                        row[name] = v
                    else:
                        if d.kind != "vec" or not 0 <= bit < d.width:
                            raise ValueError(bit)
                        row[f"{name}.{bit}"] = v
                elif d.kind == "enum":
                    code = value_code(d, value)
                    for i, b in enumerate(bit_names(d)):
                        row[b] = bool((code >> i) & 1)
                else:
                    num = int(value, 0)
                    if not 0 <= num < (1 << d.width):
                        raise ValueError(value)
                    for i, b in enumerate(bit_names(d)):
                        row[b] = bool((num >> i) & 1)
            except ValueError:
                raise ValueError(f"script line {lineno}: bad value in {tok!r}") from None
        out.append(row)
    return out


class ScriptPolicy(EnvPolicy):
    """Replays scripted constraints; unconstrained inputs and steps past the
    end of the script are chosen at random among admissible moves."""

    name = "script"

    def __init__(self, rows: Sequence[Mapping[str, bool]], seed: int = 0):
        self.rows = [dict(r) for r in rows]
        self.rng = random.Random(seed)

    def choose(self, g, state, step):
        bdd = g.bdd
        adm = _admissible(g, state)
        if step < len(self.rows) and self.rows[step]:
            want = bdd.cube({n + "'": v for n, v in self.rows[step].items()})
            adm2 = adm & want
            if adm2.is_false:
                raise PolicyError(f"script line {step + 1} is not an admissible env move")
            adm = adm2
        pick = bdd.pick_assignment(adm, g.x_primed, self.rng)
        return None if pick is None else _named(g, pick)


class AdversarialPolicy(EnvPolicy):
    """Withholds each env fairness condition for up to ``patience`` steps,
    then grants it, so runs remain fair."""

    name = "adversarial"

    def __init__(self, seed: int = 0, patience: int = 8):
        self.rng = random.Random(seed)
        self.patience = patience
        self._delay: List[int] = []
        self._goals: Optional[List[NodeRef]] = None

    def choose(self, g, state, step):
        bdd = g.bdd
        if self._goals is None:
            hide = list(g.y_primed) + list(g.c_primed)
            self._goals = [bdd.exists(hide, g.prime(j)) for j in g.fair_e]
            self._delay = [0] * len(self._goals)
        cur = {n: state[n] for n in g.x_names + g.y_names}
        for k, j in enumerate(g.fair_e):
            self._delay[k] = 0 if bdd.evaluate(j, cur) else self._delay[k] + 1
        adm = _admissible(g, state)
        force = [j for j, d in zip(self._goals, self._delay) if d >= self.patience]
        avoid = [~j for j, d in zip(self._goals, self._delay) if d < self.patience]
        cand = adm
        for f in force:
            if not (cand & f).is_false:
                cand = cand & f
        for f in avoid:
            if not (cand & f).is_false:
                cand = cand & f
        pick = bdd.pick_assignment(cand, g.x_primed, self.rng)
        return None if pick is None else _named(g, pick)


def make_policy(kind: str, seed: int = 0, script: Optional[Sequence[Mapping[str, bool]]] = None,
                patience: int = 8) -> EnvPolicy:
    if kind == "random":
        return RandomPolicy(seed)
    if kind == "adversarial":
        return AdversarialPolicy(seed, patience)
    if kind == "script":
        if script is None:
            raise ValueError("script policy needs a script")
        return ScriptPolicy(script, seed)
    raise ValueError(f"unknown policy {kind!r}")


# -- simulation ----------------------------------------------------------------

def _state_names(g: GameStructure) -> List[str]:
    return g.x_names + g.y_names + g.var_names(g.c_vars)


def _check_wires(g: GameStructure, circuit: Circuit) -> None:
    init = circuit.initial_state()
    missing = [n for n in _state_names(g) if n not in init]
    if missing:
        raise SignalMismatchError(f"circuit has no latch for {missing[:5]}")
    if isinstance(circuit, BlifModel):
        inputs = set(circuit.inputs)
        want = {n + "'" for n in g.x_names}
        if inputs != want:
            extra = sorted(inputs - want)[:5]
            lack = sorted(want - inputs)[:5]
            raise SignalMismatchError(f"circuit inputs differ from env variables: "
                                      f"unexpected {extra}, missing {lack}")


def _drive(g: GameStructure, circuit: Circuit, policy: EnvPolicy, steps: int):
    """Yields ``(t, state, inputs, next_state)``; stops early if the
    environment runs out of moves."""
    _check_wires(g, circuit)
    names = _state_names(g)
    state = {n: bool(circuit.initial_state()[n]) for n in names}
    for t in range(steps):
        inputs = policy.choose(g, state, t)
        if inputs is None:
            return
        comb = circuit.evaluate(state, inputs)
        comb = dict(comb)
        comb.update(inputs)
        nxt = {n: bool(comb[n + "'"]) for n in names}
        yield t, state, inputs, nxt
        state = nxt


@dataclass
class SimResult:
    verdict: Verdict
    trace: Trace
    steps: int


def _bool_eval(f: Formula, cur: Mapping[str, bool], nxt: Optional[Mapping[str, bool]]) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return bool(cur[f.signal])
    if isinstance(f, Not):
        return not _bool_eval(f.arg, cur, nxt)
    if isinstance(f, And):
        return all(_bool_eval(a, cur, nxt) for a in f.args)
    if isinstance(f, Or):
        return any(_bool_eval(a, cur, nxt) for a in f.args)
    if isinstance(f, Implies):
        return (not _bool_eval(f.lhs, cur, nxt)) or _bool_eval(f.rhs, cur, nxt)
    if isinstance(f, Iff):
        return _bool_eval(f.lhs, cur, nxt) == _bool_eval(f.rhs, cur, nxt)
    if isinstance(f, Next):
        if nxt is None:
            raise ValueError("next value read past the end")
        return _bool_eval(f.arg, nxt, None)
    raise TypeError(f"{type(f).__name__} in a compiled conjunct")


class _ReferenceMonitors:
    """Sys monitor bits recomputed from their definitions, independent of
    whatever the circuit stores."""

    def __init__(self, spec: NormalizedGR1):
        self.mons = [m for m in spec.monitors if m.owner == "sys"]
        self.bits = [b for m in self.mons for b in m.bits]

    def initial(self, signals: Mapping[str, bool]) -> Dict[str, bool]:
        out: Dict[str, bool] = {}
        for m in self.mons:
            for combo in itertools.product((False, True), repeat=len(m.bits)):
                cur = dict(signals)
                cur.update(zip(m.bits, combo))
                if _bool_eval(m.init, cur, None):
                    out.update(zip(m.bits, combo))
                    break
            else:
                out.update((b, False) for b in m.bits)
        return out

    def step(self, cur: Mapping[str, bool], nxt_signals: Mapping[str, bool]) -> Dict[str, bool]:
        return {b: _bool_eval(u, cur, nxt_signals) for m in self.mons for b, u in m.update}


def closed_loop(g: GameStructure, circuit: Circuit, policy: EnvPolicy, steps: int,
                decls: Sequence[SignalDecl] = ()) -> SimResult:
    """Simulate ``circuit`` against ``policy`` and judge every step against
    the sys entries.

    Sys monitors are tracked by reference, so a circuit that corrupts its
    own monitor bits cannot hide a violation.  The run stops at the first
    violated conjunct; the verdict names its source entry and carries the
    trace up to and including the offending step.
    """
    spec = g.spec
    ref = _ReferenceMonitors(spec)
    own = set(ref.bits)
    signal_names = [n for n in g.x_names + g.y_names if n not in own]
    plain = set(spec.names(monitor=False))
    trace_steps: List[Dict[str, object]] = []
    origins = list(spec.trans_s_origin) or [None] * len(spec.trans_s)
    fair_seen = {to_text(j): False for j in spec.fair_e}
    goals_hit = [0] * len(spec.fair_s)
    mons: Dict[str, bool] = {}
    last_state: Optional[Dict[str, bool]] = None
    ran = 0

    def view(state: Mapping[str, bool], m: Mapping[str, bool]) -> Dict[str, bool]:
        v = {n: state[n] for n in signal_names}
        v.update(m)
        return v

    def record(state: Mapping[str, bool]) -> None:
        trace_steps.append({n: state[n] for n in g.x_names + g.y_names if n in plain})

    def violation(step: int, f: Formula, origin: Optional[Formula]) -> SimResult:
        src = origin if origin is not None else f
        tr = Trace(list(trace_steps), None, tuple(decls))
        v = Verdict("safety_violation", step=step, conjunct=to_text(src), trace=tr,
                    formula=src, message=f"violated {to_text(f)}")
        return SimResult(v, tr, step)

    for t, state, inputs, nxt in _drive(g, circuit, policy, steps):
        if t == 0:
            record(state)
            mons = ref.initial(view(state, {}))
            cur0 = view(state, mons)
            for part in _split(spec.init_s):
                if not _bool_eval(part, cur0, None):
                    return violation(0, part, None)
        cur = view(state, mons)
        for k, j in enumerate(spec.fair_e):
            if _bool_eval(j, cur, None):
                fair_seen[to_text(j)] = True
        for k, j in enumerate(spec.fair_s):
            if _bool_eval(j, cur, None):
                goals_hit[k] += 1
        nxt_sig = view(nxt, {})
        m_next = ref.step(cur, nxt_sig)
        nxt_view = dict(nxt_sig)
        nxt_view.update(m_next)
        record(nxt)
        for c, origin in zip(spec.trans_s, origins):
            if not _bool_eval(c, cur, nxt_view):
                return violation(t, c, origin)
        mons = m_next
        last_state = nxt
        ran = t + 1
    pending = []
    for m in ref.mons:
        if m.kind == "pending" and mons.get(m.bits[0]):
            pending.append(to_text(m.source))
    tr = Trace(trace_steps, None, tuple(decls))
    if pending:
        kind = "pending_obligations"
    elif not all(fair_seen.values()):
        kind = "fairness_starved"
    else:
        kind = "pass"
    v = Verdict(kind, pending=pending, fairness=fair_seen, trace=tr,
                details={"steps": ran, "sys_goal_visits": goals_hit})
    if ran < steps and last_state is not None:
        v.message = "environment ran out of admissible moves"
    return SimResult(v, tr, ran)


def cosimulate(s: StrategyRelation, circuit: Circuit, policy: EnvPolicy, steps: int) -> Verdict:
    """Check that every step the circuit takes is a move of the strategy
    relation."""
    g = s.game
    bdd = g.bdd
    ran = 0
    for t, state, inputs, nxt in _drive(g, circuit, policy, steps):
        a = dict(state)
        a.update(inputs)
        a.update({n + "'": v for n, v in nxt.items()})
        if not bdd.evaluate(s.rel, a):
            return Verdict("safety_violation", step=t, conjunct="strategy relation",
                           message="circuit step outside the strategy relation")
        ran = t + 1
    return Verdict("pass", details={"steps": ran})


# -- symbolic refinement ---------------------------------------------------------

def blif_functions(model: BlifModel, g: GameStructure) -> Dict[str, NodeRef]:
    """Diagrams for every ``.names`` output of ``model`` over the game's
    variables."""
    bdd = g.bdd
    val: Dict[str, NodeRef] = {}
    for w in list(model.inputs) + [out for _, out, _ in model.latches]:
        try:
            val[w] = bdd.mk_var(w)
        except KeyError:
            raise SignalMismatchError(f"wire {w!r} is not a game variable") from None
    for k in model._schedule():
        ins, out, rows = model.names[k]
        f = bdd.false
        for pattern, _ in rows:
            term = bdd.true
            for c, w in zip(pattern, ins):
                if c == "1":
                    term = term & val[w]
                elif c == "0":
                    term = term & ~val[w]
            f = f | term
        val[out] = f
    return val


def refinement_check(g: GameStructure, cert: WinningCertificate, s: StrategyRelation,
                     circuit: Circuit) -> Verdict:
    """Every reachable state of the closed loop lies in the winning region
    and every reachable step is a move of ``s``."""
    bdd = g.bdd
    names = _state_names(g)
    stored = list(g.x_vars) + list(g.y_vars) + list(g.c_vars)
    outs = list(g.y_primed) + list(g.c_primed)
    if isinstance(circuit, Netlist):
        funcs = dict(circuit.functions)
    else:
        _check_wires(g, circuit)
        wires = blif_functions(circuit, g)
        funcs = {}
        for inp, out, _ in circuit.latches:
            v = bdd.var_index(out + "'")
            if v in outs:
                funcs[v] = wires[inp] if inp in wires else bdd.mk_var(inp)
    step = g.trans_e
    for v in outs:
        step = step & bdd.mk_var(v).iff(funcs[v])
    init = circuit.initial_state()
    reach = bdd.cube({n: bool(init[n]) for n in names})
    frontier = reach
    while not frontier.is_false:
        img = g.unprime(bdd.and_exists(frontier, step, stored))
        frontier = img & ~reach
        reach = reach | img
    if not (reach <= cert.win):
        return Verdict("safety_violation", conjunct="winning region",
                       message="a reachable state lies outside the winning region")
    if not ((reach & step) <= s.rel):
        return Verdict("safety_violation", conjunct="strategy relation",
                       message="a reachable step is not a strategy move")
    free = bdd.num_vars - len(g.x_vars) - len(g.y_vars)
    states = bdd.sat_count(bdd.exists(list(g.c_vars), reach)) >> free
    return Verdict("pass", details={"reachable_states": states})
