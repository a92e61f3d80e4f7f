"""Compilation of a Boolean document into GR(1) normal form.

Transition entries that are not already of the ``G(boolean with X depth <= 1)``
shape are replaced by deterministic monitor variables: an update constraint
``X(m) <-> ...`` on the owner's side, safety conjuncts over the monitor, and
for liveness obligations one fairness conjunct.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .encode import bit_width
from .formula import (
    Always, And, Atom, Before, Const, Eventually, Formula, Iff, Implies, Next,
    Not, Or, SpecDocument, TRUE, UntilW, UntilWCount, atoms, conj, disj,
    is_boolean, is_temporal, map_atoms, neg, next_depth,
)
from .parser import SpecError

__all__ = [
    "Variable", "Monitor", "NormalizedGR1", "UnsupportedFormulaError",
    "compile_monitors", "normalize",
]


class UnsupportedFormulaError(SpecError):
    """A transition entry has no monitor translation."""

    def __init__(self, message: str, subformula: Optional[Formula] = None):
        self.subformula = subformula
        if subformula is not None:
            message = f"{message}: {subformula}"
        super().__init__(message)


@dataclass(frozen=True)
class Variable:
    name: str
    owner: str
    monitor: bool = False


@dataclass(frozen=True)
class Monitor:
    """A deterministic monitor.

    ``update`` maps each bit to the Boolean formula giving its next value;
    the formula may read current variables and, when ``reads_next`` is set,
    next values of variables its owner may constrain.
    """

    owner: str
    bits: Tuple[str, ...]
    kind: str
    source: Formula
    init: Formula
    update: Tuple[Tuple[str, Formula], ...]
    reads_next: bool = False


@dataclass(frozen=True)
class NormalizedGR1:
    vars: Tuple[Variable, ...]
    init_e: Formula
    init_s: Formula
    trans_e: Tuple[Formula, ...]
    trans_s: Tuple[Formula, ...]
    fair_e: Tuple[Formula, ...]
    fair_s: Tuple[Formula, ...]
    monitors: Tuple[Monitor, ...] = ()
    name: Optional[str] = field(default=None, compare=False)
    # source entry of each transition conjunct, parallel to trans_e/trans_s
    trans_e_origin: Tuple[Formula, ...] = field(default=(), compare=False)
    trans_s_origin: Tuple[Formula, ...] = field(default=(), compare=False)

    def names(self, owner: Optional[str] = None, monitor: Optional[bool] = None) -> List[str]:
        return [v.name for v in self.vars
                if (owner is None or v.owner == owner)
                and (monitor is None or v.monitor == monitor)]

    @property
    def monitor_bits(self) -> int:
        return sum(len(m.bits) for m in self.monitors)


def _support(f: Formula) -> Set[str]:
    return {a.signal for a in atoms(f)}


def _next_support(f: Formula, under: bool = False) -> Set[str]:
    if isinstance(f, Atom):
        return {f.signal} if under else set()
    out: Set[str] = set()
    for c in f.children():
        out |= _next_support(c, under or isinstance(f, Next))
    return out


def _bool_current(f: Formula) -> bool:
    return is_boolean(f)


class _Compiler:
    def __init__(self, doc: SpecDocument):
        self.doc = doc
        self.owner: Dict[str, str] = {d.name: d.owner for d in doc.decls}
        for d in doc.decls:
            if d.kind != "bool":
                raise SpecError(f"signal {d.name!r} is not Boolean; run encode_bits first")
        self.monitors: List[Monitor] = []
        self.init = {"env": [], "sys": []}
        self.trans = {"env": [], "sys": []}
        self.origin = {"env": [], "sys": []}
        self.fair = {"env": [], "sys": []}
        self.count = 0
        self.entry: Optional[Formula] = None

    # -- helpers ---------------------------------------------------------
    def readable(self, side: str, names: Set[str]) -> bool:
        """Whether ``side`` may constrain the next value of every name."""
        if side == "sys":
            return True
        return all(self.owner.get(n) == "env" for n in names)

    def fresh(self, side: str, nbits: int = 1) -> List[str]:
        base = f"_mon{self.count}"
        self.count += 1
        names = [base] if nbits == 1 else [f"{base}.{i}" for i in range(nbits)]
        for n in names:
            self.owner[n] = side
        return names

    def add_monitor(self, side, bits, kind, source, init, update, reads_next=False):
        mon = Monitor(side, tuple(bits), kind, source, init,
                      tuple(update), reads_next)
        self.monitors.append(mon)
        self.init[side].append(init)
        for b, expr in update:
            self.push(side, Iff(Next(Atom(b)), expr))
        return mon

    def push(self, side: str, f: Formula) -> None:
        self.trans[side].append(f)
        self.origin[side].append(self.entry)

    def add_safety(self, side: str, f: Formula) -> None:
        """Current-state safety; env safety over env variables is shifted to
        the next state so the environment cannot pick a deadlocking move."""
        if side == "env" and self.readable("env", _support(f)):
            self.init["env"].append(f)
            self.push("env", Next(f))
        else:
            self.push(side, f)

    # -- shapes ----------------------------------------------------------
    def compile_entry(self, side: str, f: Formula) -> None:
        if not isinstance(f, Always):
            raise UnsupportedFormulaError("transition entry is not wrapped in G", f)
        body = f.arg
        if not is_temporal(body) or (self._only_next(body) and next_depth(body) <= 1):
            bad = {n for n in _next_support(body) if not self.readable(side, {n})}
            if bad:
                raise UnsupportedFormulaError(
                    f"{side} constraint reads the next value of {sorted(bad)}", body)
            if next_depth(body) == 0:
                self.add_safety(side, body)
            else:
                self.push(side, body)
            return
        trig, rest = (body.lhs, body.rhs) if isinstance(body, Implies) else (TRUE, body)
        if not _bool_current(trig):
            raise UnsupportedFormulaError("trigger must be a Boolean formula", trig)
        shifted = isinstance(rest, Next)
        inner = rest.arg if shifted else rest
        if isinstance(inner, Eventually):
            q = inner.arg
            self._require_bool(q)
            if trig == TRUE and not shifted:
                self.fair[side].append(q)
            else:
                self.pending(side, trig, q, shifted, f)
            return
        if isinstance(inner, Before):
            self._require_bool(inner.lhs, inner.rhs)
            g = inner.rhs
            if (not shifted and trig == neg(g)
                    and self.readable(side, _support(g))):
                # G(!g -> (phi BEFORE g))  ==  G((!g & !phi) -> X !g)
                self.push(side, Implies(conj(neg(g), neg(inner.lhs)), Next(neg(g))))
                return
            self.until(side, trig, neg(g), inner.lhs, 1, shifted, f)
            return
        if isinstance(inner, UntilWCount):
            self._require_bool(inner.lhs, inner.rhs)
            self.until(side, trig, inner.lhs, inner.rhs, inner.count, shifted, f)
            return
        if isinstance(inner, UntilW):
            self._require_bool(inner.lhs, inner.rhs)
            self.until(side, trig, inner.lhs, inner.rhs, 1, shifted, f)
            return
        raise UnsupportedFormulaError("unsupported temporal shape", body)

    @staticmethod
    def _only_next(f: Formula) -> bool:
        return all(not isinstance(n, (Always, Eventually, UntilW, UntilWCount, Before))
                   for n in f.walk())

    @staticmethod
    def _require_bool(*fs: Formula) -> None:
        for f in fs:
            if is_temporal(f):
                raise UnsupportedFormulaError("nested temporal operator", f)

    def until(self, side, trig, hold, release, count, shifted, source):
        """``trig -> [X] (hold U_w[count] release)``."""
        if count == 1:
            (m,) = self.fresh(side)
            mv = Atom(m)
            if shifted:
                update = disj(trig, conj(mv, neg(release)))
                self.add_safety(side, Implies(mv, hold))
            else:
                active = disj(trig, mv)
                update = conj(active, neg(release))
                self.add_safety(side, Implies(active, hold))
            self.add_monitor(side, [m], "until", source, Not(mv), [(m, update)])
            return
        width = bit_width(count + 1)
        bits = self.fresh(side, width)

        def is_value(v):
            return conj(*(Atom(b) if (v >> i) & 1 else Not(Atom(b))
                          for i, b in enumerate(bits)))

        nonzero = disj(*(Atom(b) for b in bits))
        cases: List[Tuple[Formula, int]] = []
        if shifted:
            cases.append((trig, count))
            for v in range(1 << width):
                dec = v - 1 if v > 0 else 0
                cases.append((conj(neg(trig), is_value(v), release), dec))
                cases.append((conj(neg(trig), is_value(v), neg(release)), v))
            self.add_safety(side, Implies(nonzero, hold))
        else:
            cases.append((conj(trig, release), count - 1))
            cases.append((conj(trig, neg(release)), count))
            for v in range(1 << width):
                dec = v - 1 if v > 0 else 0
                cases.append((conj(neg(trig), is_value(v), release), dec))
                cases.append((conj(neg(trig), is_value(v), neg(release)), v))
            self.add_safety(side, Implies(disj(trig, nonzero), hold))
        update = []
        for i, b in enumerate(bits):
            update.append((b, disj(*(c for c, val in cases if (val >> i) & 1))))
        init = conj(*(Not(Atom(b)) for b in bits))
        self.add_monitor(side, bits, "count", source, init, update)

    def pending(self, side, trig, goal, shifted, source):
        """``trig -> [X] F goal`` as a pending-obligation bit."""
        (m,) = self.fresh(side)
        mv = Atom(m)
        if not shifted:
            if self.readable(side, _support(trig) | _support(goal)):
                init = Iff(mv, conj(trig, neg(goal)))
                update = conj(disj(Next(trig), mv), Next(neg(goal)))
                self.add_monitor(side, [m], "pending", source, init, [(m, update)], True)
            else:
                update = conj(disj(trig, mv), neg(goal))
                self.add_monitor(side, [m], "pending", source, Not(mv), [(m, update)])
            self.fair[side].append(Not(mv))
            return
        if self.readable(side, _support(goal)):
            update = conj(disj(trig, mv), Next(neg(goal)))
            self.add_monitor(side, [m], "pending", source, Not(mv), [(m, update)], True)
            self.fair[side].append(Not(mv))
        else:
            update = disj(trig, conj(mv, neg(goal)))
            self.add_monitor(side, [m], "pending", source, Not(mv), [(m, update)])
            self.fair[side].append(disj(Not(mv), goal))

    # -- driver ----------------------------------------------------------
    def run(self) -> NormalizedGR1:
        doc = self.doc
        for side in ("env", "sys"):
            for f in doc.section(f"{side}_init"):
                if is_temporal(f):
                    raise UnsupportedFormulaError("temporal operator in init", f)
                self.init[side].append(f)
            seen = set()
            for f in doc.section(f"{side}_trans"):
                if f in seen:
                    continue
                seen.add(f)
                self.entry = f
                self.compile_entry(side, f)
            self.entry = None
            for f in doc.section(f"{side}_fair"):
                if not (isinstance(f, Always) and isinstance(f.arg, Eventually)
                        and is_boolean(f.arg.arg)):
                    raise UnsupportedFormulaError("fairness must be G(F(boolean))", f)
                self.fair[side].append(f.arg.arg)
        variables = [Variable(d.name, d.owner) for d in doc.decls]
        for mon in self.monitors:
            variables.extend(Variable(b, mon.owner, True) for b in mon.bits)
        fair_e = tuple(dict.fromkeys(self.fair["env"])) or (TRUE,)
        fair_s = tuple(dict.fromkeys(self.fair["sys"])) or (TRUE,)
        return NormalizedGR1(
            tuple(variables),
            conj(*self.init["env"]),
            conj(*self.init["sys"]),
            tuple(self.trans["env"]),
            tuple(self.trans["sys"]),
            fair_e,
            fair_s,
            tuple(self.monitors),
            name=doc.name,
            trans_e_origin=tuple(self.origin["env"]),
            trans_s_origin=tuple(self.origin["sys"]),
        )


def compile_monitors(doc: SpecDocument) -> NormalizedGR1:
    """Translate a Boolean-only document into GR(1) normal form.

    Syntactically identical transition entries on one side are compiled
    once.  Raises :class:`UnsupportedFormulaError` naming the offending
    subformula when an entry has no supported shape.
    """
    return _Compiler(doc).run()


def normalize(doc: SpecDocument) -> NormalizedGR1:
    """``encode_bits`` followed by ``compile_monitors``."""
    from .encode import encode_bits
    return compile_monitors(encode_bits(doc))
