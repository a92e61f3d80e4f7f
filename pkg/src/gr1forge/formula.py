"""Temporal formula syntax trees and specification documents."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple, Union

AtomValue = Union[None, str, int]


class Formula:
    """Base class of formula nodes.  Nodes are frozen dataclasses."""

    __slots__ = ()

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def walk(self) -> Iterator["Formula"]:
        yield self
        for c in self.children():
            yield from c.walk()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    """``signal`` alone (Boolean), ``signal=value`` (enum) or ``signal[bit]`` (vector)."""

    signal: str
    value: AtomValue = None


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class UntilW(Formula):
    """Weak until, inclusive: ``lhs`` holds forever, or up to and including
    the first step where ``rhs`` holds."""

    lhs: Formula
    rhs: Formula

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class UntilWCount(Formula):
    """``lhs`` holds forever, or up to and including the ``count``-th step
    where ``rhs`` holds."""

    lhs: Formula
    rhs: Formula
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("UntilWCount count must be >= 1")

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Before(Formula):
    """``lhs`` happens no later than ``rhs``; same as ``UntilW(!rhs, lhs)``."""

    lhs: Formula
    rhs: Formula

    def children(self):
        return (self.lhs, self.rhs)


TRUE = Const(True)
FALSE = Const(False)
TEMPORAL = (Next, Always, Eventually, UntilW, UntilWCount, Before)


def conj(*args: Formula) -> Formula:
    """Flattened conjunction; the empty conjunction is TRUE."""
    flat: List[Formula] = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        elif a == TRUE:
            continue
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*args: Formula) -> Formula:
    flat: List[Formula] = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        elif a == FALSE:
            continue
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Const):
        return Const(not f.value)
    return Not(f)


def is_temporal(f: Formula) -> bool:
    return any(isinstance(n, TEMPORAL) for n in f.walk())


def is_boolean(f: Formula) -> bool:
    return not is_temporal(f)


def atoms(f: Formula) -> List[Atom]:
    return [n for n in f.walk() if isinstance(n, Atom)]


def next_depth(f: Formula) -> int:
    """Maximum nesting of Next operators."""
    inner = max((next_depth(c) for c in f.children()), default=0)
    return inner + 1 if isinstance(f, Next) else inner


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` with every atom replaced by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Const):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, UntilWCount):
        return UntilWCount(map_atoms(f.lhs, fn), map_atoms(f.rhs, fn), f.count)
    if isinstance(f, (Implies, Iff, UntilW, Before)):
        return type(f)(map_atoms(f.lhs, fn), map_atoms(f.rhs, fn))
    return type(f)(map_atoms(f.arg, fn))


# -- documents --------------------------------------------------------------

@dataclass(frozen=True)
class SignalDecl:
    """A declared signal.

    ``kind`` is ``"bool"``, ``"enum"`` (with ``values``) or ``"vec"`` (with
    ``width``).
    """

    name: str
    owner: str
    kind: str = "bool"
    values: Tuple[str, ...] = ()
    width: int = 1

    def __post_init__(self):
        if self.owner not in ("env", "sys"):
            raise ValueError(f"owner must be env or sys, got {self.owner!r}")
        if self.kind == "enum":
            if not self.values:
                raise ValueError(f"enum {self.name} has no values")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"enum {self.name} has duplicate values")
        elif self.kind == "vec":
            if self.width < 1:
                raise ValueError(f"vector {self.name} needs width >= 1")
        elif self.kind != "bool":
            raise ValueError(f"unknown signal kind {self.kind!r}")

    def type_text(self) -> str:
        if self.kind == "enum":
            return "enum{" + ",".join(self.values) + "}"
        if self.kind == "vec":
            return f"vec<{self.width}>"
        return "bool"


SECTIONS = ("env_init", "sys_init", "env_trans", "sys_trans", "env_fair", "sys_fair")


@dataclass(frozen=True)
class SpecDocument:
    decls: Tuple[SignalDecl, ...] = ()
    env_init: Tuple[Formula, ...] = ()
    sys_init: Tuple[Formula, ...] = ()
    env_trans: Tuple[Formula, ...] = ()
    sys_trans: Tuple[Formula, ...] = ()
    env_fair: Tuple[Formula, ...] = ()
    sys_fair: Tuple[Formula, ...] = ()
    name: Optional[str] = field(default=None, compare=False)

    def decl(self, name: str) -> SignalDecl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)

    def signals(self, owner: Optional[str] = None) -> List[str]:
        return [d.name for d in self.decls if owner is None or d.owner == owner]

    def section(self, name: str) -> Tuple[Formula, ...]:
        return getattr(self, name)


# -- pretty printing ---------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 10)


def _wrap(f: Formula, ctx: int) -> str:
    s = to_text(f)
    return f"({s})" if _prec(f) <= ctx else s


def to_text(f: Formula) -> str:
    """Render in the specification file syntax."""
    if isinstance(f, Const):
        return "TRUE" if f.value else "FALSE"
    if isinstance(f, Atom):
        if f.value is None:
            return f.signal
        if isinstance(f.value, int):
            return f"{f.signal}[{f.value}]"
        return f"{f.signal}={f.value}"
    if isinstance(f, Not):
        if isinstance(f.arg, Atom) and isinstance(f.arg.value, str):
            return f"!({to_text(f.arg)})"
        return "!" + _wrap(f.arg, 9)
    if isinstance(f, And):
        return " && ".join(_wrap(a, 4) for a in f.args)
    if isinstance(f, Or):
        return " || ".join(_wrap(a, 3) for a in f.args)
    if isinstance(f, Implies):
        # right associative
        return f"{_wrap(f.lhs, 2)} -> {_wrap(f.rhs, 1)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.lhs, 1)} <-> {_wrap(f.rhs, 1)}"
    if isinstance(f, Next):
        return f"X({to_text(f.arg)})"
    if isinstance(f, Always):
        return f"G({to_text(f.arg)})"
    if isinstance(f, Eventually):
        return f"F({to_text(f.arg)})"
    if isinstance(f, UntilWCount):
        return f"U_w[{f.count}]({to_text(f.lhs)}, {to_text(f.rhs)})"
    if isinstance(f, UntilW):
        return f"U_w({to_text(f.lhs)}, {to_text(f.rhs)})"
    if isinstance(f, Before):
        return f"BEFORE({to_text(f.lhs)}, {to_text(f.rhs)})"
    raise TypeError(f"not a formula: {f!r}")


_HEADERS = {
    "env_init": "[ENV_INIT]",
    "sys_init": "[SYS_INIT]",
    "env_trans": "[ENV_TRANS]",
    "sys_trans": "[SYS_TRANS]",
    "env_fair": "[ENV_FAIR]",
    "sys_fair": "[SYS_FAIR]",
}


def document_to_text(doc: SpecDocument, comments: Optional[dict] = None) -> str:
    """Render a document in the line-oriented file format.

    ``comments`` optionally maps ``(section, index)`` to a trailing comment.
    """
    comments = comments or {}
    lines = ["[SIGNALS]"]
    for d in doc.decls:
        lines.append(f"{d.name} : {d.owner} : {d.type_text()}")
    for sec in SECTIONS:
        lines.append("")
        lines.append(_HEADERS[sec])
        for i, f in enumerate(doc.section(sec)):
            text = to_text(f)
            note = comments.get((sec, i))
            lines.append(f"{text}  # {note}" if note else text)
    return "\n".join(lines) + "\n"
