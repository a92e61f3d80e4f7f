"""Lowering of enum and vector signals to Boolean variables."""
from __future__ import annotations

from typing import Dict, List, Tuple

from .formula import (
    Always, Atom, Formula, Not, SignalDecl, SpecDocument, conj, disj, map_atoms,
)

__all__ = ["bit_width", "bit_names", "value_code", "encode_bits", "valid_codes"]


def bit_width(k: int) -> int:
    """Bits needed for ``k`` distinct codes, i.e. ``ceil(log2 k)``."""
    return max(k - 1, 0).bit_length()


def bit_names(decl: SignalDecl) -> List[str]:
    if decl.kind == "bool":
        return [decl.name]
    if decl.kind == "vec":
        return [f"{decl.name}.{i}" for i in range(decl.width)]
    return [f"{decl.name}.{i}" for i in range(bit_width(len(decl.values)))]


def value_code(decl: SignalDecl, value: str) -> int:
    return decl.values.index(value)


def code_minterm(bits: List[str], code: int) -> Formula:
    lits = []
    for i, b in enumerate(bits):
        lits.append(Atom(b) if (code >> i) & 1 else Not(Atom(b)))
    return conj(*lits)


def valid_codes(decl: SignalDecl) -> Formula:
    """Boolean constraint admitting exactly the used codes of an enum."""
    bits = bit_names(decl)
    k = len(decl.values)
    if k == 1 << len(bits):
        return conj()
    return disj(*(code_minterm(bits, c) for c in range(k)))


def encode_bits(doc: SpecDocument) -> SpecDocument:
    """Binary-encode every enum and vector signal.

    Enum codes follow declaration order with bit 0 as least significant.
    Enums whose size is not a power of two get an owner-side invariant
    (init and ``G(...)``) excluding the unused codes.
    """
    table: Dict[str, SignalDecl] = {d.name: d for d in doc.decls}

    def lower(a: Atom) -> Formula:
        d = table[a.signal]
        if d.kind == "bool":
            return a
        if d.kind == "vec":
            return Atom(f"{d.name}.{a.value}")
        return code_minterm(bit_names(d), value_code(d, a.value))

    decls: List[SignalDecl] = []
    extra: Dict[str, List[Formula]] = {"env": [], "sys": []}
    for d in doc.decls:
        for b in bit_names(d):
            decls.append(SignalDecl(b, d.owner))
        if d.kind == "enum":
            valid = valid_codes(d)
            if valid != conj():
                extra[d.owner].append(valid)

    def section(name: str) -> Tuple[Formula, ...]:
        return tuple(map_atoms(f, lower) for f in doc.section(name))

    return SpecDocument(
        tuple(decls),
        env_init=section("env_init") + tuple(extra["env"]),
        sys_init=section("sys_init") + tuple(extra["sys"]),
        env_trans=section("env_trans") + tuple(Always(v) for v in extra["env"]),
        sys_trans=section("sys_trans") + tuple(Always(v) for v in extra["sys"]),
        env_fair=section("env_fair"),
        sys_fair=section("sys_fair"),
        name=doc.name,
    )
