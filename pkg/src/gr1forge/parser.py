"""Reader for the line-oriented specification format.

::

    [SIGNALS]            # name : env|sys : bool | enum{V1,V2,...} | vec<W>
    [ENV_INIT] [SYS_INIT] [ENV_TRANS] [SYS_TRANS] [ENV_FAIR] [SYS_FAIR]

One formula per line; ``#`` starts a comment.  Operators, loosest first:
``<->``, ``->`` (right associative), ``||``, ``&&``, ``!``.  Temporal
operators are written as calls: ``X(f) G(f) F(f) U_w(a, b) U_w[i](a, b)
BEFORE(a, b)``; ``always f``, ``eventually f`` and ``next f`` are prefix
spellings of ``G``, ``F`` and ``X`` binding like ``!``.
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .formula import (
    Always, And, Atom, Before, Const, Eventually, Formula, Iff, Implies, Next,
    Not, Or, SECTIONS, SignalDecl, SpecDocument, UntilW, UntilWCount, is_boolean,
    is_temporal,
)

__all__ = ["SpecError", "SpecSyntaxError", "parse_spec", "parse_formula", "validate"]

KEYWORDS = {"X", "G", "F", "U_w", "BEFORE", "TRUE", "FALSE", "always", "eventually", "next"}
# prefix spellings of the unary temporal operators
_WORD_OPS = {"always": Always, "eventually": Eventually, "next": Next}

_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|&&|\|\||!=|[!()\[\],=])|(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_.]*))"
)
_DECL = re.compile(
    r"^(?P<name>[A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(?P<owner>env|sys)\s*:\s*"
    r"(?:(?P<bool>bool)|enum\s*\{(?P<enum>[^}]*)\}|vec\s*<\s*(?P<width>\d+)\s*>)\s*$"
)
_VALUE = re.compile(r"^[A-Za-z0-9_]+$")
_SECTION_NAMES = {"[" + s.upper() + "]": s for s in SECTIONS}


class SpecError(Exception):
    """Problem with a specification document; carries an optional position."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(self.__str__())

    def __str__(self):
        if self.line is None:
            return self.message
        if self.col is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.col}: {self.message}"


class SpecSyntaxError(SpecError):
    pass


def _tokenize(text: str, line: int, col0: int = 1) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise SpecSyntaxError(f"unexpected character {text[bad]!r}", line, col0 + bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), col0 + start))
        pos = m.end()
    return toks


class _FormulaParser:
    def __init__(self, text: str, line: int = 1, col0: int = 1):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.end_col = col0 + len(text.rstrip())

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("eof", "", self.end_col)

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return SpecSyntaxError(msg, self.line, tok[2])

    def expect(self, value: str):
        tok = self.peek()
        if tok[1] != value or tok[0] == "eof":
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of line'!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek()[1] == "<->":
            self.i += 1
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disjunction()
        if self.peek()[1] == "->":
            self.i += 1
            return Implies(f, self.implies())
        return f

    def disjunction(self) -> Formula:
        args = [self.conjunction()]
        while self.peek()[1] == "||":
            self.i += 1
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.peek()[1] == "&&":
            self.i += 1
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        tok = self.peek()
        if tok[1] == "!":
            self.i += 1
            return Not(self.unary())
        if tok[0] == "id" and tok[1] in _WORD_OPS:
            self.i += 1
            return _WORD_OPS[tok[1]](self.unary())
        return self.primary()

    def call_args(self, n: int) -> List[Formula]:
        self.expect("(")
        args = [self.iff()]
        for _ in range(n - 1):
            self.expect(",")
            args.append(self.iff())
        self.expect(")")
        return args

    def primary(self) -> Formula:
        tok = self.peek()
        kind, val, _ = tok
        if val == "(" and kind == "op":
            self.i += 1
            f = self.iff()
            self.expect(")")
            return f
        if kind != "id":
            raise self.error(f"expected a formula, found {val or 'end of line'!r}")
        self.i += 1
        if val == "TRUE":
            return Const(True)
        if val == "FALSE":
            return Const(False)
        if val in ("X", "G", "F") and self.peek()[1] == "(":
            (arg,) = self.call_args(1)
            return {"X": Next, "G": Always, "F": Eventually}[val](arg)
        if val == "BEFORE":
            a, b = self.call_args(2)
            return Before(a, b)
        if val == "U_w":
            if self.peek()[1] == "[":
                self.i += 1
                num = self.peek()
                if num[0] != "num":
                    raise self.error("expected a count in U_w[...]")
                self.i += 1
                self.expect("]")
                count = int(num[1])
                if count < 1:
                    raise self.error("U_w count must be at least 1", num)
                a, b = self.call_args(2)
                return UntilWCount(a, b, count)
            a, b = self.call_args(2)
            return UntilW(a, b)
        if val in KEYWORDS:
            raise self.error(f"keyword {val!r} used as a signal", tok)
        nxt = self.peek()[1]
        if nxt in ("=", "!="):
            self.i += 1
            vt = self.peek()
            if vt[0] not in ("id", "num"):
                raise self.error("expected a value after '='")
            self.i += 1
            atom = Atom(val, vt[1])
            return Not(atom) if nxt == "!=" else atom
        if nxt == "[":
            self.i += 1
            num = self.peek()
            if num[0] != "num":
                raise self.error("expected a bit index")
            self.i += 1
            self.expect("]")
            return Atom(val, int(num[1]))
        return Atom(val, None)


def parse_formula(text: str, line: int = 1) -> Formula:
    """Parse one formula (no declaration checks)."""
    return _FormulaParser(text, line).parse()


def _strip_comment(raw: str) -> str:
    i = raw.find("#")
    return raw if i < 0 else raw[:i]


def parse_spec(text: str, name: Optional[str] = None) -> SpecDocument:
    """Parse and validate a specification document.

    Raises :class:`SpecSyntaxError` for malformed input and :class:`SpecError`
    for semantic problems (undeclared signals, enum value mismatches,
    temporal operators where they are not allowed).
    """
    decls: List[SignalDecl] = []
    sections: Dict[str, List[Formula]] = {s: [] for s in SECTIONS}
    positions: Dict[Tuple[str, int], Tuple[int, int]] = {}
    current: Optional[str] = None
    seen_sections = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("[") and stripped.endswith("]") and stripped.upper() == stripped:
            if stripped == "[SIGNALS]":
                current = "signals"
            elif stripped in _SECTION_NAMES:
                current = _SECTION_NAMES[stripped]
            else:
                raise SpecSyntaxError(f"unknown section {stripped}", lineno, col)
            if current in seen_sections:
                raise SpecSyntaxError(f"duplicate section {stripped}", lineno, col)
            seen_sections.add(current)
            continue
        if current is None:
            raise SpecSyntaxError("content before the first section header", lineno, col)
        if current == "signals":
            m = _DECL.match(stripped)
            if not m:
                raise SpecSyntaxError("malformed signal declaration", lineno, col)
            sig = m.group("name")
            if sig in KEYWORDS:
                raise SpecSyntaxError(f"keyword {sig!r} used as a signal name", lineno, col)
            try:
                if m.group("bool"):
                    d = SignalDecl(sig, m.group("owner"))
                elif m.group("width") is not None:
                    d = SignalDecl(sig, m.group("owner"), "vec", width=int(m.group("width")))
                else:
                    values = tuple(v.strip() for v in m.group("enum").split(","))
                    if any(not _VALUE.match(v) for v in values):
                        raise ValueError(f"bad enum value list for {sig}")
                    d = SignalDecl(sig, m.group("owner"), "enum", values=values)
            except ValueError as exc:
                raise SpecError(str(exc), lineno, col) from None
            if any(o.name == sig for o in decls):
                raise SpecError(f"signal {sig!r} declared twice", lineno, col)
            decls.append(d)
            continue
        f = _FormulaParser(body, lineno).parse()
        positions[(current, len(sections[current]))] = (lineno, col)
        sections[current].append(f)
    doc = SpecDocument(tuple(decls), **{s: tuple(v) for s, v in sections.items()}, name=name)
    validate(doc, positions)
    return doc


def validate(doc: SpecDocument, positions: Optional[dict] = None) -> None:
    """Check declarations and section shapes; raise :class:`SpecError`."""
    positions = positions or {}
    table = {d.name: d for d in doc.decls}
    for sec in SECTIONS:
        for i, f in enumerate(doc.section(sec)):
            line, col = positions.get((sec, i), (None, None))

            def fail(msg):
                raise SpecError(f"{sec}: {msg}", line, col)

            for node in f.walk():
                if isinstance(node, Atom):
                    d = table.get(node.signal)
                    if d is None:
                        fail(f"undeclared signal {node.signal!r}")
                    if d.kind == "bool" and node.value is not None:
                        fail(f"boolean signal {d.name!r} takes no value or index")
                    if d.kind == "enum":
                        if not isinstance(node.value, str) or isinstance(node.value, int):
                            fail(f"enum signal {d.name!r} must be compared to a value")
                        if node.value not in d.values:
                            fail(f"{node.value!r} is not a value of {d.name!r}")
                    if d.kind == "vec":
                        if not isinstance(node.value, int):
                            fail(f"vector signal {d.name!r} needs a bit index")
                        if not 0 <= node.value < d.width:
                            fail(f"bit {node.value} out of range for {d.name!r}")
            if sec.endswith("_init"):
                if is_temporal(f):
                    fail("temporal operator in an init section")
            elif sec.endswith("_fair"):
                if not (isinstance(f, Always) and isinstance(f.arg, Eventually)
                        and is_boolean(f.arg.arg)):
                    fail("fairness entries must have the form G(F(boolean))")
            else:
                if not isinstance(f, Always):
                    fail("transition entries must be wrapped in G(...)")
                if any(isinstance(n, Always) for n in f.arg.walk()):
                    fail("nested G(...) inside a transition entry")
