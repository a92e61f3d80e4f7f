"""Parameterized AMBA AHB arbiter, master and slave specifications.

Each generator renders the specification text (one entry per table line,
with ``forall i`` templates expanded) and parses it, so the text written by
:func:`render_arbiter` and friends is exactly what the document round-trips
to.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .formula import SpecDocument
from .parser import parse_spec

__all__ = [
    "ArbiterParams", "MasterParams", "SlaveParams",
    "gen_arbiter", "gen_master", "gen_slave",
    "render_arbiter", "render_master", "render_slave", "file_name",
]


@dataclass(frozen=True)
class ArbiterParams:
    """``htrans_assumed`` moves the two HTRANS-burst entries (G2, G3) from
    the guarantees to the assumptions; as guarantees they constrain an
    input the arbiter cannot drive."""

    n: int = 2
    prose_variant: bool = False
    htrans_assumed: bool = False

    def __post_init__(self):
        if not 2 <= self.n <= 16:
            raise ValueError(f"arbiter needs 2 <= n <= 16 masters, got {self.n}")


@dataclass(frozen=True)
class MasterParams:
    w: int = 1
    prose_variant: bool = False

    def __post_init__(self):
        if not 1 <= self.w <= 32:
            raise ValueError(f"master width must be in 1..32, got {self.w}")


@dataclass(frozen=True)
class SlaveParams:
    w: int = 1
    prose_variant: bool = False

    def __post_init__(self):
        if not 1 <= self.w <= 32:
            raise ValueError(f"slave width must be in 1..32, got {self.w}")


class _Text:
    def __init__(self, title: str):
        self.lines: List[str] = [f"# {title}"]

    def section(self, header: str):
        self.lines.append("")
        self.lines.append(header)

    def add(self, formula: str, label: str = ""):
        self.lines.append(f"{formula}  # {label}" if label else formula)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _all(fmt: str, idx) -> str:
    return " && ".join(fmt.format(i=i) for i in idx)


def _any(fmt: str, idx) -> str:
    return " || ".join(fmt.format(i=i) for i in idx)


def _hold_enum(cond: str, sig: str, values) -> str:
    parts = [f"({sig}={v} <-> X({sig}={v}))" for v in values]
    return f"G({cond} -> {' && '.join(parts)})"


HTRANS = ("IDLE", "NONSEQ", "SEQ")
HBURST = ("SINGLE", "INCR", "INCR4")


def _burst_entries(t: _Text, masters) -> None:
    for i in masters:
        t.add("G(HMASTLOCK && HBURST=INCR && HREADY && HTRANS=NONSEQ"
              " -> X(U_w(HTRANS=SEQ, !BUSREQ)))", f"G2 i={i}")
    for i in masters:
        t.add("G(HMASTLOCK && HBURST=INCR4 && HREADY && HTRANS=NONSEQ"
              " -> X(U_w[3](HTRANS=SEQ, HREADY)))", f"G3 i={i}")


def render_arbiter(p: ArbiterParams) -> str:
    n = p.n
    masters = range(n)
    title = f"AHB arbiter, {n} masters"
    if p.prose_variant:
        title += ", prose variant"
    if p.htrans_assumed:
        title += ", G2/G3 as assumptions"
    t = _Text(title)
    t.section("[SIGNALS]")
    for i in masters:
        t.add(f"HBUSREQ{i} : env : bool")
    for i in masters:
        t.add(f"HLOCK{i} : env : bool")
    t.add("HREADY : env : bool")
    t.add("HTRANS : env : enum{" + ",".join(HTRANS) + "}")
    t.add("HBURST : env : enum{" + ",".join(HBURST) + "}")
    for i in masters:
        t.add(f"HGRANT{i} : sys : bool")
    t.add("HMASTER : sys : enum{" + ",".join(str(i) for i in masters) + "}")
    for s in ("HMASTLOCK", "DECIDE", "GRANTED", "BUSREQ"):
        t.add(f"{s} : sys : bool")

    t.section("[ENV_INIT]")
    t.add(_all("!HBUSREQ{i} && !HLOCK{i}", masters)
          + " && !HREADY && HTRANS=IDLE && HBURST=SINGLE", "A9")

    t.section("[SYS_INIT]")
    t.add("DECIDE && HGRANT0 && HMASTER=0 && !GRANTED && !HMASTLOCK"
          + "".join(f" && !HGRANT{i}" for i in masters if i != 0), "G12")

    t.section("[ENV_TRANS]")
    for i in masters:
        t.add("G(HMASTLOCK && HBURST=INCR -> X(F(!BUSREQ)))", f"A1 i={i}")
    for i in masters:
        if p.prose_variant:
            t.add(f"G(X(HLOCK{i}) -> X(HBUSREQ{i}))", f"A3 i={i} (prose)")
        else:
            t.add(f"G(!HBUSREQ{i} && !HLOCK{i} && X(HLOCK{i}) -> X(HBUSREQ{i}))", f"A3 i={i}")
    t.add(_hold_enum("!HREADY", "HTRANS", HTRANS), "A4")
    t.add(_hold_enum("!HREADY", "HBURST", HBURST), "A4")
    t.add("G(HTRANS=IDLE -> X(HTRANS!=SEQ))", "A5")
    t.add("G(HTRANS=NONSEQ && HBURST=INCR4 && HREADY -> X(HTRANS=SEQ))", "A6")
    t.add("G(GRANTED && HREADY -> X(HTRANS=NONSEQ))", "A7")
    t.add(f"G({_all('!HBUSREQ{i}', masters)} -> HTRANS=IDLE)", "A8")

    if p.htrans_assumed:
        _burst_entries(t, masters)

    t.section("[SYS_TRANS]")
    for i in masters:
        t.add(f"G(HMASTER={i} -> (BUSREQ <-> HBUSREQ{i}))", f"G1 i={i}")
    if not p.htrans_assumed:
        _burst_entries(t, masters)
    t.add(f"G(DECIDE && ({_any('HBUSREQ{i}', masters)}) -> X(GRANTED))", "G4")
    t.add("G(GRANTED && !HREADY -> X(GRANTED))", "G5")
    t.add("G(GRANTED && HREADY -> X(!GRANTED))", "G5")
    for i in masters:
        t.add(f"G(HREADY -> (HGRANT{i} <-> X(HMASTER={i})))", f"G6 i={i}")
    t.add(f"G(HREADY && ({_any('HLOCK{i} && HGRANT{i}', masters)}) -> X(HMASTLOCK))", "G7")
    for i in masters:
        t.add(f"G(!HREADY || !GRANTED -> (HMASTER={i} <-> X(HMASTER={i})))", f"G8 i={i}")
    for i in masters:
        t.add("G(!HREADY || !GRANTED -> (HMASTLOCK <-> X(HMASTLOCK)))", f"G8 i={i}")
    for i in masters:
        t.add(f"G(!DECIDE -> (HGRANT{i} <-> X(HGRANT{i})))", f"G9 i={i}")
    for i in masters:
        if i != 0:
            t.add(f"G(!HGRANT{i} -> BEFORE(HBUSREQ{i}, HGRANT{i}))", f"G10 i={i}")
    t.add(f"G(DECIDE && {_all('!HBUSREQ{i}', masters)} -> X(HGRANT0))", "G10")
    for i in masters:
        t.add(f"G(HBUSREQ{i} -> F(!HBUSREQ{i} || HMASTER={i}))", f"G11 i={i}")

    t.section("[ENV_FAIR]")
    t.add("G(F(HREADY))", "A2")
    t.section("[SYS_FAIR]")
    return t.text()


def render_master(p: MasterParams) -> str:
    w = p.w
    bits = range(w)
    t = _Text(f"AHB master, width {w}" + (", prose variant" if p.prose_variant else ""))
    t.section("[SIGNALS]")
    for s in ("REQ_VLD", "WR", "RD", "LEN1", "LEN4", "LENX", "LAST", "HGRANT", "HREADY"):
        t.add(f"{s} : env : bool")
    t.add("HRESP : env : enum{OKAY,ERROR}")
    for s in ("IN_ADDR", "IN_DATA", "HRDATA"):
        t.add(f"{s} : env : vec<{w}>")
    t.add("HBUSREQ : sys : bool")
    t.add("HLOCK : sys : bool")
    t.add("HTRANS : sys : enum{" + ",".join(HTRANS) + "}")
    t.add("HBURST : sys : enum{" + ",".join(HBURST) + "}")
    t.add("HWRITE : sys : bool")
    t.add("HSIZE : sys : enum{WORD,OTHER}")
    for s in ("HADDR", "HWDATA", "OUT_DATA"):
        t.add(f"{s} : sys : vec<{w}>")
    for s in ("REQ_ADDR", "REQ_WR_DATA", "REC_RD_DATA"):
        t.add(f"{s} : sys : bool")

    t.section("[ENV_INIT]")
    t.section("[SYS_INIT]")

    t.section("[ENV_TRANS]")
    t.add("G(REQ_VLD -> LENX || LEN1 || LEN4)", "A1")
    t.add("G(REQ_VLD -> WR || RD)", "A2")
    for s in ("LEN1", "LENX", "LEN4", "WR", "RD"):
        t.add(f"G(X(!REQ_VLD) -> (!{s} <-> X(!{s})))", "A3")
    t.add("G(WR -> !RD)", "A4")
    t.add("G(RD -> !WR)", "A4")
    lens = ("LENX", "LEN1", "LEN4")
    for a in lens:
        b, c = (x for x in lens if x != a)
        op = "&&" if p.prose_variant else "||"
        t.add(f"G({a} -> !{b} {op} !{c})", "A5 (prose)" if p.prose_variant else "A5")
    t.add("G(HRESP=OKAY)", "A6")
    t.add("G(REQ_VLD -> F(HGRANT))", "A7")
    t.add("G(HLOCK && HBURST=INCR -> X(F(!REQ_VLD)))", "A8")

    t.section("[SYS_TRANS]")
    t.add("G(HSIZE=WORD)", "G1")
    t.add("G(REQ_VLD -> HBUSREQ)", "G2")
    t.add("G(!HBUSREQ && X(HBUSREQ) && !HLOCK -> X(HLOCK))", "G3")
    t.add("G(LAST -> !HLOCK)", "G4")
    t.add("G(HLOCK && HBURST=INCR4 && HREADY && HTRANS=NONSEQ"
          " -> X(U_w[3](HTRANS=SEQ, HREADY)))", "G5")
    start = "HBUSREQ && HGRANT && HTRANS=IDLE && HREADY"
    for ln, burst in (("LEN1", "SINGLE"), ("LENX", "INCR"), ("LEN4", "INCR4")):
        t.add(f"G({start} && {ln} -> X(HBURST={burst}))", "G6")
    t.add(f"G({start} -> X(HTRANS=NONSEQ))", "G7")
    t.add("G(!LAST && HTRANS=NONSEQ && HREADY -> X(HTRANS=SEQ))", "G7")
    t.add("G(HTRANS=IDLE -> HBURST=SINGLE)", "G7")
    t.add("G(HGRANT && HTRANS=NONSEQ && HREADY && WR -> HWRITE)", "G8")
    t.add("G(HGRANT && HTRANS=NONSEQ && HREADY && RD -> !HWRITE)", "G8")
    t.add(_hold_enum("!HREADY", "HTRANS", HTRANS), "G9")
    t.add(_hold_enum("!HREADY", "HBURST", HBURST), "G9")
    t.add("G(HREADY && HGRANT -> REQ_ADDR)", "G10")
    t.add("G(REQ_ADDR && HWRITE -> REQ_WR_DATA)", "G11")
    t.add("G(HREADY && (HTRANS=NONSEQ || HTRANS=SEQ) && !HWRITE -> REC_RD_DATA)", "G12")
    for i in bits:
        t.add(f"G(REQ_ADDR -> (X(IN_ADDR[{i}]) <-> X(HADDR[{i}])))", f"G13 i={i}")
    for i in bits:
        t.add(f"G(REQ_WR_DATA -> (X(IN_DATA[{i}]) <-> X(HWDATA[{i}])))", f"G14 i={i}")
    for i in bits:
        t.add("G(HREADY && !HWRITE && (HTRANS=SEQ || HTRANS=NONSEQ)"
              f" -> (X(HRDATA[{i}]) <-> X(OUT_DATA[{i}])))", f"G15 i={i}")

    t.section("[ENV_FAIR]")
    t.add("G(F(HREADY))", "A9")
    t.add("G(F(!REQ_VLD && !HGRANT))", "A10")
    t.section("[SYS_FAIR]")
    return t.text()


def render_slave(p: SlaveParams) -> str:
    w = p.w
    bits = range(w)
    t = _Text(f"AHB slave, width {w}")
    t.section("[SIGNALS]")
    t.add("HSEL : env : bool")
    t.add("HTRANS : env : enum{" + ",".join(HTRANS) + "}")
    t.add("HBURST : env : enum{" + ",".join(HBURST) + "}")
    t.add("HWRITE : env : bool")
    t.add("HLOCK : env : bool")
    t.add(f"HADDR : env : vec<{w}>")
    t.add(f"HWDATA : env : vec<{w}>")
    t.add("FULL : env : bool")
    t.add("EMPTY : env : bool")
    t.add(f"DO : env : vec<{w}>")
    t.add("START : env : bool")
    t.add("LAST : env : bool")
    t.add("HREADY : sys : bool")
    t.add("HRESP : sys : enum{OKAY,ERROR}")
    t.add("RD : sys : bool")
    t.add("WR : sys : bool")
    for s in ("ADDR", "DI", "HRDATA"):
        t.add(f"{s} : sys : vec<{w}>")

    t.section("[ENV_INIT]")
    t.section("[SYS_INIT]")

    t.section("[ENV_TRANS]")
    ctl = "HBURST=SINGLE && !HWRITE && !START && !LAST"
    t.add(f"G(!HSEL -> HTRANS=IDLE && {ctl})", "A1")
    t.add(f"G(HTRANS=IDLE -> {ctl})", "A2")
    t.add("G(START -> HTRANS=NONSEQ)", "A3")
    t.add("G(!LAST && HTRANS=NONSEQ && HREADY -> X(HTRANS=SEQ))", "A4")
    t.add("G(HLOCK && HBURST=INCR4 && HREADY && HTRANS=NONSEQ"
          " -> X(U_w[3](HTRANS=SEQ, HREADY)))", "A5")
    t.add("G(LAST && X(!START) -> X(HTRANS=IDLE))", "A6")
    t.add(_hold_enum("!HREADY", "HTRANS", HTRANS), "A7")
    t.add(_hold_enum("!HREADY", "HBURST", HBURST), "A7")
    for s in ("HADDR", "HWDATA"):
        for i in bits:
            t.add(f"G(!HREADY -> ({s}[{i}] <-> X({s}[{i}])))", f"A7 i={i}")

    t.section("[SYS_TRANS]")
    active = "HSEL && (HTRANS=NONSEQ || HTRANS=SEQ)"
    t.add("G(!HSEL -> HREADY)", "G1")
    t.add("G(!HSEL -> HRESP=OKAY)", "G1")
    t.add("G(HTRANS=IDLE -> HRESP=OKAY)", "G3")
    t.add("G(WR && HSEL -> !RD)", "G4")
    t.add("G(RD && HSEL -> !WR)", "G4")
    t.add("G(HSEL && FULL && WR -> HRESP=ERROR)", "G5")
    t.add("G(HSEL && EMPTY && RD -> HRESP=ERROR)", "G5")
    t.add(f"G({active} && HWRITE -> WR)", "G6")
    t.add(f"G({active} && !HWRITE -> RD)", "G6")
    for i in bits:
        t.add(f"G({active} -> (HADDR[{i}] <-> ADDR[{i}]))", f"G7 i={i}")
    for i in bits:
        t.add(f"G({active} && HWRITE -> (HWDATA[{i}] <-> DI[{i}]))", f"G8 i={i}")
    for i in bits:
        t.add(f"G({active} && !HWRITE -> (DO[{i}] <-> HRDATA[{i}]))", f"G9 i={i}")

    t.section("[ENV_FAIR]")
    t.section("[SYS_FAIR]")
    return t.text()


def gen_arbiter(p: ArbiterParams) -> SpecDocument:
    return parse_spec(render_arbiter(p), name=file_name("arbiter", p.n))


def gen_master(p: MasterParams) -> SpecDocument:
    return parse_spec(render_master(p), name=file_name("master", p.w))


def gen_slave(p: SlaveParams) -> SpecDocument:
    return parse_spec(render_slave(p), name=file_name("slave", p.w))


def file_name(kind: str, k: int) -> str:
    if kind == "arbiter":
        return f"ahb_arbiter_n{k}"
    return f"ahb_{kind}_w{k}"
