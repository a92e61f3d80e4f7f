"""From strategy relation to a latch-based netlist, and BLIF in and out."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .bdd import BDD, NodeRef
from .game import GameStructure, env_fair_region, env_viable
from .solver import StrategyRelation, WinningCertificate

__all__ = [
    "FunctionalizeError", "Netlist", "functionalize", "build_netlist",
    "emit_blif", "parse_blif", "BlifModel", "BlifError", "gate_stats",
    "stats_record",
]


class FunctionalizeError(AssertionError):
    """An extracted function disagrees with its forced values."""


class BlifError(ValueError):
    pass


def functionalize(s: StrategyRelation, order: Sequence[int]) -> List[Tuple[int, NodeRef]]:
    """One function per output variable in ``order`` (primed indices).

    Each output is fixed in turn: quantify the other outputs away, take the
    positive and negative cofactors ``p`` and ``n``, minimise ``p`` against
    the care set ``p xor n`` and substitute the result back into the
    relation before moving on.
    """
    bdd = s.game.bdd
    rel = s.rel
    outputs = list(order)
    out: List[Tuple[int, NodeRef]] = []
    for o in outputs:
        others = [v for v in outputs if v != o]
        proj = bdd.exists(others, rel)
        p = bdd.cofactor(proj, o, 1)
        n = bdd.cofactor(proj, o, 0)
        must1 = p & ~n
        must0 = n & ~p
        f = bdd.restrict_min(p, must1 | must0)
        if not (must1 <= f) or not (f & must0).is_false:
            raise FunctionalizeError(f"function for {bdd.var_name(o)} violates its care set")
        out.append((o, f))
        rel = bdd.compose(rel, o, f)
    return out


@dataclass
class Netlist:
    """Latches for every stored variable plus one function per output.

    ``functions`` maps each primed sys/counter variable to a diagram over
    ``X``, ``Y``, ``C`` and ``X'``.  Env latches are loaded from the
    inputs directly.
    """

    bdd: BDD
    name: str
    inputs: List[int]
    latches: List[int]
    next_of: Dict[int, int]
    functions: List[Tuple[int, NodeRef]]
    init: Dict[int, bool]
    outputs: List[int] = field(default_factory=list)

    def wire(self, v: int) -> str:
        return self.bdd.var_name(v)

    def initial_state(self) -> Dict[str, bool]:
        return {self.wire(v): self.init[v] for v in self.latches}

    def evaluate(self, state: Mapping[str, bool], inputs: Mapping[str, bool]) -> Dict[str, bool]:
        """Values of every function output (primed wire names)."""
        env = dict(state)
        env.update(inputs)
        out = {}
        for o, f in self.functions:
            out[self.wire(o)] = self.bdd.evaluate(f, env)
        return out

    def next_state(self, state: Mapping[str, bool], inputs: Mapping[str, bool]) -> Dict[str, bool]:
        comb = self.evaluate(state, inputs)
        comb.update(inputs)
        return {self.wire(v): comb[self.wire(self.next_of[v])] for v in self.latches}

    def output_map(self) -> Dict[int, NodeRef]:
        return dict(self.functions)


def build_netlist(g: GameStructure, cert: WinningCertificate, s: StrategyRelation,
                  name: str = "top", order: Optional[Sequence[int]] = None) -> Netlist:
    """Functionalize ``s`` (sys outputs then counter bits unless ``order``
    is given) and pick latch reset values from ``init_e & init_s & win``
    with the goal counter at zero, inside the env-fair (else env-viable)
    region when possible."""
    if order is None:
        order = list(g.y_primed) + list(g.c_primed)
    funcs = functionalize(s, order)
    bdd = g.bdd
    stored = list(g.x_vars) + list(g.y_vars) + list(g.c_vars)
    start = g.init_e & g.init_s & cert.win & g.counter_value(0)
    # prefer a reset state from which the environment can stay fair, or at
    # least cannot get stuck
    for region in (env_fair_region(g), env_viable(g)):
        if not (start & region).is_false:
            start = start & region
            break
    pick = bdd.pick_assignment(start, stored)
    if pick is None:
        raise ValueError("no initial state inside the winning region")
    nxt = g.prime_map
    sys_signals = set(g.spec.names("sys", monitor=False))
    outputs = [v for v in g.y_vars if bdd.var_name(v) in sys_signals]
    return Netlist(bdd, name, list(g.x_primed), stored, {v: nxt[v] for v in stored},
                   funcs, pick, outputs)


# -- BLIF ----------------------------------------------------------------

def _node_wire(n: int) -> str:
    return f"n{n}"


def emit_blif(n: Netlist, model_name: Optional[str] = None) -> str:
    """Deterministic BLIF text: one two-row ``.names`` multiplexer per
    diagram node, a buffer per function output, one ``.latch`` per stored
    variable."""
    bdd = n.bdd
    lines = [f".model {model_name or n.name}"]
    lines.append(".inputs" + "".join(" " + n.wire(v) for v in n.inputs))
    lines.append(".outputs" + "".join(" " + n.wire(v) for v in n.outputs))
    for v in n.latches:
        lines.append(f".latch {n.wire(n.next_of[v])} {n.wire(v)} {int(n.init[v])}")
    roots = [f for _, f in n.functions]
    used_consts = {f.node for f in roots if f.node < 2}
    for node in bdd.nodes(roots):
        var, lo, hi = bdd.node_triple(node)
        for child in (lo, hi):
            if child < 2:
                used_consts.add(child)
    for c in sorted(used_consts):
        lines.append(f".names {_node_wire(c)}")
        if c == 1:
            lines.append("1")
    for node in bdd.nodes(roots):
        var, lo, hi = bdd.node_triple(node)
        lines.append(f".names {bdd.var_name(var)} {_node_wire(hi)} {_node_wire(lo)} {_node_wire(node)}")
        lines.append("11- 1")
        lines.append("0-1 1")
    for o, f in n.functions:
        lines.append(f".names {_node_wire(f.node)} {n.wire(o)}")
        lines.append("1 1")
    lines.append(".end")
    return "\n".join(lines) + "\n"


@dataclass
class BlifModel:
    """A parsed single-model BLIF netlist that can be simulated."""

    name: str
    inputs: List[str]
    outputs: List[str]
    latches: List[Tuple[str, str, int]]
    names: List[Tuple[List[str], str, List[Tuple[str, str]]]]
    _order: List[int] = field(default_factory=list, repr=False)

    def initial_state(self) -> Dict[str, bool]:
        return {out: bool(init) for _, out, init in self.latches}

    def _schedule(self) -> List[int]:
        if self._order:
            return self._order
        driver = {out: k for k, (_, out, _) in enumerate(self.names)}
        done: Dict[int, int] = {}
        order: List[int] = []
        for k in range(len(self.names)):
            stack = [(k, False)]
            while stack:
                i, expanded = stack.pop()
                if done.get(i) == 2:
                    continue
                if expanded:
                    done[i] = 2
                    order.append(i)
                    continue
                if done.get(i) == 1:
                    raise BlifError(f"combinational cycle through {self.names[i][1]}")
                done[i] = 1
                stack.append((i, True))
                for w in self.names[i][0]:
                    j = driver.get(w)
                    if j is not None and done.get(j) != 2:
                        stack.append((j, False))
        self._order = order
        return order

    def evaluate(self, state: Mapping[str, bool], inputs: Mapping[str, bool]) -> Dict[str, bool]:
        val: Dict[str, bool] = dict(state)
        val.update(inputs)
        for k in self._schedule():
            ins, out, rows = self.names[k]
            try:
                bits = [val[w] for w in ins]
            except KeyError as exc:
                raise BlifError(f"undriven wire {exc.args[0]!r}") from None
            on = False
            for pattern, value in rows:
                if all(c == "-" or (c == "1") == b for c, b in zip(pattern, bits)):
                    on = value == "1"
                    break
            val[out] = on
        return val

    def next_state(self, state: Mapping[str, bool], inputs: Mapping[str, bool]) -> Dict[str, bool]:
        val = self.evaluate(state, inputs)
        return {out: val[inp] for inp, out, _ in self.latches}


def parse_blif(text: str) -> BlifModel:
    """Reader for the subset written by :func:`emit_blif` (single model,
    ``.inputs``, ``.outputs``, ``.latch``, ``.names`` with on-set rows)."""
    model = BlifModel("", [], [], [], [])
    current = None
    logical: List[Tuple[int, str]] = []
    buf = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.endswith("\\"):
            buf += line[:-1] + " "
            continue
        line = (buf + line).strip()
        buf = ""
        if line:
            logical.append((lineno, line))
    ended = False
    for lineno, line in logical:
        toks = line.split()
        head = toks[0]
        if head == ".model":
            model.name = toks[1] if len(toks) > 1 else ""
            current = None
        elif head == ".inputs":
            model.inputs.extend(toks[1:])
            current = None
        elif head == ".outputs":
            model.outputs.extend(toks[1:])
            current = None
        elif head == ".latch":
            if len(toks) < 3:
                raise BlifError(f"line {lineno}: .latch needs input and output")
            init = int(toks[-1]) if len(toks) >= 4 and toks[-1] in ("0", "1") else 0
            model.latches.append((toks[1], toks[2], init))
            current = None
        elif head == ".names":
            if len(toks) < 2:
                raise BlifError(f"line {lineno}: .names needs an output")
            current = (toks[1:-1], toks[-1], [])
            model.names.append(current)
        elif head == ".end":
            ended = True
            current = None
        elif head.startswith("."):
            raise BlifError(f"line {lineno}: unsupported directive {head}")
        else:
            if current is None:
                raise BlifError(f"line {lineno}: cover row outside .names")
            ins = current[0]
            if len(ins) == 0:
                pattern, value = "", toks[0]
            elif len(toks) == 2:
                pattern, value = toks
            else:
                raise BlifError(f"line {lineno}: malformed cover row")
            if len(pattern) != len(ins) or set(pattern) - set("01-") or value not in ("0", "1"):
                raise BlifError(f"line {lineno}: malformed cover row")
            if value != "1":
                raise BlifError(f"line {lineno}: only on-set covers are supported")
            current[2].append((pattern, value))
    if not ended:
        raise BlifError("missing .end")
    return model


# -- statistics ----------------------------------------------------------

def gate_stats(n: Netlist) -> Dict[str, object]:
    """Diagram-node based size metric; a node is a 2:1 mux, counted as
    three gates."""
    roots = [f for _, f in n.functions]
    total = n.bdd.node_count(roots)
    per = {n.wire(o): n.bdd.node_count([f]) for o, f in n.functions}
    return {"node_count": total, "gate_equiv": 3 * total, "per_output": per}


def stats_record(bench: str, k: Optional[int], g: GameStructure, realizable: bool,
                 solve_ms: float, netlist: Optional[Netlist] = None) -> str:
    """One JSON-lines record."""
    rec = {
        "bench": bench,
        "n": k,
        "vars_x": len(g.x_vars),
        "vars_y": len(g.y_vars),
        "monitors": g.spec.monitor_bits,
        "realizable": realizable,
        "solve_ms": round(solve_ms, 3),
        "node_count": None,
        "gate_equiv": None,
    }
    if netlist is not None:
        st = gate_stats(netlist)
        rec["node_count"] = st["node_count"]
        rec["gate_equiv"] = st["gate_equiv"]
    return json.dumps(rec, sort_keys=False)
