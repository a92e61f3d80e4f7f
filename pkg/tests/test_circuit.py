import json
import random

import pytest

from gr1forge.circuit import (BlifError, build_netlist, emit_blif, functionalize, gate_stats, parse_blif,
                              stats_record)
from gr1forge.harness import refinement_check
from gr1forge.parser import parse_spec
from gr1forge.pipeline import run_pipeline
from builds import synthesized

HEAD = "[SIGNALS]\nx : env : bool\ny : sys : bool\n"
COPY = HEAD + "[SYS_TRANS]\nG(X(y) <-> X(x))\n"
DELAY = HEAD + "[SYS_TRANS]\nG(X(y) <-> x)\n"


def run(text, name="d"):
    return run_pipeline(parse_spec(text, name))


def test_copy_relation_functionalizes_to_the_input():
    r = run(COPY)
    ((o, f),) = functionalize(r.strategy, r.game.y_primed)
    assert f == r.game.bdd.mk_var("x'")


def test_free_output_gets_a_constant():
    r = run(HEAD)
    ((_, f),) = r.netlist.functions
    assert f.is_false
    assert gate_stats(r.netlist)["node_count"] == 0


def test_env_only_spec_gives_an_empty_skeleton():
    text = emit_blif(run("[SIGNALS]\nx : env : bool\n").netlist)
    assert text == ".model d\n.inputs x'\n.outputs\n.latch x' x 0\n.end\n"


def test_unit_delay_latch():
    r = run(DELAY)
    model = parse_blif(emit_blif(r.netlist))
    rng = random.Random(0)
    state = model.initial_state()
    for _ in range(10):
        x_now = state["x"]
        nxt = model.next_state(state, {"x'": rng.random() < 0.5})
        assert nxt["y"] == x_now
        state = nxt


def test_gate_stats_counts_muxes():
    st = gate_stats(run(COPY).netlist)
    assert st == {"node_count": 1, "gate_equiv": 3, "per_output": {"y'": 1}}


@pytest.mark.parametrize("kind,k", [("slave", 1), ("master", 1)])
def test_functions_stay_inside_the_relation(kind, k):
    r = synthesized(kind, k)
    g, bdd = r.game, r.game.bdd
    step = bdd.conj(bdd.mk_var(o).iff(f) for o, f in r.netlist.functions)
    domain = r.cert.win & g.counter_valid() & g.trans_e
    assert (domain & step) <= r.strategy.rel


@pytest.mark.parametrize("kind,k", [("slave", 1), ("master", 1), ("arbiter", 2)])
def test_blif_round_trip_simulates_identically(kind, k):
    r = synthesized(kind, k)
    net = r.netlist
    model = parse_blif(emit_blif(net))
    assert model.inputs == [net.wire(v) for v in net.inputs]
    rng = random.Random(k)
    a, b = net.initial_state(), model.initial_state()
    assert a == b
    for _ in range(300):
        inputs = {net.wire(v): rng.random() < 0.5 for v in net.inputs}
        a, b = net.next_state(a, inputs), model.next_state(b, inputs)
        assert a == b


def test_blif_output_is_deterministic():
    one = emit_blif(run_pipeline(synthesized("slave", 1).doc).netlist)
    two = emit_blif(run_pipeline(synthesized("slave", 1).doc).netlist)
    assert one == two


def test_output_order_permutation_still_refines():
    r = synthesized("master", 1)
    g = r.game
    order = list(reversed(list(g.y_primed))) + list(g.c_primed)
    net = build_netlist(g, r.cert, r.strategy, order=order)
    assert refinement_check(g, r.cert, r.strategy, net).kind == "pass"


def test_stats_record_fields():
    r = synthesized("slave", 1)
    rec = json.loads(stats_record("slave", 1, r.game, True, 12.5, r.netlist))
    assert list(rec) == ["bench", "n", "vars_x", "vars_y", "monitors", "realizable", "solve_ms",
                         "node_count", "gate_equiv"]
    assert rec["gate_equiv"] == 3 * rec["node_count"]


@pytest.mark.parametrize("text,fragment", [
    (".model m\n.inputs a\n", "missing .end"),
    (".model m\n.names a b\n12 1\n.end\n", "malformed"),
    (".model m\n.subckt foo\n.end\n", "unsupported"),
    (".model m\n1 1\n.end\n", "outside"),
    (".model m\n.names a b\n1 0\n.end\n", "on-set"),
])
def test_blif_reader_errors(text, fragment):
    with pytest.raises(BlifError, match=fragment):
        parse_blif(text)


def test_combinational_cycle_detected():
    model = parse_blif(".model m\n.names b a\n1 1\n.names a b\n1 1\n.end\n")
    with pytest.raises(BlifError, match="cycle"):
        model.evaluate({}, {})
