import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gr1forge.game import cpre, env_safe_moves, env_viable, family_order
from gr1forge.harness import state_set
from gr1forge.monitors import normalize
from gr1forge.parser import parse_spec
from gr1forge.pipeline import prepare_game
from builds import doc_for
from games import reorder, symbolic, template_game
from oracles import assignments

COPY = """[SIGNALS]
x : env : bool
y : sys : bool
[SYS_TRANS]
G(X(y) <-> X(x))
"""


def states_to_bdd(g, states, names):
    bdd = g.bdd
    return bdd.disj(bdd.cube(dict(zip(names, s))) for s in states)


def test_empty_spec_has_true_transitions():
    g = prepare_game(parse_spec("[SIGNALS]\nx : env : bool\ny : sys : bool\n"))
    assert g.trans_e.is_true and g.trans_s.is_true
    assert g.init_e.is_true and g.init_s.is_true


def test_copy_game_cpre():
    g = prepare_game(parse_spec(COPY))
    x, y = g.bdd.mk_var("x"), g.bdd.mk_var("y")
    assert cpre(g, x.iff(y)).is_true
    assert cpre(g, y).is_false
    assert cpre(g, g.bdd.true).is_true
    assert cpre(g, g.bdd.false).is_false


def test_cpre_of_false_is_the_env_deadlock_region():
    g = prepare_game(parse_spec("""[SIGNALS]
x : env : bool
y : sys : bool
[ENV_TRANS]
G(y -> FALSE)
"""))
    assert cpre(g, g.bdd.false) == g.bdd.mk_var("y")


@pytest.mark.parametrize("seed", range(0, 120, 3))
def test_cpre_matches_explicit_predecessor(seed):
    tg = template_game(seed)
    g, _, _ = symbolic(tg)
    _, _, trans_e, trans_s, _, _ = tg.predicates()
    names = tg.x_names + tg.y_names
    xs, ys = assignments(tg.nx), assignments(tg.ny)
    rng = random.Random(seed)
    for _ in range(4):
        target = frozenset((x, y) for x in xs for y in ys if rng.random() < 0.5)
        want = frozenset(
            x + y for x in xs for y in ys
            if all(any(trans_s(x, y, x2, y2) and (x2, y2) in target for y2 in ys)
                   for x2 in xs if trans_e(x, y, x2)))
        tb = states_to_bdd(g, [x + y for x, y in target], names)
        got = reorder(state_set(g, cpre(g, tb)), list(g.x_names) + list(g.y_names), names)
        assert got == want


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_cpre_is_monotone(seed, a, b):
    tg = template_game(seed)
    g, _, _ = symbolic(tg)
    names = tg.x_names + tg.y_names
    n = len(names)
    pts = assignments(n)
    sa = [s for k, s in enumerate(pts) if (a >> k) & 1]
    sb = [s for k, s in enumerate(pts) if ((a | b) >> k) & 1]
    small, big = states_to_bdd(g, sa, names), states_to_bdd(g, sb, names)
    assert cpre(g, small) <= cpre(g, big)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 9, 16])
def test_arbiter_signal_partition(n):
    g = prepare_game(doc_for("arbiter", n, htrans_assumed=False))
    env = g.spec.names("env", monitor=False)
    sys = g.spec.names("sys", monitor=False)
    assert len(env) == 2 * n + 5
    assert len(sys) == n + max(1, math.ceil(math.log2(n))) + 4
    assert set(g.x_names) == set(g.spec.names("env"))
    assert set(g.y_names) == set(g.spec.names("sys"))


def test_primed_copies_pair_up():
    g = prepare_game(doc_for("slave", 1))
    for v, w in g.prime_map.items():
        assert g.bdd.var_name(w) == g.bdd.var_name(v) + "'"
    assert g.unprime(g.prime(g.trans_s & g.bdd.false)).is_false


def test_family_order_groups_masters():
    doc = doc_for("arbiter", 3, htrans_assumed=False)
    spec = normalize(doc)
    order = family_order(doc, spec)
    assert sorted(order) == sorted(spec.names())
    pos = {name: i for i, name in enumerate(order)}
    assert pos["HBUSREQ0"] < pos["HBUSREQ1"] < pos["HBUSREQ2"]
    assert abs(pos["HBUSREQ1"] - pos["HGRANT1"]) < abs(pos["HBUSREQ1"] - pos["HGRANT2"])


def test_game_construction_is_deterministic():
    a = prepare_game(doc_for("master", 1))
    b = prepare_game(doc_for("master", 1))
    assert a.bdd.var_names == b.bdd.var_names
    assert len(a.trans_s) == len(b.trans_s)
    assert a.bdd.sat_count(a.trans_e) == b.bdd.sat_count(b.trans_e)


def test_env_viability_excludes_forced_deadlocks():
    g = prepare_game(parse_spec("""[SIGNALS]
x : env : bool
y : sys : bool
[ENV_TRANS]
G(!(x && y))
[SYS_TRANS]
G(X(y) <-> X(x))
"""))
    b = g.bdd
    x, y = b.mk_var("x"), b.mk_var("y")
    viable = env_viable(g)
    assert viable == ~(x & y)
    safe = env_safe_moves(g, viable)
    # choosing x' is copied into y' and strands the environment
    assert (safe & b.mk_var("x'")).is_false
    assert b.exists(g.x_primed, safe) == viable
