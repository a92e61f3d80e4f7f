import gc
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gr1forge.bdd import BDD, ManagerMismatch
from oracles import (assignments, bdd_table, build, cofactor_table, compose_table, exists_table,
                     expr_table, forall_table, random_expr)

N = 6


def manager(n: int = N) -> BDD:
    return BDD([f"v{i}" for i in range(n)])


def expr_strategy(nvars: int = N, depth: int = 4):
    return st.integers(0, 2**32 - 1).map(lambda s: random_expr(random.Random(s), nvars, depth))


# -- constants and variables ---------------------------------------------

def test_constants_are_distinct_and_fixed():
    b = manager()
    assert b.true.is_true and b.false.is_false
    assert b.true != b.false
    assert ~b.true == b.false
    assert b.const(True) == b.true


def test_variable_nodes_are_shared():
    b = manager()
    x = b.mk_var(0)
    assert x == b.mk_var("v0")
    assert x.var == 0 and x.low == b.false and x.high == b.true
    assert (x & ~x).is_false
    assert (x | ~x).is_true
    assert (x ^ x).is_false


def test_declare_twice_rejected():
    b = manager(1)
    with pytest.raises(ValueError):
        b.declare("v0")


def test_ite_matches_definition():
    b = manager(3)
    f, g, h = (b.mk_var(i) for i in range(3))
    assert b.ite(f, g, h) == (f & g) | (~f & h)
    assert b.ite(b.true, g, h) == g
    assert b.ite(b.false, g, h) == h


# -- truth-table agreement -----------------------------------------------

@settings(max_examples=300, deadline=None)
@given(expr_strategy(), expr_strategy())
def test_canonicity(e1, e2):
    b = manager()
    f, g = build(b, e1), build(b, e2)
    assert bdd_table(b, f, N) == expr_table(e1, N)
    assert (f == g) == (expr_table(e1, N) == expr_table(e2, N))


@pytest.mark.parametrize("op", ["and", "or", "xor", "implies", "iff"])
def test_apply_against_tables(op):
    rng = random.Random(op)
    b = manager()
    fns = {"and": lambda x, y: x and y, "or": lambda x, y: x or y, "xor": lambda x, y: x != y,
           "implies": lambda x, y: (not x) or y, "iff": lambda x, y: x == y}
    for _ in range(150):
        e1, e2 = random_expr(rng, N, 4), random_expr(rng, N, 4)
        f, g = build(b, e1), build(b, e2)
        t1, t2 = expr_table(e1, N), expr_table(e2, N)
        want = tuple(fns[op](x, y) for x, y in zip(t1, t2))
        assert bdd_table(b, b.apply(op, f, g), N) == want


def test_unknown_operator():
    b = manager(1)
    with pytest.raises(ValueError):
        b.apply("nand", b.true, b.true)


@settings(max_examples=200, deadline=None)
@given(expr_strategy(), st.sets(st.integers(0, N - 1), max_size=3))
def test_quantifiers_against_tables(e, qs):
    b = manager()
    f = build(b, e)
    t = expr_table(e, N)
    qs = sorted(qs)
    assert bdd_table(b, b.exists(qs, f), N) == exists_table(t, N, qs)
    assert bdd_table(b, b.forall(qs, f), N) == forall_table(t, N, qs)


@settings(max_examples=200, deadline=None)
@given(expr_strategy(), expr_strategy(), st.sets(st.integers(0, N - 1), max_size=3))
def test_and_exists_is_exists_of_and(e1, e2, qs):
    b = manager()
    f, g = build(b, e1), build(b, e2)
    assert b.and_exists(f, g, sorted(qs)) == b.exists(sorted(qs), f & g)


@settings(max_examples=200, deadline=None)
@given(expr_strategy(), st.integers(0, N - 1), st.booleans())
def test_cofactor_against_tables(e, v, pol):
    b = manager()
    f = build(b, e)
    got = b.cofactor(f, v, pol)
    assert bdd_table(b, got, N) == cofactor_table(expr_table(e, N), N, v, pol)
    assert v not in b.support(got)


@settings(max_examples=200, deadline=None)
@given(expr_strategy(), expr_strategy(), st.integers(0, N - 1))
def test_compose_against_tables(e, eg, v):
    b = manager()
    f, g = build(b, e), build(b, eg)
    got = b.compose(f, v, g)
    assert bdd_table(b, got, N) == compose_table(expr_table(e, N), N, v, expr_table(eg, N))


@settings(max_examples=100, deadline=None)
@given(expr_strategy(), st.dictionaries(st.integers(0, N - 1), st.booleans(), max_size=4))
def test_let_equals_repeated_cofactor(e, values):
    b = manager()
    f = build(b, e)
    want = f
    for v, x in values.items():
        want = b.cofactor(want, v, x)
    assert b.let(values, f) == want


# -- algebraic laws ------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(expr_strategy(), expr_strategy())
def test_de_morgan_and_double_negation(e1, e2):
    b = manager()
    f, g = build(b, e1), build(b, e2)
    assert ~(f & g) == (~f | ~g)
    assert ~(f | g) == (~f & ~g)
    assert ~~f == f


@settings(max_examples=200, deadline=None)
@given(expr_strategy(), st.sets(st.integers(0, N - 1), min_size=1, max_size=3))
def test_quantifier_duality(e, qs):
    b = manager()
    f = build(b, e)
    assert b.forall(sorted(qs), f) == ~b.exists(sorted(qs), ~f)
    assert b.forall(sorted(qs), f) <= f <= b.exists(sorted(qs), f)


def test_quantify_order_independent():
    rng = random.Random(7)
    b = manager()
    for _ in range(100):
        f = build(b, random_expr(rng, N, 4))
        assert b.exists([0, 3], f) == b.exists([3], b.exists([0], f))


def test_sat_count_against_tables():
    rng = random.Random(3)
    b = manager()
    for _ in range(100):
        e = random_expr(rng, N, 4)
        assert b.sat_count(build(b, e)) == sum(expr_table(e, N))
    assert b.sat_count(b.true, 3) == 8


# -- restrict_min --------------------------------------------------------

def test_restrict_min_special_care_sets():
    b = manager()
    f = build(b, random_expr(random.Random(1), N, 4))
    assert b.restrict_min(f, b.true) == f
    x = b.mk_var(0)
    assert b.restrict_min(x ^ b.mk_var(1), x) == ~b.mk_var(1)


@settings(max_examples=300, deadline=None)
@given(expr_strategy(), expr_strategy())
def test_restrict_min_agrees_on_care_and_never_grows(ef, ec):
    b = manager()
    f, c = build(b, ef), build(b, ec)
    r = b.restrict_min(f, c)
    assert ((r ^ f) & c).is_false
    assert len(r) <= len(f)


# -- rename --------------------------------------------------------------

def test_rename_shifts_variables():
    b = BDD(["a", "a'", "b", "b'"])
    f = b.mk_var("a") & ~b.mk_var("b")
    g = b.rename(f, {"a": "a'", "b": "b'"})
    assert g == b.mk_var("a'") & ~b.mk_var("b'")
    assert b.rename(g, {"a'": "a", "b'": "b"}) == f


def test_rename_rejects_order_change():
    b = BDD(["a", "b", "c"])
    f = b.mk_var("a") & b.mk_var("b")
    with pytest.raises(ValueError):
        b.rename(f, {"a": "c"})


def test_rename_against_tables():
    rng = random.Random(11)
    b = BDD([f"v{i}" for i in range(8)])
    for _ in range(100):
        e = random_expr(rng, 4, 4)
        f = build(b, e)
        g = b.rename(f, {i: i + 4 for i in range(4)})
        t = expr_table(e, 4)
        for k, a in enumerate(assignments(4)):
            env = {i + 4: a[i] for i in range(4)}
            env.update({i: False for i in range(4)})
            assert b.evaluate(g, env) == t[k]


# -- inspection helpers --------------------------------------------------

def test_pick_assignment_prefers_false_and_satisfies():
    b = manager(3)
    assert b.pick_assignment(b.true, [0, 1, 2]) == {0: False, 1: False, 2: False}
    assert b.pick_assignment(b.mk_var(1), [0, 1, 2]) == {0: False, 1: True, 2: False}
    assert b.pick_assignment(b.false, [0]) is None
    rng = random.Random(5)
    big = manager()
    for _ in range(200):
        f = build(big, random_expr(rng, N, 4))
        pick = big.pick_assignment(f, range(N), rng=rng)
        if f.is_false:
            assert pick is None
        else:
            assert big.evaluate(f, pick)


def test_evaluate_requires_support_values():
    b = manager(2)
    with pytest.raises(KeyError):
        b.evaluate(b.mk_var(0) & b.mk_var(1), {0: True})


def test_cube_and_support():
    b = manager(4)
    c = b.cube({"v0": True, 2: False})
    assert c == b.mk_var(0) & ~b.mk_var(2)
    assert b.support(c) == frozenset({0, 2})
    assert b.node_count([c]) == 2


def test_to_dot_mentions_variables():
    b = manager(2)
    text = b.to_dot([b.mk_var(0) & b.mk_var(1)])
    assert text.startswith("digraph") and "v0" in text and "v1" in text


def test_manager_mismatch():
    a, b = manager(1), manager(1)
    with pytest.raises(ManagerMismatch):
        a.mk_var(0) & b.mk_var(0)


def test_garbage_collection_keeps_live_functions():
    b = BDD([f"v{i}" for i in range(10)], gc_threshold=64)
    rng = random.Random(2)
    keep = []
    for k in range(300):
        e = random_expr(rng, 10, 5)
        f = build(b, e)
        if k % 10 == 0:
            keep.append((f, [b.evaluate(f, dict(enumerate(a))) for a in assignments(10)[::37]]))
    gc.collect()
    b.collect_garbage()
    assert b.gc_runs > 0
    for f, vals in keep:
        assert [b.evaluate(f, dict(enumerate(a))) for a in assignments(10)[::37]] == vals
    # rebuilding after collection still yields canonical nodes
    x = b.mk_var(3) & b.mk_var(7)
    assert x == (b.mk_var(7) & b.mk_var(3))


def test_wrap_rejects_collected_nodes():
    b = manager(3)
    f = b.mk_var(0) & b.mk_var(1)
    node = f.node
    del f
    gc.collect()
    b.collect_garbage()
    with pytest.raises(IndexError):
        b.wrap(node)
