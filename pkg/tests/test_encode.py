import itertools

import pytest

from gr1forge.encode import bit_names, bit_width, encode_bits, valid_codes, value_code
from gr1forge.formula import Always, Atom, SignalDecl, SpecDocument
from gr1forge.harness import eval_formula, Trace


def truth(f, env):
    return eval_formula(f, Trace([env]))


@pytest.mark.parametrize("k,w", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)])
def test_bit_width(k, w):
    assert bit_width(k) == w


def test_bit_names_per_kind():
    assert bit_names(SignalDecl("A", "env")) == ["A"]
    assert bit_names(SignalDecl("D", "sys", "vec", width=3)) == ["D.0", "D.1", "D.2"]
    assert bit_names(SignalDecl("T", "env", "enum", ("IDLE", "NONSEQ", "SEQ"))) == ["T.0", "T.1"]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 7])
def test_each_value_has_exactly_one_code(k):
    d = SignalDecl("E", "env", "enum", tuple(f"V{i}" for i in range(k)))
    doc = SpecDocument((d,), sys_trans=tuple(Always(Atom("E", v)) for v in d.values))
    enc = encode_bits(doc)
    bits = bit_names(d)
    valid = valid_codes(d)
    for combo in itertools.product((False, True), repeat=len(bits)):
        env = dict(zip(bits, combo))
        code = sum(1 << i for i, b in enumerate(combo) if b)
        assert truth(valid, env) == (code < k)
        hits = [v for v, f in zip(d.values, enc.sys_trans) if truth(f.arg, env)]
        assert hits == ([d.values[code]] if code < k else [])
        if code < k:
            assert value_code(d, d.values[code]) == code


def test_three_value_enum_excludes_fourth_code_on_owner_side():
    d = SignalDecl("HTRANS", "env", "enum", ("IDLE", "NONSEQ", "SEQ"))
    enc = encode_bits(SpecDocument((d,)))
    env_all = enc.env_init + tuple(f.arg for f in enc.env_trans)
    unused = {"HTRANS.0": True, "HTRANS.1": True}
    assert any(not truth(f, unused) for f in env_all)
    assert enc.sys_init == () and enc.sys_trans == ()


def test_vector_bits_are_atoms():
    d = SignalDecl("DATA", "sys", "vec", width=2)
    enc = encode_bits(SpecDocument((d,), sys_trans=(Always(Atom("DATA", "1")),)))
    assert enc.sys_trans == (Always(Atom("DATA.1")),)
    assert [x.name for x in enc.decls] == ["DATA.0", "DATA.1"]
