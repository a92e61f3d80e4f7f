import math
import re
from pathlib import Path

import pytest

from gr1forge.amba import (ArbiterParams, MasterParams, SlaveParams, file_name, gen_arbiter, gen_master,
                           gen_slave, render_arbiter, render_master, render_slave)
from gr1forge.encode import bit_names
from gr1forge.formula import to_text
from gr1forge.monitors import normalize
from gr1forge.parser import parse_spec
from gr1forge.pipeline import run_pipeline

GOLDEN = Path(__file__).parent / "golden"


def bits(doc, owner):
    return sum(len(bit_names(d)) for d in doc.decls if d.owner == owner)


def labels(text, section):
    body = text.split(f"[{section}]")[1].split("\n[")[0]
    return [m.group(1) for m in re.finditer(r"#\s*([AG]\d+)", body)]


@pytest.mark.parametrize("make", [lambda: ArbiterParams(1), lambda: ArbiterParams(17),
                                  lambda: MasterParams(0), lambda: SlaveParams(33)])
def test_parameter_ranges(make):
    with pytest.raises(ValueError):
        make()


@pytest.mark.parametrize("n", range(2, 17))
def test_arbiter_bit_counts(n):
    doc = gen_arbiter(ArbiterParams(n))
    assert bits(doc, "env") == 2 * n + 5
    assert bits(doc, "sys") == n + math.ceil(math.log2(n)) + 4


@pytest.mark.parametrize("w", [1, 2, 3, 8])
def test_master_bit_counts(w):
    doc = gen_master(MasterParams(w))
    assert bits(doc, "env") == 10 + 3 * w
    assert bits(doc, "sys") == 11 + 3 * w


@pytest.mark.parametrize("w", [1, 2, 5])
def test_slave_bit_counts(w):
    doc = gen_slave(SlaveParams(w))
    assert bits(doc, "env") == 11 + 3 * w
    assert bits(doc, "sys") == 4 + 3 * w


@pytest.mark.parametrize("kind,k,render,params", [
    ("arbiter", 2, render_arbiter, ArbiterParams(2)),
    ("master", 1, render_master, MasterParams(1)),
    ("slave", 1, render_slave, SlaveParams(1)),
])
def test_golden_files(kind, k, render, params):
    path = GOLDEN / f"{file_name(kind, k)}.spec"
    assert render(params) == path.read_text()


def test_every_arbiter_property_is_present():
    text = render_arbiter(ArbiterParams(3))
    assert sorted(set(labels(text, "ENV_TRANS") + labels(text, "ENV_INIT") + labels(text, "ENV_FAIR")),
                  key=lambda s: int(s[1:])) == [f"A{i}" for i in range(1, 10)]
    assert sorted(set(labels(text, "SYS_TRANS") + labels(text, "SYS_INIT")),
                  key=lambda s: int(s[1:])) == [f"G{i}" for i in range(1, 13)]


def test_per_master_entries_scale():
    text = render_arbiter(ArbiterParams(4))
    assert labels(text, "SYS_TRANS").count("G11") == 4
    assert labels(text, "SYS_TRANS").count("G10") == 4   # three per-master plus the default grant


def test_arbiter_variant_moves_burst_rules_to_assumptions():
    lit = gen_arbiter(ArbiterParams(2))
    var = gen_arbiter(ArbiterParams(2, htrans_assumed=True))
    moved = set(lit.sys_trans) - set(var.sys_trans)
    assert moved and moved <= set(var.env_trans)
    assert all("U_w" in to_text(f) for f in moved)


def test_master_length_exclusion_text():
    assert "G(LENX -> !LEN1 || !LEN4)  # A5" in render_master(MasterParams(1))
    assert "G(LENX -> !LEN1 && !LEN4)" in render_master(MasterParams(1, prose_variant=True))


def test_slave_idle_when_unselected():
    assert "G(!HSEL -> HTRANS=IDLE && HBURST=SINGLE && !HWRITE && !START && !LAST)  # A1" \
        in render_slave(SlaveParams(1))


def test_generated_text_parses_back():
    for text, doc in ((render_arbiter(ArbiterParams(5)), gen_arbiter(ArbiterParams(5))),
                      (render_master(MasterParams(2)), gen_master(MasterParams(2))),
                      (render_slave(SlaveParams(2)), gen_slave(SlaveParams(2)))):
        assert parse_spec(text, doc.name) == doc


@pytest.mark.parametrize("n", [2, 8, 16])
def test_large_arbiters_normalize(n):
    spec = normalize(gen_arbiter(ArbiterParams(n)))
    assert len([m for m in spec.monitors if m.kind == "pending" and m.owner == "sys"]) == n


@pytest.mark.parametrize("doc", [gen_master(MasterParams(1)), gen_slave(SlaveParams(1))],
                         ids=["master", "slave"])
def test_components_are_realizable(doc):
    assert run_pipeline(doc, synthesize_circuit=False).realizable


def test_literal_arbiter_is_unrealizable_and_variant_is_not():
    assert not run_pipeline(gen_arbiter(ArbiterParams(2)), synthesize_circuit=False).realizable
    assert run_pipeline(gen_arbiter(ArbiterParams(2, htrans_assumed=True)), synthesize_circuit=False).realizable
