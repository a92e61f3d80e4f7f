import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gr1forge.amba import ArbiterParams, MasterParams, SlaveParams, gen_arbiter, gen_master, gen_slave
from gr1forge.formula import (Always, And, Atom, Before, Const, Eventually, Iff, Implies, Next, Not, Or,
                              UntilW, UntilWCount, document_to_text, next_depth, to_text)
from gr1forge.parser import SpecError, SpecSyntaxError, parse_formula, parse_spec

HEADER = """[SIGNALS]
REQ : env : bool
MODE : env : enum{IDLE,BUSY,DONE}
ACK : sys : bool
DATA : sys : vec<2>
"""


def spec_with(section: str, line: str) -> str:
    return HEADER + f"\n[{section}]\n{line}\n"


# -- formulas ------------------------------------------------------------

def test_precedence_and_associativity():
    f = parse_formula("a || b && !c -> d -> e <-> f")
    a, b, c, d, e, g = (Atom(x) for x in "abcdef")
    assert f == Iff(Implies(Or((a, And((b, Not(c))))), Implies(d, e)), g)


def test_temporal_calls():
    f = parse_formula("G(p -> X(U_w(q, r)))")
    assert f == Always(Implies(Atom("p"), Next(UntilW(Atom("q"), Atom("r")))))
    assert parse_formula("U_w[3](q, r)") == UntilWCount(Atom("q"), Atom("r"), 3)
    assert parse_formula("BEFORE(a, b)") == Before(Atom("a"), Atom("b"))


def test_keyword_spellings():
    assert parse_formula("always eventually HREADY") == Always(Eventually(Atom("HREADY")))
    f = parse_formula("always (HTRANS=IDLE -> next (HTRANS != SEQ))")
    assert f == Always(Implies(Atom("HTRANS", "IDLE"), Next(Not(Atom("HTRANS", "SEQ")))))


def test_constants_and_next_depth():
    assert parse_formula("TRUE") == Const(True)
    assert next_depth(parse_formula("X(a) && X(X(b))")) == 2


def test_count_must_be_positive():
    with pytest.raises(SpecError):
        parse_formula("U_w[0](a, b)")


@pytest.mark.parametrize("text,col", [("a &&", 5), ("(a || b", 8), ("a b", 3), ("G(a", 4)])
def test_syntax_errors_carry_position(text, col):
    with pytest.raises(SpecSyntaxError) as info:
        parse_formula(text, line=4)
    assert info.value.line == 4
    assert info.value.col == col


ATOMS = st.sampled_from([Atom("a"), Atom("b"), Atom("c"), Atom("MODE", "BUSY"), Const(False)])


def _formulas():
    def extend(children):
        two = st.tuples(children, children)
        return st.one_of(
            children.map(Not),
            children.map(Next),
            children.map(Always),
            children.map(Eventually),
            two.map(lambda p: Implies(*p)),
            two.map(lambda p: Iff(*p)),
            two.map(lambda p: UntilW(*p)),
            two.map(lambda p: Before(*p)),
            st.tuples(children, children, st.integers(1, 4)).map(lambda p: UntilWCount(*p)),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
        )
    return st.recursive(ATOMS, extend, max_leaves=8)


@settings(max_examples=400, deadline=None)
@given(_formulas())
def test_print_parse_round_trip(f):
    assert parse_formula(to_text(f)) == f


# -- documents -----------------------------------------------------------

def test_sections_and_comments():
    doc = parse_spec(HEADER + """
[ENV_INIT]
!REQ   # comment
[SYS_TRANS]
G(REQ -> X(ACK))
[ENV_FAIR]
always eventually REQ
""", "demo")
    assert doc.name == "demo"
    assert doc.env_init == (Not(Atom("REQ")),)
    assert len(doc.sys_trans) == 1 and doc.sys_fair == ()
    assert [d.name for d in doc.decls] == ["REQ", "MODE", "ACK", "DATA"]


@pytest.mark.parametrize("kind,n", [("arbiter", 2), ("arbiter", 5), ("master", 1), ("master", 2),
                                    ("slave", 1), ("slave", 3)])
def test_generated_documents_round_trip(kind, n):
    gen = {"arbiter": lambda: gen_arbiter(ArbiterParams(n)),
           "master": lambda: gen_master(MasterParams(n)),
           "slave": lambda: gen_slave(SlaveParams(n))}[kind]
    doc = gen()
    text = document_to_text(doc)
    again = parse_spec(text, doc.name)
    assert again == doc
    assert document_to_text(again) == text


@pytest.mark.parametrize("text,line", [
    (spec_with("SYS_TRANS", "G(NOPE)"), 8),
    (spec_with("SYS_TRANS", "G(MODE=RUN)"), 8),
    (spec_with("ENV_INIT", "X(REQ)"), 8),
    (spec_with("SYS_FAIR", "G(F(REQ) && ACK)"), 8),
    (HEADER + "BAD : env : float\n", 6),
    (HEADER + "REQ : sys : bool\n", 6),
    (HEADER + "\n[SIGNALS]\n", 7),
    ("G(a)\n", 1),
    (HEADER + "[NOT_A_SECTION]\n", 6),
])
def test_document_errors_report_line(text, line):
    with pytest.raises(SpecError) as info:
        parse_spec(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}")


def test_error_column_for_bad_token():
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec(spec_with("SYS_TRANS", "G(REQ -> -> ACK)"))
    assert (info.value.line, info.value.col) == (8, 10)
