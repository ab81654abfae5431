import pytest
from hypothesis import given

from rrcalc import stdlib
from rrcalc.surface import ParseError, parse, print_term
from rrcalc.term import Arity, ArityMismatch, PrVariant

from test_term import terms


def test_parse_names_and_arities():
    assert parse("cm(exp, ln)").arity == Arity(1, 1)
    assert parse("mn(sin)").arity == Arity(0, 1)
    assert parse("trig").arity == Arity(1, 2)
    assert parse("proj(1, 3)").arity == Arity(3, 1)
    assert parse("jx[2](proj(0,2), proj(1,2))").arity == Arity(2, 2)
    assert parse("jx[5]()").arity == Arity(5, 0)


def test_parse_canonical_constructions():
    # the sum's construction: recursion from the first projection with a
    # constant-one step over three inputs
    src = "pr(proj(0,1); cm(one, jx[3]()))"
    assert parse(src) == stdlib.build("add")
    assert parse("pr(cm(zero, jx[1]()); proj(0,3))") == stdlib.build("mul")


def test_parse_variants():
    assert parse("pr(proj(0,1); cm(one, jx[3]()))").variant is None
    assert parse("prs(proj(0,1); cm(one, jx[3]()))").variant is PrVariant.STRICT
    assert parse("prc(proj(0,1); cm(one, jx[3]()))").variant is PrVariant.CAMPAGNOLO


def test_parse_literals():
    t = parse("lit(3)")
    assert t == stdlib.rational_term(3)
    assert parse("lit(-7/3)") == stdlib.rational_term("-7/3")
    assert parse("lit(0.5)") == stdlib.rational_term("1/2")
    # sugar is expanded, so printing yields core syntax
    assert "lit" not in print_term(t)
    assert parse(print_term(t)) == t


def test_parse_errors_carry_offsets():
    with pytest.raises(ParseError) as e:
        parse("cm(exp,)")
    assert e.value.offset == 7
    with pytest.raises(ParseError):
        parse("nosuchname")
    with pytest.raises(ParseError):
        parse("cm(exp, ln) trailing")
    with pytest.raises(ParseError):
        parse("jx()")
    with pytest.raises(ArityMismatch):
        parse("cm(exp, trig)")
    with pytest.raises(ArityMismatch):
        parse("jx[1](sin, one)")


def test_print_named():
    assert print_term(parse("mn(sin)")) == "mn(sin)"
    assert print_term(stdlib.build("mul")) == "mul"
    assert print_term(stdlib.proj(0, 3)) == "proj(0,3)"


@given(terms())
def test_round_trip(t):
    assert parse(print_term(t)) == t


def test_round_trip_of_helper_terms():
    # helper terms print in core syntax (their names are not grammar words)
    from rrcalc import iterate

    b = iterate.build_helpers()
    for t in (b.zero_q, b.round, b.inv_bar, b.clk, b.zigzag):
        assert parse(print_term(t)) == t
