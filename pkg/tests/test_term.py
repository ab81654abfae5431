import pytest
from hypothesis import given, strategies as st

from rrcalc import stdlib
from rrcalc.term import (
    Arity,
    ArityMismatch,
    BadIndex,
    Cm,
    Const,
    Jx,
    Mn,
    Pr,
    PrVariant,
    Term,
    from_json,
    is_rpr,
    mk_cm,
    mk_const,
    mk_jx,
    mk_mn,
    mk_pr,
    strip_labels,
    to_json,
)


def test_constants():
    for which in (0, 1, -1):
        assert mk_const(which).arity == Arity(0, 1)
    with pytest.raises(Exception):
        mk_const(2)


def test_jx_arities():
    p = stdlib.proj(0, 1)
    assert mk_jx([p, p]).arity == Arity(1, 2)
    assert mk_jx([], 3).arity == Arity(3, 0)
    with pytest.raises(ArityMismatch):
        mk_jx([])  # empty juxtaposition needs a declared input arity
    with pytest.raises(ArityMismatch):
        mk_jx([stdlib.build("sin"), mk_const(1)])  # inputs disagree
    with pytest.raises(ArityMismatch):
        mk_jx([stdlib.build("trig")])  # children must be scalar-valued


def test_cm_arities():
    f = stdlib.build("add")  # 2->1
    g = mk_jx([stdlib.proj(0, 3), stdlib.proj(1, 3)])  # 3->2
    assert mk_cm(f, g).arity == Arity(3, 1)
    with pytest.raises(ArityMismatch):
        mk_cm(f, stdlib.proj(0, 3))  # 3->1 does not feed 2->1


def test_pr_arities():
    # the product construction: init 1->1, step 3->1, result 2->1
    mul = stdlib.build("mul")
    assert mul.arity == Arity(2, 1)
    assert isinstance(mul, Pr)
    with pytest.raises(ArityMismatch):
        mk_pr(stdlib.build("trig"), stdlib.konst(0, 4))  # step must be 4->2


def test_mn_arities():
    assert mk_mn(stdlib.build("sin")).arity == Arity(0, 1)
    body = stdlib.proj(2, 3)
    assert mk_mn(body).arity == Arity(2, 1)
    with pytest.raises(ArityMismatch):
        mk_mn(stdlib.build("trig"))  # body must be scalar-valued


def test_structural_equality_ignores_labels():
    mul = stdlib.build("mul")
    bare = strip_labels(mul)
    assert mul == bare
    assert hash(mul) == hash(bare)
    assert mul != stdlib.build("add")


def test_is_rpr():
    for name in stdlib.STD_NAMES:
        assert is_rpr(stdlib.build(name)), name
    assert not is_rpr(mk_mn(stdlib.build("sin")))
    k = mk_pr(mk_const(0), stdlib.konst(1, 2), PrVariant.CAMPAGNOLO)
    assert not is_rpr(k)
    assert is_rpr(mk_pr(mk_const(0), stdlib.konst(1, 2), PrVariant.STRICT))


def test_arity_examples():
    assert stdlib.build("mul").arity == Arity(2, 1)
    assert stdlib.build("pi").arity == Arity(0, 1)
    assert stdlib.build("trig").arity == Arity(1, 2)


def test_json_round_trip():
    for t in [
        stdlib.build("mul"),
        stdlib.build("gamma"),
        mk_mn(stdlib.build("sin")),
        mk_pr(mk_const(0), stdlib.konst(1, 2), PrVariant.CAMPAGNOLO),
        mk_jx([], 4),
        stdlib.rational_term("-7/3"),
    ]:
        assert from_json(to_json(t)) == t


# bottom-up arity recomputation must agree with the cached arity
def _recompute(t: Term) -> Arity:
    if isinstance(t, Const):
        return Arity(0, 1)
    if isinstance(t, Jx):
        return Arity(t.input_arity, len(t.children))
    if isinstance(t, Cm):
        return Arity(_recompute(t.inner).inputs, _recompute(t.outer).outputs)
    if isinstance(t, Pr):
        a = _recompute(t.init)
        return Arity(a.inputs + 1, a.outputs)
    if isinstance(t, Mn):
        return Arity(_recompute(t.body).inputs - 1, 1)
    raise AssertionError


@st.composite
def terms(draw, max_depth=4):
    depth = draw(st.integers(0, max_depth))
    if depth == 0:
        kind = draw(st.sampled_from(["const", "name", "proj"]))
        if kind == "const":
            return mk_const(draw(st.sampled_from([0, 1, -1])))
        if kind == "name":
            return stdlib.build(
                draw(st.sampled_from(["add", "mul", "invp", "sin", "exp", "pi"]))
            )
        n = draw(st.integers(1, 3))
        return stdlib.proj(draw(st.integers(0, n - 1)), n)
    sub = terms(max_depth=depth - 1)
    kind = draw(st.sampled_from(["jx", "cm", "pr", "mn"]))
    if kind == "jx":
        m = draw(st.integers(0, 3))
        k = draw(st.integers(0, 3))
        if k == 0:
            return mk_jx([], m)
        children = [
            stdlib.konst(draw(st.sampled_from([0, 1, -1])), m) for _ in range(k)
        ]
        return mk_jx(children, m)
    if kind == "cm":
        g = draw(sub)
        # wrap outputs into a matching projection to keep arities valid
        outer = stdlib.proj(0, g.outputs) if g.outputs >= 1 else None
        if outer is None:
            return g
        return mk_cm(outer, g)
    if kind == "pr":
        m = draw(st.integers(0, 2))
        init = stdlib.konst(draw(st.sampled_from([0, 1, -1])), m)
        step = stdlib.konst(draw(st.sampled_from([0, 1, -1])), m + 2)
        return mk_pr(init, step, draw(st.sampled_from([None, PrVariant.STRICT])))
    body = stdlib.konst(draw(st.sampled_from([0, 1, -1])), draw(st.integers(1, 3)))
    return mk_mn(body)


@given(terms())
def test_arity_consistency(t):
    assert _recompute(t) == t.arity
