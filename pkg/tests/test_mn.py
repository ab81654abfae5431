import math

import pytest

from conftest import assert_defined_close
from oracles import inv_bar_oracle, mu_from_roots, zero_test_oracle
from rrcalc import iterate, stdlib
from rrcalc.config import MnCombine, MnDomain, SemanticsConfig, SolverTolerances
from rrcalc.evaluate import EvalContext
from rrcalc.outcome import UndefReason
from rrcalc.surface import parse
from rrcalc.term import mk_cm, mk_jx, mk_mn


def _cfg(**kw):
    # the scan machinery is under test; bodies evaluate through their
    # closed forms so whole-horizon sweeps stay affordable
    tol_kw = {k: kw.pop(k) for k in list(kw) if k in SolverTolerances.__dataclass_fields__}
    return SemanticsConfig(tol=SolverTolerances(**tol_kw), **kw)


def scan(term, point, **kw):
    return EvalContext(_cfg(**kw)).eval(term, point)


def scan_structural(term, point, **kw):
    cfg = SemanticsConfig(
        use_fast_paths=False,
        tol=SolverTolerances(**{k: kw.pop(k) for k in list(kw)}),
    )
    return EvalContext(cfg).eval(term, point)


def test_zero_test_values_match_root_enumeration():
    zq = iterate.zero_test()
    for x in (5.0, 0.3, -2.0, 0.0):
        want = zero_test_oracle(x)
        o = scan_structural(zq, (x,))
        assert o.defined and abs(o.value - want) < 1e-6, (x, o, want)


def test_inv_bar_values_match_root_enumeration():
    ib = iterate.inv_bar()
    for x in (2.0, -0.5, 0.0, 5.0):
        o = scan_structural(ib, (x,))
        assert o.defined and abs(o.value - inv_bar_oracle(x)) < 1e-6, (x, o)


def test_mn_of_sine_root_at_zero():
    o = scan(parse("mn(sin)"), ())
    assert_defined_close(o, 0.0, 1e-9)


def _stuck_body():
    # value 2 - t, domain restricted to t > 1 through a vacuous square root
    t = stdlib.proj(1, 2)
    val = stdlib.add_of(
        mk_cm(stdlib.rational_term(2), mk_jx([], 2)), stdlib.neg_of(t)
    )
    guard = stdlib.mul_of(
        stdlib.konst(0, 2),
        mk_cm(stdlib.build("sqrtp"), mk_jx([stdlib.add_of(t, stdlib.konst(-1, 2))])),
    )
    return mk_mn(stdlib.add_of(val, guard))


def test_search_gets_stuck_forward_but_not_root_only():
    body = _stuck_body()
    # forward definedness: the first undefined sample blocks the search
    o = scan(body, (0.0,), mn_domain=MnDomain.FORWARD)
    assert not o.defined
    assert o.reason is UndefReason.ROOT_NOT_FOUND
    # root-only definedness: undefined samples are skipped, the zero at 2
    # is found
    o = scan(body, (0.0,), mn_domain=MnDomain.ZERO_ONLY)
    assert o.defined and abs(o.value - 2.0) < 1e-6


def test_both_required_vs_either():
    # unlabelled wrapper: the scan itself runs, the body is fast
    zq = mk_mn(iterate.zero_test().body)
    # at x != 0 the only root is on the nonnegative side
    o = scan(zq, (3.0,), mn_combine=MnCombine.BOTH_REQUIRED, horizon=5.0, grid_delta=0.1)
    assert not o.defined and o.reason is UndefReason.BOTH_SIDES_TIE
    o = scan(zq, (3.0,), mn_combine=MnCombine.EITHER_SUFFICES)
    assert o.defined and abs(o.value - 1.0) < 1e-6


def _poly_body(c1, c2):
    """(t - c1)(t - c2) as a term of (v, t)."""
    t = stdlib.proj(1, 2)
    f1 = stdlib.add_of(t, mk_cm(stdlib.rational_term(str(-c1)), mk_jx([], 2)))
    f2 = stdlib.add_of(t, mk_cm(stdlib.rational_term(str(-c2)), mk_jx([], 2)))
    return mk_mn(stdlib.mul_of(f1, f2))


def test_tie_rule():
    # roots 1 and -0.6: the nonpositive one is closer to zero
    o = scan(_poly_body(1, "-3/5"), (0.0,))
    assert_defined_close(o, -0.6, 1e-8)
    # roots 0.5 and -0.9: the nonnegative one is strictly closer
    o = scan(_poly_body("1/2", "-9/10"), (0.0,))
    assert_defined_close(o, 0.5, 1e-8)
    # equidistant roots: the tie goes to the nonpositive side
    o = scan(_poly_body("1/2", "-1/2"), (0.0,))
    assert_defined_close(o, -0.5, 1e-8)


def test_no_roots_reports_horizon():
    body = mk_mn(stdlib.konst(1, 2))  # constant one: no zero anywhere
    o = scan(body, (0.0,), horizon=5.0, grid_delta=0.1)
    assert not o.defined
    assert o.reason is UndefReason.HORIZON_EXCEEDED


def _isolated_hole_body(half_width):
    # t - 2, undefined where (t-1)^2 < half_width^2
    t = stdlib.proj(1, 2)
    val = stdlib.add_of(t, mk_cm(stdlib.rational_term(-2), mk_jx([], 2)))
    u = stdlib.add_of(t, stdlib.konst(-1, 2))
    gap = stdlib.add_of(
        stdlib.mul_of(u, u),
        mk_cm(stdlib.rational_term(f"-{half_width}"), mk_jx([], 2)),
    )
    guard = stdlib.mul_of(stdlib.konst(0, 2), mk_cm(stdlib.build("invp"), mk_jx([gap])))
    return mk_mn(stdlib.add_of(val, guard))


def test_isolated_exceptions_tolerate_narrow_holes():
    body = _isolated_hole_body("1/250000")  # half-width 0.002 around t = 1
    o = scan(body, (0.0,), mn_domain=MnDomain.FORWARD)
    assert not o.defined  # the hole swallows the sample at 1.0
    o = scan(
        body, (0.0,), mn_domain=MnDomain.FORWARD, mn_isolated_exceptions=True
    )
    assert o.defined and abs(o.value - 2.0) < 1e-6
    # a fat hole is not isolated and stays blocking
    fat = _isolated_hole_body("1/100")  # half-width 0.1
    o = scan(fat, (0.0,), mn_domain=MnDomain.FORWARD, mn_isolated_exceptions=True)
    assert not o.defined


def test_symmetric_domain_requires_mirrored_definedness():
    # root at t = 2; domain hole at t = -1 only
    t = stdlib.proj(1, 2)
    val = stdlib.add_of(t, mk_cm(stdlib.rational_term(-2), mk_jx([], 2)))
    u = stdlib.add_of(t, stdlib.konst(1, 2))
    gap = stdlib.add_of(
        stdlib.mul_of(u, u), mk_cm(stdlib.rational_term("-1/2500"), mk_jx([], 2))
    )
    guard = stdlib.mul_of(stdlib.konst(0, 2), mk_cm(stdlib.build("invp"), mk_jx([gap])))
    body = mk_mn(stdlib.add_of(val, guard))
    o = scan(body, (0.0,), mn_domain=MnDomain.FORWARD)
    assert o.defined and abs(o.value - 2.0) < 1e-6  # hole is behind, [0,2] clean
    o = scan(body, (0.0,), mn_domain=MnDomain.SYMMETRIC)
    assert not o.defined  # [-2, 2] includes the hole


def test_all_reals_flags_approximation():
    o = scan(parse("mn(sin)"), (), mn_domain=MnDomain.ALL_REALS, horizon=5.0, grid_delta=0.1)
    assert o.defined and abs(o.value) < 1e-9
    assert "approximate" in (o.witness or "")
    # a far-away hole invalidates the whole search under this variant
    t = stdlib.proj(1, 2)
    far = stdlib.add_of(t, mk_cm(stdlib.rational_term(-3), mk_jx([], 2)))
    guard = stdlib.mul_of(stdlib.konst(0, 2), mk_cm(stdlib.build("sqrtp"), mk_jx([far])))
    body = mk_mn(stdlib.add_of(mk_cm(stdlib.build("sin"), mk_jx([t])), guard))
    o = scan(body, (0.0,), mn_domain=MnDomain.ALL_REALS, horizon=5.0, grid_delta=0.1)
    assert not o.defined


def test_argmin_stable_under_fine_rescan():
    zq = mk_mn(iterate.zero_test().body)
    ib = mk_mn(iterate.inv_bar().body)
    for term, x in [(zq, 4.0), (zq, 0.0), (ib, 2.0), (ib, -3.0)]:
        coarse = scan(term, (x,))
        fine = scan(term, (x,), grid_delta=1e-2 / 16)
        assert coarse.defined and fine.defined
        assert abs(coarse.value - fine.value) < 1e-6


def test_isolated_exceptions_rejected_for_root_only():
    with pytest.raises(ValueError):
        SemanticsConfig(mn_domain=MnDomain.ZERO_ONLY, mn_isolated_exceptions=True)
