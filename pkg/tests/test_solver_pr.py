import math
import random

import pytest

from conftest import assert_defined_close
from rrcalc import stdlib
from rrcalc.config import SemanticsConfig, SolverTolerances
from rrcalc.evaluate import EvalContext
from rrcalc.outcome import UndefReason
from rrcalc.surface import parse
from rrcalc.term import PrVariant, mk_cm, mk_jx, mk_pr


def k_term(variant):
    """Integral of 1/sqrt(|t-1|) from -2: the inner composite has an
    isolated singularity at exactly 1."""
    x = stdlib.proj(0, 1)
    sq = stdlib.mul_of(
        stdlib.add_of(x, stdlib.konst(-1, 1)), stdlib.add_of(x, stdlib.konst(-1, 1))
    )
    g = mk_cm(
        stdlib.build("invp"),
        mk_cm(stdlib.build("sqrtp"), mk_cm(stdlib.build("sqrtp"), mk_jx([sq]))),
    )
    minus_two = stdlib.rational_term(-2)
    step = mk_cm(g, mk_jx([stdlib.proj(0, 2)]))
    return mk_pr(minus_two, step, variant)


def k_closed(t):
    return 2.0 * math.sqrt(t - 1.0) if t >= 1.0 else -2.0 * math.sqrt(1.0 - t)


def test_mul_add_exact(ctx, slow_ctx):
    mul, add = stdlib.build("mul"), stdlib.build("add")
    for a, b in [(3.0, 4.0), (-2.5, 0.5), (0.0, 7.0)]:
        assert_defined_close(slow_ctx.eval(mul, (a, b)), a * b, 1e-9)
        assert_defined_close(slow_ctx.eval(add, (a, b)), a + b, 1e-9)


def test_time_zero_requires_integrand(ctx):
    # at time 0 the value is the anchor, but only when the integrand is
    # defined there
    t = parse("pr(one; cm(invp, jx[2](proj(0,2))))")  # integrand 1/tau
    o = ctx.eval(t, (0.0,))
    assert not o.defined
    t2 = parse("pr(one; cm(invp, jx[2](cm(one, jx[2]()))))")  # integrand 1/1
    assert_defined_close(ctx.eval(t2, (0.0,)), 1.0)


def test_tan_like_blow_up(ctx):
    tan_like = parse(
        "pr(zero; cm(add, jx[2](cm(one, jx[2]()),"
        " cm(mul, jx[2](proj(1,2), proj(1,2))))))"
    )
    assert_defined_close(ctx.eval(tan_like, (1.5,)), math.tan(1.5), 1e-6)
    o = ctx.eval(tan_like, (2.0,))
    assert o.reason is UndefReason.DIVERGED


def test_backward_integration(ctx):
    tan_like = parse(
        "pr(zero; cm(add, jx[2](cm(one, jx[2]()),"
        " cm(mul, jx[2](proj(1,2), proj(1,2))))))"
    )
    assert_defined_close(ctx.eval(tan_like, (-1.5,)), math.tan(-1.5), 1e-6)


def test_sqrt_variants_fast(ctx):
    sqrtp = stdlib.build("sqrtp")
    assert_defined_close(ctx.eval(sqrtp, (4.0,)), 2.0)
    assert not ctx.eval(sqrtp, (0.0,)).defined
    campa = EvalContext(SemanticsConfig(pr_default=PrVariant.CAMPAGNOLO))
    o = campa.eval(sqrtp, (0.0,))
    assert o.defined and abs(o.value) < 1e-5
    assert not campa.eval(sqrtp, (-1.0,)).defined


def test_sqrt_strict_structural_at_zero(slow_ctx):
    o = slow_ctx.eval(stdlib.build("sqrtp"), (0.0,))
    assert not o.defined
    assert_defined_close(slow_ctx.eval(stdlib.build("sqrtp"), (4.0,)), 2.0, 1e-8)


def test_k_function_strict_vs_tolerant(ctx):
    strict = k_term(PrVariant.STRICT)
    tolerant = k_term(PrVariant.CAMPAGNOLO)
    for t in (0.0, 0.5, 1.0, 1.5, 2.0):
        o = ctx.eval(tolerant, (t,))
        assert o.defined, (t, o)
        assert abs(o.value - k_closed(t)) < 1e-4, (t, o.value, k_closed(t))
    for t in (1.0, 1.5, 2.0):
        o = ctx.eval(strict, (t,))
        assert not o.defined, t
        assert o.reason is UndefReason.DOMAIN_BOUNDARY
        assert abs(o.boundary - 1.0) < 1e-6
    assert_defined_close(ctx.eval(strict, (0.5,)), k_closed(0.5), 1e-6)
    # the tolerant result warns that uniqueness is not guaranteed
    o = ctx.eval(tolerant, (2.0,))
    assert o.witness and "singular" in o.witness


def test_pole_not_crossable(ctx):
    # integrand 1/|t-1|: its one-sided antiderivative diverges, so the
    # shrinking-clearance increments do not converge and the crossing is
    # rejected
    tau = stdlib.proj(0, 2)
    u = stdlib.add_of(tau, stdlib.konst(-1, 2))
    step = mk_cm(
        stdlib.build("invp"),
        mk_cm(stdlib.build("sqrtp"), mk_jx([stdlib.mul_of(u, u)])),
    )
    pole = mk_pr(stdlib.konst(0, 0), step, PrVariant.CAMPAGNOLO)
    o = ctx.eval(pole, (2.0,))
    assert not o.defined
    assert o.reason is UndefReason.SINGULAR_NOT_INTEGRABLE
    # inside the singularity everything is ordinary
    assert_defined_close(ctx.eval(pole, (0.5,)), math.log(2.0), 1e-6)


def test_strict_zero_convexity_spotcheck(ctx):
    # where a strict recursion is defined at t, it is defined at all
    # intermediate times
    strict = k_term(PrVariant.STRICT)
    o = ctx.eval(strict, (0.9,))
    assert o.defined
    for s in [0.9 * i / 10 for i in range(11)]:
        assert ctx.eval(strict, (s,)).defined, s


def test_random_strict_zero_convexity():
    rng = random.Random(7)
    cfg = SemanticsConfig()
    checked = 0
    for trial in range(30):
        ctx = EvalContext(cfg)
        c0 = rng.choice([0.0, 1.0, -1.0, 0.5])
        a = rng.uniform(-1.5, 1.5)
        b = rng.uniform(-0.5, 0.5)
        shift = rng.uniform(0.2, 2.0)
        # h' = a*sin(h) + b + 1/(shift + tau): partial when tau <= -shift
        tau, h = stdlib.proj(0, 2), stdlib.proj(1, 2)
        step = stdlib.add_of(
            stdlib.add_of(
                stdlib.mul_of(
                    mk_cm(stdlib.rational_term(str(round(a, 3))), mk_jx([], 2)),
                    mk_cm(stdlib.build("sin"), mk_jx([h])),
                ),
                mk_cm(stdlib.rational_term(str(round(b, 3))), mk_jx([], 2)),
            ),
            mk_cm(
                stdlib.build("invp"),
                mk_jx([stdlib.add_of(tau, mk_cm(stdlib.rational_term(str(round(shift, 3))), mk_jx([], 2)))]),
            ),
        )
        node = mk_pr(stdlib.rational_term(str(round(c0, 3))), step)
        t = rng.uniform(-3.0, 3.0)
        o = ctx.eval(node, (t,))
        if not o.defined:
            continue
        checked += 1
        for i in range(1, 10):
            s = t * i / 10
            assert ctx.eval(node, (s,)).defined, (trial, s, t)
    assert checked >= 10


def test_tolerance_halving_consistency(slow_ctx):
    tight = EvalContext(SemanticsConfig(use_fast_paths=False, tol=SolverTolerances().halved()))
    for name, x in [("exp", 3.0), ("sin", 2.0), ("sqrtp", 7.0), ("ln", 4.0)]:
        a = slow_ctx.eval(stdlib.build(name), (x,))
        b = tight.eval(stdlib.build(name), (x,))
        assert abs(a.value - b.value) < 1e-9


def test_nested_recursion_memo(ctx):
    # gamma term: nested recursions inside the integrand, shared trajectories
    g = stdlib.build_gamma_check()
    o1 = ctx.eval(g, (2.0, 1.0))
    want = math.exp(-0.5) - math.exp(-2.0)
    assert abs(o1.value - want) < 1e-8


def test_horizon_guard(ctx):
    o = ctx.eval(stdlib.build("exp"), (2e4,))
    assert not o.defined
    assert o.reason in (UndefReason.HORIZON_EXCEEDED, UndefReason.DIVERGED)
