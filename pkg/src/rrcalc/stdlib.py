"""Builders for the named function terms.

Every function here is an ordinary composite term over the three constants
and the juxtaposition/composition/recursion operators; nothing is an opaque
primitive.  Builders attach a label so the evaluator can substitute the
registered closed form, and tests pin the agreement between the two routes.

Projections are derived recursively; addition and multiplication come from
one-step recursions; the reciprocal, square root, logarithm and inverse
tangent are recursions whose integrands are earlier entries, composed with
an argument shift where the anchor point is not 0.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import jets as J
from .evaluate import FastPath, register_fastpath
from .outcome import Undef, UndefReason
from .term import (
    BadIndex,
    Cm,
    Const,
    Jx,
    Pr,
    Term,
    TermError,
    mk_cm,
    mk_jx,
)

_CACHE: dict = {}

STD_NAMES = (
    "add",
    "mul",
    "invp",
    "sqrtp",
    "ln",
    "exp",
    "sin",
    "cos",
    "trig",
    "arctan",
    "pi",
    "gamma",
)

#: extra named builders contributed by other modules (name -> fn(*args))
NAMED_BUILDERS: dict = {}


def _cached(key, make):
    t = _CACHE.get(key)
    if t is None:
        t = make()
        _CACHE[key] = t
    return t


def konst(value: int, n: int) -> Term:
    """The n-ary constant: nullary constant composed with the empty
    juxtaposition at input arity n."""
    if n == 0:
        return Const(value)
    return _cached(
        ("konst", value, n),
        lambda: Cm(Const(value), Jx((), n), label=("konst", value, n)),
    )


def proj(i: int, n: int) -> Term:
    """n-ary projection to component i, derived by recursion on n."""
    if not 0 <= i < n:
        raise BadIndex(f"projection index {i} out of range for arity {n}")
    return _cached(("proj", i, n), lambda: _mk_proj(i, n))


def _mk_proj(i: int, n: int) -> Term:
    if n == i + 1:
        # i parameters, the time argument is the projected coordinate
        return Pr(konst(0, i), konst(1, i + 2), label=("proj", i, n))
    return Pr(proj(i, n - 1), konst(0, n + 1), label=("proj", i, n))


def _add() -> Term:
    return Pr(proj(0, 1), konst(1, 3), label=("add",))


def _mul() -> Term:
    return Pr(konst(0, 1), proj(0, 3), label=("mul",))


def pair(a: Term, b: Term) -> Term:
    return mk_jx([a, b])


def add_of(a: Term, b: Term) -> Term:
    return mk_cm(build("add"), pair(a, b))


def mul_of(a: Term, b: Term) -> Term:
    return mk_cm(build("mul"), pair(a, b))


def neg_of(a: Term) -> Term:
    return mul_of(konst(-1, a.inputs), a)


def _shift_minus_one() -> Term:
    # x |-> x - 1
    return add_of(proj(0, 1), konst(-1, 1))


def _invp() -> Term:
    # f' = -f^2, f(0) = 1 solves f(t) = 1/(1+t) on (-1, inf)
    h = proj(1, 2)
    step = mul_of(konst(-1, 2), mul_of(h, h))
    f = Pr(Const(1), step)
    return Cm(f, _shift_minus_one(), label=("invp",))


def _sqrtp() -> Term:
    # f' = 1/(2 f), f(0) = 1 solves f(t) = sqrt(1+t) on (-1, inf)
    h = proj(1, 2)
    step = mk_cm(build("invp"), add_of(h, h))
    f = Pr(Const(1), step)
    return Cm(f, _shift_minus_one(), label=("sqrtp",))


def _ln() -> Term:
    # f' = 1/(1+t), f(0) = 0 solves f(t) = ln(1+t) on (-1, inf)
    tau = proj(0, 2)
    step = mk_cm(build("invp"), add_of(tau, konst(1, 2)))
    f = Pr(Const(0), step)
    return Cm(f, _shift_minus_one(), label=("ln",))


def _exp() -> Term:
    return Pr(Const(1), proj(1, 2), label=("exp",))


def _trig() -> Term:
    # coupled system (s, c)' = (c, -s) from (0, 1)
    init = mk_jx([Const(0), Const(1)])
    step = mk_jx([proj(2, 3), mul_of(konst(-1, 3), proj(1, 3))])
    return Pr(init, step, label=("trig",))


def _sin() -> Term:
    return Cm(proj(0, 2), build("trig"), label=("sin",))


def _cos() -> Term:
    return Cm(proj(1, 2), build("trig"), label=("cos",))


def _arctan() -> Term:
    tau = proj(0, 2)
    step = mk_cm(build("invp"), add_of(mul_of(tau, tau), konst(1, 2)))
    return Pr(Const(0), step, label=("arctan",))


def _pi() -> Term:
    a = mk_cm(build("arctan"), Const(1))  # arctan 1
    twice = add_of(a, a)
    return Cm(build("add"), pair(twice, twice), label=("pi",))


def _gamma_check() -> Term:
    """Two-parameter truncated gamma integral as a recursion term.

    H(x, s) integrates exp((x-1) ln(1+sigma) - (1+sigma)) for sigma from 0
    to s, i.e. the integrand in t = 1+sigma from 1 to 1+s; the result is
    H(x, R-1) - H(x, 1/R-1).  No closed form is registered for it: the
    term is always evaluated through its recursion, and the independent
    quadrature oracle below is the cross-check.
    """
    x = proj(0, 3)
    sigma = proj(1, 3)
    one_plus = add_of(sigma, konst(1, 3))
    expo = add_of(
        mul_of(add_of(x, konst(-1, 3)), mk_cm(build("ln"), one_plus)),
        mul_of(konst(-1, 3), one_plus),
    )
    h_node = Pr(konst(0, 1), mk_cm(build("exp"), expo))
    r, xx = proj(0, 2), proj(1, 2)
    upper = mk_cm(h_node, mk_jx([xx, add_of(r, konst(-1, 2))]))
    lower = mk_cm(
        h_node, mk_jx([xx, add_of(mk_cm(build("invp"), r), konst(-1, 2))])
    )
    diff = add_of(upper, neg_of(lower))
    return Cm(diff.outer, diff.inner, label=("gamma",))


_BUILDERS = {
    "add": _add,
    "mul": _mul,
    "invp": _invp,
    "sqrtp": _sqrtp,
    "ln": _ln,
    "exp": _exp,
    "trig": _trig,
    "sin": _sin,
    "cos": _cos,
    "arctan": _arctan,
    "pi": _pi,
    "gamma": _gamma_check,
}


def build(name: str) -> Term:
    """Named function as an explicit construction term."""
    if name not in _BUILDERS:
        raise TermError(f"unknown stdlib name {name!r}")
    return _cached(name, _BUILDERS[name])


def build_gamma_check() -> Term:
    return build("gamma")


def build_named(op: str, args: tuple = ()) -> Term:
    """Resolve a named node from the serialized tree form."""
    if op in ("zero", "one", "negone"):
        return Const({"zero": 0, "one": 1, "negone": -1}[op])
    if op == "konst":
        return konst(int(args[0]), int(args[1]))
    if op == "proj":
        return proj(int(args[0]), int(args[1]))
    if op == "lit":
        return rational_term(Fraction(args[0]))
    if op in _BUILDERS:
        return build(op)
    if op in NAMED_BUILDERS:
        return NAMED_BUILDERS[op](*args)
    raise TermError(f"unknown named node {op!r}")


# ------------------------------------------------------------ literal sugar


def int_term(n: int) -> Term:
    """Nullary integer via binary double-and-add over the constants."""
    if n < 0:
        return mul_of(Const(-1), int_term(-n))
    if n == 0:
        return Const(0)
    if n == 1:
        return Const(1)
    acc = Const(1)
    for bit in bin(n)[3:]:
        acc = add_of(acc, acc)
        if bit == "1":
            acc = add_of(acc, Const(1))
    return acc


def rational_term(q) -> Term:
    """Nullary rational constant, expanded over {0, 1, -1, add, mul, invp}.

    The label carries the value: the double-and-add chains share subterms,
    which tree-walking evaluation would otherwise re-expand exponentially.
    """
    q = Fraction(q)
    num = int_term(q.numerator)
    if q.denominator == 1:
        t = num
    else:
        t = mul_of(num, mk_cm(build("invp"), int_term(q.denominator)))
    if isinstance(t, Const):
        return t
    return Cm(t.outer, t.inner, label=("lit", float(q)))


# --------------------------------------------------------- quadrature oracle


class ConvergenceFailure(Exception):
    pass


def _integrand(t: float, x: float) -> float:
    return math.exp((x - 1.0) * math.log(t) - t)


def _simpson(f, a, fa, b, fb, m, fm) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adapt(f, a, fa, b, fb, m, fm, whole, eps, depth) -> float:
    if depth > 60:
        raise ConvergenceFailure(f"adaptive refinement exceeded depth 60 on [{a}, {b}]")
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = _simpson(f, a, fa, m, fm, lm, flm)
    right = _simpson(f, m, fm, b, fb, rm, frm)
    if abs(left + right - whole) <= 15.0 * eps:
        return left + right + (left + right - whole) / 15.0
    return _adapt(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth + 1) + _adapt(
        f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth + 1
    )


def quadrature_oracle(R: float, x: float, eps: float = 1e-10) -> float:
    """Adaptive-Simpson value of the truncated gamma integrand over
    [1/R, R]; wholly independent of the term evaluator."""
    if R <= 0.0 or x <= 0.0:
        raise ValueError("oracle requires R > 0 and x > 0")
    a, b = 1.0 / R, R
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    f = lambda t: _integrand(t, x)
    m = 0.5 * (a + b)
    fa, fb, fm = f(a), f(b), f(m)
    whole = _simpson(f, a, fa, b, fb, m, fm)
    return sign * _adapt(f, a, fa, b, fb, m, fm, whole, eps, 0)


# ------------------------------------------------------------- fast paths


def _sc_konst(args, ctx, node):
    return (float(node.label[1]),)


def _jt_konst(in_jets, order, ctx, node):
    return (J.constant(float(node.label[1]), order),)


def _sc_proj(args, ctx, node):
    return (args[node.label[1]],)


def _jt_proj(in_jets, order, ctx, node):
    return (in_jets[node.label[1]],)


def _sc_add(args, ctx, node):
    return (args[0] + args[1],)


def _sc_mul(args, ctx, node):
    return (args[0] * args[1],)


def _sc_invp(args, ctx, node):
    x = args[0]
    if x <= 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "reciprocal defined on (0, inf) only")
    return (1.0 / x,)


def _sqrt_at_zero_ok(ctx, node) -> bool:
    # the tolerant recursion flavour extends the square root to [0, inf)
    from .term import PrVariant

    return ctx.cfg.pr_default is PrVariant.CAMPAGNOLO


def _sc_sqrtp(args, ctx, node):
    x = args[0]
    if x > 0.0:
        return (math.sqrt(x),)
    if x == 0.0 and _sqrt_at_zero_ok(ctx, node):
        return (0.0,)
    raise Undef(UndefReason.OUT_OF_DOMAIN, "square root argument outside its domain")


def _sc_ln(args, ctx, node):
    x = args[0]
    if x <= 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "logarithm defined on (0, inf) only")
    return (math.log(x),)


def _sc_exp(args, ctx, node):
    x = args[0]
    if x > 709.0:
        raise Undef(UndefReason.DIVERGED, "exponential overflows binary64")
    return (math.exp(x),)


register_fastpath("konst", FastPath(_sc_konst, _jt_konst))
register_fastpath("proj", FastPath(_sc_proj, _jt_proj))
register_fastpath(
    "add", FastPath(_sc_add, lambda js, o, c, n: (js[0] + js[1],))
)
register_fastpath(
    "mul", FastPath(_sc_mul, lambda js, o, c, n: (js[0] * js[1],))
)
def _jt_invp(js, order, ctx, node):
    if js[0].value <= 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "reciprocal defined on (0, inf) only")
    return (J.reciprocal(js[0]),)


register_fastpath("invp", FastPath(_sc_invp, _jt_invp))
register_fastpath(
    "sqrtp", FastPath(_sc_sqrtp, lambda js, o, c, n: (J.jsqrt(js[0]),))
)
register_fastpath("ln", FastPath(_sc_ln, lambda js, o, c, n: (J.jlog(js[0]),)))
register_fastpath("exp", FastPath(_sc_exp, lambda js, o, c, n: (J.jexp(js[0]),)))
register_fastpath(
    "sin",
    FastPath(
        lambda a, c, n: (math.sin(a[0]),),
        lambda js, o, c, n: (J.jsin_cos(js[0])[0],),
    ),
)
register_fastpath(
    "cos",
    FastPath(
        lambda a, c, n: (math.cos(a[0]),),
        lambda js, o, c, n: (J.jsin_cos(js[0])[1],),
    ),
)
register_fastpath(
    "trig",
    FastPath(
        lambda a, c, n: (math.sin(a[0]), math.cos(a[0])),
        lambda js, o, c, n: J.jsin_cos(js[0]),
    ),
)
register_fastpath(
    "arctan",
    FastPath(
        lambda a, c, n: (math.atan(a[0]),),
        lambda js, o, c, n: (J.jatan(js[0]),),
    ),
)
register_fastpath(
    "pi",
    FastPath(lambda a, c, n: (math.pi,), lambda js, o, c, n: (J.constant(math.pi, o),)),
)
register_fastpath(
    "lit",
    FastPath(
        lambda a, c, n: (n.label[1],),
        lambda js, o, c, n: (J.constant(n.label[1], o),),
    ),
)
