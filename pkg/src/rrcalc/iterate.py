"""Iteration of a map compiled into the term language.

The construction couples two registers per component: during the first half
of each unit time interval the active register ramps linearly from the
current iterate to its image under the map while the holding register is
frozen; during the second half the roles flip and the holding register is
renormalized onto the ramped value, arriving exactly at the next iterate on
the half-integer grid.  A clock term gates the two phases, a triangle wave
with its total reciprocal provides the renormalization rate, and the map's
argument is guarded so the map is only ever probed at points that are
provably in its domain (dropping the guard breaks iteration of partial
maps, which a regression test pins).

All helper terms are closed constructions over the zero-search operator;
their registered closed forms realize the ideal total semantics, while the
scan-based route is horizon-bounded (agreement is tested where the scan can
resolve).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .evaluate import FastPath, register_fastpath
from .outcome import Undef, UndefReason
from .stdlib import (
    NAMED_BUILDERS,
    add_of,
    konst,
    mul_of,
    neg_of,
    proj,
    rational_term,
    build,
)
from .term import Cm, Jx, Mn, Pr, Term, mk_cm, mk_jx, mk_mn

_CACHE: dict = {}


def _cached(name: str, make):
    t = _CACHE.get(name)
    if t is None:
        t = make()
        _CACHE[name] = t
    return t


def _lift(nullary: Term, n: int) -> Term:
    return mk_cm(nullary, mk_jx([], n)) if n > 0 else nullary


def _sub(a: Term, b: Term) -> Term:
    return add_of(a, neg_of(b))


def zero_test() -> Term:
    """1 at arguments with no zero reachable before y = 1; 0 near zero.

    The displayed zero search has roots y = 1 always and y = 0 exactly at
    argument 0, so the scan semantics make this the indicator of the
    *nonzero* reals despite the name's suggestion.
    """

    def make():
        x, y = proj(0, 2), proj(1, 2)
        body = mul_of(
            add_of(mul_of(x, x), mul_of(y, y)),
            add_of(konst(1, 2), neg_of(y)),
        )
        return Mn(body, label=("zero_q",))

    return _cached("zero_q", make)


def integer_test() -> Term:
    def make():
        x = proj(0, 1)
        pi1 = _lift(build("pi"), 1)
        return Cm(
            zero_test(),
            mk_cm(build("sin"), mul_of(pi1, x)),
            label=("integer_q",),
        )

    return _cached("integer_q", make)


def round_term() -> Term:
    """Nearest integer, half-up: the zero search lands on the offset whose
    removal makes the argument integral, ties resolved toward the
    nonpositive side."""

    def make():
        x2, r2 = proj(0, 2), proj(1, 2)
        body = mk_cm(integer_test(), _sub(x2, r2))
        mu = mk_mn(body)
        return Cm(
            build("add"),
            mk_jx([proj(0, 1), neg_of(mu)]),
            label=("round",),
        )

    return _cached("round", make)


def inv_bar() -> Term:
    """Total reciprocal: 1/x away from zero and 0 at zero."""

    def make():
        x, t = proj(0, 2), proj(1, 2)
        body = mul_of(x, add_of(mul_of(x, t), konst(-1, 2)))
        return Mn(body, label=("inv_bar",))

    return _cached("inv_bar", make)


def digit_term() -> Term:
    """Digit of x in the b^i place (b > 0), via shifted half-up rounding."""

    def make():
        x, b, i = proj(0, 3), proj(1, 3), proj(2, 3)
        half = _lift(rational_term("1/2"), 3)
        lnb = mk_cm(build("ln"), b)

        def pw(expo: Term) -> Term:  # b ** -expo
            return mk_cm(build("exp"), mul_of(neg_of(expo), lnb))

        def rnd(u: Term) -> Term:
            return mk_cm(round_term(), _sub(u, half))

        r1 = rnd(mul_of(x, pw(i)))
        r2 = rnd(mul_of(x, pw(add_of(i, konst(1, 3)))))
        out = _sub(r1, mul_of(b, r2))
        return Cm(out.outer, out.inner, label=("digit",))

    return _cached("digit", make)


def clk_term() -> Term:
    """Square-wave clock: the first fractional binary digit of the time."""

    def make():
        t = proj(0, 1)
        two = _lift(rational_term(2), 1)
        inner = mk_cm(digit_term(), mk_jx([t, two, konst(-1, 1)]))
        return Cm(inner.outer, inner.inner, label=("clk",))

    return _cached("clk", make)


def zigzag_term() -> Term:
    """Triangle wave integrating the clock's complement, period 1."""

    def make():
        tau = proj(0, 2)
        two = _lift(rational_term(2), 2)
        four = _lift(rational_term(4), 2)
        step = _sub(two, mul_of(four, mk_cm(clk_term(), tau)))
        return Pr(konst(0, 0), step, breakpoints=0.5, label=("zigzag",))

    return _cached("zigzag", make)


@dataclass(frozen=True)
class IterationBundle:
    zero_q: Term
    integer_q: Term
    round: Term
    inv_bar: Term
    digit: Term
    clk: Term
    zigzag: Term


def build_helpers() -> IterationBundle:
    return IterationBundle(
        zero_q=zero_test(),
        integer_q=integer_test(),
        round=round_term(),
        inv_bar=inv_bar(),
        digit=digit_term(),
        clk=clk_term(),
        zigzag=zigzag_term(),
    )


def build_iteration_system(f: Term) -> Term:
    """The coupled 2m-component recursion; outputs (ramp, hold) registers."""
    m = f.inputs
    if f.outputs != m or m < 1:
        raise ValueError(f"iterated map must be m->m with m >= 1, got {f.arity}")
    n_in = 3 * m + 1  # v..., tau, g..., h...
    tau = proj(m, n_in)
    clk_tau = mk_cm(clk_term(), tau)
    one_minus_clk = _sub(konst(1, n_in), clk_tau)
    rate = mk_cm(inv_bar(), mk_cm(zigzag_term(), tau))
    two = _lift(rational_term(2), n_in)

    vs = [proj(i, n_in) for i in range(m)]
    gs = [proj(m + 1 + i, n_in) for i in range(m)]
    hs = [proj(2 * m + 1 + i, n_in) for i in range(m)]

    # the guard pins the map's argument to v while the hold register moves
    guarded = [
        _sub(hs[i], mul_of(clk_tau, _sub(hs[i], vs[i]))) for i in range(m)
    ]
    f_at = mk_cm(f, mk_jx(guarded))
    rows = []
    for i in range(m):
        f_i = mk_cm(proj(i, m), f_at) if m > 1 else f_at
        # subtracting the frozen hold register makes the ramp linear, so it
        # lands exactly on the next iterate at the half-integer
        rows.append(mul_of(two, mul_of(one_minus_clk, _sub(f_i, hs[i]))))
    for i in range(m):
        rows.append(mul_of(two, mul_of(clk_tau, mul_of(_sub(gs[i], hs[i]), rate))))
    init = mk_jx([proj(i % m, m) for i in range(2 * m)])
    return Pr(init, mk_jx(rows), breakpoints=0.5)


def build_iteration(f: Term) -> Term:
    """Term of arity (m+1) -> m whose value at (v, k - 1/2) is the k-th
    iterate of f at v, for positive integers k with v in the k-fold domain."""
    m = f.inputs
    system = build_iteration_system(f)
    if m == 1:
        return mk_cm(proj(0, 2), system)
    return mk_cm(mk_jx([proj(i, 2 * m) for i in range(m)]), system)


def iteration_oracle(
    f_native: Callable, v: tuple, k: int
) -> Optional[tuple]:
    """Literal k-fold application with definedness tracking (None when any
    intermediate application is undefined)."""
    if k < 1:
        raise ValueError("iteration count must be positive")
    x = tuple(float(c) for c in v)
    for _ in range(k):
        x = f_native(x)
        if x is None:
            return None
        x = tuple(float(c) for c in x)
    return x


# ------------------------------------------------------------- fast paths


def _sc_zero_q(args, ctx, node):
    x = args[0]
    return (0.0,) if x * x < ctx.cfg.tol.root_eps else (1.0,)


def _sc_integer_q(args, ctx, node):
    s = math.sin(math.pi * args[0])
    return (0.0,) if s * s < ctx.cfg.tol.root_eps else (1.0,)


def _sc_round(args, ctx, node):
    return (float(math.floor(args[0] + 0.5)),)


def _sc_inv_bar(args, ctx, node):
    x = args[0]
    if x == 0.0:
        return (0.0,)
    r = 1.0 / x
    if not math.isfinite(r):
        raise Undef(UndefReason.NUMERICAL_FAILURE, "reciprocal overflow")
    return (r,)


def _sc_digit(args, ctx, node):
    x, b, i = args
    if b <= 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "digit base must be positive")
    p = math.pow(b, -i)
    q = math.pow(b, -i - 1.0)
    r = math.floor(x * p) - b * math.floor(x * q)
    if not math.isfinite(r):
        raise Undef(UndefReason.NUMERICAL_FAILURE, "digit place overflow")
    return (r,)


def _sc_clk(args, ctx, node):
    t = args[0]
    return (math.floor(2.0 * t) - 2.0 * math.floor(t),)


def _sc_zigzag(args, ctx, node):
    t = args[0]
    frac = t - math.floor(t)
    return (2.0 * frac if frac <= 0.5 else 2.0 * (1.0 - frac),)


for _name, _fn in [
    ("zero_q", _sc_zero_q),
    ("integer_q", _sc_integer_q),
    ("round", _sc_round),
    ("inv_bar", _sc_inv_bar),
    ("digit", _sc_digit),
    ("clk", _sc_clk),
    ("zigzag", _sc_zigzag),
]:
    register_fastpath(_name, FastPath(_fn, jet=None))

NAMED_BUILDERS.update(
    {
        "zero_q": zero_test,
        "integer_q": integer_test,
        "round": round_term,
        "inv_bar": inv_bar,
        "digit": digit_term,
        "clk": clk_term,
        "zigzag": zigzag_term,
    }
)
