"""Truncated Taylor-series arithmetic (jets).

A jet holds coefficients ``c[0..N]`` of a univariate expansion along one
direction; ``c[k]`` equals the k-th derivative over k!.  All arithmetic is
exact truncated-series algebra, so propagating coordinate jets through a
term yields its derivatives at the base point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .outcome import Undef, UndefReason


@dataclass(frozen=True)
class Jet:
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return self.coeffs[0]

    def is_constant(self) -> bool:
        return all(c == 0.0 for c in self.coeffs[1:])

    def __add__(self, other):
        other = _coerce(other, self.order)
        return Jet(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-_coerce(other, self.order))

    def __rsub__(self, other):
        return _coerce(other, self.order) + (-self)

    def __mul__(self, other):
        other = _coerce(other, self.order)
        a, b = self.coeffs, other.coeffs
        n = len(a)
        return Jet(
            tuple(
                math.fsum(a[j] * b[k - j] for j in range(k + 1))
                for k in range(n)
            )
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * reciprocal(_coerce(other, self.order))

    def __rtruediv__(self, other):
        return _coerce(other, self.order) * reciprocal(self)

    def derivative_value(self, k: int) -> float:
        """k-th derivative at the base point (k! times coefficient k)."""
        return math.factorial(k) * self.coeffs[k]


def _coerce(x, order: int) -> Jet:
    if isinstance(x, Jet):
        return x
    return constant(float(x), order)


def constant(c: float, order: int) -> Jet:
    return Jet((float(c),) + (0.0,) * order)


def variable(x: float, order: int) -> Jet:
    if order == 0:
        return Jet((float(x),))
    return Jet((float(x), 1.0) + (0.0,) * (order - 1))


def reciprocal(u: Jet) -> Jet:
    if u.coeffs[0] == 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "series reciprocal at zero")
    w = [1.0 / u.coeffs[0]]
    for k in range(1, len(u.coeffs)):
        w.append(-math.fsum(u.coeffs[j] * w[k - j] for j in range(1, k + 1)) * w[0])
    return Jet(tuple(w))


def jexp(u: Jet) -> Jet:
    e = [math.exp(u.coeffs[0])]
    for k in range(1, len(u.coeffs)):
        e.append(math.fsum(j * u.coeffs[j] * e[k - j] for j in range(1, k + 1)) / k)
    return Jet(tuple(e))


def jlog(u: Jet) -> Jet:
    if u.coeffs[0] <= 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "series logarithm off (0, inf)")
    l = [math.log(u.coeffs[0])]
    for k in range(1, len(u.coeffs)):
        s = math.fsum(j * l[j] * u.coeffs[k - j] for j in range(1, k))
        l.append((k * u.coeffs[k] - s) / (k * u.coeffs[0]))
    return Jet(tuple(l))


def jsin_cos(u: Jet):
    s = [math.sin(u.coeffs[0])]
    c = [math.cos(u.coeffs[0])]
    for k in range(1, len(u.coeffs)):
        s.append(math.fsum(j * u.coeffs[j] * c[k - j] for j in range(1, k + 1)) / k)
        c.append(-math.fsum(j * u.coeffs[j] * s[k - j] for j in range(1, k + 1)) / k)
    return Jet(tuple(s)), Jet(tuple(c))


def jatan(u: Jet) -> Jet:
    w = 1.0 + u * u
    a = [math.atan(u.coeffs[0])]
    for k in range(1, len(u.coeffs)):
        s = math.fsum(j * a[j] * w.coeffs[k - j] for j in range(1, k))
        a.append((k * u.coeffs[k] - s) / (k * w.coeffs[0]))
    return Jet(tuple(a))


def jsqrt(u: Jet) -> Jet:
    if u.coeffs[0] <= 0.0:
        raise Undef(UndefReason.OUT_OF_DOMAIN, "series square root off (0, inf)")
    s = [math.sqrt(u.coeffs[0])]
    for k in range(1, len(u.coeffs)):
        acc = math.fsum(s[j] * s[k - j] for j in range(1, k))
        s.append((u.coeffs[k] - acc) / (2.0 * s[0]))
    return Jet(tuple(s))


def compose(outer: Jet, delta: Jet) -> Jet:
    """outer(theta) evaluated at theta = delta, where delta[0] == 0."""
    if delta.coeffs[0] != 0.0:
        raise ValueError("composition requires a zero-constant inner jet")
    acc = constant(0.0, delta.order)
    for c in reversed(outer.coeffs):
        acc = acc * delta + c
    return acc


def shift_derivative(u: Jet, k: int) -> Jet:
    """Jet of the k-th derivative, truncated to order N - k."""
    n = u.order
    if k > n:
        raise ValueError(f"cannot take derivative {k} of an order-{n} jet")
    coeffs = tuple(
        u.coeffs[j + k] * math.factorial(j + k) / math.factorial(j)
        for j in range(n - k + 1)
    )
    return Jet(coeffs)
