"""Numerical differential-algebraicity probe.

A function is differentially algebraic along a coordinate when some nonzero
polynomial in the function and its first N derivatives vanishes identically.
The probe assembles, at sample points, the matrix of all monomials of total
degree at most d in (f, Df, ..., D^N f); a tiny smallest singular value
exposes a candidate annihilating polynomial (the corresponding null vector),
which is then validated on fresh points.  Failure to find one at a fixed
budget is evidence against such a relation at that budget, calibrated by
control functions that do satisfy low-order relations.

Derivatives come from jets propagated through the term; the Wronskian
reducer cross-checks a found candidate by the classical linear-dependence
determinant of its monomial functions.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import jets as jetlib
from .config import DEFAULT_CONFIG, SemanticsConfig
from .evaluate import EvalContext
from .outcome import EvalOutcome, NonAnalyticNode, Undef, undefined
from .term import Term


class InsufficientPoints(Exception):
    pass


def jet(term: Term, point, direction: int, order: int, cfg: SemanticsConfig = None, ctx: EvalContext = None):
    """Taylor jets of each output along one coordinate, or an undefined
    outcome; non-smooth operators raise NonAnalyticNode."""
    ctx = ctx or EvalContext(cfg or DEFAULT_CONFIG)
    try:
        return ctx.jets(term, point, direction, order)
    except Undef as u:
        return u.outcome()


def derivatives_at(
    term: Term, point, direction: int, order: int, ctx: EvalContext
) -> tuple:
    """(f, Df, ..., D^order f) at the point; scalar-output terms only."""
    js = ctx.jets(term, point, direction, order)
    if len(js) != 1:
        raise ValueError("the probe handles scalar-valued terms only")
    return tuple(js[0].derivative_value(k) for k in range(order + 1))


def monomials(n_vars: int, degree: int) -> tuple:
    """Exponent tuples of total degree <= degree (constant included)."""
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_vars), total):
            e = [0] * n_vars
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return tuple(out)


def _mono_value(exps: tuple, derivs: Sequence[float]) -> float:
    val = 1.0
    for e, z in zip(exps, derivs):
        if e:
            val *= z ** e
    return val


@dataclass(frozen=True)
class AnnihilatorCandidate:
    order: int
    degree: int
    monomials: tuple  # exponent tuples over (f, Df, ..., D^order f)
    coeffs: tuple  # unit Euclidean norm
    residual: float
    sigma_min: float

    def value_at(self, derivs: Sequence[float]) -> float:
        return math.fsum(
            c * _mono_value(e, derivs) for c, e in zip(self.coeffs, self.monomials)
        )

    def partial(self, var: int) -> "AnnihilatorCandidate":
        """Formal partial derivative with respect to variable ``var``."""
        coeffs = []
        monos = []
        for c, e in zip(self.coeffs, self.monomials):
            if e[var]:
                d = list(e)
                d[var] -= 1
                coeffs.append(c * e[var])
                monos.append(tuple(d))
        return AnnihilatorCandidate(
            self.order, self.degree, tuple(monos), tuple(coeffs), 0.0, 0.0
        )


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    sigma_min: float
    candidate: Optional[AnnihilatorCandidate] = None
    n_points: int = 0
    n_monomials: int = 0


def _equilibrate(matrix: np.ndarray) -> np.ndarray:
    scales = np.max(np.abs(matrix), axis=0)
    scales[scales == 0.0] = 1.0
    return matrix / scales, scales


def assemble_matrix(derivs_per_point, monos) -> np.ndarray:
    return np.array(
        [[_mono_value(e, dz) for e in monos] for dz in derivs_per_point],
        dtype=float,
    )


def decide(matrix: np.ndarray, eps: float):
    """(sigma_min, null_vector) after column equilibration; the decision is
    invariant to a common positive rescaling of any column."""
    scaled, scales = _equilibrate(matrix)
    _, s, vt = np.linalg.svd(scaled, full_matrices=False)
    sigma_min = float(s[-1])
    null_scaled = vt[-1]
    null = null_scaled / scales
    null = null / np.linalg.norm(null)
    return sigma_min, null


def find_annihilator(
    term: Term,
    points: Sequence,
    direction: int,
    order: int,
    degree: int,
    eps: float,
    cfg: SemanticsConfig = None,
    ctx: EvalContext = None,
) -> SearchOutcome:
    """Search for an annihilating polynomial on the sampled points.

    Points must lie in one connected component of the domain; the caller is
    responsible for that.  A candidate counts as found only if its residual
    on fresh midpoints stays below eps.
    """
    ctx = ctx or EvalContext(cfg or DEFAULT_CONFIG)
    monos = monomials(order + 1, degree)
    if len(points) < 2 * len(monos):
        raise InsufficientPoints(
            f"need at least {2 * len(monos)} points for {len(monos)} monomials"
        )
    derivs = [derivatives_at(term, p, direction, order, ctx) for p in points]
    matrix = assemble_matrix(derivs, monos)
    sigma_min, coeffs = decide(matrix, eps)
    if sigma_min >= eps:
        return SearchOutcome(False, sigma_min, None, len(points), len(monos))
    fresh = _midpoints(points, direction)
    cand = AnnihilatorCandidate(
        order, degree, monos, tuple(float(c) for c in coeffs), 0.0, sigma_min
    )
    residual = 0.0
    for p in fresh:
        dz = derivatives_at(term, p, direction, order, ctx)
        residual = max(residual, abs(cand.value_at(dz)))
    cand = AnnihilatorCandidate(
        order, degree, monos, cand.coeffs, residual, sigma_min
    )
    if residual >= eps:
        return SearchOutcome(False, sigma_min, cand, len(points), len(monos))
    return SearchOutcome(True, sigma_min, cand, len(points), len(monos))


def _midpoints(points, direction) -> list:
    pts = [tuple(float(c) for c in p) for p in points]
    pts.sort(key=lambda p: (p[:direction], p[direction]))
    out = []
    for a, b in zip(pts, pts[1:]):
        if a[:direction] == b[:direction] and a[direction + 1 :] == b[direction + 1 :]:
            mid = list(a)
            mid[direction] = 0.5 * (a[direction] + b[direction])
            out.append(tuple(mid))
    return out or pts  # degenerate spacing: revalidate on the originals


# ------------------------------------------------------------- probe report


@dataclass(frozen=True)
class ProbeReport:
    found: bool
    sigma_min: float
    order: int
    degree: int
    eps: float
    n_points: int
    n_monomials: int
    residual: Optional[float] = None
    coeffs: Optional[tuple] = None
    monomials: Optional[tuple] = None
    diagnostics: tuple = ()

    def to_dict(self) -> dict:
        d = {
            "found": self.found,
            "sigma_min": self.sigma_min,
            "order": self.order,
            "degree": self.degree,
            "eps": self.eps,
            "n_points": self.n_points,
            "n_monomials": self.n_monomials,
        }
        if self.found:
            d["residual"] = self.residual
            d["coefficients"] = [
                {"exponents": list(e), "coeff": c}
                for e, c in zip(self.monomials, self.coeffs)
                if abs(c) > 1e-12
            ]
        d["diagnostics"] = [list(x) for x in self.diagnostics]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def gamma_check_probe(
    Rs: Sequence[float],
    xs: Sequence[float],
    order: int = 2,
    degree: int = 2,
    eps: float = 1e-8,
    cfg: SemanticsConfig = None,
) -> ProbeReport:
    """Annihilator search for the truncated gamma term in the x direction,
    across all R slices simultaneously (one polynomial for the whole
    connected domain, which is what the multi-slice sampling realizes)."""
    from .stdlib import build

    ctx = EvalContext(cfg or DEFAULT_CONFIG)
    term = build("gamma")
    points = [(float(R), float(x)) for R in Rs for x in xs]
    out = find_annihilator(term, points, 1, order, degree, eps, ctx=ctx)
    diag = tuple(
        (p[0], p[1], derivatives_at(term, p, 1, order, ctx)[0]) for p in points
    )
    return ProbeReport(
        found=out.found,
        sigma_min=out.sigma_min,
        order=order,
        degree=degree,
        eps=eps,
        n_points=out.n_points,
        n_monomials=out.n_monomials,
        residual=out.candidate.residual if out.candidate else None,
        coeffs=out.candidate.coeffs if out.found else None,
        monomials=out.candidate.monomials if out.found else None,
        diagnostics=diag,
    )


# ------------------------------------------------------------- wronskian


@dataclass(frozen=True)
class WronskianReport:
    selected: tuple  # monomial exponent tuples entering the matrix
    dets: tuple  # |W| at each sample point
    max_abs: float

    def to_dict(self) -> dict:
        return {
            "selected": [list(e) for e in self.selected],
            "dets": list(self.dets),
            "max_abs": self.max_abs,
        }


def wronskian_reduce(
    candidate: AnnihilatorCandidate,
    term: Term,
    points: Sequence,
    direction: int,
    cfg: SemanticsConfig = None,
    ctx: EvalContext = None,
) -> WronskianReport:
    """Wronskian of the candidate's active monomial functions at the sample
    points.  Near-zero determinants confirm the linear dependence that an
    integer-coefficient strengthening would exploit; this is report-only."""
    ctx = ctx or EvalContext(cfg or DEFAULT_CONFIG)
    cmax = max(abs(c) for c in candidate.coeffs)
    active = [
        e
        for c, e in zip(candidate.coeffs, candidate.monomials)
        if abs(c) > 1e-2 * cmax
    ]
    k = len(active)
    dets = []
    for p in points:
        w = wronskian_matrix(term, p, direction, active, candidate.order, ctx)
        dets.append(abs(float(np.linalg.det(w))))
    return WronskianReport(tuple(active), tuple(dets), max(dets))


def wronskian_matrix(
    term: Term, point, direction: int, monos, order: int, ctx: EvalContext
) -> np.ndarray:
    """Matrix of i-th derivatives of the monomial functions, i < len(monos)."""
    k = len(monos)
    depth = order + k  # f-jet order needed for D^(k-1) of degree-capped monomials
    js = ctx.jets(term, point, direction, depth)
    if len(js) != 1:
        raise ValueError("scalar-valued terms only")
    fj = js[0]
    cols = []
    for e in monos:
        u = jetlib.constant(1.0, k - 1) if k > 1 else jetlib.constant(1.0, 0)
        for var, exp in enumerate(e):
            if exp:
                dv = jetlib.shift_derivative(fj, var)
                dv = jetlib.Jet(dv.coeffs[: k])  # truncate to order k-1
                for _ in range(exp):
                    u = u * dv
        cols.append([u.derivative_value(i) for i in range(k)])
    return np.array(cols, dtype=float).T


# ----------------------------------------------- implicit-derivative check


def predict_derivatives(candidate: AnnihilatorCandidate, derivs: Sequence[float]):
    """Predict the next two derivatives from the annihilating relation.

    Differentiating P(f, ..., D^N f) = 0 along the coordinate expresses
    D^(N+1) f through the lower ones whenever the partial in the top
    variable does not vanish; differentiating once more gives D^(N+2) f.
    """
    n_top = candidate.order
    parts = [candidate.partial(v) for v in range(n_top + 1)]
    top = parts[n_top].value_at(derivs)
    if abs(top) < 1e-9:
        raise ZeroDivisionError("relation degenerate in the top derivative")
    rest = math.fsum(
        parts[v].value_at(derivs) * derivs[v + 1] for v in range(n_top)
    )
    z1 = -rest / top  # D^(N+1) f
    ext = list(derivs) + [z1]
    second = 0.0
    for v in range(n_top + 1):
        for w in range(n_top + 1):
            pw = parts[v].partial(w)
            second += pw.value_at(derivs) * ext[w + 1] * ext[v + 1]
    for v in range(n_top):
        second += parts[v].value_at(derivs) * ext[v + 2]
    z2 = -second / top  # D^(N+2) f
    return z1, z2
