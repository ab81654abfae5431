"""Term evaluation with full domain tracking.

Evaluation is strict: an expression has a value only when every
subexpression does, so undefinedness propagates as an exception from the
innermost violated clause.  Differential recursion solves an initial value
problem lazily in both directions with dense output, memoized per parameter
tuple; minimization scans outward from zero in expanding rings, refining
sign changes by bisection and sub-threshold samples by local minimization.

Labelled terms may be dispatched to registered closed forms ("fast paths")
when the config allows; the same registry carries truncated-series rules so
jets propagate through labelled nodes without integrating their defining
equations.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable, Optional

from . import jets as J
from .config import DEFAULT_CONFIG, MnCombine, MnDomain, SemanticsConfig
from .jets import Jet
from .outcome import (
    EvalOutcome,
    NonAnalyticNode,
    Undef,
    UndefReason,
    defined,
)
from .solver import OdeTrack, TrackStatus
from .term import Cm, Const, Jx, Mn, Pr, PrVariant, Term


class JetUnsupported(Exception):
    """Jet requested through a recursion node whose parameter and time
    inputs both vary along the probe direction (not needed by any built-in
    construction; compose through labelled fast paths instead)."""


@dataclass(frozen=True)
class FastPath:
    """Closed-form semantics of a labelled term."""

    scalar: Callable  # (args, ctx, node) -> tuple of floats, may raise Undef
    jet: Optional[Callable] = None  # (in_jets, order, ctx, node) -> tuple of Jet


FASTPATHS: dict = {}


def register_fastpath(name: str, fp: FastPath):
    FASTPATHS[name] = fp


def _pack(v: tuple) -> bytes:
    return struct.pack(f"<{len(v)}d", *v)


class PrTrajectory:
    """Dense solution of one recursion node at one parameter tuple."""

    def __init__(self, node: Pr, v: tuple, variant: PrVariant, ctx: "EvalContext"):
        self.node = node
        self.v = v
        self.variant = variant
        self.ctx = ctx
        self.y0 = ctx._vals(node.init, v)  # strict: may raise
        self.dead: Optional[Undef] = None
        try:
            self.rhs(0.0, self.y0)
        except Undef as u:
            self.dead = u
        self.tracks: dict = {}

    def rhs(self, tau: float, y: tuple) -> tuple:
        return self.ctx._vals(self.node.step, self.v + (tau,) + y)

    def value_at(self, t: float) -> tuple:
        if self.dead is not None:
            raise Undef(
                UndefReason.DOMAIN_BOUNDARY,
                f"integrand undefined at the anchor point: {self.dead.witness or self.dead.reason.value}",
                boundary=0.0,
            )
        if t == 0.0:
            return self.y0
        d = 1 if t > 0.0 else -1
        track = self.tracks.get(d)
        if track is None:
            track = OdeTrack(
                self.rhs,
                self.y0,
                d,
                self.ctx.cfg.tol,
                campagnolo=self.variant is PrVariant.CAMPAGNOLO,
                breakpoints=self.node.breakpoints,
            )
            self.tracks[d] = track
        if not track.covers(t) and track.status == TrackStatus.OPEN:
            track.extend_to(t)
        vals = track.value_at(t)
        if track.crossings:
            self.ctx.note(
                "crossed isolated integrand singularity at "
                + ", ".join(f"{c!r}" for c in track.crossings)
                + "; solution branch chosen by the integrator, uniqueness not guaranteed"
            )
        if track.limit is not None and abs(t - track.stop_at) <= track.limit_window:
            self.ctx.note(f"value at singular endpoint {track.stop_at!r} is a one-sided limit")
        return vals


class EvalContext:
    """Holds the semantics config plus per-context memo tables."""

    def __init__(self, cfg: SemanticsConfig = DEFAULT_CONFIG):
        self.cfg = cfg
        self._pr_memo: dict = {}
        self._mn_memo: dict = {}
        self._notes: list = []

    def note(self, msg: str):
        if msg not in self._notes:
            self._notes.append(msg)

    # ------------------------------------------------------------------ eval

    def eval(self, term: Term, point) -> EvalOutcome:
        point = tuple(float(x) for x in point)
        if len(point) != term.inputs:
            raise ValueError(
                f"point has {len(point)} coordinates, term wants {term.inputs}"
            )
        if not all(x == x and abs(x) != math.inf for x in point):
            raise ValueError(f"point must be finite: {point}")
        self._notes = []
        try:
            vals = self._vals(term, point)
        except Undef as u:
            return u.outcome()
        witness = "; ".join(self._notes) if self._notes else None
        return defined(*vals, witness=witness)

    def _vals(self, term: Term, args: tuple) -> tuple:
        if self.cfg.use_fast_paths and term.label is not None:
            fp = FASTPATHS.get(term.label[0])
            if fp is not None:
                return fp.scalar(args, self, term)
        if isinstance(term, Const):
            return (float(term.value),)
        if isinstance(term, Jx):
            out = []
            for c in term.children:
                out.extend(self._vals(c, args))
            return tuple(out)
        if isinstance(term, Cm):
            return self._vals(term.outer, self._vals(term.inner, args))
        if isinstance(term, Pr):
            return self._solve_pr(term, args)
        if isinstance(term, Mn):
            return self._solve_mn(term, args)
        raise TypeError(f"unknown term node {term!r}")

    # ---------------------------------------------------------- recursion

    def _resolve_variant(self, node: Pr) -> PrVariant:
        return node.variant if node.variant is not None else self.cfg.pr_default

    def trajectory(self, node: Pr, v: tuple) -> PrTrajectory:
        variant = self._resolve_variant(node)
        key = (id(node), _pack(v), variant)
        traj = self._pr_memo.get(key) if self.cfg.memoize else None
        if traj is None:
            traj = PrTrajectory(node, v, variant, self)
            if self.cfg.memoize:
                self._pr_memo[key] = traj
        return traj

    def _solve_pr(self, node: Pr, args: tuple) -> tuple:
        m = node.init.inputs
        v, t = args[:m], args[m]
        tol = self.cfg.tol
        cap = min(tol.horizon, tol.blow_up)
        if abs(t) > cap:
            raise Undef(
                UndefReason.HORIZON_EXCEEDED,
                f"recursion time {t!r} beyond the integration cap {cap:g}",
            )
        return self.trajectory(node, v).value_at(t)

    # ------------------------------------------------------- minimization

    def _solve_mn(self, node: Mn, args: tuple) -> tuple:
        key = (id(node), _pack(args))
        if self.cfg.memoize and key in self._mn_memo:
            res = self._mn_memo[key]
        else:
            res = _MnScan(self, node, args).run()
            if self.cfg.memoize:
                self._mn_memo[key] = res
        value, err, notes = res
        for n in notes:
            self.note(n)
        if err is not None:
            raise Undef(err[0], err[1])
        return (value,)

    # --------------------------------------------------------------- grids

    def eval_grid(
        self, term: Term, axis: int, lo: float, hi: float, n: int, fixed
    ) -> list:
        """n evaluations along one input coordinate, trajectories shared."""
        if n < 2 or not lo < hi:
            raise ValueError("grid needs n >= 2 and lo < hi")
        fixed = list(fixed)
        out = []
        for i in range(n):
            x = lo + (hi - lo) * i / (n - 1)
            point = list(fixed)
            point.insert(axis, x)
            out.append((x, self.eval(term, tuple(point))))
        return out

    # ---------------------------------------------------------------- jets

    def jets(self, term: Term, point, direction: int, order: int) -> tuple:
        """Taylor expansion of each output along one input coordinate."""
        point = tuple(float(x) for x in point)
        if len(point) != term.inputs:
            raise ValueError("point arity mismatch")
        if not 0 <= direction < term.inputs:
            raise ValueError(f"direction {direction} out of range")
        if order > 16:
            raise ValueError("jet order capped at 16")
        in_jets = tuple(
            J.variable(x, order) if i == direction else J.constant(x, order)
            for i, x in enumerate(point)
        )
        return self._jets(term, in_jets, order)

    def _jets(self, term: Term, in_jets: tuple, order: int) -> tuple:
        # series rules of labelled nodes are their series semantics, so jets
        # always compose through them; unlabelled recursion nodes drive the
        # seed-and-recurrence machinery below
        if term.label is not None:
            fp = FASTPATHS.get(term.label[0])
            if fp is not None:
                if fp.jet is None:
                    raise NonAnalyticNode(f"no series rule for {term.label[0]}")
                return fp.jet(in_jets, order, self, term)
        if isinstance(term, Const):
            return (J.constant(float(term.value), order),)
        if isinstance(term, Jx):
            out = []
            for c in term.children:
                out.extend(self._jets(c, in_jets, order))
            return tuple(out)
        if isinstance(term, Cm):
            return self._jets(term.outer, self._jets(term.inner, in_jets, order), order)
        if isinstance(term, Mn):
            raise NonAnalyticNode("zero search is not analytic")
        if isinstance(term, Pr):
            return self._pr_jets(term, in_jets, order)
        raise TypeError(f"unknown term node {term!r}")

    def _pr_jets(self, node: Pr, in_jets: tuple, order: int) -> tuple:
        if self._resolve_variant(node) is PrVariant.CAMPAGNOLO:
            raise NonAnalyticNode(
                "singularity-tolerant recursion may produce non-smooth solutions"
            )
        m = node.init.inputs
        n = node.init.outputs
        v_jets, t_jet = in_jets[:m], in_jets[m]
        t0 = t_jet.value
        if abs(t0) > self.cfg.tol.horizon:
            raise Undef(UndefReason.HORIZON_EXCEEDED)
        params_const = all(vj.is_constant() for vj in v_jets)
        if params_const:
            h_time = self._time_jets(node, tuple(vj.value for vj in v_jets), t0, order)
            if t_jet.is_constant():
                return tuple(J.constant(h.value, order) for h in h_time)
            delta = t_jet - t0
            return tuple(J.compose(h, delta) for h in h_time)
        if not t_jet.is_constant():
            raise JetUnsupported(
                "recursion node probed with varying parameter and time jets"
            )
        return self._param_jets(node, v_jets, t0, order, n)

    def _time_jets(self, node: Pr, v: tuple, t0: float, order: int) -> tuple:
        """Series of the solution in its time argument, seeded by the
        dense-output value and raised order by order through the integrand."""
        y = self.trajectory(node, v).value_at(t0)
        cur = [Jet((val,)) for val in y]
        for k in range(order):
            vk = tuple(J.constant(x, k) for x in v)
            tk = J.variable(t0, k)
            hk = tuple(Jet(c.coeffs + (0.0,) * (k - c.order)) for c in cur)
            g = self._jets(node.step, vk + (tk,) + hk, k)
            cur = [
                Jet(cur[i].coeffs + (g[i].coeffs[k] / (k + 1),))
                for i in range(len(cur))
            ]
        return tuple(cur)

    def _param_jets(
        self, node: Pr, v_jets: tuple, t0: float, order: int, n: int
    ) -> tuple:
        """Integrate the series-valued initial value problem in the time
        variable, carrying the parameter-direction jets as state."""
        y0_jets = self._jets(node.init, v_jets, order)
        width = order + 1

        def flatten(jets_):
            return tuple(c for j in jets_ for c in j.coeffs)

        def unflatten(flat):
            return tuple(
                Jet(tuple(flat[i * width : (i + 1) * width])) for i in range(n)
            )

        def rhs(tau: float, flat: tuple) -> tuple:
            yj = unflatten(flat)
            g = self._jets(
                node.step, v_jets + (J.constant(tau, order),) + yj, order
            )
            return flatten(g)

        if t0 == 0.0:
            try:
                rhs(0.0, flatten(y0_jets))
            except Undef as u:
                raise Undef(UndefReason.DOMAIN_BOUNDARY, u.witness, boundary=0.0)
            return y0_jets
        track = OdeTrack(
            rhs,
            flatten(y0_jets),
            1 if t0 > 0 else -1,
            self.cfg.tol,
            campagnolo=False,
            breakpoints=node.breakpoints,
        )
        track.extend_to(t0)
        return unflatten(track.value_at(t0))


# ============================================================= minimization


class _SideState:
    __slots__ = ("root", "blocked", "horizon_hit", "stopped", "fails")

    def __init__(self):
        self.root: Optional[float] = None
        self.blocked: Optional[float] = None  # first disqualifying sample
        self.horizon_hit = False
        self.stopped = False
        self.fails = 0  # tolerated isolated undefined cells


class _MnScan:
    """Expanding-ring zero search implementing the configured semantics."""

    def __init__(self, ctx: EvalContext, node: Mn, v: tuple):
        self.ctx = ctx
        self.node = node
        self.v = v
        self.tol = ctx.cfg.tol
        self.cfg = ctx.cfg
        self.values: dict = {}  # sample index -> float or None (undefined)
        self.notes: list = []

    def body(self, tau: float) -> Optional[float]:
        try:
            return self.ctx._vals(self.node.body, self.v + (tau,))[0]
        except Undef:
            return None

    def sample(self, k: int) -> Optional[float]:
        if k not in self.values:
            self.values[k] = self.body(k * self.tol.grid_delta)
        return self.values[k]

    # -- refinement ----------------------------------------------------------

    def _bisect(self, a: float, b: float, fa: float, fb: float) -> Optional[float]:
        for _ in range(80):
            if abs(b - a) <= self.tol.h_min * max(1.0, abs(a), abs(b)):
                break
            mid = 0.5 * (a + b)
            fm = self.body(mid)
            if fm is None:
                return None
            if fm == 0.0:
                return mid
            if (fa < 0) != (fm < 0):
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        return 0.5 * (a + b)

    def _local_min(self, lo: float, hi: float, seed: float) -> Optional[float]:
        """Golden-section descent of |body| over [lo, hi]; returns the
        qualifying location closest to zero, None if the dip stays above
        the root threshold."""
        phi = 0.5 * (math.sqrt(5.0) - 1.0)
        a, b = lo, hi
        best: list = []
        fs = self.body(seed)
        if fs is not None and abs(fs) < self.tol.root_eps:
            best.append(seed)
        x1 = b - phi * (b - a)
        x2 = a + phi * (b - a)
        f1, f2 = self.body(x1), self.body(x2)
        for _ in range(120):
            if abs(b - a) <= self.tol.h_min * max(1.0, abs(a), abs(b)):
                break
            v1 = math.inf if f1 is None else abs(f1)
            v2 = math.inf if f2 is None else abs(f2)
            if math.isinf(v1) and math.isinf(v2):
                break
            if v1 < self.tol.root_eps:
                best.append(x1)
            if v2 < self.tol.root_eps:
                best.append(x2)
            if v1 < v2:
                b, x2, f2 = x2, x1, f1
                x1 = b - phi * (b - a)
                f1 = self.body(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + phi * (b - a)
                f2 = self.body(x2)
        if not best:
            return None
        return min(best, key=abs)

    # -- per-sample handling ---------------------------------------------------

    def _tolerate_isolated(self, k: int) -> bool:
        """Refinement pass for an undefined sample: the hole must not be
        wider than the probe offsets on both sides."""
        if not self.cfg.mn_isolated_exceptions:
            return False
        d = self.tol.grid_delta
        tau = k * d
        return (
            self.body(tau - d / 4) is not None and self.body(tau + d / 4) is not None
        )

    def _try_root_cell(self, k_prev: int, k: int, side: int) -> Optional[float]:
        """Root between consecutive defined samples or at a sub-threshold
        sample; restricted to the side's half line."""
        d = self.tol.grid_delta
        f_prev, f_k = self.values.get(k_prev), self.values.get(k)
        roots = []
        if f_k is not None and abs(f_k) < self.tol.root_eps:
            lo = max((k - 1) * d, 0.0) if side > 0 else (k - 1) * d
            hi = (k + 1) * d if side > 0 else min((k + 1) * d, 0.0)
            r = self._local_min(lo, hi, k * d)
            if r is not None:
                roots.append(r)
        if (
            f_prev is not None
            and f_k is not None
            and (f_prev < 0) != (f_k < 0)
            and abs(f_prev) >= self.tol.root_eps
        ):
            a, b = k_prev * d, k * d
            r = self._bisect(a, b, f_prev, f_k)
            if r is not None:
                roots.append(r)
        if not roots:
            return None
        return min(roots, key=abs)

    # -- main loop ----------------------------------------------------------

    def run(self):
        d = self.tol.grid_delta
        k_max = int(self.tol.horizon / d)
        sides = {1: _SideState(), -1: _SideState()}

        f0 = self.sample(0)
        if f0 is None:
            for s, st in sides.items():
                if self.cfg.mn_domain in (MnDomain.FORWARD, MnDomain.SYMMETRIC, MnDomain.ALL_REALS):
                    if self._tolerate_isolated(0):
                        st.fails += 1
                    else:
                        st.blocked = 0.0
                        if self.cfg.mn_domain is not MnDomain.ALL_REALS:
                            st.stopped = True
        elif abs(f0) < self.tol.root_eps:
            r_plus = self._local_min(0.0, d, 0.0)
            r_minus = self._local_min(-d, 0.0, 0.0)
            if r_plus is not None:
                sides[1].root = r_plus
            if r_minus is not None:
                sides[-1].root = r_minus

        settle_ring = None  # once a root is found, finish one extra ring
        if any(st.root is not None for st in sides.values()) and self._can_settle(sides):
            settle_ring = 1
        for k in range(1, k_max + 1):
            if all(st.stopped for st in sides.values()):
                break
            if settle_ring is not None and k > settle_ring:
                break
            if self.cfg.mn_domain is MnDomain.SYMMETRIC:
                dmin = min(
                    (abs(st.blocked) for st in sides.values() if st.blocked is not None),
                    default=math.inf,
                )
                if k * d > dmin:
                    break  # no further root can satisfy the two-sided requirement
            for s, st in sides.items():
                if st.stopped:
                    continue
                idx = s * k
                f = self.sample(idx)
                if f is None:
                    if self.cfg.mn_domain is MnDomain.ZERO_ONLY:
                        continue
                    if self._tolerate_isolated(idx):
                        st.fails += 1
                        continue
                    st.blocked = idx * d
                    if self.cfg.mn_domain is not MnDomain.ALL_REALS:
                        st.stopped = True
                    continue
                if st.root is None:
                    r = self._try_root_cell(s * (k - 1), idx, s)
                    if r is not None and self._root_ok(r, sides):
                        st.root = r
                        if settle_ring is None and self._can_settle(sides):
                            settle_ring = k + 1
            if k == k_max:
                for st in sides.values():
                    if not st.stopped:
                        st.horizon_hit = True

        if self.cfg.mn_domain is MnDomain.ALL_REALS:
            bad = self._sweep_all_reals(sides, k_max)
            if bad:
                for st in sides.values():
                    st.root = None
                    st.blocked = bad
            self.notes.append(
                "domain requirement checked on the scanned horizon only (approximate)"
            )

        return self._combine(sides)

    def _can_settle(self, sides) -> bool:
        """Early stop applies once the tie rule's outcome cannot change."""
        if self.cfg.mn_combine is MnCombine.EITHER_SUFFICES:
            return True
        return all(st.root is not None for st in sides.values())

    def _root_ok(self, r: float, sides) -> bool:
        if self.cfg.mn_domain is MnDomain.SYMMETRIC:
            for st in sides.values():
                if st.blocked is not None and abs(st.blocked) <= abs(r):
                    return False
        return True

    def _sweep_all_reals(self, sides, k_max: int) -> Optional[float]:
        for k in range(0, k_max + 1):
            for idx in (k, -k):
                f = self.sample(idx)
                if f is None and not self._tolerate_isolated(idx):
                    return idx * self.tol.grid_delta
        return None

    def _combine(self, sides):
        t_plus = sides[1].root
        t_minus = sides[-1].root
        horizon = sides[1].horizon_hit or sides[-1].horizon_hit
        if self.cfg.mn_combine is MnCombine.BOTH_REQUIRED:
            if t_plus is None or t_minus is None:
                miss = []
                if t_plus is None:
                    miss.append("nonnegative")
                if t_minus is None:
                    miss.append("nonpositive")
                return (
                    None,
                    (
                        UndefReason.BOTH_SIDES_TIE,
                        f"no admissible zero on the {' and '.join(miss)} side",
                    ),
                    self.notes,
                )
            return (self._tie(t_plus, t_minus), None, self.notes)
        if t_plus is not None and t_minus is not None:
            return (self._tie(t_plus, t_minus), None, self.notes)
        if t_plus is not None:
            return (t_plus, None, self.notes)
        if t_minus is not None:
            return (t_minus, None, self.notes)
        if horizon:
            return (
                None,
                (
                    UndefReason.HORIZON_EXCEEDED,
                    f"no zero within the search horizon {self.tol.horizon:g}",
                ),
                self.notes,
            )
        return (
            None,
            (
                UndefReason.ROOT_NOT_FOUND,
                "zero search blocked by the body's domain on both sides",
            ),
            self.notes,
        )

    def _tie(self, t_plus: float, t_minus: float) -> float:
        return t_plus if t_plus < -t_minus else t_minus


# ------------------------------------------------------------------ facade


def evaluate(term: Term, point, cfg: SemanticsConfig = None) -> EvalOutcome:
    return EvalContext(cfg or DEFAULT_CONFIG).eval(term, point)


def eval_grid(
    term: Term,
    axis: int,
    lo: float,
    hi: float,
    n: int,
    fixed=(),
    cfg: SemanticsConfig = None,
) -> list:
    return EvalContext(cfg or DEFAULT_CONFIG).eval_grid(term, axis, lo, hi, n, fixed)
