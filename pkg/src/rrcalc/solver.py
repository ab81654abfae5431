"""Adaptive Runge-Kutta machinery with domain tracking.

A Dormand-Prince 5(4) pair drives every integration.  Solutions are kept as
dense-output pieces so repeated queries share one trajectory, extended
lazily in either direction from 0.  The stepper distinguishes three ways an
integration can end besides reaching its target: the integrand leaves its
domain (located by bisection), the state exceeds the blow-up threshold, or
the step size underflows with no evidence of either.

The singularity-tolerant recursion flavour adds a crossing protocol: on
hitting a domain boundary the one-sided limit is extrapolated from a
shrinking sequence of clearances, the integration is restarted just past the
boundary for each clearance, and the restarts must converge for the crossing
to be accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .config import SolverTolerances
from .outcome import Undef, UndefReason

Rhs = Callable[[float, tuple], tuple]  # raises Undef where the integrand is

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)
# continuous-extension coefficients (quartic in the step fraction)
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_CROSS_SHRINK = 1.25  # successive restart differences must shrink by this


def _finite(y) -> bool:
    return all(map(math.isfinite, y))


class Piece:
    """Dense-output interpolant over one accepted step.

    Interpolation coefficients are combined from the stages on first use;
    most pieces are only ever stepped through, never queried inside.
    """

    __slots__ = ("t0", "h", "y0", "_d", "_k")

    def __init__(self, t0: float, h: float, y0: tuple, d=None, stages=None):
        self.t0 = t0
        self.h = h
        self.y0 = y0
        self._d = d
        self._k = stages

    def _coeffs(self) -> tuple:
        if self._d is None:
            n = len(self.y0)
            k = self._k
            self._d = tuple(
                tuple(sum(_P[i][col] * k[i][m] for i in range(7)) for m in range(n))
                for col in range(4)
            )
            self._k = None
        return self._d

    def at(self, t: float) -> tuple:
        theta = (t - self.t0) / self.h
        n = len(self.y0)
        acc = [0.0] * n
        for dv in reversed(self._coeffs()):
            for i in range(n):
                acc[i] = (acc[i] + dv[i]) * theta
        return tuple(self.y0[i] + self.h * acc[i] for i in range(n))

    @property
    def t1(self) -> float:
        return self.t0 + self.h


class TrackStatus:
    OPEN = "open"
    BOUNDARY = "boundary"
    DIVERGED = "diverged"
    SINGULAR = "singular"
    FAILED = "failed"
    DEAD = "dead"  # integrand undefined already at the start point


class OdeTrack:
    """One direction of a solution, grown on demand from (t_start, y0)."""

    def __init__(
        self,
        rhs: Rhs,
        y0: tuple,
        direction: int,
        tol: SolverTolerances,
        campagnolo: bool = False,
        breakpoints: Optional[float] = None,
        t_start: float = 0.0,
        verify: bool = True,
    ):
        self.rhs = rhs
        self.dir = direction
        self.tol = tol
        self.campagnolo = campagnolo
        self.bp = breakpoints
        self.verify = verify
        self.pieces: list[Piece] = []
        self.t = t_start
        self.t_start = t_start
        self.y = tuple(y0)
        self.status = TrackStatus.OPEN
        self.stop_at: Optional[float] = None  # boundary / escape time
        self.stop_reason: Optional[UndefReason] = None
        self.stop_witness: Optional[str] = None
        self.limit: Optional[tuple] = None  # one-sided limit at a boundary
        self.limit_window: float = 0.0
        self.crossings: list[float] = []
        self.h = None
        self.k1 = None
        self.last_h: Optional[float] = None
        self._mag_floor = max(abs(v) for v in self.y) if self.y else 0.0

    # -- geometry helpers ---------------------------------------------------

    def _beyond(self, a: float, b: float) -> bool:
        """True if a is at or past b in the travel direction."""
        return a >= b if self.dir > 0 else a <= b

    def _floor_at(self, t: float) -> float:
        return self.tol.h_min * max(1.0, abs(t))

    def _next_bp(self, t: float) -> Optional[float]:
        if self.bp is None:
            return None
        q = self.bp
        r = t / q
        if self.dir > 0:
            n = math.floor(r + 1e-9) + 1
        else:
            n = math.ceil(r - 1e-9) - 1
        return n * q

    def _on_bp(self, t: float) -> bool:
        if self.bp is None:
            return False
        q = self.bp
        return abs(t - round(t / q) * q) <= 1e-9 * max(1.0, abs(t))

    def _nudge(self, t: float) -> float:
        return 1e-12 * max(1.0, abs(t))

    # -- stepping -----------------------------------------------------------

    def _eval_rhs(self, t: float, y: tuple) -> tuple:
        k = self.rhs(t, y)
        if not _finite(k):
            raise Undef(UndefReason.NUMERICAL_FAILURE, f"non-finite integrand at {t!r}")
        return k

    def _init_h(self, remaining: float) -> float:
        fn = max((abs(v) for v in self.k1), default=0.0)
        ymag = max([abs(v) for v in self.y] + [1.0])
        h = 0.01 * ymag / fn if fn > 0.0 else 0.1
        return max(min(h, 0.1, abs(remaining)), self._floor_at(self.t))

    def _attempt(self, h: float):
        """Try one step of signed size h. Returns (ynew, k7, err_norm, K)."""
        t, y, n = self.t, self.y, len(self.y)
        k = [self.k1]
        end_on_bp = self.bp is not None and self._on_bp(t + h)
        for i in range(1, 7):
            ti = t + _C[i] * h
            yi = list(y)
            ai = _A[i]
            for j in range(i):
                c = ai[j] * h
                if c != 0.0:
                    kj = k[j]
                    for m in range(n):
                        yi[m] += c * kj[m]
            t_eval = ti
            if end_on_bp and _C[i] == 1.0:
                # keep endpoint stages on the current smooth piece
                t_eval = ti - self.dir * self._nudge(ti)
            k.append(self._eval_rhs(t_eval, tuple(yi)))
        ynew = tuple(yi)  # stage-7 state is the 5th-order solution (FSAL)
        err = 0.0
        for m in range(n):
            e = h * sum(_E[i] * k[i][m] for i in range(7))
            sc = self.tol.abs_tol + self.tol.rel_tol * max(abs(y[m]), abs(ynew[m]))
            err += (e / sc) ** 2
        err_norm = math.sqrt(err / n)
        return ynew, k[-1], err_norm, k

    def _accept(self, h: float, ynew: tuple, K: list):
        self.pieces.append(Piece(self.t, h, self.y, stages=K))
        self.t += h
        self.y = ynew

    def extend_to(self, target: float) -> None:
        """Grow the track until it covers ``target`` or it cannot."""
        while self.status == TrackStatus.OPEN and not self._beyond(self.t, target):
            if self.k1 is None:
                try:
                    t0 = self.t
                    if self._on_bp(t0):
                        t0 = t0 + self.dir * self._nudge(t0)
                    self.k1 = self._eval_rhs(t0, self.y)
                except Undef as u:
                    if self.t == self.t_start and not self.pieces:
                        self.status = TrackStatus.DEAD
                        self.stop_at = self.t
                        self.stop_reason = u.reason
                        self.stop_witness = u.witness
                        return
                    self._hit_boundary(u)
                    continue
            if self.h is None:
                self.h = self._init_h(target - self.t) * self.dir
            self._march(target)
        if (
            self.verify
            and self.status == TrackStatus.OPEN
            and self._beyond(self.t, target)
        ):
            self._verify_endgame(target)

    def _march(self, target: float) -> None:
        tol = self.tol
        floor_run = 0  # consecutive floor-limited accepted steps
        while self.status == TrackStatus.OPEN and not self._beyond(self.t, target):
            h = self.h
            # never step past the target or the next integrand breakpoint
            capped = target
            nb = self._next_bp(self.t)
            if nb is not None and self._beyond(capped, nb):
                capped = nb
            if self._beyond(self.t + h, capped):
                h = capped - self.t
            floor = self._floor_at(self.t)
            if abs(h) < floor:
                h = floor * self.dir
            try:
                ynew, k7, err_norm, K = self._attempt(h)
            except Undef as u:
                if abs(h) > 2 * floor:
                    self.h = h / 2
                    continue
                self._hit_boundary(u)
                return
            if err_norm != err_norm or err_norm == math.inf:
                if abs(h) > 2 * floor:
                    self.h = h / 2
                    continue
                self._die_at_floor()
                return
            if err_norm > 1.0:
                if abs(h) <= floor * 1.001:
                    self._die_at_floor()
                    return
                self.h = h * max(0.2, 0.9 * err_norm ** -0.2)
                continue
            # accepted
            self._accept(h, ynew, K)
            self.last_h = h
            if abs(h) <= floor * 1.001 and err_norm > 1e-3:
                # the step size is pinned at the floor while the error is
                # barely in budget: the solution cannot be resolved here
                floor_run += 1
                if floor_run >= 3:
                    self._die_at_floor()
                    return
            else:
                floor_run = 0
            if nb is not None and self.t == nb:
                # restart across the breakpoint: no first-same-as-last reuse
                try:
                    t0 = self.t + self.dir * self._nudge(self.t)
                    self.k1 = self._eval_rhs(t0, self.y)
                except Undef as u:
                    self._hit_boundary(u)
                    return
            else:
                self.k1 = k7
            grow = 10.0 if err_norm == 0.0 else min(10.0, 0.9 * err_norm ** -0.2)
            self.h = math.copysign(max(abs(h) * max(0.2, grow), floor), self.dir)
            if max(abs(v) for v in self.y) > tol.blow_up:
                self._diverge()
                return

    # -- terminal states ----------------------------------------------------

    def _verify_endgame(self, target: float) -> None:
        """Detect a silent landing on a singular endpoint.

        When the final approach needed a geometrically collapsing step size,
        the local error estimate is no longer trustworthy; the last stretch
        is re-integrated at a tighter tolerance and a disagreement marks the
        endpoint as unresolvable (a domain boundary at or before the target,
        to within the probe clearance).
        """
        if self.last_h is None:
            return
        span = max(1.0, abs(target - self.t_start))
        if abs(self.last_h) > 1e-7 * span:
            return
        scale = max(1.0, abs(target))
        d_v = max(1e6 * abs(self.last_h), 1e-5 * scale)
        t_a = target - d_v * self.dir
        y_a = self._value_on_pieces(t_a)
        if y_a is None:
            return
        from dataclasses import replace

        tighter = replace(
            self.tol, rel_tol=self.tol.rel_tol * 1e-2, abs_tol=self.tol.abs_tol * 1e-2
        )
        ref = _integrate_plain(self.rhs, t_a, y_a, target, tighter, self.dir)
        y_end = self._value_on_pieces(target) or self.y
        gate = 1e4 * self.tol.rel_tol  # relative disagreement between the runs
        if ref is not None and all(
            abs(ref[m] - y_end[m]) <= gate * (self.tol.abs_tol + max(abs(ref[m]), abs(y_end[m])))
            for m in range(len(y_end))
        ):
            return
        # unresolvable endgame: withdraw coverage to the probe clearance
        s_eff = max(self.tol.sing_probe * scale, 1e4 * abs(self.last_h))
        t_cut = target - s_eff * self.dir
        while self.pieces and self._beyond(self.pieces[-1].t1, t_cut):
            self.pieces.pop()
        if self.pieces:
            self.t = self.pieces[-1].t1
            self.y = self.pieces[-1].at(self.t)
        else:
            self.t = self.t_start
            self.y = self._value_on_pieces(self.t_start) or self.y
        self.k1 = None
        self.h = None
        if not self._beyond(self.t, t_cut):
            # close the remaining sliver so limit probes have coverage
            try:
                self.k1 = self._eval_rhs(self.t, self.y)
                self.h = self._init_h(t_cut - self.t) * self.dir
                self._march(t_cut)
            except Undef:
                pass
        if self.status != TrackStatus.OPEN:
            return  # the re-march found its own terminal classification
        self.status = TrackStatus.BOUNDARY
        self.stop_at = target
        self.stop_reason = UndefReason.DOMAIN_BOUNDARY
        self.stop_witness = (
            f"solution not resolvable approaching {target!r}; "
            f"integrand domain edge suspected"
        )
        if self.campagnolo:
            self._try_limit_and_cross(target, s_eff)

    def _grew_unbounded(self) -> bool:
        """Divergence evidence: the state is large and has grown by orders
        of magnitude over the track (nested arithmetic stops being
        evaluable long before the blow-up threshold itself is reached)."""
        mag = max((abs(v) for v in self.y), default=0.0)
        return mag >= 1e3 and mag >= 1e2 * max(self._mag_floor, 1e-2)

    def _die_at_floor(self):
        """Step underflow: decide between boundary, divergence and failure."""
        if self._grew_unbounded():
            self._diverge()
            return
        found = self._probe_boundary()
        if found is not None:
            t_bad, u = found
            self._set_boundary(t_bad, u)
            return
        if max(abs(v) for v in self.y) > self.tol.blow_up ** 0.5:
            self._diverge()
            return
        self.status = TrackStatus.FAILED
        self.stop_at = self.t
        self.stop_reason = UndefReason.NUMERICAL_FAILURE
        self.stop_witness = f"step size underflow near {self.t!r}"

    def _probe_boundary(self):
        """Look ahead for the point where the integrand stops being usable.

        Probes geometrically ahead of the reached time using a linear
        extrapolation of the state.  An undefined probe gives a bracket to
        bisect.  If every probe is defined but the integrand's magnitude
        spikes and falls again, the singular point is excluded from the
        domain yet measure-zero, so it is located by a maximum search
        instead.
        """
        floor = self._floor_at(self.t)
        reach = max(1.0, abs(self.t))
        t_good = self.t
        t_bad = None
        u_bad = None
        mags = []  # (tau, |integrand|)
        dt = floor
        while dt <= reach:
            τ = self.t + dt * self.dir
            try:
                val = self._probe_rhs(τ)
                mags.append((τ, max((abs(v) for v in val), default=0.0)))
                t_good = τ
            except Undef as u:
                t_bad = τ
                u_bad = u
                break
            dt *= 2.0
        if t_bad is not None:
            while abs(t_bad - t_good) > floor:
                mid = 0.5 * (t_bad + t_good)
                try:
                    self._probe_rhs(mid)
                    t_good = mid
                except Undef as u:
                    t_bad = mid
                    u_bad = u
            return t_bad, u_bad
        return self._locate_spike(mags, floor)

    def _locate_spike(self, mags, floor):
        if len(mags) < 3:
            return None
        peak = max(range(len(mags)), key=lambda i: mags[i][1])
        peak_mag = mags[peak][1]
        tail_mag = mags[-1][1]
        if peak == len(mags) - 1 or peak_mag < 1e6 or peak_mag < 1e4 * (tail_mag + 1.0):
            return None
        lo = mags[peak - 1][0] if peak > 0 else self.t
        hi = mags[peak + 1][0]
        # golden-section maximization of the integrand magnitude
        phi = 0.5 * (math.sqrt(5.0) - 1.0)
        a, b = lo, hi
        try:
            x1 = b - phi * (b - a)
            x2 = a + phi * (b - a)
            f1 = max(abs(v) for v in self._probe_rhs(x1))
            f2 = max(abs(v) for v in self._probe_rhs(x2))
            while abs(b - a) > floor:
                if f1 < f2:
                    a, x1, f1 = x1, x2, f2
                    x2 = a + phi * (b - a)
                    f2 = max(abs(v) for v in self._probe_rhs(x2))
                else:
                    b, x2, f2 = x2, x1, f1
                    x1 = b - phi * (b - a)
                    f1 = max(abs(v) for v in self._probe_rhs(x1))
        except Undef as u:
            return 0.5 * (a + b), u
        t_star = 0.5 * (a + b)
        return t_star, Undef(
            UndefReason.OUT_OF_DOMAIN,
            f"integrand magnitude diverges near {t_star!r}",
        )

    def _probe_rhs(self, τ: float):
        y = tuple(
            self.y[m] + (τ - self.t) * self.k1[m] for m in range(len(self.y))
        ) if self.k1 is not None else self.y
        return self._eval_rhs(τ, y)

    def _hit_boundary(self, u: Undef):
        if self._grew_unbounded():
            self._diverge()
            return
        found = self._probe_boundary()
        if found is not None:
            t_bad, u2 = found
            self._set_boundary(t_bad, u2)
        else:
            self._set_boundary(self.t, u)

    def _set_boundary(self, t_star: float, u: Undef):
        self.status = TrackStatus.BOUNDARY
        self.stop_at = t_star
        self.stop_reason = UndefReason.DOMAIN_BOUNDARY
        self.stop_witness = u.witness or f"integrand undefined near {t_star!r}"
        if self.campagnolo:
            self._try_limit_and_cross(t_star)

    def _diverge(self):
        # sharpen the escape time on the last piece
        t_esc = self.t
        if self.pieces:
            p = self.pieces[-1]
            lo, hi = p.t0, p.t1
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if max(abs(v) for v in p.at(mid)) > self.tol.blow_up:
                    hi = mid
                else:
                    lo = mid
            t_esc = hi
        self.status = TrackStatus.DIVERGED
        self.stop_at = t_esc
        self.stop_reason = UndefReason.DIVERGED
        self.stop_witness = f"state escaped past {self.tol.blow_up:g} near {t_esc!r}"

    # -- singularity handling (tolerant flavour) ----------------------------

    def _try_limit_and_cross(self, t_star: float, s_eff: Optional[float] = None):
        """Extrapolate the limit at t_star; attempt to restart beyond it."""
        s = s_eff or self.tol.sing_probe * max(1.0, abs(t_star))
        if abs(t_star - self.t_start) < 32 * s:
            return  # singularity too close to the anchor to probe
        samples = []
        for δ in (16 * s, 4 * s, s):
            τ = t_star - δ * self.dir
            val = self._value_on_pieces(τ)
            if val is None:
                return
            samples.append(val)
        lim = _aitken(samples)
        if lim is None or not _finite(lim):
            if samples and max(abs(v) for v in samples[-1]) > self.tol.blow_up ** 0.5:
                self._diverge()
                return
            self.status = TrackStatus.SINGULAR
            self.stop_reason = UndefReason.SINGULAR_NOT_INTEGRABLE
            self.stop_witness = (
                f"one-sided limit at {t_star!r} does not converge "
                f"(non-integrable singularity)"
            )
            return
        self.limit = lim
        self.limit_window = 2 * s
        # restart runs: each must reach a common checkpoint and converge
        t_c = t_star + 32 * s * self.dir
        runs = []
        for δ in (16 * s, 4 * s, s):
            τ_r = t_star + δ * self.dir
            try:
                self._eval_rhs(τ_r, lim)
            except Undef:
                self.status = TrackStatus.SINGULAR
                self.stop_reason = UndefReason.SINGULAR_NOT_INTEGRABLE
                self.stop_witness = (
                    f"integrand not defined just past the singularity at {t_star!r}"
                )
                return
            w = _integrate_plain(self.rhs, τ_r, lim, t_c, self.tol, self.dir)
            if w is None:
                self.status = TrackStatus.SINGULAR
                self.stop_reason = UndefReason.SINGULAR_NOT_INTEGRABLE
                self.stop_witness = f"restart past {t_star!r} did not reach clearance"
                return
            runs.append(w)
        w_lim = _aitken(runs)
        if w_lim is None or not _finite(w_lim):
            self.status = TrackStatus.SINGULAR
            self.stop_reason = UndefReason.SINGULAR_NOT_INTEGRABLE
            self.stop_witness = (
                f"crossing increments past {t_star!r} do not converge "
                f"(non-integrable singularity)"
            )
            return
        # bridge the gap with linear patches knotted at the limit value
        t_from = t_star - s * self.dir
        last = self._value_on_pieces(t_from)
        n = len(last)
        self.pieces.append(
            Piece(
                t_from,
                t_star - t_from,
                last,
                (tuple((lim[m] - last[m]) / (t_star - t_from) for m in range(n)),),
            )
        )
        self.pieces.append(
            Piece(
                t_star,
                t_c - t_star,
                lim,
                (tuple((w_lim[m] - lim[m]) / (t_c - t_star) for m in range(n)),),
            )
        )
        self.crossings.append(t_star)
        self.status = TrackStatus.OPEN
        self.stop_at = None
        self.stop_reason = None
        self.stop_witness = None
        self.limit = None
        self.t = t_c
        self.y = w_lim
        self.k1 = None
        self.h = None

    def _value_on_pieces(self, t: float) -> Optional[tuple]:
        if t == self.t_start and not self.pieces:
            return self.y
        for p in reversed(self.pieces):
            if (p.t0 <= t <= p.t1) or (p.t1 <= t <= p.t0):
                return p.at(t)
        return None

    # -- queries ------------------------------------------------------------

    def covers(self, t: float) -> bool:
        return self._beyond(self.t, t)

    def value_at(self, t: float) -> tuple:
        """State at covered time t; raises Undef past the covered range."""
        if self.status == TrackStatus.DEAD:
            raise Undef(
                UndefReason.DOMAIN_BOUNDARY,
                self.stop_witness or "integrand undefined at the start point",
                boundary=self.t_start,
            )
        if self.covers(t):
            if t == self.t:
                return self.y
            v = self._value_on_pieces(t)
            if v is not None:
                return v
        if self.limit is not None and abs(t - self.stop_at) <= self.limit_window:
            return self.limit  # one-sided limit at an isolated boundary point
        if self.status == TrackStatus.BOUNDARY or self.status == TrackStatus.SINGULAR:
            raise Undef(
                self.stop_reason
                if self.status == TrackStatus.SINGULAR
                else UndefReason.DOMAIN_BOUNDARY,
                self.stop_witness,
                boundary=self.stop_at,
            )
        if self.status == TrackStatus.DIVERGED:
            raise Undef(UndefReason.DIVERGED, self.stop_witness, boundary=self.stop_at)
        if self.status == TrackStatus.FAILED:
            raise Undef(UndefReason.NUMERICAL_FAILURE, self.stop_witness)
        raise Undef(
            UndefReason.NUMERICAL_FAILURE, f"track does not cover {t!r}"
        )


def _aitken(seq) -> Optional[tuple]:
    """Componentwise Aitken extrapolation of a 3-term vector sequence.

    Returns None when the differences do not shrink fast enough, which is
    the crossing-rejection criterion.
    """
    a, b, c = seq
    n = len(a)
    d1 = [b[m] - a[m] for m in range(n)]
    d2 = [c[m] - b[m] for m in range(n)]
    n1 = max(abs(v) for v in d1) if n else 0.0
    n2 = max(abs(v) for v in d2) if n else 0.0
    scale = max(max(abs(v) for v in c), 1.0) if n else 1.0
    if n2 <= 1e-13 * scale:
        return tuple(c)
    if n1 == 0.0 or n2 * _CROSS_SHRINK > n1:
        return None
    out = []
    for m in range(n):
        den = d2[m] - d1[m]
        if den == 0.0:
            out.append(c[m])
        else:
            out.append(c[m] - d2[m] * d2[m] / den)
    return tuple(out)


def _integrate_plain(
    rhs: Rhs, t0: float, y0: tuple, t1: float, tol: SolverTolerances, direction: int
) -> Optional[tuple]:
    """One-shot integration used for crossing probes; None on any trouble."""
    track = OdeTrack(rhs, y0, direction, tol, campagnolo=False, t_start=t0, verify=False)
    track.extend_to(t1)
    if track.status == TrackStatus.OPEN and track.covers(t1):
        try:
            return track.value_at(t1)
        except Undef:
            return None
    return None
