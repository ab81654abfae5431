"""Evaluation semantics knobs.

Every ambiguity of the operator semantics is resolved by one field here:
which differential-recursion flavour unmarked nodes get, how the zero-search
operator combines its two half-line searches, what definedness it demands
around a root, and the numerical tolerances of the solver.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .term import PrVariant


class MnCombine(enum.Enum):
    #: the search is defined only when both half-lines yield a root
    BOTH_REQUIRED = "both"
    #: one root suffices; the tie rule applies only when both exist
    EITHER_SUFFICES = "either"


class MnDomain(enum.Enum):
    #: body must be defined at every scanned time (horizon-bounded check)
    ALL_REALS = "all"
    #: body must be defined on [-t, t] for a root at t
    SYMMETRIC = "sym"
    #: body must be defined on [0, t] (resp. [t, 0])
    FORWARD = "fwd"
    #: no definedness requirement besides the root itself
    ZERO_ONLY = "zero"


@dataclass(frozen=True)
class SolverTolerances:
    rel_tol: float = 1e-10      # ODE relative tolerance
    abs_tol: float = 1e-12      # ODE absolute tolerance
    h_min: float = 1e-14        # minimum step / boundary location precision
    blow_up: float = 1e12       # |state| beyond this counts as divergence
    horizon: float = 1e4        # zero-search & integration reach limit
    root_eps: float = 1e-10     # |body| threshold at an accepted root
    grid_delta: float = 1e-2    # initial zero-search scan spacing
    sing_probe: float = 1e-8    # singularity clearance for crossing probes

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) <= 0:
                raise ValueError(f"tolerance {name} must be positive")
        if not (self.h_min < self.grid_delta < self.horizon):
            raise ValueError("need h_min < grid_delta < horizon")

    def halved(self) -> "SolverTolerances":
        return replace(self, rel_tol=self.rel_tol / 2, abs_tol=self.abs_tol / 2)


@dataclass(frozen=True)
class SemanticsConfig:
    pr_default: PrVariant = PrVariant.STRICT
    mn_combine: MnCombine = MnCombine.EITHER_SUFFICES
    mn_domain: MnDomain = MnDomain.ZERO_ONLY
    mn_isolated_exceptions: bool = False
    tol: SolverTolerances = field(default_factory=SolverTolerances)
    #: evaluate labelled terms by their closed forms instead of their
    #: defining constructions (same domains; agreement is under test)
    use_fast_paths: bool = True
    #: cache trajectories / zero-search results within one context
    memoize: bool = True

    def __post_init__(self):
        if self.mn_domain is MnDomain.ZERO_ONLY and self.mn_isolated_exceptions:
            raise ValueError(
                "isolated-exception tolerance does not apply to the "
                "root-only definedness variant"
            )

    def with_tol(self, **kw) -> "SemanticsConfig":
        return replace(self, tol=replace(self.tol, **kw))


DEFAULT_CONFIG = SemanticsConfig()
