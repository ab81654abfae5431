"""Evaluation outcomes: defined values or a structured undefinedness reason."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional


class UndefReason(enum.Enum):
    OUT_OF_DOMAIN = "OutOfDomain"
    DIVERGED = "Diverged"
    DOMAIN_BOUNDARY = "DomainBoundary"
    SINGULAR_NOT_INTEGRABLE = "SingularNotIntegrable"
    ROOT_NOT_FOUND = "RootNotFound"
    HORIZON_EXCEEDED = "HorizonExceeded"
    BOTH_SIDES_TIE = "BothSidesTie"
    NUMERICAL_FAILURE = "NumericalFailure"
    NON_ANALYTIC = "NonAnalyticNode"


@dataclass(frozen=True)
class EvalOutcome:
    """Either ``Defined(values)`` or ``Undefined(reason)``, never both.

    ``witness`` is a human-readable note (which clause failed, where a
    boundary sits, whether a result rests on an approximate check);
    ``boundary`` carries the located domain endpoint when one exists.
    """

    values: Optional[tuple] = None
    reason: Optional[UndefReason] = None
    witness: Optional[str] = None
    boundary: Optional[float] = None

    def __post_init__(self):
        if (self.values is None) == (self.reason is None):
            raise ValueError("outcome must be exactly one of defined/undefined")
        if self.values is not None and not all(
            isinstance(v, float) and v == v and abs(v) != float("inf")
            for v in self.values
        ):
            raise ValueError(f"defined values must be finite floats: {self.values}")

    @property
    def defined(self) -> bool:
        return self.values is not None

    @property
    def value(self) -> float:
        """Sole value of a scalar outcome."""
        if self.values is None or len(self.values) != 1:
            raise ValueError(f"not a defined scalar outcome: {self}")
        return self.values[0]

    def to_dict(self) -> dict:
        d: dict = {"defined": self.defined}
        if self.defined:
            d["values"] = list(self.values)
        else:
            d["reason"] = self.reason.value
        if self.witness is not None:
            d["witness"] = self.witness
        if self.boundary is not None:
            d["boundary"] = self.boundary
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def __str__(self):
        if self.defined:
            return "(" + ", ".join(repr(v) for v in self.values) + ")"
        s = f"Undefined: {self.reason.value}"
        if self.witness:
            s += f" ({self.witness})"
        return s


def defined(*values: float, witness: str = None) -> EvalOutcome:
    return EvalOutcome(values=tuple(float(v) for v in values), witness=witness)


def undefined(
    reason: UndefReason, witness: str = None, boundary: float = None
) -> EvalOutcome:
    return EvalOutcome(reason=reason, witness=witness, boundary=boundary)


class Undef(Exception):
    """Internal: raised while evaluating to propagate undefinedness strictly.

    Any subexpression raising this makes the whole expression undefined,
    which is exactly the strict evaluation principle.
    """

    def __init__(self, reason: UndefReason, witness: str = None, boundary: float = None):
        super().__init__(reason.value)
        self.reason = reason
        self.witness = witness
        self.boundary = boundary

    def outcome(self) -> EvalOutcome:
        return undefined(self.reason, self.witness, self.boundary)


class NonAnalyticNode(Exception):
    """Raised when a jet is requested through a non-smooth operator."""
