"""Arity-typed term language.

Terms are immutable trees built from three nullary constants, juxtaposition
(JX), composition (CM), differential recursion (PR, in a strict and a
singularity-tolerant flavour) and zero-search minimization (MN).  Every
constructor checks arities, so an ill-typed term cannot be built.

Structural equality ignores the ``label`` annotation that builders attach to
well-known terms (the evaluator may use labels to dispatch to closed-form
fast paths); two terms compare equal iff they have the same shape.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union


class TermError(Exception):
    """Base class for term construction errors."""


class ArityMismatch(TermError):
    pass


class BadIndex(TermError):
    pass


@dataclass(frozen=True)
class Arity:
    """Input/output arity of a term (functions from R^inputs to R^outputs)."""

    inputs: int
    outputs: int

    def __post_init__(self):
        if self.inputs < 0 or self.outputs < 0:
            raise ArityMismatch(f"negative arity {self}")

    def __str__(self):
        return f"{self.inputs}->{self.outputs}"


class PrVariant(enum.Enum):
    STRICT = "strict"
    CAMPAGNOLO = "campagnolo"


# Label = (name, *args), e.g. ("sin",) or ("proj", 0, 2).  Excluded from
# equality/hash so a labelled builder term equals its hand-built twin.
Label = tuple


@dataclass(frozen=True)
class Term:
    """Base node.  ``arity`` is computed by subclasses at construction."""

    arity: Arity = field(init=False, compare=False)
    label: Optional[Label] = field(default=None, compare=False, kw_only=True)

    def _set_arity(self, a: Arity):
        object.__setattr__(self, "arity", a)

    @property
    def inputs(self) -> int:
        return self.arity.inputs

    @property
    def outputs(self) -> int:
        return self.arity.outputs


@dataclass(frozen=True)
class Const(Term):
    value: int  # one of 0, 1, -1

    def __post_init__(self):
        if self.value not in (0, 1, -1):
            raise TermError(f"constant must be 0, 1 or -1, got {self.value}")
        self._set_arity(Arity(0, 1))


@dataclass(frozen=True)
class Jx(Term):
    children: tuple
    input_arity: int = 0  # meaningful (and required) when children is empty

    def __post_init__(self):
        if self.children:
            m = self.children[0].inputs
            for c in self.children:
                if c.inputs != m:
                    raise ArityMismatch(
                        f"juxtaposition children disagree on inputs: "
                        f"{[str(x.arity) for x in self.children]}"
                    )
                if c.outputs != 1:
                    raise ArityMismatch(
                        f"juxtaposition child must be scalar-valued, got {c.arity}"
                    )
            object.__setattr__(self, "input_arity", m)
        elif self.input_arity < 0:
            raise ArityMismatch("empty juxtaposition needs a nonnegative input arity")
        self._set_arity(Arity(self.input_arity, len(self.children)))


@dataclass(frozen=True)
class Cm(Term):
    outer: Term
    inner: Term

    def __post_init__(self):
        if self.inner.outputs != self.outer.inputs:
            raise ArityMismatch(
                f"composition: inner {self.inner.arity} does not feed outer "
                f"{self.outer.arity}"
            )
        self._set_arity(Arity(self.inner.inputs, self.outer.outputs))


@dataclass(frozen=True)
class Pr(Term):
    """Differential recursion node.

    ``variant=None`` defers the strict-vs-singularity-tolerant choice to the
    evaluation config.  ``breakpoints`` is an optional hint (spacing of known
    integrand discontinuities) for the ODE solver's event grid.
    """

    init: Term
    step: Term
    variant: Optional[PrVariant] = None
    breakpoints: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        m, n = self.init.inputs, self.init.outputs
        want = Arity(m + 1 + n, n)
        if self.step.arity != want:
            raise ArityMismatch(
                f"recursion: init {self.init.arity} requires step {want}, "
                f"got {self.step.arity}"
            )
        self._set_arity(Arity(m + 1, n))


@dataclass(frozen=True)
class Mn(Term):
    body: Term

    def __post_init__(self):
        if self.body.outputs != 1 or self.body.inputs < 1:
            raise ArityMismatch(
                f"minimization body must be (m+1)->1, got {self.body.arity}"
            )
        self._set_arity(Arity(self.body.inputs - 1, 1))


# ---------------------------------------------------------------------------
# checked constructors


def mk_const(which: int) -> Term:
    return Const(which)


def mk_jx(children, input_arity: Optional[int] = None) -> Term:
    """Juxtapose scalar-valued terms over a common input arity.

    The empty juxtaposition has output arity 0 and must state its input
    arity explicitly; for nonempty children a stated arity is validated.
    """
    children = tuple(children)
    if not children:
        if input_arity is None:
            raise ArityMismatch("empty juxtaposition needs an explicit input arity")
        return Jx(children, input_arity)
    t = Jx(children)
    if input_arity is not None and t.inputs != input_arity:
        raise ArityMismatch(
            f"declared input arity {input_arity} != children's {t.inputs}"
        )
    return t


def mk_cm(outer: Term, inner: Term) -> Term:
    return Cm(outer, inner)


def mk_pr(init: Term, step: Term, variant: Optional[PrVariant] = None) -> Term:
    return Pr(init, step, variant)


def mk_mn(body: Term) -> Term:
    return Mn(body)


def arity_of(t: Term) -> Arity:
    return t.arity


# ---------------------------------------------------------------------------
# predicates


def is_rpr(t: Term) -> bool:
    """True iff ``t`` uses only constants, JX, CM and strict-by-default PR.

    A Pr node with ``variant=None`` counts as strict (that is the default
    semantics); an explicitly singularity-tolerant node or any Mn node
    disqualifies the term.
    """
    if isinstance(t, Mn):
        return False
    if isinstance(t, Pr):
        if t.variant is PrVariant.CAMPAGNOLO:
            return False
        return is_rpr(t.init) and is_rpr(t.step)
    if isinstance(t, Cm):
        return is_rpr(t.outer) and is_rpr(t.inner)
    if isinstance(t, Jx):
        return all(is_rpr(c) for c in t.children)
    return True


def strip_labels(t: Term) -> Term:
    """Structurally equal copy with no labels anywhere (forces the defining
    constructions through every evaluation and series path)."""
    if isinstance(t, Const):
        return Const(t.value)
    if isinstance(t, Jx):
        return Jx(tuple(strip_labels(c) for c in t.children), t.input_arity)
    if isinstance(t, Cm):
        return Cm(strip_labels(t.outer), strip_labels(t.inner))
    if isinstance(t, Pr):
        return Pr(
            strip_labels(t.init),
            strip_labels(t.step),
            t.variant,
            breakpoints=t.breakpoints,
        )
    if isinstance(t, Mn):
        return Mn(strip_labels(t.body))
    raise TermError(f"unknown node {t!r}")


def subterms(t: Term):
    """Iterate over t and all its descendants, preorder."""
    yield t
    if isinstance(t, Jx):
        for c in t.children:
            yield from subterms(c)
    elif isinstance(t, Cm):
        yield from subterms(t.outer)
        yield from subterms(t.inner)
    elif isinstance(t, Pr):
        yield from subterms(t.init)
        yield from subterms(t.step)
    elif isinstance(t, Mn):
        yield from subterms(t.body)


# ---------------------------------------------------------------------------
# JSON tree form: {"op": ..., "children": [...]}.  Labelled builder terms
# serialize by name so the tree round-trips with the surface syntax.

_CONST_OPS = {0: "zero", 1: "one", -1: "negone"}


def to_tree(t: Term) -> dict:
    if t.label is not None:
        name, *args = t.label
        node: dict = {"op": name}
        if args:
            node["args"] = list(args)
        return node
    if isinstance(t, Const):
        return {"op": _CONST_OPS[t.value]}
    if isinstance(t, Jx):
        node = {"op": "jx", "children": [to_tree(c) for c in t.children]}
        if not t.children:
            node["input_arity"] = t.input_arity
        return node
    if isinstance(t, Cm):
        return {"op": "cm", "children": [to_tree(t.outer), to_tree(t.inner)]}
    if isinstance(t, Pr):
        node = {"op": "pr", "children": [to_tree(t.init), to_tree(t.step)]}
        if t.variant is not None:
            node["variant"] = t.variant.value
        return node
    if isinstance(t, Mn):
        return {"op": "mn", "children": [to_tree(t.body)]}
    raise TermError(f"unknown node {t!r}")


def from_tree(node: dict) -> Term:
    op = node["op"]
    kids = [from_tree(c) for c in node.get("children", [])]
    if op in ("zero", "one", "negone"):
        return mk_const({"zero": 0, "one": 1, "negone": -1}[op])
    if op == "jx":
        return mk_jx(kids, node.get("input_arity"))
    if op == "cm":
        return mk_cm(*kids)
    if op == "pr":
        v = node.get("variant")
        return mk_pr(kids[0], kids[1], PrVariant(v) if v else None)
    if op == "mn":
        return mk_mn(kids[0])
    # named builder node
    from . import stdlib

    return stdlib.build_named(op, tuple(node.get("args", ())))


def to_json(t: Term) -> str:
    return json.dumps(to_tree(t), separators=(",", ":"))


def from_json(s: str) -> Term:
    return from_tree(json.loads(s))


Rational = Union[int, Fraction]
