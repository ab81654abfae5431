"""Interpreter and analysis toolkit for a small differential-recursion
function language with partial-function semantics.

The term language has three nullary constants and four operators:
juxtaposition, composition, differential recursion (an integral-equation
fixpoint, in a strict and a singularity-tolerant flavour) and zero-search
minimization.  Evaluation is strict, tracks domains, and reports structured
undefinedness; a jet engine propagates truncated Taylor series for the
differential-algebraicity probe.
"""

from .config import (
    DEFAULT_CONFIG,
    MnCombine,
    MnDomain,
    SemanticsConfig,
    SolverTolerances,
)
from .evaluate import EvalContext, eval_grid, evaluate
from .outcome import EvalOutcome, UndefReason
from .surface import ParseError, parse, print_term
from .term import (
    Arity,
    ArityMismatch,
    BadIndex,
    PrVariant,
    Term,
    TermError,
    arity_of,
    from_json,
    is_rpr,
    mk_cm,
    mk_const,
    mk_jx,
    mk_mn,
    mk_pr,
    strip_labels,
    to_json,
)

__all__ = [
    "Arity",
    "ArityMismatch",
    "BadIndex",
    "DEFAULT_CONFIG",
    "EvalContext",
    "EvalOutcome",
    "MnCombine",
    "MnDomain",
    "ParseError",
    "PrVariant",
    "SemanticsConfig",
    "SolverTolerances",
    "Term",
    "TermError",
    "UndefReason",
    "arity_of",
    "eval_grid",
    "evaluate",
    "from_json",
    "is_rpr",
    "mk_cm",
    "mk_const",
    "mk_jx",
    "mk_mn",
    "mk_pr",
    "parse",
    "print_term",
    "strip_labels",
    "to_json",
]

__version__ = "0.1.0"
