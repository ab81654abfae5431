import pytest

from rrcalc.config import SemanticsConfig
from rrcalc.evaluate import EvalContext


@pytest.fixture
def ctx():
    return EvalContext()


@pytest.fixture(scope="session")
def slow_ctx():
    """Structural (no fast paths) context shared per session: dead-end
    trajectory chases are expensive, and the memo makes them one-time."""
    return EvalContext(SemanticsConfig(use_fast_paths=False))


def assert_defined_close(outcome, want, tol=1e-9):
    __tracebackhide__ = True
    assert outcome.defined, f"expected {want}, got {outcome}"
    got = outcome.values
    if isinstance(want, (int, float)):
        want = (want,)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert abs(g - w) <= tol, f"{got} vs {want} (tol {tol})"
