"""Shared exception types.

The split is deliberate: bad *inputs* (malformed matrices, out-of-range
parameters, unsupported modes) raise :class:`InputError`; a numerical
routine that ran but could not meet its own contract raises
:class:`SolverFailure` and attaches the best iterate it found, so callers
can inspect or retry in exact arithmetic.
"""
from __future__ import annotations


class InputError(ValueError):
    """Malformed or out-of-contract input."""


class DegenerateInputError(InputError):
    """Structurally empty input where no meaningful answer exists."""


class SolverFailure(RuntimeError):
    """An iterative routine exhausted its budget before certifying.

    ``best`` carries the best feasible point seen so far (shape depends on
    the routine), ``detail`` a short human-readable reason.
    """

    def __init__(self, detail: str, best=None):
        super().__init__(detail)
        self.detail = detail
        self.best = best


class BudgetExceeded(RuntimeError):
    """A combinatorial search ran out of its node budget.

    Carries the certified lower bound found so far.
    """

    def __init__(self, detail: str, best=None):
        super().__init__(detail)
        self.detail = detail
        self.best = best
