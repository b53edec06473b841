"""Exact scalar arithmetic for boundary-margin comparisons.

Float optimization cannot resolve a comparison that sits exactly on a
threshold such as 1/sqrt(8).  Every exact certificate this package checks
only ever needs scalars of the form ``c * sqrt(r)`` with ``c``, ``r``
rational: margins of rationalized functionals under the 1-, 2- and
sup-norms, squared Euclidean norms, and thresholds like ``n**-0.5``.
Products and comparisons of such scalars stay inside the form, so a
two-field value class is enough; no radical sums, no symbolic engine.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError

__all__ = ["Exact", "to_fraction", "rationalize_vector", "parse_scalar"]


@dataclass(frozen=True)
class Exact:
    """The scalar ``coef * sqrt(rad)`` with ``coef`` rational, ``rad`` rational >= 0.

    ``rad == 1`` encodes a plain rational.  Equality and order are decided
    exactly by sign analysis plus squaring; no floating point is involved.
    """

    coef: Fraction
    rad: Fraction = Fraction(1)

    def __post_init__(self):
        if not isinstance(self.coef, Fraction) or not isinstance(self.rad, Fraction):
            raise InputError("Exact fields must be Fraction instances")
        if self.rad < 0:
            raise InputError("radicand must be nonnegative")
        if self.coef == 0 and self.rad != 1:
            object.__setattr__(self, "rad", Fraction(1))
        if self.rad == 0:
            # sqrt(0) == 0: normalize to the rational zero
            object.__setattr__(self, "coef", Fraction(0))
            object.__setattr__(self, "rad", Fraction(1))

    @classmethod
    def rational(cls, q) -> "Exact":
        return cls(to_fraction(q))

    @classmethod
    def sqrt(cls, q) -> "Exact":
        r = to_fraction(q)
        if r < 0:
            raise InputError("sqrt of a negative rational")
        return cls(Fraction(1), r)

    def is_rational(self) -> bool:
        return self.rad == 1

    def as_fraction(self) -> Fraction:
        if self.rad == 1:
            return self.coef
        root = _exact_sqrt(self.rad)
        if root is None:
            raise InputError("value is irrational")
        return self.coef * root

    def __float__(self) -> float:
        return float(self.coef) * math.sqrt(float(self.rad))

    def sign(self) -> int:
        if self.coef > 0:
            return 1
        if self.coef < 0:
            return -1
        return 0

    # squared magnitude, as a plain Fraction
    def square(self) -> Fraction:
        return self.coef * self.coef * self.rad

    def _cmp(self, other) -> int:
        other = _coerce(other)
        sa, sb = self.sign(), other.sign()
        if sa != sb:
            return -1 if sa < sb else 1
        if sa == 0:
            return 0
        # same strict sign: compare squares, orientation flips for negatives
        qa, qb = self.square(), other.square()
        if qa == qb:
            return 0
        squares = -1 if qa < qb else 1
        return squares if sa > 0 else -squares

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except InputError:
            return NotImplemented

    def __hash__(self):
        if self.rad == 1:
            return hash(self.coef)
        root = _exact_sqrt(self.rad)
        if root is not None:
            return hash(self.coef * root)
        return hash((self.coef, self.rad))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __neg__(self) -> "Exact":
        return Exact(-self.coef, self.rad)

    def __abs__(self) -> "Exact":
        return Exact(abs(self.coef), self.rad)

    def __mul__(self, other) -> "Exact":
        other = _coerce(other)
        return Exact(self.coef * other.coef, self.rad * other.rad)

    __rmul__ = __mul__

    def __repr__(self):
        if self.rad == 1:
            return f"Exact({self.coef})"
        return f"Exact({self.coef}*sqrt({self.rad}))"

    def __str__(self):
        if self.rad == 1:
            return str(self.coef)
        if self.coef == 1:
            return f"sqrt({self.rad})"
        return f"{self.coef}*sqrt({self.rad})"


def _exact_sqrt(q: Fraction) -> Fraction | None:
    """Rational square root of q, or None if q is not a perfect square."""
    num = math.isqrt(q.numerator)
    den = math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _coerce(x) -> Exact:
    if isinstance(x, Exact):
        return x
    if isinstance(x, (int, Fraction)):
        return Exact(Fraction(x))
    raise InputError(f"cannot compare Exact with {type(x).__name__}; "
                     "convert floats explicitly")


def to_fraction(x, max_denominator: int | None = None) -> Fraction:
    """Convert ints, Fractions, 'a/b' strings and floats to Fraction.

    Floats convert exactly (binary expansion) unless ``max_denominator`` is
    given, in which case the closest bounded-denominator rational is used.
    """
    if isinstance(x, Fraction):
        f = x
    elif isinstance(x, numbers.Integral):
        f = Fraction(int(x))
    elif isinstance(x, str):
        f = Fraction(x)
    elif isinstance(x, float):
        if not math.isfinite(x):
            raise InputError("non-finite value has no rational form")
        f = Fraction(x)
    else:
        raise InputError(f"cannot convert {type(x).__name__} to Fraction")
    if max_denominator is not None:
        f = f.limit_denominator(max_denominator)
    return f


def rationalize_vector(xs, max_denominator: int) -> tuple[Fraction, ...]:
    """Round each float coordinate to the nearest bounded-denominator rational."""
    return tuple(to_fraction(float(x), max_denominator) for x in xs)


def parse_scalar(text: str):
    """Parse a margin argument: float literal, 'a/b', or 'sqrt(a/b)'.

    Returns a float for plain float literals and an :class:`Exact` for the
    rational and square-root forms, which is what exact-arithmetic callers
    need at decision boundaries.
    """
    s = text.strip()
    if s.startswith("sqrt(") and s.endswith(")"):
        return Exact.sqrt(Fraction(s[5:-1].strip()))
    if "/" in s:
        return Exact.rational(Fraction(s))
    return float(s)
