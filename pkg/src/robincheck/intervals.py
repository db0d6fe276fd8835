"""Directed-rounding interval arithmetic on MPFR floats.

The enclosure contract: every operation returns an interval [lo, hi] that
contains the exact real result, with lo rounded toward -inf and hi toward
+inf at the interval's working precision.  All inequality decisions in this
package go through ``certified_compare``/``floor_certified`` so that a
strict verdict is only ever issued when the enclosures themselves prove it.

The backend is MPFR via gmpy2, whose per-operation correct rounding in a
chosen direction makes the containment contract hold by construction.
"""

from __future__ import annotations

import os
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, TypeVar, Union

import gmpy2

__all__ = [
    "Certainty",
    "IntervalDomainError",
    "IntervalReal",
    "StraddlesInteger",
    "DEFAULT_PRECISION",
    "MIN_PRECISION",
    "certified_compare",
    "compare_with_escalation",
    "euler_gamma",
    "exp",
    "exp_euler_gamma",
    "floor_certified",
    "floor_with_escalation",
    "ln",
    "make_interval",
    "max_precision",
    "resolve_with_escalation",
]

DEFAULT_PRECISION = 128
MIN_PRECISION = 53
_DEFAULT_PRECISION_CAP = 1024

# 352 fractional digits of the Euler-Mascheroni constant.  Provenance:
# MPFR's const_euler at 1400 bits, cross-checked digit-for-digit against
# mpmath's independent Brent-McMillan evaluation (test_intervals.py repeats
# that cross-check at build-test time).  352 digits support enclosures past
# the 1024-bit precision cap.
_EULER_GAMMA_DIGITS = (
    "57721566490153286060651209008240243104215933593992359880576723488486"
    "77267776646709369470632917467495146314472498070824809605040144865428"
    "36224173997644923536253500333742937337737673942792595258247094916008"
    "73520394816567085323315177661152862119950150798479374508570574002992"
    "13547861466940296043254215190587755352673313992540129674205137541395"
    "49"
)

ExactValue = Union[int, str, Fraction, "gmpy2.mpz", "gmpy2.mpq"]

T = TypeVar("T")


class IntervalDomainError(ValueError):
    """An operation was applied outside its real domain."""


class StraddlesInteger(ArithmeticError):
    """An enclosure contains an integer in its interior, so its floor
    cannot be certified at the available precision."""


class Certainty(Enum):
    STRICTLY_LESS = "strictly-less"
    STRICTLY_GREATER = "strictly-greater"
    INDETERMINATE = "indeterminate"


def max_precision() -> int:
    """Precision-escalation cap in bits (ROBIN_MAX_PRECISION overrides)."""
    raw = os.environ.get("ROBIN_MAX_PRECISION")
    if raw is None:
        return _DEFAULT_PRECISION_CAP
    cap = int(raw)
    if cap < MIN_PRECISION:
        raise ValueError(f"ROBIN_MAX_PRECISION must be >= {MIN_PRECISION}, got {cap}")
    return cap


def _down(precision: int) -> "gmpy2.context":
    return gmpy2.context(precision=precision, round=gmpy2.RoundDown)


def _up(precision: int) -> "gmpy2.context":
    return gmpy2.context(precision=precision, round=gmpy2.RoundUp)


def _to_exact(x: ExactValue) -> "gmpy2.mpq":
    """Convert an exact input to mpq; strings are exact decimals/fractions."""
    if isinstance(x, (gmpy2.mpq, gmpy2.mpz)):
        return gmpy2.mpq(x)
    if isinstance(x, int):
        return gmpy2.mpq(x)
    if isinstance(x, Fraction):
        return gmpy2.mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        f = Fraction(x)
        return gmpy2.mpq(f.numerator, f.denominator)
    if isinstance(x, float):
        raise TypeError(
            "float is not an exact value; pass a Fraction, int, or decimal string"
        )
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact value")


def _validate_precision(precision: int) -> None:
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")


class IntervalReal:
    """An immutable enclosure [lo, hi] at a stated working precision.

    Do not mutate lo/hi after construction; every operation returns a new
    interval.  Values are safe to share across threads.
    """

    __slots__ = ("lo", "hi", "precision")

    def __init__(self, lo: "gmpy2.mpfr", hi: "gmpy2.mpfr", precision: int):
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise IntervalDomainError("NaN endpoint in interval")
        if lo > hi:
            raise IntervalDomainError(f"inverted interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.precision = precision

    # -- constructors --------------------------------------------------

    @staticmethod
    def from_exact(x: ExactValue, precision: int = DEFAULT_PRECISION) -> "IntervalReal":
        _validate_precision(precision)
        q = _to_exact(x)
        with _down(precision):
            lo = gmpy2.mpfr(q)
        with _up(precision):
            hi = gmpy2.mpfr(q)
        return IntervalReal(lo, hi, precision)

    @staticmethod
    def from_float_center_radius(
        center: float, radius: float, precision: int = DEFAULT_PRECISION
    ) -> "IntervalReal":
        """Enclosure [center - radius, center + radius] with the float
        arguments taken at their exact binary values (no further slop)."""
        _validate_precision(precision)
        if radius < 0:
            raise IntervalDomainError("negative radius")
        c = gmpy2.mpq(center)
        r = gmpy2.mpq(radius)
        with _down(precision):
            lo = gmpy2.mpfr(c - r)
        with _up(precision):
            hi = gmpy2.mpfr(c + r)
        return IntervalReal(lo, hi, precision)

    # -- inspection ----------------------------------------------------

    def width(self) -> "gmpy2.mpfr":
        with _up(self.precision):
            return self.hi - self.lo

    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: ExactValue) -> bool:
        """Exact membership test (no rounding: endpoints compared as rationals)."""
        q = _to_exact(x)
        if gmpy2.is_infinite(self.lo):
            lo_ok = self.lo < 0
        else:
            lo_ok = gmpy2.mpq(self.lo) <= q
        if gmpy2.is_infinite(self.hi):
            hi_ok = self.hi > 0
        else:
            hi_ok = q <= gmpy2.mpq(self.hi)
        return bool(lo_ok and hi_ok)

    def encloses(self, other: "IntervalReal") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "IntervalReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __repr__(self) -> str:
        return f"IntervalReal([{self.lo}, {self.hi}], prec={self.precision})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalReal):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and self.precision == other.precision
        )

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, self.precision))

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            return other
        return IntervalReal.from_exact(other, self.precision)

    def __add__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        p = max(self.precision, other.precision)
        with _down(p):
            lo = self.lo + other.lo
        with _up(p):
            hi = self.hi + other.hi
        return IntervalReal(lo, hi, p)

    __radd__ = __add__

    def __neg__(self) -> "IntervalReal":
        return IntervalReal(-self.hi, -self.lo, self.precision)

    def __sub__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        p = max(self.precision, other.precision)
        with _down(p):
            lo = self.lo - other.hi
        with _up(p):
            hi = self.hi - other.lo
        return IntervalReal(lo, hi, p)

    def __rsub__(self, other) -> "IntervalReal":
        return (-self).__add__(other)

    def __mul__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        p = max(self.precision, other.precision)
        pairs = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        with _down(p):
            lo = min(a * b for a, b in pairs)
        with _up(p):
            hi = max(a * b for a, b in pairs)
        return IntervalReal(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        p = max(self.precision, other.precision)
        pairs = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        with _down(p):
            lo = min(a / b for a, b in pairs)
        with _up(p):
            hi = max(a / b for a, b in pairs)
        return IntervalReal(lo, hi, p)

    def __rtruediv__(self, other) -> "IntervalReal":
        return self._coerce(other).__truediv__(self)

    def __abs__(self) -> "IntervalReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        with _up(self.precision):
            hi = max(-self.lo, self.hi)
        return IntervalReal(gmpy2.mpfr(0, self.precision), hi, self.precision)

    def pow_int(self, k: int) -> "IntervalReal":
        """Integer power; base interval must be nonnegative (or k == 0)."""
        if k == 0:
            one = gmpy2.mpfr(1, self.precision)
            return IntervalReal(one, one, self.precision)
        if k < 0:
            return IntervalReal.from_exact(1, self.precision) / self.pow_int(-k)
        if self.lo < 0:
            raise IntervalDomainError("pow_int requires a nonnegative interval")
        p = self.precision
        with _down(p):
            lo = self.lo ** k
        with _up(p):
            hi = self.hi ** k
        return IntervalReal(lo, hi, p)

    def ln(self) -> "IntervalReal":
        if self.lo <= 0:
            raise IntervalDomainError(f"ln of interval with lo={self.lo} <= 0")
        p = self.precision
        with _down(p):
            lo = gmpy2.log(self.lo)
        with _up(p):
            hi = gmpy2.log(self.hi)
        return IntervalReal(lo, hi, p)

    def exp(self) -> "IntervalReal":
        p = self.precision
        with _down(p):
            lo = gmpy2.exp(self.lo)
        with _up(p):
            hi = gmpy2.exp(self.hi)
        if gmpy2.is_infinite(hi):
            raise OverflowError("exp upper bound exceeds representable magnitude")
        return IntervalReal(lo, hi, p)


# -- module-level operation surface -------------------------------------


def make_interval(x: ExactValue, precision: int = DEFAULT_PRECISION) -> IntervalReal:
    """Tight enclosure of an exact rational or integer."""
    return IntervalReal.from_exact(x, precision)


def ln(x: IntervalReal) -> IntervalReal:
    return x.ln()


def exp(x: IntervalReal) -> IntervalReal:
    return x.exp()


def euler_gamma(precision: int = DEFAULT_PRECISION) -> IntervalReal:
    """Enclosure of the Euler-Mascheroni constant from the embedded literal."""
    _validate_precision(precision)
    cap = max_precision()
    if precision > cap:
        raise ValueError(f"precision {precision} exceeds cap {cap}")
    ndigits = len(_EULER_GAMMA_DIGITS)
    scale = 10 ** ndigits
    truncated = gmpy2.mpq(int(_EULER_GAMMA_DIGITS), scale)
    # gamma lies in (truncated, truncated + 10^-ndigits)
    with _down(precision):
        lo = gmpy2.mpfr(truncated)
    with _up(precision):
        hi = gmpy2.mpfr(truncated + gmpy2.mpq(1, scale))
    return IntervalReal(lo, hi, precision)


def exp_euler_gamma(precision: int = DEFAULT_PRECISION) -> IntervalReal:
    """Enclosure of e^gamma (~1.7810724179)."""
    return euler_gamma(precision).exp()


def certified_compare(a: IntervalReal, b: IntervalReal) -> Certainty:
    """Strict verdict only when the enclosures are disjoint."""
    if a.hi < b.lo:
        return Certainty.STRICTLY_LESS
    if a.lo > b.hi:
        return Certainty.STRICTLY_GREATER
    return Certainty.INDETERMINATE


def floor_certified(x: IntervalReal) -> int:
    """Exact floor of the enclosed value; raises StraddlesInteger if the
    enclosure does not pin the floor down."""
    if gmpy2.is_infinite(x.lo) or gmpy2.is_infinite(x.hi):
        raise IntervalDomainError("floor of an unbounded interval")
    q_lo = gmpy2.mpq(x.lo)
    q_hi = gmpy2.mpq(x.hi)
    f_lo = int(q_lo.numerator // q_lo.denominator)
    f_hi = int(q_hi.numerator // q_hi.denominator)
    if f_lo == f_hi:
        return f_lo
    # the upper endpoint may *be* the integer: [2.9, 3.0] still straddles
    # because the exact value could be anywhere in the gap
    raise StraddlesInteger(f"interval [{x.lo}, {x.hi}] straddles an integer")


# -- precision escalation --------------------------------------------------


def resolve_with_escalation(
    attempt: Callable[[int], Optional[T]],
    start: int = DEFAULT_PRECISION,
    cap: Optional[int] = None,
) -> Optional[T]:
    """Run ``attempt`` at doubling precision until it returns a value.

    ``attempt(precision)`` returns None to request more precision.  Returns
    None if the cap is reached without a decision.
    """
    cap = max_precision() if cap is None else cap
    precision = min(start, cap)
    while True:
        result = attempt(precision)
        if result is not None:
            return result
        if precision >= cap:
            return None
        precision = min(2 * precision, cap)


def compare_with_escalation(
    build_a: Callable[[int], IntervalReal],
    build_b: Callable[[int], IntervalReal],
    start: int = DEFAULT_PRECISION,
    cap: Optional[int] = None,
) -> Certainty:
    """certified_compare with automatic precision doubling up to the cap."""

    def attempt(precision: int) -> Optional[Certainty]:
        verdict = certified_compare(build_a(precision), build_b(precision))
        return None if verdict is Certainty.INDETERMINATE else verdict

    result = resolve_with_escalation(attempt, start=start, cap=cap)
    return Certainty.INDETERMINATE if result is None else result


def floor_with_escalation(
    build: Callable[[int], IntervalReal],
    start: int = DEFAULT_PRECISION,
    cap: Optional[int] = None,
) -> int:
    """floor_certified with automatic precision doubling up to the cap."""
    cap = max_precision() if cap is None else cap
    precision = min(start, cap)
    while True:
        try:
            return floor_certified(build(precision))
        except StraddlesInteger:
            if precision >= cap:
                raise
            precision = min(2 * precision, cap)
