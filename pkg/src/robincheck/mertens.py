"""Prime-harmonic log sums: sum of log(p/(p-1)) over p <= n.

The sum equals loglog n + gamma + R(n); ``remainder`` packages R(n)
together with the envelope 0.005586/(log n)^2.  That envelope is only
asserted for n above REMAINDER_BOUND_VALID_FROM; records below it carry
``in_guaranteed_range = False`` and a bound miss there is data, not an
error.

The streaming path computes log1p(1/(p-1)) in hardware floats per sieve
segment with a worst-case error bound folded into the enclosure, and
accumulates segment totals in 192-bit interval arithmetic, so a full scan
to 10^9 stays rigorous and fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import primes as primes_mod
from .intervals import (
    Certainty,
    IntervalReal,
    certified_compare,
    euler_gamma,
    ln,
    make_interval,
)
from .primes import DEFAULT_SEGMENT_SIZE, DEFAULT_SIEVE_CAP, SegmentTooLarge

__all__ = [
    "BOUND_CONSTANT",
    "MertensRecord",
    "REMAINDER_BOUND_VALID_FROM",
    "mertens_sum",
    "remainder",
    "scan",
]

# smallest n for which the |R(n)| < 0.005586/(log n)^2 envelope is asserted
REMAINDER_BOUND_VALID_FROM = 7_713_133_853

BOUND_CONSTANT = Fraction("0.005586")

_FLOAT_ACC_PRECISION = 192


@dataclass(frozen=True)
class MertensRecord:
    n: int
    sum: IntervalReal  # sum over p <= n of log(p/(p-1))
    remainder: IntervalReal  # sum - loglog n - gamma
    bound: IntervalReal  # 0.005586 / (log n)^2
    within_bound: Certainty  # |remainder| vs bound
    in_guaranteed_range: bool  # n > REMAINDER_BOUND_VALID_FROM


def _float_chunk(chunk: np.ndarray) -> IntervalReal:
    # log1p(1/(p-1)): division + log1p compound to well under 8 ulps
    ps = chunk.astype(np.float64)
    terms = np.log1p(1.0 / (ps - 1.0))
    s, err = primes_mod.rigorous_chunk_sum(terms, per_term_ulps=8)
    return IntervalReal.from_float_center_radius(s, err, _FLOAT_ACC_PRECISION)


def _sum_range(
    lo: int,
    hi: int,
    precision: Optional[int],
    segment_size: int,
) -> IntervalReal:
    if precision is not None:
        acc = make_interval(0, precision)
        for chunk in primes_mod.iter_prime_arrays(lo, hi, segment_size):
            for p in chunk:
                p = int(p)
                acc = acc + ln(make_interval(Fraction(p, p - 1), precision))
        return acc
    acc = make_interval(0, _FLOAT_ACC_PRECISION)
    for chunk in primes_mod.iter_prime_arrays(lo, hi, segment_size):
        if chunk.size:
            acc = acc + _float_chunk(chunk)
    return acc


def mertens_sum(
    n: int,
    precision: Optional[int] = None,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> IntervalReal:
    """Enclosure of the sum over primes p <= n of log(p/(p-1)).

    precision=None takes the fast rigorous float path; an explicit
    precision computes per-prime MPFR terms at that precision.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > sieve_cap:
        raise SegmentTooLarge(f"{n} exceeds sieve cap {sieve_cap}")
    return _sum_range(2, n, precision, segment_size)


def _record_from_sum(n: int, total: IntervalReal, precision: int) -> MertensRecord:
    loglog = ln(ln(make_interval(n, precision)))
    rem = total - loglog - euler_gamma(precision)
    bound = make_interval(BOUND_CONSTANT, precision) / ln(
        make_interval(n, precision)
    ).pow_int(2)
    return MertensRecord(
        n=n,
        sum=total,
        remainder=rem,
        bound=bound,
        within_bound=certified_compare(abs(rem), bound),
        in_guaranteed_range=n > REMAINDER_BOUND_VALID_FROM,
    )


def remainder(
    n: int,
    precision: Optional[int] = None,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
) -> MertensRecord:
    """Record of the sum, its remainder R(n), and the envelope at n."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    total = mertens_sum(n, precision, sieve_cap)
    return _record_from_sum(n, total, precision or _FLOAT_ACC_PRECISION)


def scan(
    checkpoints: Sequence[int],
    precision: Optional[int] = None,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> List[MertensRecord]:
    """One record per checkpoint from a single streaming pass."""
    cps = list(checkpoints)
    if not cps:
        return []
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly ascending")
    if cps[0] < 2:
        raise ValueError("checkpoints must be >= 2")
    if cps[-1] > sieve_cap:
        raise SegmentTooLarge(f"{cps[-1]} exceeds sieve cap {sieve_cap}")
    out: List[MertensRecord] = []
    acc = make_interval(0, precision or _FLOAT_ACC_PRECISION)
    start = 2
    for cp in cps:
        acc = acc + _sum_range(start, cp, precision, segment_size)
        out.append(_record_from_sum(cp, acc, precision or _FLOAT_ACC_PRECISION))
        start = cp + 1
    return out
