"""Segmented prime sieve, rigorous prime-log sums, divisor-sum windows.

Bulk work runs on numpy arrays.  Sums of many float64 terms (theta sums,
the Mertens-style sums in mertens.py) carry an explicit worst-case error
bound that is folded into an interval, so the fast path stays rigorous.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .intervals import IntervalReal, make_interval

__all__ = [
    "DEFAULT_SEGMENT_SIZE",
    "DEFAULT_SIEVE_CAP",
    "PrimeSegment",
    "SegmentTooLarge",
    "SigmaWindow",
    "is_prime",
    "iter_prime_arrays",
    "prev_prime",
    "primes_up_to",
    "rigorous_chunk_sum",
    "sieve_segment",
    "sigma_window",
    "theta_range",
    "theta_sum",
]

DEFAULT_SEGMENT_SIZE = 1 << 22
DEFAULT_SIEVE_CAP = 10 ** 9

# sigma_window exactness guard: sigma(n) <= n * (1 + ln n) < 64 n for all
# n below this bound, so every partial sum stays under 2^63.
_SIGMA_EXACT_BOUND = (1 << 63) // 64

# assumed worst-case accuracy of numpy's vectorized log/log1p, in ulps of
# the result; glibc and numpy's SIMD kernels are documented well under this
_LIBM_ULPS = 4


class SegmentTooLarge(ValueError):
    """A sieve request exceeded the configured segment size or cap."""


# -- base-prime cache -------------------------------------------------------

_cache_lock = threading.Lock()
_cached_limit = 0
_cached_primes = np.empty(0, dtype=np.int64)


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def base_primes(limit: int) -> np.ndarray:
    """Primes up to ``limit`` as an int64 array (cached, grown geometrically)."""
    global _cached_limit, _cached_primes
    if limit <= _cached_limit:
        return _cached_primes[: np.searchsorted(_cached_primes, limit, "right")]
    with _cache_lock:
        if limit > _cached_limit:
            new_limit = max(limit, 2 * _cached_limit, 1 << 16)
            _cached_primes = _simple_sieve(new_limit)
            _cached_limit = new_limit
    return _cached_primes[: np.searchsorted(_cached_primes, limit, "right")]


# -- segmented sieve --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrimeSegment:
    """Primality bitmap for the inclusive window [lo, hi]."""

    lo: int
    hi: int
    flags: np.ndarray  # bool, flags[i] <-> lo + i is prime

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.flags).astype(np.int64) + self.lo

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n <= self.hi:
            raise ValueError(f"{n} outside segment [{self.lo}, {self.hi}]")
        return bool(self.flags[n - self.lo])

    def count(self) -> int:
        return int(np.count_nonzero(self.flags))


def sieve_segment(
    lo: int, hi: int, max_width: int = DEFAULT_SEGMENT_SIZE
) -> PrimeSegment:
    """Exact primality flags on [lo, hi] (width capped at ``max_width``)."""
    if not 2 <= lo <= hi:
        raise ValueError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    width = hi - lo + 1
    if width > max_width:
        raise SegmentTooLarge(f"segment width {width} exceeds {max_width}")
    flags = np.ones(width, dtype=bool)
    # striking from p*p keeps the base primes themselves marked prime
    for p in base_primes(math.isqrt(hi)):
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start > hi:
            continue
        flags[start - lo :: p] = False
    return PrimeSegment(lo, hi, flags)


def iter_prime_arrays(
    lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE
) -> Iterator[np.ndarray]:
    """Primes in [lo, hi] as a stream of increasing int64 arrays."""
    lo = max(lo, 2)
    if hi < lo:
        return
    start = lo
    while start <= hi:
        end = min(start + segment_size - 1, hi)
        yield sieve_segment(start, end, segment_size).primes()
        start = end + 1


def primes_up_to(n: int) -> Iterator[int]:
    """All primes <= n, increasing."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    for chunk in iter_prime_arrays(2, n):
        for p in chunk:
            yield int(p)


# -- individual primality (deterministic Miller-Rabin) ----------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    """Deterministic below 3.3e24 (fixed Miller-Rabin base set), strong
    probable-prime test beyond."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n >= _MR_DETERMINISTIC_BOUND:
        import gmpy2

        return bool(gmpy2.is_prime(n, 40))
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prev_prime(n: int, lower: int = 2) -> Optional[int]:
    """Largest prime p with lower <= p <= n, or None."""
    if n < lower or n < 2:
        return None
    k = n
    if k > 2 and k % 2 == 0:
        k -= 1
    while k >= lower:
        if is_prime(k):
            return k
        k -= 1 if k == 3 else 2
        if k == 1:
            break
    return None


# -- rigorous float summation ------------------------------------------------


def rigorous_chunk_sum(values: np.ndarray, per_term_ulps: int = _LIBM_ULPS):
    """Sum a float64 chunk, returning (sum, error_bound).

    The bound covers (a) each stored value being within ``per_term_ulps``
    ulps of its true term and (b) worst-case rounding of the summation in
    any association order.  Requires len(values) * 2^-53 << 1.
    """
    n = int(values.size)
    if n == 0:
        return 0.0, 0.0
    eps = 2.0 ** -53
    if n * eps >= 0.25:
        raise ValueError("chunk too long for the summation error model")
    s = float(np.sum(values))
    abs_sum = float(np.sum(np.abs(values)))
    gamma_n = (n * eps) / (1.0 - n * eps)
    per_term = per_term_ulps * (2.0 ** -52)
    # abs_sum itself is a rounded quantity; (1 + gamma_n) corrects it, the
    # trailing factor absorbs the rounding of this bound computation
    err = (gamma_n + per_term) * abs_sum * (1.0 + gamma_n) * (1.0 + 1e-12)
    err += 5e-324 * n  # absolute floor against underflow edge cases
    return s, err


# -- theta sums --------------------------------------------------------------


def theta_range(
    lo: int,
    hi: int,
    precision: Optional[int] = None,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> IntervalReal:
    """Enclosure of the sum of log p over primes in [lo, hi].

    precision=None uses the fast float path with a rigorous error bound;
    an explicit precision sums per-prime MPFR logs at that precision (slow,
    meant for modest ranges and audits).
    """
    if precision is not None:
        acc = make_interval(0, precision)
        for chunk in iter_prime_arrays(lo, hi, segment_size):
            for p in chunk:
                acc = acc + make_interval(int(p), precision).ln()
        return acc
    acc = make_interval(0, 192)
    for chunk in iter_prime_arrays(lo, hi, segment_size):
        if chunk.size == 0:
            continue
        logs = np.log(chunk.astype(np.float64))
        s, e = rigorous_chunk_sum(logs)
        acc = acc + IntervalReal.from_float_center_radius(s, e, 192)
    return acc


def theta_sum(n: int, precision: Optional[int] = None) -> IntervalReal:
    """Enclosure of the Chebyshev theta function at n."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return theta_range(2, n, precision)


# -- divisor-sum windows ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SigmaWindow:
    """Exact divisor sums sigma(n) for n in the inclusive window [lo, hi]."""

    lo: int
    hi: int
    sigma: np.ndarray  # int64

    def value(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise ValueError(f"{n} outside window [{self.lo}, {self.hi}]")
        return int(self.sigma[n - self.lo])


def sigma_window(
    lo: int, hi: int, max_width: int = DEFAULT_SEGMENT_SIZE
) -> SigmaWindow:
    """Exact sigma over a window by divisor-pair accumulation.

    For each d <= sqrt(hi) and each multiple n = d*q in the window with
    q >= d, both divisors d and q are added (d alone when n = d^2).
    """
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    if hi > _SIGMA_EXACT_BOUND:
        raise OverflowError(
            f"window upper bound {hi} exceeds the 64-bit exactness guard "
            f"{_SIGMA_EXACT_BOUND}"
        )
    width = hi - lo + 1
    if width > max_width:
        raise SegmentTooLarge(f"window width {width} exceeds {max_width}")
    sig = np.zeros(width, dtype=np.int64)
    for d in range(1, math.isqrt(hi) + 1):
        q0 = max(d, (lo + d - 1) // d)
        q1 = hi // d
        if q0 > q1:
            continue
        start = d * q0 - lo
        sig[start :: d][: q1 - q0 + 1] += np.arange(q0, q1 + 1, dtype=np.int64) + d
        if q0 == d:
            sig[d * d - lo] -= d  # n = d^2 has d as a single divisor
    return SigmaWindow(lo, hi, sig)
