"""Exact divisor-sum arithmetic and direct Robin-inequality checks.

check_ri decides sigma(n) < e^gamma * n * loglog n for a single n by
certified interval comparison with precision escalation.  verify_range
screens whole windows with a fast float pass over exact sigma values and
routes anything near the threshold back through check_ri, so the speed of
the screen never costs soundness.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from . import primes as primes_mod
from .factorization import Factorization, FactorizationError
from .intervals import (
    DEFAULT_PRECISION,
    IntervalReal,
    exp_euler_gamma,
    ln,
    make_interval,
    max_precision,
    resolve_with_escalation,
)
from .primes import (
    DEFAULT_SEGMENT_SIZE,
    DEFAULT_SIEVE_CAP,
    SegmentTooLarge,
    base_primes,
    rigorous_chunk_sum,
    sigma_window,
    theta_range,
)

__all__ = [
    "DEFAULT_RANGE_CAP",
    "DEGENERATE_LIMIT",
    "RiStatus",
    "RiVerdict",
    "check_ri",
    "factor_int",
    "is_degenerate",
    "log_n",
    "log_rho",
    "rho_exact",
    "sigma_exact",
    "sigma_of_int",
    "verify_range",
]

DEFAULT_RANGE_CAP = 10 ** 10

# below this the inequality is far outside its asymptotic regime; range
# reports tag such violators "degenerate"
DEGENERATE_LIMIT = 15

# float screen: anything with sigma/n above (1 - band) * threshold gets an
# exact recheck, which makes the hardware-float pass sound
_SCREEN_BAND = 1e-6

# expanded segments beyond this many primes use the float path inside
# log_rho instead of per-prime MPFR terms
_MPFR_TERM_LIMIT = 300_000


class RiStatus(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class RiVerdict:
    n: int
    status: RiStatus
    margin: IntervalReal  # e^gamma * loglog n - sigma(n)/n


# -- exact arithmetic --------------------------------------------------------


def factor_int(n: int) -> List[Tuple[int, int]]:
    """Trial-division factorization (meant for n within the range cap)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    out: List[Tuple[int, int]] = []
    rest = n
    for p in base_primes(math.isqrt(n)):
        p = int(p)
        if p * p > rest:
            break
        if rest % p == 0:
            a = 0
            while rest % p == 0:
                rest //= p
                a += 1
            out.append((p, a))
    if rest > 1:
        out.append((rest, 1))
    return out


def _sigma_from_pairs(pairs) -> int:
    sigma = 1
    for p, a in pairs:
        sigma *= (p ** (a + 1) - 1) // (p - 1)
    return sigma


def sigma_of_int(n: int) -> int:
    """Exact sigma(n) for a plain integer."""
    return _sigma_from_pairs(factor_int(n))


def sigma_exact(f: Factorization) -> int:
    """Exact sigma of the represented integer (explicit pairs only)."""
    if not f.is_explicit():
        raise FactorizationError("sigma_exact requires an explicit factorization")
    return _sigma_from_pairs(f.pairs)


def rho_exact(f: Factorization) -> Fraction:
    """Exact sigma(N)/N in lowest terms (explicit pairs only)."""
    return Fraction(sigma_exact(f), f.value())


# -- interval logs of factorizations ----------------------------------------


def _pair_log_rho_term(p: int, a: int, precision: int) -> IntervalReal:
    # ln((1 - p^-(a+1)) / (1 - p^-1)) = ln((p^(a+1) - 1) / (p^a (p - 1)))
    ratio = Fraction(p ** (a + 1) - 1, p ** a * (p - 1))
    return ln(make_interval(ratio, precision))


def _segment_log_rho_float(chunk: np.ndarray, e: int) -> Tuple[float, float]:
    # summed term: log1p(-p^-(e+1)) - log1p(-1/p); the generous ulp budget
    # covers np.power + log1p compounding
    ps = chunk.astype(np.float64)
    terms = np.log1p(-np.power(ps, float(-(e + 1)))) - np.log1p(-1.0 / ps)
    return rigorous_chunk_sum(terms, per_term_ulps=16)


def log_rho(
    f: Factorization,
    precision: Optional[int] = None,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
) -> IntervalReal:
    """Enclosure of ln(sigma(N)/N) from the factorization alone.

    Primes with exponent zero contribute nothing.  Segment primes are
    expanded through the sieve; very long segments switch to the rigorous
    float path unless an explicit precision forces per-prime MPFR terms.
    """
    work = precision if precision is not None else DEFAULT_PRECISION
    acc = make_interval(0, work)
    for p, a in f.pairs:
        acc = acc + _pair_log_rho_term(p, a, work)
    for lo, hi, e in f.segments:
        if hi > sieve_cap:
            raise SegmentTooLarge(f"segment bound {hi} exceeds sieve cap {sieve_cap}")
        use_float = precision is None and (hi - lo) > _MPFR_TERM_LIMIT
        for chunk in primes_mod.iter_prime_arrays(lo, hi):
            if use_float:
                s, err = _segment_log_rho_float(chunk, e)
                acc = acc + IntervalReal.from_float_center_radius(s, err, work)
            else:
                for p in chunk:
                    acc = acc + _pair_log_rho_term(int(p), e, work)
    return acc


def log_n(
    f: Factorization,
    precision: Optional[int] = None,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
) -> IntervalReal:
    """Enclosure of ln N = sum a_i ln p_i (+ e * theta over each segment)."""
    work = precision if precision is not None else DEFAULT_PRECISION
    acc = make_interval(0, work)
    for p, a in f.pairs:
        acc = acc + make_interval(a, work) * ln(make_interval(p, work))
    for lo, hi, e in f.segments:
        if hi > sieve_cap:
            raise SegmentTooLarge(f"segment bound {hi} exceeds sieve cap {sieve_cap}")
        acc = acc + make_interval(e, work) * theta_range(lo, hi, precision)
    return acc


# -- direct RI check ---------------------------------------------------------


def check_ri(n: int) -> RiVerdict:
    """Certified verdict on sigma(n) < e^gamma * n * loglog n."""
    if n < 3:
        raise ValueError(f"check_ri needs n >= 3, got {n}")
    rho = Fraction(sigma_of_int(n), n)

    def margin_at(precision: int) -> IntervalReal:
        rhs = exp_euler_gamma(precision) * ln(ln(make_interval(n, precision)))
        return rhs - make_interval(rho, precision)

    def attempt(precision: int) -> Optional[RiVerdict]:
        margin = margin_at(precision)
        if margin.lo > 0:
            return RiVerdict(n, RiStatus.HOLDS, margin)
        if margin.hi < 0:
            return RiVerdict(n, RiStatus.FAILS, margin)
        return None

    verdict = resolve_with_escalation(attempt)
    if verdict is None:
        return RiVerdict(n, RiStatus.INDETERMINATE, margin_at(max_precision()))
    return verdict


def is_degenerate(n: int) -> bool:
    return n <= DEGENERATE_LIMIT


# -- range verification ------------------------------------------------------


def _screen_window(wlo: int, whi: int, segment_size: int, egamma: float) -> List[int]:
    window = sigma_window(wlo, whi, segment_size)
    nvals = np.arange(wlo, whi + 1, dtype=np.float64)
    threshold = egamma * np.log(np.log(nvals))
    ratio = window.sigma / nvals
    flagged = np.flatnonzero(ratio > threshold * (1.0 - _SCREEN_BAND))
    return [int(i) + wlo for i in flagged]


def verify_range(
    lo: int,
    hi: int,
    threads: int = 1,
    cap: int = DEFAULT_RANGE_CAP,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> List[int]:
    """Exactly the n in [lo, hi] with sigma(n) >= e^gamma * n * loglog n.

    Deterministic and independent of ``threads``; results sorted.
    """
    if not 3 <= lo <= hi:
        raise ValueError(f"need 3 <= lo <= hi, got [{lo}, {hi}]")
    if hi > cap:
        raise ValueError(f"upper bound {hi} exceeds cap {cap}")
    egamma = float(exp_euler_gamma(64).hi)
    windows = [
        (start, min(start + segment_size - 1, hi))
        for start in range(lo, hi + 1, segment_size)
    ]
    if threads <= 1:
        flagged_lists = [
            _screen_window(a, b, segment_size, egamma) for a, b in windows
        ]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flagged_lists = list(
                pool.map(lambda w: _screen_window(*w, segment_size, egamma), windows)
            )
    violators: List[int] = []
    for flagged in flagged_lists:
        for n in flagged:
            verdict = check_ri(n)
            if verdict.status is RiStatus.FAILS:
                violators.append(n)
            elif verdict.status is RiStatus.INDETERMINATE:
                raise ArithmeticError(
                    f"check_ri({n}) indeterminate at the precision cap"
                )
    return violators
