"""Exponent-threshold certification for astronomically large integers.

The criterion: with T = 0.005586 / (loglog(10^(10^13)))^2 and
E(p) = floor(-log T / log p), any N > 10^(10^13) whose factorization has
some prime p_s with exponent below E(p_s) satisfies Robin's inequality.
The certificate rests on the certified interval inequality
r_term - p_s^(-a_s-1) < 0, where r_term is the Mertens remainder envelope
evaluated at log N (or at the size-precondition floor, which is the worst
case, when the caller asserts the size instead of proving it).

build_table enumerates every prime with E(p) >= 1 together with the
aggregate size of the modulus L = prod p^E(p); any N not divisible by L
has a witness prime by construction.
"""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

import gmpy2

from . import primes as primes_mod
from .factorization import Factorization
from .intervals import (
    Certainty,
    DEFAULT_PRECISION,
    IntervalReal,
    certified_compare,
    euler_gamma,
    exp,
    floor_with_escalation,
    ln,
    make_interval,
    max_precision,
    resolve_with_escalation,
)
from .mertens import REMAINDER_BOUND_VALID_FROM, BOUND_CONSTANT
from .primes import DEFAULT_SIEVE_CAP, SegmentTooLarge, is_prime
from .robin import log_n, log_rho

__all__ = [
    "CertificateReport",
    "CertificateStatus",
    "CriterionConstants",
    "CriterionTable",
    "build_table",
    "certify",
    "compute_T",
    "criterion_table_rows",
    "divisible_by_L",
    "exponent_threshold",
    "find_witness",
    "s_exact",
    "s_lower_bound",
]

# primes above this use the rigorous float path inside s_exact
_S_EXACT_FLOAT_FROM = 10 ** 7

_DEFAULT_TAIL_TOL = Fraction(1, 2 ** 80)


@dataclass(frozen=True)
class CriterionConstants:
    T: IntervalReal
    log_T: IntervalReal
    n0_log: IntervalReal  # log(10^(10^13)) = 10^13 * log 10
    remainder_threshold: int  # validity floor of the Mertens envelope
    precision: int


@functools.lru_cache(maxsize=None)
def compute_T(precision: int = DEFAULT_PRECISION) -> CriterionConstants:
    """The criterion constant T = 0.005586 / (loglog(10^(10^13)))^2."""
    ln10 = ln(make_interval(10, precision))
    n0_log = make_interval(10 ** 13, precision) * ln10
    loglog_n0 = ln(n0_log)
    T = make_interval(BOUND_CONSTANT, precision) / loglog_n0.pow_int(2)
    return CriterionConstants(
        T=T,
        log_T=ln(T),
        n0_log=n0_log,
        remainder_threshold=REMAINDER_BOUND_VALID_FROM,
        precision=precision,
    )


def exponent_threshold(p: int, precision: int = DEFAULT_PRECISION) -> int:
    """E(p) = floor(-log T / log p), certified."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")

    def build(prec: int) -> IntervalReal:
        constants = compute_T(prec)
        return (-constants.log_T) / ln(make_interval(p, prec))

    return floor_with_escalation(build, start=precision)


@dataclass(frozen=True)
class CriterionTable:
    rows: Tuple[Tuple[int, int], ...]  # (p, E(p)) for every prime with E >= 1
    p_max: int  # largest prime with E >= 1
    log_L: IntervalReal  # sum of E(p) log p
    log10_log10_L: IntervalReal
    precision: int

    def threshold_of(self, p: int) -> int:
        """E(p) for table primes, 0 beyond the table."""
        import bisect

        i = bisect.bisect_left(self.rows, (p, 0))
        if i < len(self.rows) and self.rows[i][0] == p:
            return self.rows[i][1]
        return 0


def criterion_table_rows(
    precision: int = DEFAULT_PRECISION,
    limit: Optional[int] = None,
) -> Iterator[Tuple[int, int]]:
    """Lazily yield (p, E(p)) rows in increasing p, stopping at ``limit``
    rows if given; otherwise runs through the whole E >= 1 range."""
    constants = compute_T(precision)
    neg_log_T = -constants.log_T
    # every prime with E >= 1 satisfies p <= exp(-log T); the hi endpoint
    # over-approximates, and per-prime certification trims the boundary
    q = gmpy2.mpq(exp(neg_log_T).hi)
    p_bound = int(q.numerator // q.denominator) + 1
    emitted = 0
    for chunk in primes_mod.iter_prime_arrays(2, p_bound):
        for p in chunk:
            p = int(p)
            e_val = floor_with_escalation(
                lambda prec: (-compute_T(prec).log_T) / ln(make_interval(p, prec)),
                start=precision,
            )
            if e_val >= 1:
                yield p, e_val
                emitted += 1
                if limit is not None and emitted >= limit:
                    return


def build_table(precision: int = DEFAULT_PRECISION) -> CriterionTable:
    """Full criterion table plus aggregate statistics of L = prod p^E(p)."""
    ln10 = ln(make_interval(10, precision))
    rows: List[Tuple[int, int]] = []
    log_L = make_interval(0, precision)
    for p, e_val in criterion_table_rows(precision):
        rows.append((p, e_val))
        log_L = log_L + make_interval(e_val, precision) * ln(
            make_interval(p, precision)
        )
    log10_log10_L = ln(log_L / ln10) / ln10
    return CriterionTable(
        rows=tuple(rows),
        p_max=rows[-1][0],
        log_L=log_L,
        log10_log10_L=log10_log10_L,
        precision=precision,
    )


_table_lock = threading.Lock()
_table_cache: dict = {}


def cached_table(precision: int = DEFAULT_PRECISION) -> CriterionTable:
    with _table_lock:
        table = _table_cache.get(precision)
        if table is None:
            table = build_table(precision)
            _table_cache[precision] = table
        return table


# -- witness machinery --------------------------------------------------------


def s_lower_bound(p_s: int, a_s: int, precision: int = DEFAULT_PRECISION) -> IntervalReal:
    """Enclosure of p_s^(-a_s-1), the certified lower bound on S(N)."""
    if a_s < 0:
        raise ValueError(f"need a_s >= 0, got {a_s}")
    return make_interval(Fraction(1, p_s ** (a_s + 1)), precision)


def find_witness(
    f: Factorization,
    table: Optional[CriterionTable] = None,
) -> Optional[Tuple[int, int]]:
    """Smallest prime p <= p_r whose exponent in N is below E(p).

    Implicit exponent-0 primes of the generalized factorization count, so
    a gap below p_r is itself a witness.  Returns None iff every prime
    p <= p_r with E(p) >= 1 carries at least E(p).
    """
    p_r = f.largest_prime()
    if p_r is None:
        return None
    if table is None:
        table = cached_table()
    for p, e_val in table.rows:
        if p > p_r:
            break
        a = f.exponent_of(p)
        if a < e_val:
            return (p, a)
    return None


def divisible_by_L(
    f: Factorization,
    table: Optional[CriterionTable] = None,
) -> bool:
    """True iff a_p >= E(p) for every prime p <= p_r with E(p) >= 1."""
    p_r = f.largest_prime()
    if p_r is None:
        return True
    if table is None:
        table = cached_table()
    return all(
        f.exponent_of(p) >= e_val for p, e_val in table.rows if p <= p_r
    )


# -- S(N) ----------------------------------------------------------------------


def _series_term(p: int, a: int, tail_tol: Fraction, precision: int) -> IntervalReal:
    # -ln(1 - p^-(a+1)) = sum_k x^k / k with x = p^-(a+1); geometric tail
    # folded into the upper bound
    x = Fraction(1, p ** (a + 1))
    partial = Fraction(0)
    xk = Fraction(1)
    k = 0
    while True:
        k += 1
        xk *= x
        partial += xk / k
        tail = xk * x / ((k + 1) * (1 - x))
        if tail < tail_tol * partial:
            break
    enclosure = make_interval(partial, precision)
    tail_up = make_interval(tail, precision)
    return IntervalReal(enclosure.lo, (enclosure + tail_up).hi, precision)


def _coverage_runs(f: Factorization, p_r: int):
    """Split [2, p_r] into (lo, hi, exponent) runs of constant exponent."""
    marks = [(p, p, a) for p, a in f.pairs if p <= p_r]
    marks += [(lo, min(hi, p_r), e) for lo, hi, e in f.segments if lo <= p_r]
    marks.sort()
    runs = []
    cursor = 2
    for lo, hi, e in marks:
        if cursor < lo:
            runs.append((cursor, lo - 1, 0))
        runs.append((lo, hi, e))
        cursor = hi + 1
    if cursor <= p_r:
        runs.append((cursor, p_r, 0))
    return runs


def _run_float_terms(chunk, e: int) -> IntervalReal:
    import numpy as np

    ps = chunk.astype(np.float64)
    terms = -np.log1p(-np.power(ps, float(-(e + 1))))
    s, err = primes_mod.rigorous_chunk_sum(terms, per_term_ulps=16)
    return IntervalReal.from_float_center_radius(s, err, 192)


def s_exact(
    f: Factorization,
    tail_tol: Fraction = _DEFAULT_TAIL_TOL,
    precision: Optional[int] = None,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
) -> IntervalReal:
    """Enclosure of S(N) = -sum over primes p <= p_r of ln(1 - p^-(a_p+1)).

    Exponent-0 primes contribute their -ln(1 - 1/p) term, so this is the
    full generalized-factorization sum.  Long runs of primes above 10^7
    ride the rigorous float path; everything else is summed by exact
    series with a geometric tail below ``tail_tol`` of the partial sum.
    """
    p_r = f.largest_prime()
    work = precision if precision is not None else DEFAULT_PRECISION
    acc = make_interval(0, work)
    if p_r is None:
        return acc
    if p_r > sieve_cap:
        raise SegmentTooLarge(f"p_r = {p_r} exceeds sieve cap {sieve_cap}")
    for lo, hi, e in _coverage_runs(f, p_r):
        use_float = precision is None and lo > _S_EXACT_FLOAT_FROM
        for chunk in primes_mod.iter_prime_arrays(lo, hi):
            if use_float and chunk.size:
                acc = acc + _run_float_terms(chunk, e)
            else:
                for p in chunk:
                    acc = acc + _series_term(int(p), e, tail_tol, work)
    return acc


# -- certification ---------------------------------------------------------------


class CertificateStatus(Enum):
    CERTIFIED = "certified"
    NO_WITNESS = "no-witness"
    PRECONDITION_UNMET = "precondition-unmet"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class CertificateReport:
    status: CertificateStatus
    witness: Optional[Tuple[int, int, int]]  # (p_s, a_s, E(p_s))
    log_n: IntervalReal
    r_term: Optional[IntervalReal]  # 0.005586 / (loglog N)^2 (or T, asserted)
    s_lower: Optional[IntervalReal]  # p_s^(-a_s-1)
    s_exact: Optional[IntervalReal]
    p_r: Optional[int]
    p_r_lt_log_n: Certainty
    assumed_large: bool
    size_certified: Certainty  # log N vs log(10^(10^13))
    p_r_below_remainder_threshold: bool
    rho_bound: Optional[IntervalReal]  # logloglog N + gamma + r_term - s_exact
    rho_lt_bound: Optional[Certainty]
    precision: int


def certify(
    f: Factorization,
    assume_large: bool = False,
    want_s_exact: bool = False,
    precision: int = DEFAULT_PRECISION,
    sieve_cap: int = DEFAULT_SIEVE_CAP,
    table: Optional[CriterionTable] = None,
) -> CertificateReport:
    """Run the witness-prime certification chain on a factorization.

    Status is CERTIFIED only when a witness exists, the certified interval
    inequality r_term < p_s^(-a_s-1) resolves strictly, and the size
    precondition N > 10^(10^13) is either proven from log N or asserted
    via ``assume_large`` (recorded in the report).
    """
    constants = compute_T(precision)
    logN = log_n(f, sieve_cap=sieve_cap)
    size_certified = certified_compare(logN, constants.n0_log)
    size_ok = size_certified is Certainty.STRICTLY_GREATER
    p_r = f.largest_prime()
    if p_r is None:
        p_r_lt_log_n = Certainty.INDETERMINATE
    else:
        p_r_lt_log_n = certified_compare(make_interval(p_r, precision), logN)
    witness = find_witness(f, table)
    witness_full = None
    if witness is not None:
        p_s, a_s = witness
        witness_full = (p_s, a_s, exponent_threshold(p_s, precision))

    def finish(status, r_term=None, s_low=None):
        s_val = None
        rho_bound = None
        rho_cmp = None
        if want_s_exact:
            s_val = s_exact(f, precision=None, sieve_cap=sieve_cap)
            if r_term is not None and logN.lo > 1:
                loglog = ln(logN)
                if loglog.lo > 0:
                    rho_bound = (
                        ln(loglog) + euler_gamma(precision) + r_term - s_val
                    )
                    rho_cmp = certified_compare(
                        log_rho(f, sieve_cap=sieve_cap), rho_bound
                    )
        return CertificateReport(
            status=status,
            witness=witness_full,
            log_n=logN,
            r_term=r_term,
            s_lower=s_low,
            s_exact=s_val,
            p_r=p_r,
            p_r_lt_log_n=p_r_lt_log_n,
            assumed_large=assume_large,
            size_certified=size_certified,
            p_r_below_remainder_threshold=(
                p_r is not None and p_r < REMAINDER_BOUND_VALID_FROM
            ),
            rho_bound=rho_bound,
            rho_lt_bound=rho_cmp,
            precision=precision,
        )

    def r_term_at(prec: int) -> IntervalReal:
        c = compute_T(prec)
        if size_ok:
            # the true, smaller remainder envelope at the actual log N
            return make_interval(BOUND_CONSTANT, prec) / ln(logN).pow_int(2)
        # asserted size: evaluate at the precondition floor, the worst case
        return c.T

    if not size_ok and not assume_large:
        return finish(CertificateStatus.PRECONDITION_UNMET)
    if witness is None:
        return finish(CertificateStatus.NO_WITNESS)

    p_s, a_s = witness

    def attempt(prec: int):
        r = r_term_at(prec)
        s_low = s_lower_bound(p_s, a_s, prec)
        verdict = certified_compare(r, s_low)
        if verdict is Certainty.STRICTLY_LESS:
            return ("certified", r, s_low)
        if verdict is Certainty.STRICTLY_GREATER:
            return ("reversed", r, s_low)
        return None

    resolved = resolve_with_escalation(attempt, start=precision)
    if resolved is None:
        return finish(
            CertificateStatus.INDETERMINATE,
            r_term_at(max_precision()),
            s_lower_bound(p_s, a_s, max_precision()),
        )
    kind, r_term, s_low = resolved
    if kind == "certified":
        return finish(CertificateStatus.CERTIFIED, r_term, s_low)
    # a witness with r_term > s_lower cannot occur when the preconditions
    # hold; report indeterminate rather than claim anything
    return finish(CertificateStatus.INDETERMINATE, r_term, s_low)
