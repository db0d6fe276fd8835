"""Prime-exponent representation of (possibly astronomically large) integers.

A Factorization lists explicit (prime, exponent) pairs plus optional
compressed segments (p_lo, p_hi, e) meaning "every prime in [p_lo, p_hi]
carries exponent e".  Primes below the largest covered prime that appear
nowhere implicitly carry exponent 0, so the structure models generalized
factorizations without materializing them.

Text interchange format (UTF-8):
    # comment
    p e            explicit pair
    seg p_lo p_hi e    segment
Lines may arrive in any order; parsing canonicalizes (sorted, validated).
Duplicate coverage of a prime is an error, never silently merged.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import primes as primes_mod
from .primes import DEFAULT_SIEVE_CAP, SegmentTooLarge, is_prime, prev_prime

__all__ = [
    "Factorization",
    "FactorizationError",
    "parse_factorization",
    "serialize_factorization",
]


class FactorizationError(ValueError):
    """Invalid factorization structure or text."""


@dataclass(frozen=True)
class Factorization:
    """Immutable after construction; primes are validated, pairs/segments
    sorted, and any double coverage rejected."""

    pairs: Tuple[Tuple[int, int], ...] = ()
    segments: Tuple[Tuple[int, int, int], ...] = ()
    _pair_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple(sorted((int(p), int(a)) for p, a in self.pairs))
        segments = tuple(sorted((int(a), int(b), int(e)) for a, b, e in self.segments))
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "segments", segments)
        self._validate()
        object.__setattr__(self, "_pair_index", {p: a for p, a in pairs})

    def _validate(self) -> None:
        seen = set()
        for p, a in self.pairs:
            if a < 1:
                raise FactorizationError(f"exponent must be >= 1 in pair ({p}, {a})")
            if p in seen:
                raise FactorizationError(f"duplicate prime {p}")
            if not is_prime(p):
                raise FactorizationError(f"{p} is not prime")
            seen.add(p)
        prev_hi = None
        for lo, hi, e in self.segments:
            if e < 1:
                raise FactorizationError(f"segment exponent must be >= 1, got {e}")
            if not 2 <= lo <= hi:
                raise FactorizationError(f"bad segment bounds [{lo}, {hi}]")
            if prev_hi is not None and lo <= prev_hi:
                raise FactorizationError(
                    f"segments overlap near [{lo}, {hi}] (previous ends {prev_hi})"
                )
            prev_hi = hi
        for p, _ in self.pairs:
            if self._segment_at(p) is not None:
                raise FactorizationError(f"prime {p} duplicated by a segment")

    # -- queries ---------------------------------------------------------

    def _segment_at(self, p: int) -> Optional[Tuple[int, int, int]]:
        i = bisect.bisect_right(self.segments, (p, float("inf"), 0)) - 1
        if i >= 0:
            lo, hi, e = self.segments[i]
            if lo <= p <= hi:
                return self.segments[i]
        return None

    def exponent_of(self, p: int) -> int:
        """Exponent of prime p (0 when p is not covered)."""
        a = self._pair_index.get(p)
        if a is not None:
            return a
        seg = self._segment_at(p)
        return seg[2] if seg is not None else 0

    def is_explicit(self) -> bool:
        return not self.segments

    def is_trivial(self) -> bool:
        """Represents N = 1?  (No covered primes.)"""
        return not self.pairs and not any(
            prev_prime(hi, lo) is not None for lo, hi, _ in self.segments
        )

    def largest_prime(self) -> Optional[int]:
        """p_r, the largest covered prime; None when the value is 1."""
        best = self.pairs[-1][0] if self.pairs else None
        for lo, hi, _ in self.segments:
            p = prev_prime(hi, lo)
            if p is not None and (best is None or p > best):
                best = p
        return best

    def scan_bound(self) -> int:
        """Upper bound with the same covered-prime set as largest_prime()."""
        bound = self.pairs[-1][0] if self.pairs else 1
        for _, hi, _ in self.segments:
            bound = max(bound, hi)
        return bound

    def value(self) -> int:
        """The represented integer (explicit factorizations only)."""
        if self.segments:
            raise FactorizationError("cannot materialize a segmented factorization")
        n = 1
        for p, a in self.pairs:
            n *= p ** a
        return n

    def expand(
        self, sieve_cap: int = DEFAULT_SIEVE_CAP
    ) -> Iterator[Tuple[int, int]]:
        """Yield (prime, exponent) over all covered primes, increasing.

        Segments are expanded through the sieve; bounds above ``sieve_cap``
        raise SegmentTooLarge.
        """
        for lo, hi, _ in self.segments:
            if hi > sieve_cap:
                raise SegmentTooLarge(
                    f"segment bound {hi} exceeds sieve cap {sieve_cap}"
                )
        events: List[Tuple[int, Tuple]] = [(p, ("pair", p, a)) for p, a in self.pairs]
        events += [(lo, ("seg", lo, hi, e)) for lo, hi, e in self.segments]
        events.sort()
        for _, ev in events:
            if ev[0] == "pair":
                yield ev[1], ev[2]
            else:
                _, lo, hi, e = ev
                for chunk in primes_mod.iter_prime_arrays(lo, hi):
                    for p in chunk:
                        yield int(p), e

    def with_pair(self, p: int, a: int) -> "Factorization":
        """New factorization with one more explicit pair (a may be 0, which
        is a no-op aside from validation)."""
        if a == 0:
            if self.exponent_of(p) != 0:
                raise FactorizationError(f"prime {p} already covered")
            if not is_prime(p):
                raise FactorizationError(f"{p} is not prime")
            return self
        return Factorization(self.pairs + ((p, a),), self.segments)


# -- text format -----------------------------------------------------------


def parse_factorization(text: str) -> Factorization:
    pairs: List[Tuple[int, int]] = []
    segments: List[Tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "seg":
                if len(parts) != 4:
                    raise ValueError("expected: seg p_lo p_hi e")
                segments.append((int(parts[1]), int(parts[2]), int(parts[3])))
            else:
                if len(parts) != 2:
                    raise ValueError("expected: p e")
                pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise FactorizationError(f"line {lineno}: {exc}") from None
    return Factorization(tuple(pairs), tuple(segments))


def serialize_factorization(f: Factorization) -> str:
    lines = [f"{p} {a}" for p, a in f.pairs]
    lines += [f"seg {lo} {hi} {e}" for lo, hi, e in f.segments]
    return "\n".join(lines) + ("\n" if lines else "")
