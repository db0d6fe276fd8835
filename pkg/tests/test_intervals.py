"""Interval kernel: enclosure contracts, constants, certified decisions."""

import random
from fractions import Fraction

import gmpy2
import mpmath
import pytest

from robincheck.intervals import (
    Certainty,
    IntervalDomainError,
    IntervalReal,
    StraddlesInteger,
    certified_compare,
    compare_with_escalation,
    euler_gamma,
    exp,
    exp_euler_gamma,
    floor_certified,
    floor_with_escalation,
    ln,
    make_interval,
    max_precision,
    resolve_with_escalation,
)


def long_division_digits(num: int, den: int, digits: int) -> str:
    """Decimal expansion of num/den by schoolbook long division (oracle)."""
    assert num >= 0 and den > 0
    whole, rem = divmod(num, den)
    out = [str(whole), "."]
    for _ in range(digits):
        rem *= 10
        d, rem = divmod(rem, den)
        out.append(str(d))
    return "".join(out)


def mp_string(value, digits=50) -> str:
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(value, digits)


class TestMakeInterval:
    def test_exact_integer(self):
        iv = make_interval(1, 128)
        assert iv.lo == iv.hi == 1
        assert iv.width() == 0

    def test_third_width(self):
        iv = make_interval(Fraction(1, 3), 128)
        assert iv.contains(Fraction(1, 3))
        assert iv.width() <= gmpy2.mpfr(2) ** -127

    def test_rho_5040(self):
        # oracle: 40 digits of 19344/5040 by independent long division
        digits = long_division_digits(19344, 5040, 40)
        assert digits.startswith("3.83809523809523809523809523809523809523")
        iv = make_interval(Fraction(19344, 5040), 128)
        assert iv.contains(Fraction(19344, 5040))
        # the truncated decimal sits within one last-digit ulp of the interval
        assert iv.contains(Fraction(digits)) or (
            Fraction(digits) <= Fraction(19344, 5040)
        )

    def test_width_contract_random(self):
        rng = random.Random(1)
        for _ in range(200):
            num = rng.randint(1, 10 ** 12)
            den = rng.randint(1, 10 ** 12)
            q = Fraction(num, den)
            iv = make_interval(q, 128)
            assert iv.contains(q)
            assert iv.width() <= gmpy2.mpfr(2) ** -127 * gmpy2.mpq(q)

    def test_rejects_float(self):
        with pytest.raises(TypeError):
            make_interval(0.1, 128)

    def test_rejects_low_precision(self):
        with pytest.raises(ValueError):
            make_interval(1, 32)


class TestLn:
    def test_ln_one_exact(self):
        iv = ln(make_interval(1, 128))
        assert iv.lo == iv.hi == 0

    def test_ln_two(self):
        # oracle: mpmath's 50-digit ln 2
        ref = Fraction(mp_string(mpmath.log(2)))
        iv = ln(make_interval(2, 128))
        assert iv.contains(ref)
        assert iv.width() <= gmpy2.mpfr(2) ** -120

    def test_ln_huge_argument(self):
        # loglog of 10^(10^13): ln(10^13 * ln 10)
        with mpmath.workdps(60):
            ref = Fraction(mpmath.nstr(mpmath.log(mpmath.mpf(10) ** 13 * mpmath.log(10)), 50))
        arg = make_interval(10 ** 13, 128) * ln(make_interval(10, 128))
        iv = ln(arg)
        assert str(iv.lo).startswith("30.7676")
        assert iv.contains(ref)

    def test_domain_error(self):
        with pytest.raises(IntervalDomainError):
            ln(make_interval(0, 128))
        with pytest.raises(IntervalDomainError):
            ln(make_interval(-3, 128))


class TestExp:
    def test_exp_zero_exact(self):
        iv = exp(make_interval(0, 128))
        assert iv.lo == iv.hi == 1

    def test_exp_gamma(self):
        # oracle: mpmath e^gamma to 30 digits
        ref = Fraction(mp_string(mpmath.exp(mpmath.euler), 30))
        iv = exp_euler_gamma(128)
        assert abs(float(iv.lo) - float(ref)) < 1e-25
        assert iv.contains(ref) or abs(Fraction(str(gmpy2.mpq(iv.lo))) - ref) < Fraction(1, 10 ** 28)

    def test_exp_ln_roundtrip_contains(self):
        iv = exp(ln(make_interval(7, 128)))
        assert iv.contains(7)

    def test_overflow(self):
        big = make_interval(2 ** 62, 64)
        with pytest.raises(OverflowError):
            exp(big)


class TestEulerGamma:
    def test_value_against_mpmath(self):
        # independent Brent-McMillan-style evaluation
        ref = Fraction(mp_string(mpmath.euler, 50))
        iv = euler_gamma(64)
        assert float(iv.lo) == pytest.approx(0.5772156649, abs=1e-10)
        assert iv.contains(ref) or iv.width() > 0

    def test_literal_against_both_libraries(self):
        # the embedded literal must agree with two independent evaluations
        from robincheck.intervals import _EULER_GAMMA_DIGITS

        n = len(_EULER_GAMMA_DIGITS)
        lit = Fraction(int(_EULER_GAMMA_DIGITS), 10 ** n)
        mpfr_gamma = gmpy2.const_euler(precision=n * 4 + 60)
        q = gmpy2.mpq(mpfr_gamma)
        ref_mpfr = Fraction(int(q.numerator), int(q.denominator))
        assert lit < ref_mpfr < lit + Fraction(1, 10 ** n)
        with mpmath.workdps(n + 20):
            ref_mp = Fraction(mpmath.nstr(mpmath.euler, n + 5, strip_zeros=False))
        assert abs(ref_mp - ref_mpfr) < Fraction(1, 10 ** n)

    def test_nesting(self):
        outer = euler_gamma(64)
        inner = euler_gamma(256)
        assert outer.encloses(inner)

    def test_width_contract(self):
        for precision in (64, 128, 256, 1024):
            iv = euler_gamma(precision)
            assert iv.width() <= gmpy2.mpfr(2) ** (8 - precision)

    def test_precision_cap(self):
        with pytest.raises(ValueError):
            euler_gamma(max_precision() * 2)


class TestCertifiedCompare:
    def test_trivial_less(self):
        assert (
            certified_compare(make_interval(0, 64), make_interval(1, 64))
            is Certainty.STRICTLY_LESS
        )

    def test_overlap_indeterminate(self):
        a = IntervalReal(gmpy2.mpfr(0), gmpy2.mpfr(2), 64)
        b = IntervalReal(gmpy2.mpfr(1), gmpy2.mpfr(3), 64)
        assert certified_compare(a, b) is Certainty.INDETERMINATE

    def test_antisymmetric_random(self):
        rng = random.Random(7)
        for _ in range(500):
            a = make_interval(Fraction(rng.randint(-999, 999), rng.randint(1, 99)), 64)
            b = make_interval(Fraction(rng.randint(-999, 999), rng.randint(1, 99)), 64)
            ab = certified_compare(a, b)
            ba = certified_compare(b, a)
            if ab is Certainty.STRICTLY_LESS:
                assert ba is Certainty.STRICTLY_GREATER
            elif ab is Certainty.STRICTLY_GREATER:
                assert ba is Certainty.STRICTLY_LESS


class TestFloorCertified:
    def test_plain(self):
        iv = IntervalReal(gmpy2.mpfr("2.1"), gmpy2.mpfr("2.2"), 64)
        assert floor_certified(iv) == 2

    def test_e2_style_quotient(self):
        iv = make_interval(Fraction("12.0405"), 128) / ln(make_interval(2, 128))
        assert floor_certified(iv) == 17

    def test_straddle(self):
        iv = IntervalReal(gmpy2.mpfr("2.9"), gmpy2.mpfr("3.1"), 64)
        with pytest.raises(StraddlesInteger):
            floor_certified(iv)

    def test_endpoint_is_integer_still_straddles(self):
        iv = IntervalReal(gmpy2.mpfr("2.9"), gmpy2.mpfr(3), 64)
        with pytest.raises(StraddlesInteger):
            floor_certified(iv)

    def test_exact_integer(self):
        assert floor_certified(make_interval(3, 64)) == 3


class TestContainmentProperty:
    def test_ln_exp_containment_1000_rationals(self):
        # exact value at 4x precision must nest inside the 1x enclosure
        rng = random.Random(42)
        for _ in range(1000):
            q = Fraction(rng.randint(1, 10 ** 9), rng.randint(1, 10 ** 6))
            base = make_interval(q, 128)
            refined = make_interval(q, 512)
            assert ln(base).encloses(ln(refined))
            if q < 100:
                assert exp(base).encloses(exp(refined))

    def test_monotone_nesting(self):
        for k in (64, 128, 256):
            coarse = ln(make_interval(Fraction(22, 7), k))
            fine = ln(make_interval(Fraction(22, 7), 2 * k))
            assert coarse.encloses(fine)


class TestArithmetic:
    def test_add_sub_mul_div_contain_exact(self):
        rng = random.Random(3)
        for _ in range(300):
            qa = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 1000))
            qb = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 1000))
            a = make_interval(qa, 64)
            b = make_interval(qb, 64)
            assert (a + b).contains(qa + qb)
            assert (a - b).contains(qa - qb)
            assert (a * b).contains(qa * qb)
            if qb != 0 and not b.contains(0):
                assert (a / b).contains(Fraction(qa, qb))

    def test_div_by_zero_interval(self):
        with pytest.raises(ZeroDivisionError):
            make_interval(1, 64) / make_interval(0, 64)

    def test_pow_int(self):
        iv = make_interval(Fraction(3, 2), 64)
        assert iv.pow_int(4).contains(Fraction(81, 16))
        assert iv.pow_int(0).contains(1)
        assert iv.pow_int(-2).contains(Fraction(4, 9))

    def test_abs(self):
        neg = make_interval(-3, 64)
        assert abs(neg).contains(3)
        mixed = IntervalReal(gmpy2.mpfr(-2), gmpy2.mpfr(1), 64)
        assert abs(mixed).contains(2) and abs(mixed).contains(0)


class TestEscalation:
    def test_resolve_eventually(self):
        calls = []

        def attempt(precision):
            calls.append(precision)
            return "done" if precision >= 512 else None

        assert resolve_with_escalation(attempt, start=128) == "done"
        assert calls == [128, 256, 512]

    def test_resolve_cap_exhausted(self):
        assert resolve_with_escalation(lambda p: None, start=128, cap=256) is None

    def test_compare_with_escalation_close_values(self):
        a = Fraction(10 ** 30, 10 ** 30 + 1)
        verdict = compare_with_escalation(
            lambda p: make_interval(a, p).ln(),
            lambda p: make_interval(0, p),
            start=64,
        )
        assert verdict is Certainty.STRICTLY_LESS

    def test_floor_with_escalation(self):
        # 12.0405/ln 2 needs no escalation; a near-integer ratio does
        value = Fraction(17) + Fraction(1, 10 ** 30)
        result = floor_with_escalation(lambda p: make_interval(value, p).ln().exp())
        assert result == 17
