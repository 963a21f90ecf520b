import threading
from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from spinlimit.exact import (
    HalfInt,
    ParityError,
    RangeError,
    SqrtRational,
    factorial,
    format_fixed,
    format_sci,
    sqrt_rational_to_float,
    working_precision,
)


def test_factorial_examples():
    assert factorial(0) == 1
    assert factorial(5) == 120
    assert factorial(20) == 2432902008176640000


def test_factorial_recurrence():
    for n in range(300):
        assert factorial(n + 1) == (n + 1) * factorial(n)


def test_factorial_rejects_negative():
    with pytest.raises(RangeError):
        factorial(-1)


def test_factorial_concurrent_growth():
    expected = [1]
    for i in range(1, 3001):
        expected.append(expected[-1] * i)
    errors = []

    def worker(offset):
        for n in range(offset, 3001, 7):
            if factorial(n) != expected[n]:
                errors.append(n)

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(7)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors


@pytest.mark.parametrize(
    "value, twice",
    [(0, 0), (Fraction(1, 2), 1), ("3/2", 3), (-2, -4), (mpq(5, 2), 5), (2.5, 5)],
)
def test_halfint_parsing(value, twice):
    assert HalfInt.of(value).twice == twice


def test_halfint_rejects_thirds():
    with pytest.raises(ParityError):
        HalfInt.of(Fraction(1, 3))


def test_halfint_arithmetic():
    s = HalfInt(3)
    assert str(s) == "3/2"
    assert (s - 1).twice == 1
    assert (-s).twice == -3
    assert s.value == mpq(3, 2)
    with pytest.raises(ParityError):
        int(s)


def test_sqrt_rational_invariants():
    with pytest.raises(ValueError):
        SqrtRational(0, mpq(1))
    with pytest.raises(ValueError):
        SqrtRational(1, mpq(0))
    with pytest.raises(ValueError):
        SqrtRational(1, mpq(-1))
    assert SqrtRational.from_signed_square(-1, 0) == SqrtRational.zero()


def test_perfect_square_is_exact():
    assert sqrt_rational_to_float(SqrtRational(1, mpq(1, 4)), 256) == mpfr("0.5", 256)
    assert sqrt_rational_to_float(SqrtRational.zero(), 256) == 0


def test_sqrt_two_against_mpmath():
    value = sqrt_rational_to_float(SqrtRational(-1, mpq(2)), 64)
    num, den = value.as_integer_ratio()
    with mpmath.workprec(400):
        oracle = -mpmath.sqrt(2)
        rel = abs((mpmath.mpf(int(num)) / int(den) - oracle) / oracle)
        assert rel <= mpmath.mpf(2) ** (1 - 64)
    assert str(value).startswith("-1.414213562373095048")


def test_negative_values_keep_precision():
    x = sqrt_rational_to_float(SqrtRational(-1, mpq(1, 9)), 256)
    assert x.precision == 256
    with working_precision(256):
        assert abs(x + mpfr(1) / 3) < mpfr(2) ** -250


radicands = st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(10**6)).filter(lambda q: q > 0)
signs = st.sampled_from([-1, 1])


@settings(max_examples=200, deadline=None)
@given(signs, radicands, signs, radicands, st.sampled_from([64, 128, 256]))
def test_product_rounding(sa, ra, sb, rb, precision):
    a, b = SqrtRational(sa, mpq(ra)), SqrtRational(sb, mpq(rb))
    exact = sqrt_rational_to_float(a * b, precision)
    with working_precision(precision):
        approx = sqrt_rational_to_float(a, precision) * sqrt_rational_to_float(b, precision)
        ulp = gmpy2.exp2(gmpy2.get_exp(exact) - precision)
        assert abs(exact - approx) <= 4 * ulp


@settings(max_examples=200, deadline=None)
@given(signs, radicands, st.fractions(max_denominator=1000))
def test_scale_squares_exactly(sign, rad, q):
    a = SqrtRational(sign, mpq(rad))
    scaled = a.scale(q)
    assert scaled.radicand == mpq(q) ** 2 * a.radicand
    if q:
        assert scaled.sign == sign * (1 if q > 0 else -1)
    else:
        assert scaled.is_zero()


def test_format_sci_is_stable():
    x = sqrt_rational_to_float(SqrtRational(1, mpq(2)), 64)
    assert format_sci(x, 64) == "1.414213562373095049e+00"
    assert format_sci(mpfr(0, 64), 64) == "0.000000000000000000e+00"
    assert format_sci(-x, 64).startswith("-1.41421")
    assert format_sci(mpfr("1e-5", 64), 64).endswith("e-05")


def test_format_fixed():
    assert format_fixed(mpfr("0.5", 64), 10) == "0.5"
    assert format_fixed(mpfr(-12, 64), 10) == "-12"
    assert format_fixed(mpfr("0.00125", 64), 3) == "0.00125"


def test_precision_floor():
    with pytest.raises(ValueError):
        sqrt_rational_to_float(SqrtRational(1, mpq(2)), 16)
