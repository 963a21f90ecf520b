"""Exact arithmetic primitives.

Rationals are ``gmpy2.mpq`` (always in lowest terms, positive denominator) and
high-precision floats are ``gmpy2.mpfr``.  Everything a coupling coefficient
needs beyond that lives here: half-integer labels, signed square roots of
rationals, and a cached factorial table.
"""

from __future__ import annotations

import math
import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import gmpy2
from gmpy2 import mpfr, mpq

Rational = type(mpq(0))
BigFloat = type(mpfr(0))

DEFAULT_PRECISION = 256
MIN_PRECISION = 32
# extra bits carried through the rational -> float conversion before the final rounding
_GUARD_BITS = 16


class RangeError(ValueError):
    """An index lies outside the domain where the quantity is defined."""


class ParityError(ValueError):
    """A spin label and its projection differ by a non-integer."""


def to_rational(x) -> Rational:
    """Convert int, Fraction, mpq or an ``"p/q"`` string to ``mpq`` exactly."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        return mpq(Fraction(x))
    return mpq(x)


@dataclass(frozen=True, order=True)
class HalfInt:
    """Integer or half-odd-integer stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int):
            object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def of(cls, value) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        q = to_rational(value)
        doubled = 2 * q
        if doubled.denominator != 1:
            raise ParityError(f"{value!r} is not a multiple of 1/2")
        return cls(int(doubled))

    @property
    def value(self) -> Rational:
        return mpq(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __int__(self) -> int:
        if self.twice % 2:
            raise ParityError(f"{self} is not an integer")
        return self.twice // 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def as_spin(s) -> HalfInt:
    spin = HalfInt.of(s)
    if spin.twice < 0:
        raise RangeError(f"spin must be nonnegative, got {spin}")
    return spin


class _FactorialTable:
    """Grow-only factorial cache: lock-free reads, locked extension."""

    def __init__(self, limit: int):
        self.limit = limit
        self._values = [1]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        if n < 0:
            raise RangeError(f"factorial of negative number {n}")
        values = self._values
        if n < len(values):
            return values[n]
        if n > self.limit:
            return math.factorial(n)
        with self._lock:
            values = self._values
            if n >= len(values):
                grown = list(values)
                acc = grown[-1]
                for i in range(len(grown), n + 1):
                    acc *= i
                    grown.append(acc)
                # publish the extended list in one assignment
                self._values = grown
                values = grown
        return values[n]


factorial = _FactorialTable(int(os.environ.get("SPINLIMIT_FACTORIAL_CACHE", "20000")))


@contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """Run mpfr arithmetic at ``bits`` of binary precision with round-to-nearest."""
    if bits < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits, got {bits}")
    with gmpy2.context(gmpy2.get_context(), precision=bits, round=gmpy2.RoundToNearest):
        yield


@dataclass(frozen=True)
class SqrtRational:
    """The exact number ``sign * sqrt(radicand)`` with a rational radicand."""

    sign: int
    radicand: Rational

    def __post_init__(self):
        rad = to_rational(self.radicand)
        object.__setattr__(self, "radicand", rad)
        if rad < 0:
            raise ValueError("radicand must be nonnegative")
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if (self.sign == 0) != (rad == 0):
            raise ValueError("sign is zero exactly when the radicand is zero")

    @classmethod
    def zero(cls) -> "SqrtRational":
        return cls(0, mpq(0))

    @classmethod
    def from_rational(cls, q) -> "SqrtRational":
        q = to_rational(q)
        return cls(_sign(q), q * q)

    @classmethod
    def from_signed_square(cls, sign: int, square) -> "SqrtRational":
        """Build from a sign and the square of the magnitude, zero-safe."""
        square = to_rational(square)
        return cls(0, mpq(0)) if square == 0 else cls(sign, square)

    def __mul__(self, other):
        if isinstance(other, SqrtRational):
            return SqrtRational(self.sign * other.sign, self.radicand * other.radicand)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self) -> "SqrtRational":
        return SqrtRational(-self.sign, self.radicand)

    def scale(self, q) -> "SqrtRational":
        """Multiply by an exact rational."""
        q = to_rational(q)
        return SqrtRational.from_signed_square(self.sign * _sign(q), self.radicand * q * q)

    def square(self) -> Rational:
        return self.radicand

    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self, precision: int = DEFAULT_PRECISION) -> BigFloat:
        return sqrt_rational_to_float(self, precision)

    def __float__(self) -> float:
        return float(self.to_float(64))

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        return f"{'+' if self.sign > 0 else '-'} sqrt({self.radicand})"


def _sign(q) -> int:
    return (q > 0) - (q < 0)


def sqrt_rational_to_float(x: SqrtRational, precision: int = DEFAULT_PRECISION) -> BigFloat:
    """Evaluate ``x`` as an mpfr with relative error at most 2**(1 - precision)."""
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits, got {precision}")
    if x.sign == 0:
        return mpfr(0, precision)
    with working_precision(precision + _GUARD_BITS):
        root = gmpy2.sqrt(mpfr(x.radicand))
    # unary minus rounds to the ambient context, so negate at the target precision
    with working_precision(precision):
        value = mpfr(root, precision)
        return value if x.sign > 0 else -value


def rational_to_float(q, precision: int = DEFAULT_PRECISION) -> BigFloat:
    return mpfr(to_rational(q), precision)


def decimal_digits(precision: int) -> int:
    """Significant decimal digits that a ``precision``-bit float resolves."""
    return max(1, int(precision * math.log10(2)))


def format_sci(x, precision: int = DEFAULT_PRECISION) -> str:
    """Scientific notation with a digit count tied to the binary precision.

    Output is a pure function of the value and ``precision``, so tables are
    reproducible byte for byte.
    """
    digits = decimal_digits(precision)
    x = mpfr(x, precision) if not isinstance(x, BigFloat) else x
    if gmpy2.is_zero(x):
        return f"{0:.{digits - 1}e}"
    if not gmpy2.is_finite(x):
        return str(x)
    mantissa, exponent, _ = x.digits(10, digits)
    sign = ""
    if mantissa.startswith("-"):
        sign, mantissa = "-", mantissa[1:]
    head, tail = mantissa[0], mantissa[1:]
    exp10 = exponent - 1
    frac = f".{tail}" if tail else ""
    return f"{sign}{head}{frac}e{'+' if exp10 >= 0 else '-'}{abs(exp10):02d}"


def format_fixed(x, digits: int) -> str:
    """Plain decimal with ``digits`` significant digits (human-facing output)."""
    if gmpy2.is_zero(x):
        return "0"
    mantissa, exponent, _ = x.digits(10, digits)
    sign = ""
    if mantissa.startswith("-"):
        sign, mantissa = "-", mantissa[1:]
    if exponent <= 0:
        body = "0." + "0" * (-exponent) + mantissa
    elif exponent >= len(mantissa):
        body = mantissa + "0" * (exponent - len(mantissa))
    else:
        body = mantissa[:exponent] + "." + mantissa[exponent:]
    if "." in body:
        body = body.rstrip("0").rstrip(".")
    return sign + body
