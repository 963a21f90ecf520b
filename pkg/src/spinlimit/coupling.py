"""Exact SU(2) coupling coefficients.

All values are :class:`~spinlimit.exact.SqrtRational`.  Phases follow
Condon-Shortley, with

    <j1 m1 j2 m2 | j3 m3> = (-1)**(j1 - j2 + m3) * sqrt(2 j3 + 1) * (j1 j2 j3; m1 m2 -m3).

Three independent routes to the zero-projection family <s m s -m | l 0> are
provided: the Racah single sum (:func:`cg`), the factored family
(:func:`reduced_family`) and the three-term descent in m seeded from the
stretched product (:func:`descend_from_stretched`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .exact import (
    HalfInt,
    ParityError,
    RangeError,
    Rational,
    SqrtRational,
    as_spin,
    factorial,
)

__all__ = [
    "CGQuery",
    "ReducedFamily",
    "RecurrenceCheck",
    "wigner3j",
    "cg",
    "zero_projection_cg",
    "stretched_weighted",
    "stretched_factorial_radicand",
    "literal_factorial_radicand",
    "reduced_family",
    "check_m_recurrence",
    "descent_ratios",
    "descend_from_stretched",
]


@dataclass(frozen=True)
class CGQuery:
    """Labels of <j1 m1 j2 m2 | j3 m3>."""

    j1: HalfInt
    j2: HalfInt
    j3: HalfInt
    m1: HalfInt
    m2: HalfInt
    m3: HalfInt

    @classmethod
    def of(cls, j1, m1, j2, m2, j3, m3) -> "CGQuery":
        h = HalfInt.of
        return cls(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3))

    def evaluate(self) -> SqrtRational:
        return cg(self.j1, self.m1, self.j2, self.m2, self.j3, self.m3)


def _twice(*labels) -> list[int]:
    return [HalfInt.of(x).twice for x in labels]


def _sign_of(q) -> int:
    return (q > 0) - (q < 0)


def wigner3j(j1, j2, j3, m1, m2, m3) -> SqrtRational:
    """Exact Wigner 3j symbol (j1 j2 j3; m1 m2 m3) by the Racah formula.

    Selection-rule failures give an exact zero.  Raises ParityError when some
    j_i + m_i is not an integer.
    """
    tj1, tj2, tj3, tm1, tm2, tm3 = _twice(j1, j2, j3, m1, m2, m3)
    if min(tj1, tj2, tj3) < 0:
        raise RangeError("angular momenta must be nonnegative")
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if (tj + tm) % 2:
            raise ParityError(f"j + m must be an integer (2j={tj}, 2m={tm})")

    if tm1 + tm2 + tm3 != 0:
        return SqrtRational.zero()
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return SqrtRational.zero()
    if tj3 > tj1 + tj2 or tj3 < abs(tj1 - tj2) or (tj1 + tj2 + tj3) % 2:
        return SqrtRational.zero()

    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tj2 + tj3) // 2
    c = (-tj1 + tj2 + tj3) // 2
    triangle = mpq(factorial(a) * factorial(b) * factorial(c), factorial((tj1 + tj2 + tj3) // 2 + 1))

    j1p, j1m = (tj1 + tm1) // 2, (tj1 - tm1) // 2
    j2p, j2m = (tj2 + tm2) // 2, (tj2 - tm2) // 2
    j3p, j3m = (tj3 + tm3) // 2, (tj3 - tm3) // 2
    outer = factorial(j1p) * factorial(j1m) * factorial(j2p) * factorial(j2m) * factorial(j3p) * factorial(j3m)

    # the seven factorial arguments below are all >= 0 on [zmin, zmax]
    shift1 = (tj3 - tj2 + tm1) // 2
    shift2 = (tj3 - tj1 - tm2) // 2
    zmin = max(0, -shift1, -shift2)
    zmax = min(a, j1m, j2p)
    total = mpq(0)
    for z in range(zmin, zmax + 1):
        den = (
            factorial(z)
            * factorial(a - z)
            * factorial(j1m - z)
            * factorial(j2p - z)
            * factorial(shift1 + z)
            * factorial(shift2 + z)
        )
        total += mpq(-1 if z % 2 else 1, den)
    if total == 0:
        return SqrtRational.zero()

    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    return SqrtRational(phase * _sign_of(total), triangle * outer * total * total)


def cg(j1, m1, j2, m2, j3, m3) -> SqrtRational:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | j3 m3>, exact."""
    tj1, tm1, tj2, tm2, tj3, tm3 = _twice(j1, m1, j2, m2, j3, m3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if (tj + tm) % 2:
            raise ParityError(f"j + m must be an integer (2j={tj}, 2m={tm})")
    if tm1 + tm2 != tm3:
        return SqrtRational.zero()
    three_j = wigner3j(HalfInt(tj1), HalfInt(tj2), HalfInt(tj3), HalfInt(tm1), HalfInt(tm2), HalfInt(-tm3))
    if three_j.is_zero():
        return three_j
    phase = -1 if ((tj1 - tj2 + tm3) // 2) % 2 else 1
    return SqrtRational(phase * three_j.sign, three_j.radicand * (tj3 + 1))


def zero_projection_cg(s, m, l: int) -> SqrtRational:
    """<s m s -m | l 0> through the Racah route."""
    m = HalfInt.of(m)
    return cg(s, m, s, -m, l, 0)


def _check_l(two_s: int, l: int) -> None:
    if not isinstance(l, int) or isinstance(l, bool):
        raise RangeError(f"l must be an integer, got {l!r}")
    if l < 0 or l > two_s:
        raise RangeError(f"l={l} outside 0..2s={two_s}")


def _stretched_product(two_s: int, l: int) -> Rational:
    # prod_{k=0}^{l} (1 - k/N) / prod_{k=0}^{l} (1 + k/N) with N = 2s + 1; the k = 0 factors are 1
    big_n = two_s + 1
    num = den = 1
    for k in range(1, l + 1):
        num *= big_n - k
        den *= big_n + k
    return mpq(num, den)


def stretched_weighted(s, l: int) -> SqrtRational:
    """((2l+1)/(2s+1))**(-1/2) * <s s s -s | l 0> from the stretched product form.

    The radicand is prod_{k=0}^{l} (1 - k/(2s+1)) / prod_{k=0}^{l} (1 + k/(2s+1)),
    always positive for 0 <= l <= 2s.
    """
    spin = as_spin(s)
    _check_l(spin.twice, l)
    return SqrtRational(1, _stretched_product(spin.twice, l))


def stretched_factorial_radicand(s, l: int) -> Rational:
    """(2s+1) (2s)!**2 / ((2s-l)! (2s+l+1)!), equal to the stretched product."""
    spin = as_spin(s)
    _check_l(spin.twice, l)
    t = spin.twice
    return mpq((t + 1) * factorial(t) ** 2, factorial(t - l) * factorial(t + l + 1))


def literal_factorial_radicand(s, l: int) -> Rational:
    """(2s)!/(2s-l)! * (2s)!/(2s+l+1)!: the factorial form missing its (2s+1) factor.

    Kept only so the regression suite can show it disagrees with the product form.
    """
    spin = as_spin(s)
    _check_l(spin.twice, l)
    t = spin.twice
    return mpq(factorial(t) ** 2, factorial(t - l) * factorial(t + l + 1))


@dataclass(frozen=True)
class ReducedFamily:
    """<s m s -m | l 0> = sign(r(m)) * sqrt(common_radicand) * |r(m)| for every m."""

    s: HalfInt
    l: int
    common_radicand: Rational
    reduced: dict = field(compare=False)

    def coefficient(self, m) -> SqrtRational:
        r = self.reduced.get(HalfInt.of(m), mpq(0))
        return SqrtRational.from_signed_square(_sign_of(r), self.common_radicand * r * r)

    def projections(self) -> list[HalfInt]:
        return sorted(self.reduced)


def reduced_family(s, l: int) -> ReducedFamily:
    """Split the zero-projection family into a common radicand and exact rationals.

    The m-independent part (2l+1) (2s-l)! / (2s+l+1)! stays under the root; the
    factor l!**2 (s+m)! (s-m)! and the Racah sum are rational and go into r(m).
    """
    spin = as_spin(s)
    t = spin.twice
    _check_l(t, l)
    common = mpq((2 * l + 1) * factorial(t - l), factorial(t + l + 1))
    lfac2 = factorial(l) ** 2
    reduced = {}
    for tm in range(-t, t + 1, 2):
        sp, sm = (t + tm) // 2, (t - tm) // 2
        total = mpq(0)
        for z in range(max(0, sm - l), min(t - l, sm) + 1):
            den = (
                factorial(z)
                * factorial(t - l - z)
                * factorial(sm - z) ** 2
                * factorial(l - sm + z) ** 2
            )
            total += mpq(-1 if z % 2 else 1, den)
        reduced[HalfInt(tm)] = lfac2 * factorial(sp) * factorial(sm) * total
    return ReducedFamily(spin, l, common, reduced)


@dataclass(frozen=True)
class RecurrenceCheck:
    s: HalfInt
    l: int
    passed: bool
    first_failure: HalfInt | None
    checked: int


def _recurrence_coefficients(two_s: int, l: int, two_m: int) -> tuple[int, int, int]:
    """Integer coefficients (diag, up, down) of the m-recurrence, scaled by 4.

    diag * C(m) = up * C(m+1) + down * C(m-1).
    """
    ss = two_s * (two_s + 2)
    diag = 4 * l * (l + 1) - 2 * ss + 2 * two_m * two_m
    up = ss - two_m * (two_m + 2)
    down = ss - two_m * (two_m - 2)
    return diag, up, down


def check_m_recurrence(s, l: int, family: ReducedFamily | None = None) -> RecurrenceCheck:
    """Verify the three-term recurrence in m exactly on the reduced family.

    For every m in -s..s:
        [l(l+1) - 2s(s+1) + 2m**2] r(m) = [s(s+1) - m(m+1)] r(m+1) + [s(s+1) - m(m-1)] r(m-1)
    with r(+-(s+1)) = 0.
    """
    spin = as_spin(s)
    t = spin.twice
    _check_l(t, l)
    fam = family if family is not None else reduced_family(spin, l)
    r = fam.reduced
    zero = mpq(0)
    checked = 0
    for tm in range(-t, t + 1, 2):
        diag, up, down = _recurrence_coefficients(t, l, tm)
        lhs = diag * r[HalfInt(tm)]
        rhs = up * r.get(HalfInt(tm + 2), zero) + down * r.get(HalfInt(tm - 2), zero)
        checked += 1
        if lhs != rhs:
            return RecurrenceCheck(spin, l, False, HalfInt(tm), checked)
    return RecurrenceCheck(spin, l, True, None, checked)


def descent_ratios(two_s: int, l: int, n_max: int) -> list[Rational]:
    """Rationals q_n with C(s-n) = q_n * C(s) for n = 0..n_max, C = <s m s -m | l 0>.

    Runs the m-recurrence downwards from the stretched state, where C(s+1) = 0.
    Every divisor (s+m)(s-m+1) is positive for m > -s.
    """
    if n_max < 0 or n_max > two_s:
        raise RangeError(f"n_max={n_max} outside 0..2s={two_s}")
    out = [mpq(1)]
    prev, cur = mpq(0), mpq(1)
    tm = two_s
    for _ in range(n_max):
        diag, up, down = _recurrence_coefficients(two_s, l, tm)
        nxt = (diag * cur - up * prev) / down
        out.append(nxt)
        prev, cur = cur, nxt
        tm -= 2
    return out


def descend_from_stretched(s, l: int, n_max: int) -> list[SqrtRational]:
    """<s (s-n) s (n-s) | l 0> for n = 0..n_max by exact descent in m.

    The common factor sqrt((2l+1)/(2s+1) * P_l), with P_l the stretched product,
    is shared by the whole column; only rationals pass through the recurrence.
    """
    spin = as_spin(s)
    t = spin.twice
    _check_l(t, l)
    common = mpq(2 * l + 1, t + 1) * _stretched_product(t, l)
    return [
        SqrtRational.from_signed_square(_sign_of(q), common * q * q)
        for q in descent_ratios(t, l, n_max)
    ]
