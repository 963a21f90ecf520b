"""Weighted sums of zero-projection coefficients and their large-spin limits.

Finite spin:
    D[k, n](s) = sum_{l=0}^{2s} (l(l+1)/(2s+1))**k * sqrt((2l+1)/(2s+1)) * <s (s-n) s (n-s) | l 0>
    S_n(s) = D[0, n](s)

Limit (s -> infinity), exact integers:
    D[k+1, n] = (n+1) D[k, n+1] + (2n+1) D[k, n] + n D[k, n-1],   D[0, n] = 2
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import gmpy2
from gmpy2 import mpfr, mpq

from .coupling import descent_ratios
from .exact import (
    DEFAULT_PRECISION,
    BigFloat,
    HalfInt,
    RangeError,
    Rational,
    SqrtRational,
    as_spin,
    sqrt_rational_to_float,
    working_precision,
)


class InsufficientTableError(ValueError):
    """The limit table does not hold the rows or columns a computation needs."""


def _weighted_columns(two_s: int, n_max: int) -> Iterator[tuple[int, list[SqrtRational]]]:
    """Yield (l, [w_l * C_l(s-n) for n = 0..n_max]) in ascending l, exactly.

    With w_l = sqrt((2l+1)/(2s+1)) and C_l(s) = w_l * sqrt(P_l), each term is
    (2l+1)/(2s+1) * sqrt(P_l) * q_n, q_n from the m-descent.  P_l is updated
    incrementally: P_l = P_{l-1} * (2s+1-l) / (2s+1+l).
    """
    big_n = two_s + 1
    product = mpq(1)
    for l in range(two_s + 1):
        if l:
            product *= mpq(big_n - l, big_n + l)
        weight = mpq(2 * l + 1, big_n)
        base = weight * weight * product
        terms = []
        for q in descent_ratios(two_s, l, n_max):
            sign = (q > 0) - (q < 0)
            terms.append(SqrtRational.from_signed_square(sign, base * q * q))
        yield l, terms


def s_partial(s, n: int, precision: int = DEFAULT_PRECISION) -> BigFloat:
    """Finite-spin sum S_n(s), summed in ascending l at ``precision`` bits."""
    return d_finite(s, 0, n, precision, columns=[n]).entry(0, n)


@dataclass(frozen=True)
class FiniteDTable:
    s: HalfInt
    k_max: int
    n_max: int
    precision: int
    entries: dict
    # per entry: number of l-terms and the largest |term|, used to scale tolerances
    term_counts: dict = field(compare=False)
    max_terms: dict = field(compare=False)

    def entry(self, k: int, n: int) -> BigFloat:
        return self.entries[(k, n)]

    def rows(self) -> list[list[BigFloat]]:
        return [
            [self.entries[(k, n)] for n in range(self.n_max + 1)]
            for k in range(self.k_max + 1)
        ]


def d_finite(
    s,
    k_max: int,
    n_max: int,
    precision: int = DEFAULT_PRECISION,
    columns: Sequence[int] | None = None,
) -> FiniteDTable:
    """Table of D[k, n](s) for k = 0..k_max, n = 0..n_max.

    Every term is formed exactly as a SqrtRational (moment factor included) and
    rounded once; terms are added in ascending l.  Row 0 reproduces
    :func:`s_partial` bit for bit.
    """
    spin = as_spin(s)
    t = spin.twice
    if k_max < 0:
        raise RangeError("k_max must be nonnegative")
    if n_max < 0 or n_max > t:
        raise RangeError(f"n_max={n_max} outside 0..2s={t}")
    cols = list(range(n_max + 1)) if columns is None else list(columns)
    big_n = t + 1
    sums = {(k, n): mpfr(0, precision) for k in range(k_max + 1) for n in cols}
    biggest = {key: mpfr(0, precision) for key in sums}
    with working_precision(precision):
        for l, terms in _weighted_columns(t, n_max):
            moment = mpq(l * (l + 1), big_n)
            for k in range(k_max + 1):
                factor = moment**k
                for n in cols:
                    value = sqrt_rational_to_float(terms[n].scale(factor), precision)
                    sums[(k, n)] = sums[(k, n)] + value
                    if abs(value) > biggest[(k, n)]:
                        biggest[(k, n)] = abs(value)
    counts = {key: t + 1 for key in sums}
    return FiniteDTable(spin, k_max, n_max, precision, sums, counts, biggest)


def finite_recurrence_coefficients(two_s: int, n: int) -> tuple[Rational, Rational, Rational]:
    """Exact weights (up, diag, down) of D[k, n+1], D[k, n], D[k, n-1] at finite spin."""
    big_n = two_s + 1
    up = (1 - mpq(n + 1, big_n)) * (n + 1)
    diag = (1 - mpq(2 * n * n + 2 * n + 1, big_n * (2 * n + 1))) * (2 * n + 1)
    down = (1 - mpq(n, big_n)) * n
    return up, diag, down


@dataclass(frozen=True)
class FiniteRecurrenceReport:
    s: HalfInt
    precision: int
    residuals: dict
    scales: dict
    max_residual: BigFloat
    max_relative: BigFloat
    tolerance_exponent: int
    passed: bool


def verify_finite_recurrence(
    s,
    k_max: int,
    n_max: int,
    precision: int = DEFAULT_PRECISION,
    tolerance_exponent: int | None = None,
    table: FiniteDTable | None = None,
) -> FiniteRecurrenceReport:
    """Residuals of the finite-spin three-term recurrence for D[k+1, n].

    The identity is exact at every finite s, so residuals must sit at rounding
    level: |residual| <= 2**(tolerance_exponent) * scale, where scale is the
    largest single l-term (times its weight) feeding the residual.  The default
    exponent is 10 - precision.  At n = 2s the D[k, n+1] weight vanishes and
    that column is never read.
    """
    spin = as_spin(s)
    t = spin.twice
    if n_max < 0 or n_max > t:
        raise RangeError(f"n_max={n_max} outside 0..2s={t}")
    if tolerance_exponent is None:
        tolerance_exponent = 10 - precision
    if table is None:
        table = d_finite(spin, k_max, min(n_max + 1, t), precision)
    residuals, scales = {}, {}
    worst = mpfr(0, precision)
    worst_rel = mpfr(0, precision)
    with working_precision(precision):
        for k in range(k_max):
            for n in range(n_max + 1):
                up, diag, down = finite_recurrence_coefficients(t, n)
                rhs = diag * table.entry(k, n)
                scale = max(table.max_terms[(k + 1, n)], abs(diag) * table.max_terms[(k, n)])
                if up:
                    rhs += up * table.entry(k, n + 1)
                    scale = max(scale, abs(up) * table.max_terms[(k, n + 1)])
                if down:
                    rhs += down * table.entry(k, n - 1)
                    scale = max(scale, abs(down) * table.max_terms[(k, n - 1)])
                res = table.entry(k + 1, n) - rhs
                residuals[(k, n)] = res
                scales[(k, n)] = scale
                worst = max(worst, abs(res))
                if scale:
                    worst_rel = max(worst_rel, abs(res) / scale)
        passed = all(
            abs(residuals[key]) <= gmpy2.exp2(tolerance_exponent) * scales[key] for key in residuals
        )
    return FiniteRecurrenceReport(
        spin, precision, residuals, scales, worst, worst_rel, tolerance_exponent, passed
    )


@dataclass(frozen=True)
class LimitDTable:
    k_max: int
    n_max: int
    entries: tuple  # rows k = 0..k_max, each with n_max + 1 exact ints

    def entry(self, k: int, n: int) -> int:
        if k < 0 or k > self.k_max or n < 0 or n > self.n_max:
            raise InsufficientTableError(f"entry ({k}, {n}) outside {self.k_max}x{self.n_max} table")
        return self.entries[k][n]

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def limit_table(k_max: int, n_max: int, seed: Sequence[int] | None = None) -> LimitDTable:
    """Large-spin table built row by row from D[0, n] = seed[n] (default 2).

    Row k+1 up to column n needs row k up to column n+1, so the seed row is
    taken n_max + k_max + 1 wide and each row shrinks by one column.
    """
    if k_max < 0 or n_max < 0:
        raise RangeError("k_max and n_max must be nonnegative")
    width = n_max + k_max + 1
    if seed is None:
        row = [2] * width
    else:
        if len(seed) < width:
            raise InsufficientTableError(f"seed needs {width} entries, got {len(seed)}")
        row = [int(x) for x in seed[:width]]
    rows = [tuple(row[: n_max + 1])]
    for _ in range(k_max):
        row = [
            (n + 1) * row[n + 1] + (2 * n + 1) * row[n] + (n * row[n - 1] if n else 0)
            for n in range(len(row) - 1)
        ]
        rows.append(tuple(row[: n_max + 1]))
    return LimitDTable(k_max, n_max, tuple(rows))


def t_values(table: LimitDTable, k: int) -> list[int]:
    """T_k^N = N! * sum_{n=0}^{N} C(N, n) D[k-N, n] for N = 0..k."""
    if k < 0 or k > table.k_max or k > table.n_max:
        raise InsufficientTableError(f"T_{k} needs rows 0..{k} with {k + 1} columns")
    return [
        math.factorial(big_n) * sum(math.comb(big_n, n) * table.entry(k - big_n, n) for n in range(big_n + 1))
        for big_n in range(k + 1)
    ]


@dataclass(frozen=True)
class SumRuleVerdict:
    passed: bool
    first_failure: int | None
    checked: int


def verify_sum_rule(table: LimitDTable, k_max: int) -> SumRuleVerdict:
    """Check D[k,0] = k! sum C(k,n) D[0,n] and sum C(k,n) D[0,n] = 2**(k+1), k <= k_max."""
    if k_max > table.k_max or k_max > table.n_max:
        raise InsufficientTableError(f"sum rule up to k={k_max} needs a {k_max}x{k_max} table")
    for k in range(k_max + 1):
        binomial_sum = sum(math.comb(k, n) * table.entry(0, n) for n in range(k + 1))
        if table.entry(k, 0) != math.factorial(k) * binomial_sum or binomial_sum != 2 ** (k + 1):
            return SumRuleVerdict(False, k, k + 1)
    return SumRuleVerdict(True, None, k_max + 1)


def induction_solve(k_max: int) -> list[int]:
    """Solve sum_{n<=k} C(k, n) x_n = 2**(k+1), k = 0..k_max, by forward substitution."""
    if k_max < 0:
        raise RangeError("k_max must be nonnegative")
    xs: list[int] = []
    for k in range(k_max + 1):
        xs.append(2 ** (k + 1) - sum(math.comb(k, n) * xs[n] for n in range(k)))
    return xs


@dataclass(frozen=True)
class StudyReport:
    n: int
    grid: tuple  # HalfInt spins, strictly increasing
    sums: tuple
    abs_errors: tuple
    fitted_slope: float | None
    precision: int


def _s_partial_task(args):
    two_s, n, precision = args
    return s_partial(HalfInt(two_s), n, precision)


def fit_loglog_slope(spins: Sequence[HalfInt], errors: Sequence[BigFloat]) -> float | None:
    """Least-squares slope of log(error) against log(s); None with < 2 usable points."""
    xs, ys = [], []
    for spin, err in zip(spins, errors):
        if err > 0:
            xs.append(math.log(float(spin.value)))
            ys.append(float(gmpy2.log(err)))
    if len(xs) < 2:
        return None
    return statistics.linear_regression(xs, ys).slope


def convergence_study(
    n: int,
    s_grid: Sequence,
    precision: int = DEFAULT_PRECISION,
    workers: int = 1,
) -> StudyReport:
    """S_n(s) over a spin grid, errors |S_n(s) - 2| and their log-log slope."""
    grid = tuple(as_spin(s) for s in s_grid)
    if not grid:
        raise RangeError("empty spin grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise RangeError("spin grid must be strictly increasing")
    for spin in grid:
        if spin.twice < n or spin.twice == 0:
            raise RangeError(f"need 2s >= n and s > 0; got s={spin}, n={n}")
    tasks = [(spin.twice, n, precision) for spin in grid]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sums = tuple(pool.map(_s_partial_task, tasks))
    else:
        sums = tuple(_s_partial_task(task) for task in tasks)
    with working_precision(precision):
        errors = tuple(abs(value - 2) for value in sums)
    return StudyReport(n, grid, sums, errors, fit_loglog_slope(grid, errors), precision)
