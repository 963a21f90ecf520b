"""Large-spin behaviour of the stretched coefficients.

The stretched product P_l is compared with its Gaussian replacement
exp(-x_l), x_l = l(l+1) / (2(2s+1)), and the moment sums D[k, 0] are
recast as Riemann sums of 2**(k+1) x**k exp(-x) on the nodes x_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq

from .coupling import stretched_weighted
from .exact import (
    DEFAULT_PRECISION,
    BigFloat,
    HalfInt,
    RangeError,
    as_spin,
    sqrt_rational_to_float,
    working_precision,
)

# error scans report the head (x_l <= 4) and the tail separately
HEAD_CUTOFF = mpq(4)


def _node(two_s: int, l: int):
    return mpq(l * (l + 1), 2 * (two_s + 1))


def gaussian_weight(s, l: int, precision: int = DEFAULT_PRECISION) -> BigFloat:
    """exp(-l(l+1) / (2(2s+1)))."""
    spin = as_spin(s)
    if l < 0 or l > spin.twice:
        raise RangeError(f"l={l} outside 0..2s={spin.twice}")
    with working_precision(precision):
        return gmpy2.exp(-mpfr(_node(spin.twice, l)))


@dataclass(frozen=True)
class ApproxErrorRow:
    s: HalfInt
    l: int
    exact: BigFloat
    approx: BigFloat
    rel_error: BigFloat


@dataclass(frozen=True)
class ApproxScan:
    rows: list
    head_max: BigFloat
    tail_max: BigFloat | None


def approx_error_scan(s, precision: int = DEFAULT_PRECISION) -> ApproxScan:
    spin = as_spin(s)
    if spin.twice <= 0:
        raise RangeError("scan needs s > 0")
    rows = []
    head = mpfr(0, precision)
    tail = None
    for l in range(spin.twice + 1):
        exact = sqrt_rational_to_float(stretched_weighted(spin, l), precision)
        approx = gaussian_weight(spin, l, precision)
        with working_precision(precision):
            rel = abs(exact - approx) / approx
        rows.append(ApproxErrorRow(spin, l, exact, approx, rel))
        if _node(spin.twice, l) <= HEAD_CUTOFF:
            head = max(head, rel)
        else:
            tail = rel if tail is None else max(tail, rel)
    return ApproxScan(rows, head, tail)


@dataclass(frozen=True)
class RiemannNodes:
    s: HalfInt
    x: list  # l(l+1) / (2(2s+1)), l = 0..2s
    dx: list  # forward differences x_{l+1} - x_l = (l+1)/(2s+1)
    width: list  # centred differences (x_{l+1} - x_{l-1}) / 2 = (2l+1)/(2(2s+1))

    def remainders(self) -> list:
        """dx_l - width_l, identically 1/(2(2s+1))."""
        return [d - w for d, w in zip(self.dx, self.width)]


def riemann_nodes(s) -> RiemannNodes:
    """Nodes x_l and both forward and centred increments, exact.

    The sum weight (2l+1)/(2s+1) is twice the centred increment; the forward
    increment exceeds the centred one by 1/(2(2s+1)), an O(1/s) remainder.
    """
    spin = as_spin(s)
    if spin.twice < 1:
        raise RangeError("nodes need s >= 1/2")
    t = spin.twice
    x = [_node(t, l) for l in range(t + 1)]
    dx = [b - a for a, b in zip(x, x[1:])]
    width = [mpq(2 * l + 1, 2 * (t + 1)) for l in range(t + 1)]
    return RiemannNodes(spin, x, dx, width)


def gamma_integral(k: int) -> int:
    """2**(k+1) * k!, the value of 2**(k+1) * integral_0^inf x**k exp(-x) dx."""
    if k < 0:
        raise RangeError("k must be nonnegative")
    return 2 ** (k + 1) * math.factorial(k)


@dataclass(frozen=True)
class RiemannEstimate:
    s: HalfInt
    k: int
    value: BigFloat
    target: int

    @property
    def rel_gap(self) -> BigFloat:
        with working_precision(self.value.precision):
            return abs(self.value - self.target) / self.target


def riemann_dk0(s, k: int, precision: int = DEFAULT_PRECISION) -> RiemannEstimate:
    """sum_{l=0}^{2s} (2 x_l)**k * 2 w_l * exp(-x_l), with 2 w_l = (2l+1)/(2s+1).

    This is the moment sum D[k, 0](s) with each stretched coefficient replaced
    by its Gaussian form; the target is 2**(k+1) k!.
    """
    spin = as_spin(s)
    if k < 0:
        raise RangeError("k must be nonnegative")
    if spin.twice < 1:
        raise RangeError("Riemann sum needs s >= 1/2")
    t = spin.twice
    total = mpfr(0, precision)
    with working_precision(precision):
        for l in range(t + 1):
            x = _node(t, l)
            coeff = (2 * x) ** k * mpq(2 * l + 1, t + 1)
            total = total + mpfr(coeff) * gmpy2.exp(-mpfr(x))
    return RiemannEstimate(spin, k, total, gamma_integral(k))
