from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.physics.wigner import clebsch_gordan, wigner_3j

from spinlimit.coupling import (
    CGQuery,
    cg,
    check_m_recurrence,
    descend_from_stretched,
    literal_factorial_radicand,
    reduced_family,
    stretched_factorial_radicand,
    stretched_weighted,
    wigner3j,
    zero_projection_cg,
)
from spinlimit.exact import HalfInt, ParityError, RangeError, SqrtRational

HALF = Fraction(1, 2)


def sq(sign, p, q=1):
    return SqrtRational(sign, mpq(p, q))


def from_sympy(expr) -> SqrtRational:
    """Signed-square form of an exact sympy value."""
    square = sympy.Rational(sympy.expand(expr**2))
    sign = int(sympy.sign(expr))
    return SqrtRational.from_signed_square(sign, mpq(int(square.p), int(square.q)))


def sym(twice):
    return sympy.Rational(twice, 2)


class TestWigner3j:
    def test_singlet(self):
        assert wigner3j(HALF, HALF, 0, HALF, -HALF, 0) == sq(1, 1, 2)

    def test_triangle_violation(self):
        for m1 in (-1, 0, 1):
            assert wigner3j(1, 1, 3, m1, -m1, 0).is_zero()

    def test_one_one_two(self):
        assert wigner3j(1, 1, 2, 1, -1, 0) == sq(1, 1, 30)

    def test_m_sum_selection(self):
        assert wigner3j(1, 1, 2, 1, 0, 0).is_zero()

    def test_parity_error(self):
        with pytest.raises(ParityError):
            wigner3j(1, 1, 1, HALF, -HALF, 0)

    @settings(max_examples=150, deadline=None)
    @given(st.data())
    def test_matches_sympy(self, data):
        tj1 = data.draw(st.integers(0, 8))
        tj2 = data.draw(st.integers(0, 8))
        tj3 = data.draw(st.integers(0, 10))
        tm1 = data.draw(st.sampled_from(range(-tj1, tj1 + 1, 2)))
        tm2 = data.draw(st.sampled_from(range(-tj2, tj2 + 1, 2)))
        tm3 = -tm1 - tm2
        if (tj3 + tm3) % 2 or abs(tm3) > tj3:
            return
        ours = wigner3j(*(HalfInt(x) for x in (tj1, tj2, tj3, tm1, tm2, tm3)))
        theirs = wigner_3j(sym(tj1), sym(tj2), sym(tj3), sym(tm1), sym(tm2), sym(tm3))
        assert ours == from_sympy(theirs)


class TestCG:
    def test_table_values(self):
        assert cg(1, 1, 1, -1, 2, 0) == sq(1, 1, 6)
        assert cg(1, 1, 1, -1, 1, 0) == sq(1, 1, 2)

    def test_scalar_coupling_phase(self):
        s, m = Fraction(3, 2), HALF
        assert cg(s, m, s, -m, 0, 0) == sq(-1, 1, 4)

    def test_scalar_coupling_general(self):
        for ts in range(0, 9):
            for tm in range(-ts, ts + 1, 2):
                sign = -1 if ((ts - tm) // 2) % 2 else 1
                assert zero_projection_cg(HalfInt(ts), HalfInt(tm), 0) == sq(sign, 1, ts + 1)

    def test_query_wrapper(self):
        assert CGQuery.of(1, 1, 1, -1, 2, 0).evaluate() == sq(1, 1, 6)

    def test_odd_l_vanishes_at_m_zero(self):
        for s in range(1, 8):
            for l in range(1, 2 * s + 1, 2):
                assert zero_projection_cg(s, 0, l).is_zero()

    def test_stretched_positive(self):
        for ts in range(1, 16):
            for l in range(ts + 1):
                assert zero_projection_cg(HalfInt(ts), HalfInt(ts), l).sign == 1

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 12), st.data())
    def test_matches_sympy(self, ts, data):
        tm = data.draw(st.sampled_from(range(-ts, ts + 1, 2)))
        l = data.draw(st.integers(0, ts))
        theirs = clebsch_gordan(sym(ts), sym(ts), l, sym(tm), sym(-tm), 0)
        assert zero_projection_cg(HalfInt(ts), HalfInt(tm), l) == from_sympy(theirs)

    def test_orthogonality_in_l(self):
        # sum_m <s m s -m | l 0> <s m s -m | l' 0> = delta_{l l'}
        ts = 5
        for l in range(ts + 1):
            for lp in range(ts + 1):
                fam, famp = reduced_family(HalfInt(ts), l), reduced_family(HalfInt(ts), lp)
                total = sympy.Integer(0)
                for tm in range(-ts, ts + 1, 2):
                    a, b = fam.coefficient(HalfInt(tm)), famp.coefficient(HalfInt(tm))
                    total += a.sign * b.sign * sympy.sqrt(sympy.Rational(str(a.radicand * b.radicand)))
                assert sympy.simplify(total) == (1 if l == lp else 0)


class TestStretched:
    def test_examples(self):
        assert stretched_weighted(1, 1) == sq(1, 1, 2)
        assert stretched_weighted(1, 2) == sq(1, 1, 10)
        for ts in range(0, 12):
            assert stretched_weighted(HalfInt(ts), 0) == sq(1, 1)

    def test_reweighting_gives_cg(self):
        for ts in range(0, 21):
            s = HalfInt(ts)
            for l in range(ts + 1):
                weight = SqrtRational(1, mpq(2 * l + 1, ts + 1))
                assert stretched_weighted(s, l) * weight == cg(s, s, s, -s, l, 0)

    def test_corrected_factorial_form(self):
        for ts in range(0, 21):
            for l in range(ts + 1):
                assert stretched_factorial_radicand(HalfInt(ts), l) == stretched_weighted(HalfInt(ts), l).radicand

    def test_literal_factorial_form_is_short_by_2s_plus_1(self):
        for ts in range(1, 21):
            for l in range(ts + 1):
                literal = literal_factorial_radicand(HalfInt(ts), l)
                assert literal != stretched_weighted(HalfInt(ts), l).radicand
                assert literal * (ts + 1) == stretched_weighted(HalfInt(ts), l).radicand

    def test_range(self):
        with pytest.raises(RangeError):
            stretched_weighted(1, 3)
        with pytest.raises(RangeError):
            stretched_weighted(1, -1)


class TestReducedFamily:
    def test_spin_half_triplet(self):
        fam = reduced_family(HALF, 1)
        assert fam.coefficient(HALF) == sq(1, 1, 2)
        # both product states enter the m = 0 triplet with the same sign
        assert fam.coefficient(-HALF) == sq(1, 1, 2)

    def test_stretched_reconstruction(self):
        for ts in range(0, 16):
            s = HalfInt(ts)
            for l in range(ts + 1):
                assert reduced_family(s, l).coefficient(s) == cg(s, s, s, -s, l, 0)

    def test_antisymmetric_zero(self):
        assert reduced_family(1, 1).coefficient(0).is_zero()

    def test_common_radicand_independent_of_m(self):
        fam = reduced_family(Fraction(7, 2), 4)
        for m in fam.projections():
            ratio = zero_projection_cg(Fraction(7, 2), m, 4).radicand / fam.common_radicand
            assert ratio == fam.reduced[m] ** 2


class TestRecurrence:
    @pytest.mark.parametrize("s, l", [(HALF, 0), (1, 2), (5, 7), (Fraction(15, 2), 9)])
    def test_passes(self, s, l):
        verdict = check_m_recurrence(s, l)
        assert verdict.passed
        assert verdict.first_failure is None
        assert verdict.checked == HalfInt.of(s).twice + 1

    def test_detects_corruption(self):
        fam = reduced_family(3, 2)
        broken = dict(fam.reduced)
        broken[HalfInt(0)] += 1
        tampered = type(fam)(fam.s, fam.l, fam.common_radicand, broken)
        verdict = check_m_recurrence(3, 2, family=tampered)
        assert not verdict.passed
        assert verdict.first_failure is not None


class TestDescent:
    def test_spin_one(self):
        values = descend_from_stretched(1, 2, 2)
        assert values == [cg(1, m, 1, -m, 2, 0) for m in (1, 0, -1)]
        assert values[0] == sq(1, 1, 6)

    def test_spin_half(self):
        assert descend_from_stretched(HALF, 1, 1) == [sq(1, 1, 2), sq(1, 1, 2)]

    def test_scalar_alternates(self):
        for ts in range(1, 12):
            values = descend_from_stretched(HalfInt(ts), 0, ts)
            assert [v.sign for v in values] == [(-1) ** n for n in range(ts + 1)]
            assert all(v.radicand == mpq(1, ts + 1) for v in values)

    def test_agrees_with_racah(self):
        for ts in range(1, 13):
            s = HalfInt(ts)
            for l in range(ts + 1):
                values = descend_from_stretched(s, l, ts)
                for n, value in enumerate(values):
                    m = HalfInt(ts - 2 * n)
                    assert value == zero_projection_cg(s, m, l)

    def test_range(self):
        with pytest.raises(RangeError):
            descend_from_stretched(1, 1, 3)
