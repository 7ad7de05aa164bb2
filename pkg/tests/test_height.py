"""Certified height evaluation against closed-form oracles."""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from bheight.arith import Ball
from bheight.field import rationals_field
from bheight.height import (
    Cmp,
    HeightApprox,
    cmp_certified,
    exact_height_rational,
    height_decide_leq,
    height_element,
    height_leq_exact,
    height_pair,
    integer_height_or_none,
    quadratic_height_exact,
    unit_height_from_tuple,
)
from bheight.quadratic import quadratic_field


def mp_log(x) -> Fraction:
    with mp.workdps(50):
        return Fraction(str(mp.nstr(mp.log(x), 40)))


LAM = Fraction(1, 10**6)


class TestHeightPair:
    def test_height_of_one(self):
        k = quadratic_field(2)
        h = height_pair(k.one(), k.one(), LAM, k)
        assert abs(h.value) < LAM

    def test_rational_half(self):
        q = rationals_field()
        h = height_pair(q.from_rational(1), q.from_rational(2), LAM, q)
        assert abs(h.value - mp_log(2)) < LAM

    def test_gaussian_one_plus_i(self):
        k = quadratic_field(-1)
        h = height_pair(k.element((1, 1)), k.one(), LAM, k)
        # H = max(N(1+i), 1) = 2
        assert abs(h.value - mp_log(2)) < LAM

    def test_symmetry(self):
        k = quadratic_field(5)
        a, b = k.element((3, 1)), k.element((1, -2))
        h1 = height_pair(a, b, LAM, k)
        h2 = height_pair(b, a, LAM, k)
        assert abs(h1.value - h2.value) < 2 * LAM

    def test_torsion_invariance(self):
        k = quadratic_field(-1)
        g = k.element((2, 1))
        for z in k.mu:
            h1 = height_element(g, LAM, k)
            h2 = height_element(k.mul(z, g), LAM, k)
            assert abs(h1.value - h2.value) < 2 * LAM

    def test_rational_subfield_power_rule(self):
        # for rational q inside K: h = n * log H_Q(q)
        k = quadratic_field(-5)
        q = Fraction(3, 7)
        h = height_element(k.from_rational(q), LAM, k)
        assert abs(h.value - 2 * mp_log(7)) < LAM

    def test_zero_rejected(self):
        k = quadratic_field(2)
        with pytest.raises(ValueError):
            height_pair(k.zero(), k.one(), LAM, k)


class TestUnitHeight:
    def test_zero_tuple(self):
        h = unit_height_from_tuple((0,), [[Fraction(1), Fraction(-1)]], 5, LAM)
        assert h.value == 0

    def test_sqrt2_powers(self):
        k = quadratic_field(2)
        (eps,) = k.fund_units
        lam = Fraction(1, 10**8)
        cap = 4
        delta = lam / (1 * 2 * cap)
        lv = k.lambda_vec(eps, delta)
        data = [[b.mid for b in lv.entries]]
        target = mp_log(1 + mp.sqrt(2))
        for n in (1, 2, -2):
            h = unit_height_from_tuple((n,), data, cap, lam)
            assert abs(h.value - abs(n) * target) < lam

    def test_against_explicit_product(self):
        k = quadratic_field(5)
        (eps,) = k.fund_units
        lam = Fraction(1, 10**7)
        cap = 3
        lv = k.lambda_vec(eps, lam / (1 * 2 * cap))
        data = [[b.mid for b in lv.entries]]
        for n in (1, 2, 3, -3):
            ht = unit_height_from_tuple((n,), data, cap, lam)
            hd = height_element(k.pow(eps, n), lam, k)
            assert abs(ht.value - hd.value) < 2 * lam

    def test_window_violation_rejected(self):
        with pytest.raises(ValueError):
            unit_height_from_tuple((9,), [[Fraction(1), Fraction(-1)]], 5, LAM)


class TestCmp:
    def test_three_ways(self):
        assert cmp_certified(HeightApprox(Fraction(1), Fraction(1, 10)),
                             Fraction(2)) is Cmp.BELOW
        assert cmp_certified(HeightApprox(Fraction(1), Fraction(1, 10)),
                             Fraction(105, 100)) is Cmp.INDETERMINATE
        assert cmp_certified(HeightApprox(Fraction(3), Fraction(1, 10)),
                             Fraction(2)) is Cmp.ABOVE


class TestExactHeights:
    def test_rational(self):
        assert exact_height_rational(Fraction(-7, 3)) == 7
        assert exact_height_rational(Fraction(2)) == 2
        assert exact_height_rational(Fraction(0)) == 1

    def test_imag_quadratic_integer_heights(self):
        k = quadratic_field(-1)
        x = k.element((Fraction(1, 2), Fraction(1, 2)))  # (1+i)/2
        # num ideal (1+i), den (2)/gcd: H = max(2, 4)/2 = 2
        assert quadratic_height_exact(x, k) == 2

    def test_real_quadratic_rational_height(self):
        k = quadratic_field(2)
        three = k.from_rational(3)
        assert quadratic_height_exact(three, k) == 9

    def test_real_quadratic_irrational(self):
        k = quadratic_field(2)
        x = k.element((1, 1))  # 1 + sqrt2: conjugates straddle 1
        assert quadratic_height_exact(x, k) is None
        assert height_leq_exact(x, Fraction(242, 100), k)
        assert not height_leq_exact(x, Fraction(241, 100), k)

    def test_unit_height_closed_form(self):
        # H(eps^n) = eps^n for the golden-ratio-like units
        k = quadratic_field(2)
        (eps,) = k.fund_units
        x = k.pow(eps, 2)
        # eps^2 = 3 + 2 sqrt2 = 5.828...; H <= 5.83 but not <= 5.82
        assert height_leq_exact(x, Fraction(583, 100), k)
        assert not height_leq_exact(x, Fraction(582, 100), k)

    def test_integer_height_general_field(self):
        q = rationals_field()
        assert integer_height_or_none(q.from_rational(Fraction(2, 3)), q) == 3
        k = quadratic_field(-1)
        assert integer_height_or_none(k.element((1, 1)), k) == 2

    def test_decide_leq_matches_exact_on_quadratics(self):
        rng = random.Random(17)
        k = quadratic_field(5)
        for _ in range(30):
            x = k.element((Fraction(rng.randint(-6, 6), rng.randint(1, 3)),
                           Fraction(rng.randint(-6, 6), rng.randint(1, 3))))
            if x.is_zero():
                continue
            bound = Fraction(rng.randint(1, 40))
            assert height_decide_leq(x, bound, k) == height_leq_exact(x, bound, k)
