"""Field data model: quadratic backend, element arithmetic, log vectors."""

from fractions import Fraction

import pytest

from bheight.arith import Ball, ball_sum
from bheight.field import FieldDataError, rationals_field
from bheight.quadratic import quadratic_field, reduced_forms_negative


def pell_oracle(d, limit=300):
    """Brute-force smallest (x, y), y >= 1 with x^2 - d y^2 = +-1."""
    best = None
    for y in range(1, limit):
        for x in range(0, limit * 4):
            if abs(x * x - d * y * y) == 1:
                cand = (x, y)
                if best is None:
                    best = cand
                break
        if best:
            break
    return best


class TestQuadraticConstruction:
    def test_gaussian(self):
        k = quadratic_field(-1)
        assert k.n == 2 and k.r1 == 0 and k.r2 == 1 and k.r == 0
        assert len(k.class_reps) == 1
        assert len(k.mu) == 4
        # x^4 = 1 for every listed root of unity
        for z in k.mu:
            assert k.pow(z, 4) == k.one()

    def test_eisenstein_torsion(self):
        k = quadratic_field(-3)
        assert len(k.mu) == 6
        for z in k.mu:
            assert k.pow(z, 6) == k.one()
        assert any(all(k.pow(z, j) != k.one() for j in range(1, 6)) for z in k.mu)

    def test_sqrt2_fundamental_unit(self):
        k = quadratic_field(2)
        (eps,) = k.fund_units
        # Pell brute-force oracle: 1 + sqrt(2), i.e. (x, y) = (1, 1)
        assert pell_oracle(2) == (1, 1)
        assert sorted(map(abs, eps.coords)) == [1, 1]
        assert abs(k.norm(eps)) == 1
        assert k.norm(eps) == -1

    def test_36865_unit_and_class_number(self):
        k = quadratic_field(36865)
        (eps,) = k.fund_units
        assert abs(k.norm(eps)) == 1
        # analytic probe puts h at 52 for this discriminant
        assert len(k.class_reps) == 52
        assert k.disc == 36865

    def test_minus_107_class_number(self):
        # independent oracle: enumerate reduced forms directly
        forms = reduced_forms_negative(-107)
        assert forms == [(1, 1, 27), (3, -1, 9), (3, 1, 9)]
        k = quadratic_field(-107)
        assert len(k.class_reps) == 3
        assert k.class_reps[0].norm() == 1
        assert sorted(i.norm() for i in k.class_reps) == [1, 3, 3]

    def test_disc_by_residue(self):
        assert quadratic_field(5).disc == 5
        assert quadratic_field(2).disc == 8
        assert quadratic_field(-5).disc == -20
        assert quadratic_field(-107).disc == -107

    def test_rejects_non_squarefree(self):
        with pytest.raises(ValueError):
            quadratic_field(12)
        with pytest.raises(ValueError):
            quadratic_field(1)

    def test_class_reps_are_ideals(self):
        for d in (-107, -5, 36865, 10):
            k = quadratic_field(d)
            for rep in k.class_reps:
                for b in rep.basis_elements(k):
                    for j in range(k.n):
                        e = k.element([1 if t == j else 0 for t in range(k.n)])
                        assert rep.contains_element(k.mul(b, e))


class TestElementArithmetic:
    def test_norm_rational(self):
        k = quadratic_field(2)
        assert k.norm(k.from_rational(2)) == 4

    def test_norm_gaussian(self):
        k = quadratic_field(-1)
        one_plus_i = k.element((1, 1))
        assert k.norm(one_plus_i) == 2

    def test_mul_div_inverse_law(self):
        import random

        rng = random.Random(3)
        k = quadratic_field(-5)
        for _ in range(25):
            coords = (Fraction(rng.randint(-9, 9), rng.randint(1, 4)),
                      Fraction(rng.randint(-9, 9), rng.randint(1, 4)))
            x = k.element(coords)
            if x.is_zero():
                continue
            assert k.mul(x, x.inverse()) == k.one()

    def test_norm_multiplicative(self):
        k = quadratic_field(5)
        x = k.element((2, 3))
        y = k.element((-1, 4))
        assert k.norm(k.mul(x, y)) == k.norm(x) * k.norm(y)

    def test_pow_negative(self):
        k = quadratic_field(2)
        (eps,) = k.fund_units
        assert k.mul(k.pow(eps, 3), k.pow(eps, -3)) == k.one()


class TestLambdaVec:
    def test_lambda_of_one_exact(self):
        k = quadratic_field(2)
        lv = k.lambda_vec(k.one(), Fraction(1, 10**6))
        for b in lv.entries:
            assert b.mid == 0 and b.rad == 0

    def test_lambda_of_two(self):
        k = quadratic_field(2)
        lv = k.lambda_vec(k.from_rational(2), Fraction(1, 10**8))
        import mpmath as mp

        with mp.workdps(40):
            ln2 = Fraction(str(mp.nstr(mp.log(2), 35)))
        for b in lv.entries:
            assert b.contains(ln2)
            assert b.rad < Fraction(1, 10**8)

    def test_unit_log_sums_to_zero(self):
        k = quadratic_field(2)
        (eps,) = k.fund_units
        lv = k.lambda_vec(eps, Fraction(1, 10**10))
        assert lv.sum_ball().contains(Fraction(0))
        # entries enclose log(1+sqrt2) and log(sqrt2-1) in place order
        import mpmath as mp

        with mp.workdps(40):
            l = Fraction(str(mp.nstr(mp.log(1 + mp.sqrt(2)), 35)))
        vals = sorted([b.mid for b in lv.entries])
        assert abs(vals[1] - l) < Fraction(1, 10**8)
        assert abs(vals[0] + l) < Fraction(1, 10**8)

    def test_homomorphism(self):
        k = quadratic_field(-5)
        x = k.element((2, 1))
        y = k.element((1, -3))
        d = Fraction(1, 10**10)
        lx, ly = k.lambda_vec(x, d), k.lambda_vec(y, d)
        lxy = k.lambda_vec(k.mul(x, y), d)
        for bx, by, bxy in zip(lx.entries, ly.entries, lxy.entries):
            s = bx + by
            assert s.lower() <= bxy.upper() and bxy.lower() <= s.upper()

    def test_rational_entries(self):
        k = quadratic_field(-1)
        lv = k.lambda_vec(k.from_rational(Fraction(3, 7)), Fraction(1, 10**9))
        import mpmath as mp

        with mp.workdps(40):
            ref = Fraction(str(mp.nstr(2 * mp.log(mp.mpf(3) / 7), 35)))
        assert lv.entries[0].contains(ref)

    def test_zero_rejected(self):
        k = quadratic_field(2)
        with pytest.raises(ValueError):
            k.lambda_vec(k.zero(), Fraction(1, 100))


class TestTorsionAndUnits:
    def test_unit_group_log_kernel(self):
        k = quadratic_field(2)
        (eps,) = k.fund_units
        u = k.mul(k.pow(eps, 2), -k.one())
        lv = k.lambda_vec(u, Fraction(1, 10**8))
        assert lv.sum_ball().contains(Fraction(0))

    def test_rationals_field(self):
        q = rationals_field()
        assert q.n == 1 and q.r == 0
        assert len(q.mu) == 2
        assert q.norm(q.from_rational(Fraction(-7, 3))) == Fraction(-7, 3)
        lv = q.lambda_vec(q.from_rational(2), Fraction(1, 10**6))
        assert len(lv.entries) == 1
