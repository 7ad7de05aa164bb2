"""Ball arithmetic, certified logs, and exact matrix operations."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bheight.arith import (
    Ball,
    RefineNeeded,
    SingularMatrixError,
    ball_sum,
    dyadic_round,
    ln_ball,
    log_ball,
    mat_det,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_vec,
    operator_norm_bound,
    opnorm_sq_bounds,
    rat_from_str,
    rat_to_str,
    solve_ball_system,
    sqrt_bounds,
)

# ln(2) to 50 digits, independent oracle (mpmath AGM-based evaluation).
import mpmath as _mp

_mp.mp.dps = 60
LN2_ORACLE = Fraction(str(_mp.nstr(_mp.log(2), 50)))
LN10_ORACLE = Fraction(str(_mp.nstr(_mp.log(10), 50)))


def rats(max_num=1000, max_den=50):
    return st.builds(
        Fraction,
        st.integers(min_value=-max_num, max_value=max_num),
        st.integers(min_value=1, max_value=max_den),
    )


class TestRatStrings:
    def test_round_trip(self):
        for s in ["3", "-7/2", "0", "200", "1/100"]:
            assert rat_to_str(rat_from_str(s)) == s

    def test_not_normalized_input(self):
        assert rat_from_str("4/6") == Fraction(2, 3)


class TestSqrtBounds:
    def test_encloses(self):
        for q in [Fraction(2), Fraction(3), Fraction(5, 7), Fraction(1, 3)]:
            lo, hi = sqrt_bounds(q, 64)
            assert lo * lo <= q <= hi * hi
            assert hi - lo <= Fraction(1, 2**64)

    def test_exact_square(self):
        lo, hi = sqrt_bounds(Fraction(9, 4), 32)
        assert lo <= Fraction(3, 2) <= hi


class TestBallOps:
    def test_mul_contains_product(self):
        b = Ball(Fraction(3), Fraction(1, 2)) * Ball(Fraction(-2), Fraction(1, 4))
        # extremes: 3.5*-1.75 = -6.125 and 2.5*-2.25 = -5.625
        assert b.lower() <= Fraction(-49, 8)
        assert b.upper() >= Fraction(-45, 8)

    def test_division(self):
        b = Ball.exact(1) / Ball(Fraction(2), Fraction(1, 2))
        assert b.lower() <= Fraction(2, 5) and b.upper() >= Fraction(2, 3)
        with pytest.raises(RefineNeeded):
            Ball.exact(1) / Ball(Fraction(0), Fraction(1))

    def test_max_with(self):
        a = Ball.from_endpoints(Fraction(0), Fraction(2))
        b = Ball.from_endpoints(Fraction(1), Fraction(3))
        m = a.max_with(b)
        assert m.lower() == 1 and m.upper() == 3

    def test_square_straddle(self):
        s = Ball.from_endpoints(Fraction(-1), Fraction(2)).square()
        assert s.lower() == 0 and s.upper() == 4

    def test_abs(self):
        assert Ball.from_endpoints(Fraction(-3), Fraction(1)).abs().upper() == 3

    def test_round_dyadic_keeps_enclosure(self):
        b = Ball(Fraction(1, 3), Fraction(1, 7)).round_dyadic(16)
        assert b.contains(Fraction(1, 3) + Fraction(1, 7))
        assert b.contains(Fraction(1, 3) - Fraction(1, 7))
        assert b.mid.denominator <= 2**16


@settings(max_examples=200, deadline=None)
@given(rats(), rats(), rats(), rats())
def test_enclosure_soundness_composed(a, b, c, d):
    """+,-,*,max over balls contain the exact composed value."""
    xa, xb = Ball.exact(a), Ball(b, Fraction(1, 97))
    xc, xd = Ball(c, Fraction(1, 13)), Ball.exact(d)
    expr = (xa * xb - xc).max_with(xd * xd) + xb
    exactish = (a * b - c) if (a * b - c) > d * d else d * d
    # b, c are centers; the exact value with b,c at their centers must be inside
    assert expr.contains(exactish + b)


def test_dyadic_round():
    assert dyadic_round(Fraction(1, 3), 4) == Fraction(5, 16)
    assert abs(dyadic_round(Fraction(7, 11), 20) - Fraction(7, 11)) <= Fraction(1, 2**21)


class TestLog:
    def test_log_one_exact(self):
        b = log_ball(Ball.exact(1), Fraction(1, 10**6))
        assert b.mid == 0 and b.rad == 0

    def test_ln2_oracle(self):
        b = ln_ball(Fraction(2), Fraction(1, 10**12))
        assert b.rad < Fraction(1, 10**12)
        assert b.contains(LN2_ORACLE)

    def test_ln_of_ball_around_two(self):
        x = Ball(Fraction(2), Fraction(1, 10**8))
        b = log_ball(x, Fraction(1, 10**6))
        assert b.contains(LN2_ORACLE)
        assert b.rad < Fraction(1, 10**6) + Fraction(1, 10**7)

    def test_monotone_containment(self):
        # input [2, 3] -> output contains [ln 2, ln 3]
        b = log_ball(Ball.from_endpoints(Fraction(2), Fraction(3)),
                     Fraction(1, 1000))
        ln3 = LN10_ORACLE - ln_ball(Fraction(10, 3), Fraction(1, 10**20)).mid
        assert b.lower() <= LN2_ORACLE <= b.upper()
        assert b.lower() <= ln3 <= b.upper()

    def test_large_and_tiny_arguments(self):
        for q in [Fraction(10**30), Fraction(1, 10**30), Fraction(36865),
                  Fraction(3, 7)]:
            b = ln_ball(q, Fraction(1, 10**9))
            assert b.rad < Fraction(1, 10**9)
            # ln is the inverse of exp: check via mpmath at high precision
            with _mp.workdps(60):
                ref = Fraction(str(_mp.nstr(_mp.log(_mp.mpf(q.numerator) / q.denominator), 45)))
            assert b.lower() <= ref <= b.upper()

    def test_touching_zero_raises(self):
        with pytest.raises(RefineNeeded):
            log_ball(Ball(Fraction(1, 2), Fraction(1, 2)), Fraction(1, 10))


class TestMatrices:
    def test_identity_inverse(self):
        m = mat_identity(4)
        assert mat_inverse(m) == m

    def test_diag(self):
        m = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(4)]]
        inv = mat_inverse(m)
        assert inv == [[Fraction(1, 2), Fraction(0)], [Fraction(0), Fraction(1, 4)]]

    def test_random_roundtrip_up_to_6(self):
        rng = random.Random(7)
        for n in range(1, 7):
            for _ in range(8):
                m = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                      for _ in range(n)] for _ in range(n)]
                if mat_det(m) == 0:
                    continue
                assert mat_mul(m, mat_inverse(m)) == mat_identity(n)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            mat_inverse([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])


class TestOperatorNormBound:
    def test_identity(self):
        b = operator_norm_bound(mat_identity(2))
        assert b >= 1

    def test_diag_dominates_largest_singular_value(self):
        m = [[Fraction(5), Fraction(0)], [Fraction(0), Fraction(1)]]
        assert operator_norm_bound(m) >= 5

    def test_swap_matrix(self):
        m = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
        # exact operator norm is 1 (brute force over a unit grid)
        brute = max(
            (x * m[0][0] + y * m[0][1]) ** 2 + (x * m[1][0] + y * m[1][1]) ** 2
            for k in range(200)
            for x, y in [(Fraction(k, 100) - 1, Fraction(1) - abs(Fraction(k, 100) - 1))]
        )
        assert brute <= 1
        assert operator_norm_bound(m) >= 1

    def test_bound_vs_random_vectors(self):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randint(1, 4)
            m = [[Fraction(rng.randint(-8, 8), rng.randint(1, 3))
                  for _ in range(n)] for _ in range(n)]
            bound = operator_norm_bound(m)
            for _ in range(50):
                v = [Fraction(rng.randint(-20, 20), rng.randint(1, 5))
                     for _ in range(n)]
                if all(x == 0 for x in v):
                    continue
                mv = mat_vec(m, v)
                # |Mv|^2 <= bound^2 |v|^2, exact rational comparison
                assert sum(x * x for x in mv) <= bound * bound * sum(x * x for x in v)

    def test_opnorm_sq_bounds_bracket(self):
        m = [[Fraction(3), Fraction(1)], [Fraction(0), Fraction(2)]]
        lo, hi = opnorm_sq_bounds(m)
        assert lo <= hi
        b = operator_norm_bound(m)
        assert lo <= b * b


class TestBallSystem:
    def test_solve_exact(self):
        a = [[Ball.exact(2), Ball.exact(1)], [Ball.exact(1), Ball.exact(3)]]
        b = [Ball.exact(5), Ball.exact(10)]
        x = solve_ball_system(a, b)
        assert x[0].contains(Fraction(1)) and x[1].contains(Fraction(3))

    def test_solution_enclosed_with_uncertainty(self):
        eps = Fraction(1, 10**6)
        a = [[Ball(Fraction(2), eps), Ball(Fraction(1), eps)],
             [Ball(Fraction(1), eps), Ball(Fraction(3), eps)]]
        b = [Ball(Fraction(5), eps), Ball(Fraction(10), eps)]
        x = solve_ball_system(a, b)
        assert x[0].contains(Fraction(1)) and x[1].contains(Fraction(3))
        assert x[0].rad < Fraction(1, 10**4)

    def test_ball_sum(self):
        s = ball_sum([Ball.exact(1), Ball(Fraction(2), Fraction(1, 8))])
        assert s.mid == 3 and s.rad == Fraction(1, 8)
