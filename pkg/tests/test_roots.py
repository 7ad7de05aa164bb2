"""Root isolation and certified refinement."""

from fractions import Fraction

import pytest

from bheight.arith import Ball
from bheight.roots import (
    BallC,
    NonIsolatingEnclosureError,
    cauchy_bound,
    count_real_roots,
    isolate_complex_upper_roots,
    isolate_real_roots,
    poly_eval,
    refine_root,
    sturm_chain,
    squarefree_part,
)


def bisect_oracle(poly, lo, hi, steps):
    """Plain bisection, independent of the refinement code under test."""
    flo = poly_eval(poly, lo)
    for _ in range(steps):
        mid = (lo + hi) / 2
        fm = poly_eval(poly, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


X2_MINUS_2 = (Fraction(-2), Fraction(0), Fraction(1))


class TestSturm:
    def test_count_sqrt2(self):
        chain = sturm_chain(X2_MINUS_2)
        assert count_real_roots(chain, Fraction(1), Fraction(2)) == 1
        assert count_real_roots(chain, Fraction(-2), Fraction(2)) == 2

    def test_isolate_cubic(self):
        # x^3 - 2x: roots -sqrt2, 0, sqrt2
        p = (Fraction(0), Fraction(-2), Fraction(0), Fraction(1))
        ivs = isolate_real_roots(p)
        assert len(ivs) == 3
        for lo, hi in ivs:
            assert count_real_roots(sturm_chain(p), lo, hi) == 1

    def test_squarefree(self):
        # (x-1)^2 (x+2)
        p = (Fraction(2), Fraction(-3), Fraction(0), Fraction(1))
        sf = squarefree_part(p)
        assert len(sf) == 3
        assert poly_eval(sf, Fraction(1)) == 0
        assert poly_eval(sf, Fraction(-2)) == 0

    def test_cauchy_bound(self):
        assert cauchy_bound(X2_MINUS_2) >= Fraction(3, 2)


class TestRefineRoot:
    def test_sqrt2_against_bisection_oracle(self):
        target = Fraction(1, 10**6)
        got = refine_root(X2_MINUS_2, (Fraction(1), Fraction(2)), target)
        assert got.rad < target
        lo, hi = bisect_oracle(X2_MINUS_2, Fraction(1), Fraction(2), 40)
        assert got.upper() >= lo and got.lower() <= hi
        # sanity: enclosure really brackets sqrt(2)
        assert got.lower() ** 2 <= 2 <= got.upper() ** 2

    def test_rational_root_exact(self):
        got = refine_root((Fraction(-3), Fraction(1)), (Fraction(0), Fraction(5)), Fraction(1))
        assert got.mid == 3 and got.rad == 0

    def test_complex_i(self):
        rect = BallC(Ball(Fraction(0), Fraction(1, 4)),
                     Ball(Fraction(1), Fraction(1, 4)))
        got = refine_root((Fraction(1), Fraction(0), Fraction(1)), rect, Fraction(1, 10**4))
        assert got.re.contains(Fraction(0))
        assert got.im.contains(Fraction(1))
        assert got.max_rad() < Fraction(1, 10**4)

    def test_nesting_under_halved_targets(self):
        prev = None
        t = Fraction(1, 100)
        for _ in range(8):
            got = refine_root(X2_MINUS_2, (Fraction(1), Fraction(2)), t)
            if prev is not None:
                assert got.lower() >= prev.lower() - prev.rad
                assert got.upper() <= prev.upper() + prev.rad
                # strictly nested in the mathematical sense: both contain sqrt2
                assert got.lower() ** 2 <= 2 <= got.upper() ** 2
            prev = got
            t /= 2

    def test_non_isolating_rejected(self):
        with pytest.raises(NonIsolatingEnclosureError):
            refine_root(X2_MINUS_2, (Fraction(-2), Fraction(2)), Fraction(1, 10))
        with pytest.raises(NonIsolatingEnclosureError):
            refine_root(X2_MINUS_2, (Fraction(3), Fraction(4)), Fraction(1, 10))

    def test_zero_poly_rejected(self):
        with pytest.raises(ValueError):
            refine_root((), (Fraction(0), Fraction(1)), Fraction(1))


class TestComplexIsolation:
    def test_x6_plus_2(self):
        p = tuple(Fraction(c) for c in (2, 0, 0, 0, 0, 0, 1))
        rects = isolate_complex_upper_roots(p)
        assert len(rects) == 3
        assert isolate_real_roots(p) == []
        for r in rects:
            assert r.im.lower() > 0
            # |root|^6 = 2
            a2 = r.abs2()
            assert a2.lower() ** 3 <= 2 <= a2.upper() ** 3

    def test_mixed_signature(self):
        # x^3 - 2: one real root, one conjugate pair
        p = tuple(Fraction(c) for c in (-2, 0, 0, 1))
        assert len(isolate_real_roots(p)) == 1
        rects = isolate_complex_upper_roots(p)
        assert len(rects) == 1

    def test_cyclotomic_13(self):
        p = tuple(Fraction(1) for _ in range(13))
        rects = isolate_complex_upper_roots(p)
        assert len(rects) == 6
        for r in rects:
            a2 = r.abs2()
            assert a2.lower() <= 1 <= a2.upper()
