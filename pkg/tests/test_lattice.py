"""LLL, the certified unit-matrix surrogate, integer points, embeddings."""

import random
from fractions import Fraction

import pytest

from bheight.arith import Ball, mat_det, mat_inverse, mat_mul, mat_vec, operator_norm_bound
from bheight.lattice import (
    build_S_approx,
    integer_points,
    lll_gram,
    lll_reduce,
    minkowski_embed,
    minkowski_gram,
    short_vectors,
)
from bheight.quadratic import quadratic_field


class TestLLL:
    def test_orthogonal_unchanged(self):
        vecs = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(3)]]
        red, u = lll_reduce(vecs)
        assert u == [[1, 0], [0, 1]] or abs(mat_det([[Fraction(x) for x in r] for r in u])) == 1
        assert sorted(map(tuple, red)) == sorted(map(tuple, vecs))

    def test_skew_pair_shortens(self):
        vecs = [[Fraction(1), Fraction(0)], [Fraction(99, 100), Fraction(1, 100)]]
        red, u = lll_reduce(vecs)
        det = mat_det([[Fraction(x) for x in r] for r in u])
        assert abs(det) == 1
        shortest = min(sum(x * x for x in v) for v in red)
        assert shortest <= Fraction(2, 10000)

    def test_z2_basis_reduction(self):
        # {(2,0),(3,1)} generates a lattice with covolume 2; exhaustive
        # search: the shortest vector is (1,1) with length^2 = 2
        vecs = [[Fraction(2), Fraction(0)], [Fraction(3), Fraction(1)]]
        red, u = lll_reduce(vecs)
        best = None
        for a in range(-4, 5):
            for b in range(-4, 5):
                if a == b == 0:
                    continue
                v = (2 * a + 3 * b) ** 2 + b * b
                best = v if best is None else min(best, v)
        assert best == 2
        shortest = min(sum(x * x for x in v) for v in red)
        assert shortest == best

    def test_unimodular_random(self):
        rng = random.Random(9)
        for _ in range(10):
            n = rng.randint(2, 4)
            vecs = [[Fraction(rng.randint(-9, 9)) for _ in range(n)]
                    for _ in range(n)]
            if mat_det([[Fraction(x) for x in r] for r in vecs]) == 0:
                continue
            _red, u = lll_reduce(vecs)
            assert abs(mat_det([[Fraction(x) for x in r] for r in u])) == 1


class TestIntegerPoints:
    def test_identity_box(self):
        inv = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
        pts = integer_points(inv, Fraction(1))
        assert sorted(pts) == [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]

    def test_one_dim_scaled(self):
        # stilde = 7/4: |7n/4| <= 2 iff |n| <= 8/7
        inv = [[Fraction(4, 7)]]
        pts = integer_points(inv, Fraction(2))
        assert pts == [(-1,), (0,), (1,)]

    def test_shear(self):
        stilde = [[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]]
        pts = integer_points(mat_inverse(stilde), Fraction(1))
        brute = [(a, b) for a in range(-3, 4) for b in range(-3, 4)
                 if abs(a + b) <= 1 and abs(b) <= 1]
        assert sorted(pts) == sorted(brute)
        assert len(pts) == 7

    def test_negation_closure(self):
        rng = random.Random(4)
        for _ in range(10):
            m = [[Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                  for _ in range(2)] for _ in range(2)]
            if mat_det(m) == 0:
                continue
            pts = integer_points(mat_inverse(m), Fraction(2))
            s = set(pts)
            assert all((-a, -b) in s for (a, b) in s)


class TestSApprox:
    def test_sqrt2_containment_data(self):
        k = quadratic_field(2)
        sa = build_S_approx(k, Fraction(2), Fraction(1, 100))
        prod = mat_mul(sa.stilde, sa.stilde_inv)
        assert prod == [[Fraction(1)]]
        # m >= r^2 * max(sup|S|, sup|S^-1|): S = (log(1+sqrt2)) ~ 0.8814
        assert sa.m >= Fraction(88, 100)
        assert sa.m >= 1  # sup of the inverse is ~1.1345
        assert sa.delta_used < sa.delta_tilde or sa.delta_used == sa.delta2

    def test_diagonal_exact_rational_surrogate(self):
        # perturbation containment on synthetic data: S~ = S exactly makes
        # the containment trivial
        s = [[Fraction(3, 2), Fraction(0)], [Fraction(0), Fraction(5, 4)]]
        sinv = mat_inverse(s)
        d = Fraction(2)
        pts = integer_points(sinv, d)
        for pt in pts:
            img = mat_vec(s, [Fraction(x) for x in pt])
            assert all(abs(v) <= d for v in img)

    def test_exponent_window_bound(self):
        # every returned tuple obeys the certified window
        k = quadratic_field(2)
        d_t = Fraction(5)
        sa = build_S_approx(k, d_t, Fraction(1, 50))
        pts = integer_points(sa.stilde_inv, d_t, window=sa.cap)
        assert all(abs(n) <= sa.cap for (n,) in pts)


def perturb_containment_case(rng, r):
    """One random containment check: exact rational S stands in for the
    true matrix; a perturbation within the schedule's entry accuracy must
    keep the exact polytope inside the inflated surrogate polytope."""
    while True:
        s = [[Fraction(rng.randint(-40, 40), 16) or Fraction(1, 7)
              for _ in range(r)] for _ in range(r)]
        if mat_det(s) != 0:
            break
    d = Fraction(rng.randint(1, 6))
    eta = Fraction(1, 12)
    m_true = r * r * max(operator_norm_bound(s) / (r * Fraction(isqrt_up(r))),
                         Fraction(1))
    # certified m from sup norms (exact here)
    sup_s = max(abs(x) for row in s for x in row)
    sup_inv = max(abs(x) for row in mat_inverse(s) for x in row)
    m = r * r * max(sup_s, sup_inv)
    lam = eta / (d * r * (1 + m))
    delta = min(lam / (r * r * (m * m + m * lam)), Fraction(1, r * r))
    # perturb within delta
    stilde = [[x + Fraction(rng.randint(-99, 99), 100) * delta for x in row]
              for row in s]
    sinv = mat_inverse(s)
    # probe grid of the exact polytope
    for _ in range(40):
        y = [Fraction(rng.randint(-100, 100), 100) * d for _ in range(r)]
        x = mat_vec(sinv, y)
        img = mat_vec(stilde, x)
        assert all(abs(v) <= d + eta for v in img)


def isqrt_up(r):
    from math import isqrt

    s = isqrt(r)
    return s if s * s == r else s + 1


def test_perturbation_containment_random():
    rng = random.Random(12)
    for _ in range(100):
        perturb_containment_case(rng, rng.randint(1, 4))


class TestMinkowski:
    def test_embed_one(self):
        k = quadratic_field(-1)
        balls = minkowski_embed(k.one(), k, Fraction(1, 10**6))
        # complex place contributes sqrt2*Re, sqrt2*Im of 1 = (sqrt2, 0)
        assert len(balls) == 2
        assert balls[0].contains(Fraction(1414213562, 10**9)) or balls[0].rad > 0
        assert balls[1].contains(Fraction(0))

    def test_gaussian_one_plus_i(self):
        k = quadratic_field(-1)
        balls = minkowski_embed(k.element((1, 1)), k, Fraction(1, 10**8))
        two = [b.square() for b in balls]
        # both coordinates are sqrt2 in absolute value
        for b in two:
            assert b.contains(Fraction(2))

    def test_norm_identity(self):
        # |embedding(x)|^2 == sum n_v |x|_v^2, by construction
        k = quadratic_field(2)
        x = k.element((2, 3))
        balls = minkowski_embed(x, k, Fraction(1, 10**8))
        total = sum((b.square() for b in balls), Ball.exact(0))
        direct = sum((k.abs_sq_ball(x, i, 128) * (1 if p.kind == "real" else 2)
                      for i, p in enumerate(k.places)), Ball.exact(0))
        assert total.lower() <= direct.upper() and direct.lower() <= total.upper()


class TestShortVectors:
    def test_gaussian_integers(self):
        k = quadratic_field(-1)
        g, _err = minkowski_gram(k, [k.one(), k.gen()])
        # vectors of squared length <= 4: +-1, +-i, +-1+-i (one per sign pair)
        got = sorted(short_vectors(g, Fraction(4)))
        # norms: (1,0) -> 2, (0,1) -> 2, (1,1),(1,-1) -> 4
        assert (1, 0) in got and (0, 1) in got
        assert (1, 1) in got and (-1, 1) in got or (1, -1) in got
