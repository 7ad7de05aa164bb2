"""Light number-field arithmetic on top of sympy and mpmath.

Elements live as integer (or rational) coefficient lists over the power
basis of a monic integer polynomial.  Exactness comes from sympy
(resultants, linear solves); mpmath supplies high-precision embeddings for
steering.  This is deliberately independent of the consumer package: the
files it emits are re-verified from scratch by their loader.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp
import sympy
from sympy import Matrix, Poly, Rational, symbols

_X = symbols("x")


class PowerBasisField:
    def __init__(self, poly_ascending, dps: int = 60):
        self.poly = [int(c) for c in poly_ascending]
        assert self.poly[-1] == 1, "polynomial must be monic"
        self.n = len(self.poly) - 1
        self.sym = Poly(list(reversed(self.poly)), _X)
        self.dps = dps
        with mp.workdps(dps):
            roots = mp.polyroots([mp.mpf(c) for c in reversed(self.poly)],
                                 maxsteps=500, extraprec=4 * dps)
        reals = sorted([z.real for z in roots if abs(z.imag) < mp.mpf(10) ** (-dps // 2)])
        upper = sorted([z for z in roots if z.imag > mp.mpf(10) ** (-dps // 2)],
                       key=lambda z: (z.imag, z.real))
        self.real_roots = reals
        self.upper_roots = upper
        self.r1 = len(reals)
        self.r2 = len(upper)
        assert self.r1 + 2 * self.r2 == self.n
        self.rank = self.r1 + self.r2 - 1

    # -- exact arithmetic ---------------------------------------------

    def mul(self, a, b):
        n = self.n
        prod = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        for d in range(2 * n - 2, n - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for k in range(n):
                    prod[d - n + k] -= c * self.poly[k]
        return prod[:n]

    def one(self):
        return [1] + [0] * (self.n - 1)

    def neg(self, a):
        return [-c for c in a]

    def norm(self, a) -> int:
        g = Poly(list(reversed(a)), _X)
        if g.is_zero:
            return 0
        res = sympy.resultant(self.sym, g)
        r = Rational(res)
        assert r.q == 1
        return int(r)

    def inverse_unit(self, a):
        """Exact inverse of a unit (integer output)."""
        cols = []
        for j in range(self.n):
            e = [0] * self.n
            e[j] = 1
            cols.append(self.mul(a, e))
        m = Matrix(cols).T
        sol = m.solve(Matrix([1] + [0] * (self.n - 1)))
        out = []
        for v in sol:
            rv = Rational(v)
            assert rv.q == 1, "inverse of a non-unit requested"
            out.append(int(rv))
        return out

    def power(self, a, k: int):
        if k < 0:
            return self.power(self.inverse_unit(a), -k)
        acc = self.one()
        base = list(a)
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    # -- embeddings -----------------------------------------------------

    def log_vector(self, a):
        """(n_v log|a|_v) over all archimedean places, mpmath reals."""
        with mp.workdps(self.dps):
            out = []
            for z in self.real_roots:
                v = sum(c * z ** k for k, c in enumerate(a))
                out.append(mp.log(abs(v)))
            for z in self.upper_roots:
                v = sum(c * z ** k for k, c in enumerate(a))
                out.append(2 * mp.log(abs(v)))
        return out

    def log_vector_head(self, a):
        """The log vector with the last coordinate dropped (rank many)."""
        return self.log_vector(a)[:-1]

    def minkowski_gram(self):
        """Float Gram matrix of the power basis under the standard embedding
        with doubled complex parts."""
        import numpy as np

        with mp.workdps(self.dps):
            rows = []
            for z in self.real_roots + self.upper_roots:
                rows.append([complex(z) ** k for k in range(self.n)])
        g = np.zeros((self.n, self.n))
        for t, z_row in enumerate(rows):
            weight = 1.0 if t < self.r1 else 2.0
            for i in range(self.n):
                for j in range(self.n):
                    g[i, j] += weight * (z_row[i] * z_row[j].conjugate()).real
        return g

    def abs_values(self, a):
        """|a|_v at each place as mpmath reals (real places then complex)."""
        with mp.workdps(self.dps):
            out = []
            for z in self.real_roots + self.upper_roots:
                out.append(abs(sum(c * z ** k for k, c in enumerate(a))))
        return out
