"""Integral ideals in Hermite normal form, ideal arithmetic, associate
reduction, and generators of principal ideals of bounded norm.

An ideal is stored as an upper-triangular integer matrix with positive
diagonal whose columns are a Z-basis over the integral basis of the field.
All ideal logic is exact integer arithmetic; no floating point enters.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

from .arith import Ball, RefineNeeded, ZERO, ONE, ball_sum, solve_verified, sqrt_upper
from .field import FieldData, NFElem


class ZeroIdealError(ValueError):
    """All generators were zero."""


# ---------------------------------------------------------------------------
# Column-style Hermite normal form
# ---------------------------------------------------------------------------

def hnf_columns(cols: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """HNF (upper triangular, positive diagonal, reduced off-diagonal) of the
    module spanned by the given integer columns.  Requires full rank n."""
    work = [list(c) for c in cols if any(c)]
    if not work:
        raise ZeroIdealError("no nonzero generators")
    basis: list[list[int] | None] = [None] * n  # basis[i] has pivot at row i
    for col in work:
        _hnf_insert(basis, col, n)
    if any(b is None for b in basis):
        raise ZeroIdealError("generators do not span a full-rank module")
    # normalize: positive diagonal, entries left of each pivot reduced
    for i in range(n):
        if basis[i][i] < 0:
            basis[i] = [-x for x in basis[i]]
    for j in range(n):
        for i in range(j - 1, -1, -1):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], basis[i])]
    rows = [[0] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            rows[i][j] = basis[j][i]
    return tuple(tuple(r) for r in rows)


def _hnf_insert(basis: list, col: list[int], n: int) -> None:
    """Insert one column into a triangular basis by extended-gcd elimination."""
    col = col[:]
    for i in range(n - 1, -1, -1):
        if col[i] == 0:
            continue
        if basis[i] is None:
            basis[i] = col
            return
        b = basis[i]
        if col[i] % b[i] == 0:
            q = col[i] // b[i]
            col = [c - q * x for c, x in zip(col, b)]
        else:
            g, u, v = _xgcd(b[i], col[i])
            new_b = [u * x + v * c for x, c in zip(b, col)]
            q1, q2 = b[i] // g, col[i] // g
            col = [q1 * c - q2 * x for c, x in zip(col, b)]
            basis[i] = new_b
    # fully reduced to zero: nothing to insert


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class IdealHNF:
    """Nonzero integral ideal as an upper-triangular column basis matrix."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Sequence[Sequence[int]]):
        self.rows = tuple(tuple(int(x) for x in r) for r in rows)
        self._hash = None
        n = len(self.rows)
        for i, r in enumerate(self.rows):
            if len(r) != n:
                raise ValueError("HNF matrix must be square")
            if r[i] <= 0:
                raise ValueError("HNF diagonal must be positive")
            if any(r[j] != 0 for j in range(i)):
                raise ValueError("HNF matrix must be upper triangular")

    def __eq__(self, other):
        return isinstance(other, IdealHNF) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"IdealHNF({self.rows})"

    @property
    def n(self) -> int:
        return len(self.rows)

    def norm(self) -> int:
        out = 1
        for i in range(self.n):
            out *= self.rows[i][i]
        return out

    def columns(self) -> list[list[int]]:
        n = self.n
        return [[self.rows[i][j] for i in range(n)] for j in range(n)]

    def basis_elements(self, field: FieldData) -> list[NFElem]:
        return [field.element([Fraction(x) for x in col]) for col in self.columns()]

    def contains_coords(self, coords: Sequence[int]) -> bool:
        """Membership of an integer coordinate vector, by back substitution."""
        v = list(coords)
        for i in range(self.n - 1, -1, -1):
            if v[i] % self.rows[i][i]:
                return False
            q = v[i] // self.rows[i][i]
            if q:
                for k in range(i + 1):
                    v[k] -= q * self.rows[k][i]
        return True

    def contains_element(self, x: NFElem) -> bool:
        if not x.is_integral():
            return False
        return self.contains_coords([int(c) for c in x.coords])

    def contains_ideal(self, other: "IdealHNF") -> bool:
        return all(self.contains_coords(col) for col in other.columns())


def unit_ideal(n: int) -> IdealHNF:
    return IdealHNF(tuple(tuple(1 if i == j else 0 for j in range(n))
                          for i in range(n)))


def ideal_from_gens(gens: Iterable[NFElem], field: FieldData) -> IdealHNF:
    """HNF of the ideal generated by the given integral elements."""
    cols = []
    for g in gens:
        if g.is_zero():
            continue
        if not g.is_integral():
            raise ValueError("ideal generators must be integral")
        for j in range(field.n):
            basis_el = field.element([ONE if k == j else ZERO for k in range(field.n)])
            prod = field.mul(g, basis_el)
            cols.append([int(c) for c in prod.coords])
    if not cols:
        raise ZeroIdealError("all generators are zero")
    return IdealHNF(hnf_columns(cols, field.n))


def principal_ideal(x: NFElem, field: FieldData) -> IdealHNF:
    return ideal_from_gens([x], field)


def ideal_norm(ideal: IdealHNF) -> int:
    return ideal.norm()


def ideal_eq(a: IdealHNF, b: IdealHNF) -> bool:
    return a == b


def ideal_contains(a: IdealHNF, b: IdealHNF) -> bool:
    """Whether a contains b (as sets, i.e. a | b for ideals)."""
    return a.contains_ideal(b)


def ideal_sum(a: IdealHNF, b: IdealHNF) -> IdealHNF:
    """The ideal gcd (a, b)."""
    return IdealHNF(hnf_columns(a.columns() + b.columns(), a.n))


def ideal_mul(a: IdealHNF, b: IdealHNF, field: FieldData) -> IdealHNF:
    cols = []
    a_elems = a.basis_elements(field)
    b_elems = b.basis_elements(field)
    for x in a_elems:
        for y in b_elems:
            prod = field.mul(x, y)
            cols.append([int(c) for c in prod.coords])
    return IdealHNF(hnf_columns(cols, field.n))


def ideal_pow(a: IdealHNF, k: int, field: FieldData) -> IdealHNF:
    out = unit_ideal(a.n)
    for _ in range(k):
        out = ideal_mul(out, a, field)
    return out


def ideal_coprime(a: IdealHNF, b: IdealHNF) -> bool:
    na, nb = a.norm(), b.norm()
    if gcd(na, nb) == 1:
        return True
    return ideal_sum(a, b).norm() == 1


# ---------------------------------------------------------------------------
# Prime splitting and enumeration of ideals by norm
# ---------------------------------------------------------------------------

def _gf_factor_poly(poly: Sequence[int], p: int):
    """Monic irreducible factors of poly mod p with multiplicities."""
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor

    desc = [int(c) % p for c in reversed(poly)]
    while desc and desc[0] == 0:
        desc.pop(0)
    lc, factors = gf_factor(list(map(ZZ, desc)), p, ZZ)
    out = []
    for coeffs_desc, mult in factors:
        out.append((tuple(int(c) for c in reversed(coeffs_desc)), int(mult)))
    return out


def field_index_sq(field: FieldData) -> int:
    """(O_K : Z[alpha])^2 = disc(poly)/disc(K), an exact positive integer."""
    from .roots import poly_deriv
    from .arith import mat_det

    n = field.n
    # disc(poly) via the resultant of f and f' (f monic)
    f = tuple(Fraction(c) for c in field.poly)
    fp = poly_deriv(f)
    res = _resultant(f, fp)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    disc_poly = sign * res
    ratio = Fraction(disc_poly) / field.disc
    if ratio.denominator != 1 or ratio <= 0:
        raise ValueError("inconsistent discriminant data")
    return int(ratio)


def _resultant(f, g) -> Fraction:
    """Resultant via the Sylvester matrix (small degrees only)."""
    from .arith import mat_det

    m, n = len(f) - 1, len(g) - 1
    if n < 0:
        return ZERO
    size = m + n
    rows = []
    for i in range(n):
        row = [ZERO] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [ZERO] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return mat_det(rows)


class PrimeSplitting:
    """Prime ideals above rational primes, via factorization of the defining
    polynomial mod p.  Valid only for p not dividing the index (O_K:Z[alpha]);
    the constructor of `IdealEnumerator` checks this."""

    def __init__(self, field: FieldData):
        self.field = field
        self._cache: dict[int, list[tuple[IdealHNF, int, int]]] = {}
        self._index_sq = field_index_sq(field)

    def primes_above(self, p: int) -> list[tuple[IdealHNF, int, int]]:
        """[(prime ideal, residue degree f, ramification e)] above p."""
        got = self._cache.get(p)
        if got is not None:
            return got
        if self._index_sq % p == 0:
            raise ValueError(
                f"prime {p} divides the index (O_K:Z[alpha]); "
                "splitting via the defining polynomial is not valid")
        field = self.field
        alpha = field.gen()
        out = []
        for factor, mult in _gf_factor_poly(field.poly, p):
            # ideal (p, factor(alpha))
            val = field.zero()
            apow = field.one()
            for c in factor:
                if c:
                    val = val + apow * Fraction(c)
                apow = field.mul(apow, alpha)
            gens = [field.from_rational(p), val]
            ideal = ideal_from_gens([g for g in gens if not g.is_zero()], field)
            f_deg = len(factor) - 1
            assert ideal.norm() == p ** f_deg
            out.append((ideal, f_deg, mult))
        self._cache[p] = out
        return out


class IdealEnumerator:
    """All integral ideals of a given norm, from prime splitting data."""

    def __init__(self, field: FieldData):
        self.field = field
        self.splitting = PrimeSplitting(field)
        self._by_norm: dict[int, list[IdealHNF]] = {1: [unit_ideal(field.n)]}

    def of_norm(self, m: int) -> list[IdealHNF]:
        got = self._by_norm.get(m)
        if got is not None:
            return got
        from sympy import factorint

        parts: list[list[IdealHNF]] = []
        for p, a in sorted(factorint(m).items()):
            local: list[IdealHNF] = []
            primes = self.splitting.primes_above(p)
            fs = [f for (_ideal, f, _e) in primes]
            for expo in _exponent_vectors(fs, a):
                ideal = unit_ideal(self.field.n)
                for (pi, _f, _e), c in zip(primes, expo):
                    for _ in range(c):
                        ideal = ideal_mul(ideal, pi, self.field)
                local.append(ideal)
            if not local:
                self._by_norm[m] = []
                return []
            parts.append(local)
        out = [unit_ideal(self.field.n)]
        for local in parts:
            out = [ideal_mul(x, y, self.field) for x in out for y in local]
        # distinct by construction, but dedupe defensively
        uniq = sorted(set(out), key=lambda i: i.rows)
        self._by_norm[m] = uniq
        return uniq

    def up_to_norm(self, bound: int) -> list[tuple[int, IdealHNF]]:
        out = []
        for m in range(1, bound + 1):
            for ideal in self.of_norm(m):
                out.append((m, ideal))
        return out


def _exponent_vectors(fs: list[int], a: int):
    """All c >= 0 with sum c_i f_i = a."""
    if not fs:
        if a == 0:
            yield ()
        return
    f0 = fs[0]
    for c in range(a // f0 + 1):
        for rest in _exponent_vectors(fs[1:], a - c * f0):
            yield (c,) + rest


# ---------------------------------------------------------------------------
# Associate reduction and canonical generators
# ---------------------------------------------------------------------------

def is_associate(a: NFElem, b: NFElem, field: FieldData) -> bool:
    """Whether a and b generate the same ideal (both nonzero integral)."""
    if a.is_zero() or b.is_zero():
        raise ValueError("associate test requires nonzero elements")
    return principal_ideal(a, field) == principal_ideal(b, field)


def mu_canonical(x: NFElem, field: FieldData) -> NFElem:
    """Lexicographically smallest coordinate vector among {zeta*x}."""
    best = x
    for zeta in field.mu:
        cand = field.mul(zeta, x)
        if cand.coords < best.coords:
            best = cand
    return best


def unit_reduce(alpha: NFElem, field: FieldData,
                max_bits: int = 1 << 16) -> tuple[NFElem, tuple[int, ...]]:
    """Normalize an element by fundamental units.

    Returns (alpha', (m_1..m_r)) with alpha' = alpha * prod eps_j^(-m_j)
    whose log vector (last coordinate dropped) lies in the half-open
    fundamental cell of the unit lattice centered at the projection of
    (log|N(alpha)| / (r+1)) * (1,..,1).  Output is deterministic and equal,
    up to roots of unity, for any two associates of alpha.
    """
    if alpha.is_zero():
        raise ValueError("cannot unit-reduce zero")
    r = field.r
    if r == 0:
        return alpha, ()
    target_den = r + 1
    nrm = abs(field.norm(alpha))
    delta = Fraction(1, 1 << 8)
    while True:
        try:
            lam = field.lambda_vec(alpha, delta)
            logn = field.log_norm_ball(nrm, delta)
            inv, inv_inf, e_inf = _unit_solver(field, delta)
            rhs = [lam.entries[i] - logn * Fraction(1, target_den) for i in range(r)]
            t = solve_verified(inv, inv_inf, e_inf, rhs)
            ms = []
            ok = True
            for ti in t:
                shifted = ti + Fraction(1, 2)
                lo, hi = shifted.lower(), shifted.upper()
                flo = lo.numerator // lo.denominator
                fhi = hi.numerator // hi.denominator
                if flo != fhi:
                    ok = False
                    break
                ms.append(flo)
            if ok:
                out = alpha
                for j, m in enumerate(ms):
                    if m:
                        out = field.mul(out, field.pow(field.fund_units[j], -m))
                return out, tuple(ms)
        except RefineNeeded:
            pass
        delta /= 16
        if delta < Fraction(1, 1 << max_bits):
            raise RefineNeeded("unit reduction hit the precision cap")


def _unit_solver(field: FieldData, delta: Fraction):
    """Exact inverse of the (dyadic midpoint) unit-log matrix at the given
    accuracy ladder, with verified-solve norm data; cached on the field."""
    bits = max(4, (delta.denominator.bit_length()
                   - delta.numerator.bit_length()) + 1)
    bits = 1 << (bits - 1).bit_length()
    cache = getattr(field, "_unit_solver_cache", None)
    if cache is None:
        cache = {}
        field._unit_solver_cache = cache
    got = cache.get(bits)
    if got is None:
        from .arith import inf_norm, mat_inverse

        r = field.r
        logs = field.unit_logs(Fraction(1, 1 << bits))
        snapped = [[logs[j].entries[i].dyadic_outer(bits + 16)
                    for j in range(r)] for i in range(r)]
        mids = [[b.mid for b in row] for row in snapped]
        e_inf = max(sum(b.rad for b in row) for row in snapped)
        inv = mat_inverse(mids)
        got = (inv, inf_norm(inv), e_inf)
        cache[bits] = got
    return got


# ---------------------------------------------------------------------------
# Generators of principal ideals of bounded norm
# ---------------------------------------------------------------------------

def _iroot_upper(n: int, k: int) -> Fraction:
    """Dyadic upper bound for n^(1/k), n >= 1."""
    bits = 32
    num = n << (k * bits)
    r = _integer_kth_root(num, k)
    return Fraction(r + 1, 1 << bits)


def _integer_kth_root(n: int, k: int) -> int:
    if n < 0:
        raise ValueError
    if n == 0:
        return 0
    x = 1 << ((n.bit_length() + k - 1) // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def corner_norm_sq_bound(field: FieldData, norm_max: int) -> Fraction:
    """Rational R^2 such that the unit-normalized generator g of any
    principal ideal with norm <= norm_max has embedding length^2 <= R^2.

    After unit reduction the log vector of g sits in the cell
    (log N /(r+1)) * 1 + { sum theta_j Lambda(eps_j) : theta in [0,1) },
    so |g|_v^{n_v} <= N^(1/(r+1)) * prod_j max(1, |eps_j|_v^{n_v})."""
    cache = getattr(field, "_corner_bound_cache", None)
    if cache is None:
        cache = {}
        field._corner_bound_cache = cache
    got = cache.get(norm_max)
    if got is not None:
        return got
    r = field.r
    nroot = _iroot_upper(norm_max, r + 1)
    # per-place upper bounds on |eps_j|_v^{n_v}
    ups = []
    for i, p in enumerate(field.places):
        prod = Fraction(1)
        for u in field.fund_units:
            sq = field.abs_sq_ball(u, i, 96)
            val_sq = sq.upper()  # (|u|_v)^2
            if p.kind == "real":
                up = sqrt_upper(max(val_sq, Fraction(1)), 32)
            else:
                up = max(val_sq, Fraction(1))
            prod *= max(up, Fraction(1))
        ups.append(prod)
    total = Fraction(0)
    for p, up in zip(field.places, ups):
        bound_pow = nroot * up  # bound for |g|_v^{n_v}
        if p.kind == "real":
            total += bound_pow * bound_pow
        else:
            total += 2 * bound_pow  # n_v=2: |g|_v^2 <= bound_pow
    cache[norm_max] = total
    return total


def find_generator(ideal: IdealHNF, field: FieldData,
                   assume_principal: bool = False) -> NFElem | None:
    """Search a generator of an integral ideal via short vectors.

    Complete: if the ideal is principal, its unit-normalized generator lies
    within the corner bound, so scanning up to that radius decides
    principality.  With `assume_principal` (class number one) the escalation
    simply runs until the generator appears.
    """
    from .lattice import (
        float_embeddings,
        gram_of_columns,
        lll_transform_float,
        short_vectors,
    )

    n = field.n
    target = ideal.norm()
    cols = ideal.columns()
    gram, _err = gram_of_columns(field, cols, 64)
    u = lll_transform_float(gram)
    # reduced generating vectors as integer coordinate columns
    red_cols = [[sum(u[i][t] * cols[t][a] for t in range(n))
                 for a in range(n)] for i in range(n)]
    red_basis = [field.element([Fraction(c) for c in col]) for col in red_cols]
    red_gram, _err = gram_of_columns(field, red_cols, 64)
    cap = corner_norm_sq_bound(field, target)
    # float-embedding prefilter: exact norms only near the target
    import numpy as np

    emb0, weights = float_embeddings(field)
    emb = emb0 @ np.array(red_cols, dtype=float).T
    log_target = float(np.log(float(target)))

    def norm_matches(vec) -> bool:
        z = emb @ np.array(vec, dtype=float)
        vals = np.abs(z)
        if np.any(vals < 1e-300):
            return True  # too small to trust the float path; check exactly
        logn = float((np.log(vals) * weights).sum())
        return abs(logn - log_target) < 1e-6 + 1e-9 * abs(log_target)

    # start near the arithmetic-geometric floor n * |N|^(2/n) and escalate
    start = 2 * Fraction(n) * _iroot_upper(max(1, target * target), n)
    r2 = min(start, cap)
    while True:
        for vec in short_vectors(red_gram, r2):
            if not norm_matches(vec):
                continue
            elem = field.zero()
            for c, b in zip(vec, red_basis):
                if c:
                    elem = elem + b * Fraction(c)
            if abs(field.norm(elem)) == target:
                # elem lies in the ideal and matches its norm, so it generates
                return elem
        if r2 >= cap:
            if not assume_principal:
                return None
            # a genuinely principal ideal always has a generator inside the
            # cap; growing further only guards against an unexpectedly loose
            # floating-point steering of the enumeration
            cap *= 4
        r2 = min(r2 * 2, cap)


class PrincipalIdealIndex:
    """All principal ideals of norm <= bound with one canonical generator.

    Quadratic fields use an exact coordinate box scan (complete thanks to
    the unit-cell normalization bounds); other fields go ideal by ideal via
    prime splitting and the short-vector generator search.
    """

    def __init__(self, field: FieldData, bound: int):
        self.field = field
        self.bound = int(bound)
        # norm -> list of (IdealHNF, generator)
        self.by_norm: dict[int, list[tuple[IdealHNF, NFElem]]] = {}
        if field.n == 1:
            self._build_rationals()
        elif field.n == 2:
            self._build_quadratic()
        else:
            self._build_general()
        for lst in self.by_norm.values():
            lst.sort(key=lambda pair: _canonical_sort_key(pair[1]))

    # -- degree 1 -------------------------------------------------------

    def _build_rationals(self):
        for m in range(1, self.bound + 1):
            ideal = IdealHNF(((m,),))
            self.by_norm[m] = [(ideal, self.field.from_rational(m))]

    # -- degree 2: exact box scan ----------------------------------------

    def _norm_form(self):
        d_poly = self.field.poly
        # N(x + y*omega) for omega with min poly t^2 + b t + c: x^2 - b x y? 
        c0, c1, _ = d_poly
        # omega^2 = -c1*omega - c0; N(x + y w) = x^2 - c1 x y + c0 y^2
        return lambda x, y: x * x - c1 * x * y + c0 * y * y

    def _build_quadratic(self):
        field = self.field
        reps_max = max(rep.norm() for rep in field.class_reps) if field.class_reps else 1
        nmax = self.bound
        norm = self._norm_form()
        if field.r2 == 1:
            pts = _imag_quad_points(field, nmax, norm)
        else:
            pts = _real_quad_points(field, nmax, norm)
        found: dict[tuple, tuple[IdealHNF, NFElem]] = {}
        for x, y in pts:
            nv = norm(x, y)
            anv = abs(nv)
            if anv == 0 or anv > nmax:
                continue
            elem = field.element((Fraction(x), Fraction(y)))
            ideal_rows = _principal_hnf_quadratic(field, x, y)
            key = ideal_rows
            if key not in found:
                found[key] = (IdealHNF(ideal_rows), elem)
        for ideal, elem in found.values():
            canon = canonical_generator(elem, field)
            self.by_norm.setdefault(ideal.norm(), []).append((ideal, canon))

    # -- general degree ---------------------------------------------------

    def _build_general(self):
        field = self.field
        enum = IdealEnumerator(field)
        for m in range(1, self.bound + 1):
            for ideal in enum.of_norm(m):
                g = find_generator(ideal, field, assume_principal=False)
                if g is None:
                    continue
                canon = canonical_generator(g, field)
                self.by_norm.setdefault(m, []).append((ideal, canon))

    # -- queries ----------------------------------------------------------

    def gens_for_class(self, rep: IdealHNF, norm_set) -> list[NFElem]:
        """Canonical generators g with (g) inside rep and norm in norm_set."""
        out = []
        for nm in sorted(set(norm_set)):
            for ideal, gen in self.by_norm.get(nm, []):
                if rep.contains_ideal(ideal):
                    out.append(gen)
        return out


def _principal_hnf_quadratic(field: FieldData, x: int, y: int):
    """HNF rows of the ideal (x + y*omega) without building matrices."""
    c0, c1, _ = field.poly
    # columns: (x, y) and coords of (x + y w) * w = (-c0 y, x - c1 y)
    cols = [[x, y], [-c0 * y, x - c1 * y]]
    return hnf_columns(cols, 2)


def _imag_quad_points(field: FieldData, nmax: int, norm):
    """All integer (x, y) with 0 < N(x + y*omega) <= nmax (definite form)."""
    c0, c1, _ = field.poly
    disc = c1 * c1 - 4 * c0  # negative
    ymax = isqrt(4 * nmax // -disc) + 1
    out = []
    for y in range(-ymax, ymax + 1):
        # x^2 - c1 x y + (c0 y^2 - nmax) <= 0
        a, b, c = 1, -c1 * y, c0 * y * y - nmax
        d2 = b * b - 4 * a * c
        if d2 < 0:
            continue
        s = isqrt(d2)
        for x in range((-b - s) // 2 - 1, (-b + s) // 2 + 2):
            if x == 0 and y == 0:
                continue
            if norm(x, y) <= nmax:
                out.append((x, y))
    return out


def _real_quad_points(field: FieldData, nmax: int, norm):
    """Integer (x, y) covering every unit-normalized element with
    |N| <= nmax: |x + y w_v| <= sqrt(nmax) * max(1, |eps|_v) per real place."""
    (eps,) = field.fund_units
    bits = 96
    roots = field.roots_at(bits)
    w1, w2 = roots[0], roots[1]
    sq_n = sqrt_upper(Fraction(nmax), 32)
    bounds = []
    for i in range(2):
        e = field.embed(eps, i, bits).abs()
        bounds.append(sq_n * max(Fraction(1), e.upper()))
    u1, u2 = bounds
    diff_low = (w2 - w1).abs().lower()
    if diff_low <= 0:
        raise RuntimeError("real embeddings not separated at this precision")
    ymax_f = (u1 + u2) / diff_low
    ymax = ymax_f.numerator // ymax_f.denominator + 1
    out = []
    for y in range(-ymax, ymax + 1):
        lo = None
        hi = None
        for (w, u) in ((w1, u1), (w2, u2)):
            # |x + y*w| <= u
            lo_i = (-u - (w * y).upper())
            hi_i = (u - (w * y).lower())
            lo = lo_i if lo is None else max(lo, lo_i)
            hi = hi_i if hi is None else min(hi, hi_i)
        if lo > hi:
            continue
        xlo = lo.numerator // lo.denominator
        xhi = hi.numerator // hi.denominator + 1
        for x in range(xlo, xhi + 1):
            if x == 0 and y == 0:
                continue
            if abs(norm(x, y)) <= nmax:
                out.append((x, y))
    return out


def _canonical_sort_key(elem: NFElem):
    return tuple((abs(c), 0 if c >= 0 else 1) for c in reversed(elem.coords))


def canonical_generator(g: NFElem, field: FieldData) -> NFElem:
    """Deterministic generator choice: unit-reduce, then pick the smallest
    torsion associate under the coordinate order (|c|, sign) read from the
    top coordinate down."""
    reduced, _shift = unit_reduce(g, field)
    return min((field.mul(z, reduced) for z in field.mu), key=_canonical_sort_key)


def principal_gens(rep: IdealHNF, norm_set, field: FieldData) -> list[NFElem]:
    """One canonical generator per distinct principal ideal contained in the
    class representative with norm in norm_set, sorted by (norm, coords)."""
    ns = sorted({int(m) for m in norm_set})
    if not ns:
        return []
    index = PrincipalIdealIndex(field, max(ns))
    gens = index.gens_for_class(rep, ns)
    gens.sort(key=lambda g: (abs(field.norm(g)), _canonical_sort_key(g)))
    return gens
