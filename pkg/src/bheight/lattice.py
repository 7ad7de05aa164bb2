"""Lattice tools: LLL reduction, the certified rational surrogate of the
unit-log matrix, integer points of transformed boxes, short-vector
enumeration, and the Minkowski embedding.

The unit-log matrix S has columns Lambda'(eps_j).  Its entries are real, so
searches use a rational approximation S~ accompanied by a certified constant
m >= r^2 * max(sup|S|, sup|S^-1|); with the error budget built below, the
exact polytope S^-1(box) is guaranteed to sit inside the rational surrogate
S~^-1(inflated box), so no lattice point is ever lost to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .arith import (
    Ball,
    ZERO,
    ONE,
    mat_det,
    mat_inverse,
    mat_sup_norm,
    sqrt_upper,
)
from .field import FieldData, LogVec, NFElem


# ---------------------------------------------------------------------------
# LLL (exact rational, Gram-based)
# ---------------------------------------------------------------------------

def lll_gram(gram, delta: Fraction = Fraction(3, 4), scale_bits: int = 40):
    """LLL on a lattice given by an exact rational Gram matrix.

    Returns the unimodular transform U (rows = new basis in terms of the
    old) satisfying the Lovasz condition on the integer-rounded surrogate of
    the input (the input scaled so its largest entry uses about
    `scale_bits` bits, then rounded).  Rounding only affects reduction
    quality, never the unimodularity of U.
    """
    n = len(gram)
    top = max(abs(Fraction(x)) for row in gram for x in row)
    if top == 0:
        raise ValueError("zero Gram matrix")
    shift = scale_bits - (top.numerator // top.denominator).bit_length()
    factor = Fraction(2) ** shift
    g = [[_round_sym(Fraction(x) * factor) for x in row] for row in gram]
    for i in range(n):
        for j in range(i):
            g[i][j] = g[j][i]
    u = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]

    def gram_of(ui, uj):
        return sum(ui[a] * sum(g[a][b] * uj[b] for b in range(n) if uj[b])
                   for a in range(n) if ui[a])

    mu = [[ZERO] * n for _ in range(n)]
    bstar = [ZERO] * n

    def update_gso():
        for i in range(n):
            for j in range(i):
                num = gram_of(u[i], u[j]) - sum(mu[j][t] * mu[i][t] * bstar[t]
                                                for t in range(j))
                mu[i][j] = num / bstar[j]
            bstar[i] = gram_of(u[i], u[i]) - sum(mu[i][t] ** 2 * bstar[t]
                                                 for t in range(i))
            if bstar[i] <= 0:
                raise ValueError("input vectors are linearly dependent")

    update_gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = mu[k][j]
            m = (q.numerator * 2 + q.denominator) // (2 * q.denominator)
            if m:
                u[k] = [a - m * b for a, b in zip(u[k], u[j])]
        update_gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            update_gso()
            k = max(k - 1, 1)
    return u


def _round_sym(q: Fraction) -> Fraction:
    return Fraction((q.numerator * 2 + q.denominator) // (2 * q.denominator))


def lll_reduce(vectors):
    """LLL-reduce exact rational vectors (or Balls, via midpoints).

    Returns (reduced vectors, transform U with determinant +-1).
    """
    rows = []
    for v in vectors:
        rows.append([x.mid if isinstance(x, Ball) else Fraction(x) for x in v])
    m = len(rows)
    gram = [[sum(a * b for a, b in zip(rows[i], rows[j])) for j in range(m)]
            for i in range(m)]
    u = lll_gram(gram)
    det = mat_det([[Fraction(x) for x in row] for row in u])
    assert abs(det) == 1
    reduced = [[sum(u[i][t] * rows[t][j] for t in range(m))
                for j in range(len(rows[0]))] for i in range(m)]
    return reduced, u


# ---------------------------------------------------------------------------
# Certified rational surrogate of the unit-log matrix
# ---------------------------------------------------------------------------

@dataclass
class SMatrixApprox:
    """Rational stand-in for the unit-log matrix with containment data.

    stilde * stilde_inv = I exactly; m bounds r^2*max(sup norms of the true
    matrix and its inverse); every entry of stilde is within delta_used of
    the true matrix; unit_logs are the full (r+1)-entry approximations of
    the unit log vectors at entrywise accuracy delta2, reused for unit
    height evaluation.
    """

    stilde: list
    stilde_inv: list
    m: Fraction
    delta_used: Fraction
    lam_tilde: Fraction
    delta_tilde: Fraction
    cap: int
    delta2: Fraction
    unit_logs: list  # r vectors of r+1 dyadic rationals
    scale_bits: int


def _ball_matrix_sup_upper(balls) -> Fraction:
    return max(b.abs().upper() for row in balls for b in row)


def _inverse_sup_upper(balls) -> Fraction:
    """Upper bound for sup|S^-1| from the adjugate over the determinant."""
    r = len(balls)
    if r == 1:
        b = balls[0][0]
        if b.contains_zero():
            raise ValueError("determinant enclosure contains zero")
        return 1 / b.abs().lower()
    det = _ball_det(balls)
    if det.contains_zero():
        raise ValueError("determinant enclosure contains zero")
    best = ZERO
    for i in range(r):
        for j in range(r):
            minor = [[balls[a][b] for b in range(r) if b != j]
                     for a in range(r) if a != i]
            up = _ball_det(minor).abs().upper()
            if up > best:
                best = up
    return best / det.abs().lower()


def _ball_det(balls) -> Ball:
    r = len(balls)
    if r == 1:
        return balls[0][0]
    acc = Ball.exact(0)
    for j in range(r):
        minor = [row[:j] + row[j + 1:] for row in balls[1:]]
        term = balls[0][j] * _ball_det(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def build_S_approx(field: FieldData, d_tilde: Fraction, t: Fraction) -> SMatrixApprox:
    """Certified surrogate for the search over unit exponent tuples.

    Derivation of the constants, for box half-width d_tilde and budget t:
    the inflated box absorbs eta = t/12, lam~ = eta/(d~ r (1+m)),
    delta~ = min(lam~/(r^2(m^2+m lam~)), 1/r^2), the exponent window is
    cap = ceil(d~ (m + lam~ sqrt(r))), and the entry accuracy actually used
    is delta2 = min(delta~, (t/6)/(r(r+1)cap)) so the same vectors also give
    unit heights to within t/6.
    """
    r = field.r
    if r < 1:
        raise ValueError("requires positive unit rank")
    # certify m from coarse enclosures, refining until the determinant sign
    # is decided
    delta = Fraction(1, 1 << 16)
    while True:
        logs = [field.lambda_vec(u, delta) for u in field.fund_units]
        balls = [[logs[j].entries[i] for j in range(r)] for i in range(r)]
        try:
            sup_s = _ball_matrix_sup_upper(balls)
            sup_inv = _inverse_sup_upper(balls)
            break
        except ValueError:
            delta /= 256
            if delta < Fraction(1, 1 << 4096):
                raise
    m = r * r * max(sup_s, sup_inv)
    m = Fraction(dyadic_ceil(m, 16))
    lam_tilde = (t / 12) / (d_tilde * r * (1 + m))
    delta_tilde = min(lam_tilde / (r * r * (m * m + m * lam_tilde)),
                      Fraction(1, r * r))
    s_r = sqrt_upper(Fraction(r), 64)
    cap_f = d_tilde * (m + lam_tilde * s_r)
    cap = max(-((-cap_f.numerator) // cap_f.denominator), 1)
    delta2 = min(delta_tilde, (t / 6) / (r * (r + 1) * cap))
    scale_bits = max(8, (delta2.denominator.bit_length()
                         - delta2.numerator.bit_length()) + 3)
    # refine unit logs so that dyadic midpoints are delta2-approximations
    quarter = delta2 / 4
    logs = [field.lambda_vec(u, quarter) for u in field.fund_units]
    unit_logs = []
    for lv in logs:
        mids = []
        for b in lv.entries:
            bb = b.round_dyadic(scale_bits)
            assert bb.rad < delta2
            mids.append(bb.mid)
        unit_logs.append(mids)
    stilde = [[unit_logs[j][i] for j in range(r)] for i in range(r)]
    stilde_inv = mat_inverse(stilde)
    return SMatrixApprox(stilde=stilde, stilde_inv=stilde_inv, m=m,
                         delta_used=delta2, lam_tilde=lam_tilde,
                         delta_tilde=delta_tilde, cap=cap, delta2=delta2,
                         unit_logs=unit_logs, scale_bits=scale_bits)


def dyadic_ceil(q: Fraction, bits: int) -> Fraction:
    scaled = q * (1 << bits)
    n = -((-scaled.numerator) // scaled.denominator)
    return Fraction(n, 1 << bits)


# ---------------------------------------------------------------------------
# Integer points of { n : S~ n in [-d~, d~]^r }
# ---------------------------------------------------------------------------

def integer_points(stilde_inv, d_tilde: Fraction, window: int | None = None):
    """All integer vectors n with S~ n inside the closed box [-d~, d~]^r.

    Membership is decided by exact rational inequalities.  The scan window
    comes from the caller (the exponent cap) or from a sound operator-norm
    bound on S~^-1.
    """
    stilde = mat_inverse([[Fraction(x) for x in row] for row in stilde_inv])
    r = len(stilde)
    if window is None:
        from .arith import operator_norm_bound

        w = operator_norm_bound(stilde_inv) * d_tilde * sqrt_upper(Fraction(r))
        window = w.numerator // w.denominator + 1
    # integer scaling: with L = lcm of denominators, |sum a_ij n_j| <= D
    denom = 1
    for row in stilde:
        for x in row:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
    dd = d_tilde * denom
    dnum, dden = dd.numerator, dd.denominator
    a = [[int(x * denom) for x in row] for row in stilde]
    out = []
    point = [0] * r
    # remaining absolute-sum slack per row for unfixed coordinates
    suffix = [[0] * (r + 1) for _ in range(r)]
    for i in range(r):
        for j in range(r - 1, -1, -1):
            suffix[i][j] = suffix[i][j + 1] + abs(a[i][j]) * window

    def feasible_range(level: int, partial):
        lo, hi = -window, window
        for i in range(r):
            c = a[i][level]
            if c == 0:
                continue
            slack = suffix[i][level + 1]
            # |partial_i + c*x| <= dd + slack
            top = dnum + slack * dden
            lo_i = _ceil_div(-top - partial[i] * dden, c * dden)
            hi_i = _floor_div(top - partial[i] * dden, c * dden)
            if c < 0:
                lo_i, hi_i = hi_i, lo_i
            lo = max(lo, lo_i)
            hi = min(hi, hi_i)
            if lo > hi:
                return None
        return lo, hi

    def rec(level: int, partial):
        if level == r:
            if all(abs(p) * dden <= dnum for p in partial):
                out.append(tuple(point))
            return
        rng = feasible_range(level, partial)
        if rng is None:
            return
        lo, hi = rng
        for x in range(lo, hi + 1):
            point[level] = x
            rec(level + 1, [p + a[i][level] * x for i, p in enumerate(partial)])
        point[level] = 0

    rec(0, [0] * r)
    out.sort()
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _ceil_div(a, b):
    if b < 0:
        a, b = -a, -b
    return -((-a) // b)


def _floor_div(a, b):
    if b < 0:
        a, b = -a, -b
    return a // b


# ---------------------------------------------------------------------------
# Minkowski embedding and Gram data
# ---------------------------------------------------------------------------

def minkowski_embed(x: NFElem, field: FieldData, delta: Fraction) -> list[Ball]:
    """Balls for (sigma_i(x); sqrt2*Re tau_j(x), sqrt2*Im tau_j(x))."""
    bits = 64
    while True:
        out = []
        ok = True
        lo2, hi2 = _sqrt2_bounds(bits)
        root2 = Ball.from_endpoints(lo2, hi2)
        for i, p in enumerate(field.places):
            emb = field.embed(x, i, bits)
            if p.kind == "real":
                out.append(emb)
            else:
                out.append(root2 * emb.re)
                out.append(root2 * emb.im)
        if all(b.rad < delta for b in out):
            return out
        bits *= 2
        if bits > 1 << 20:
            raise RuntimeError("embedding refinement exceeded precision cap")


_SQRT2_CACHE: dict[int, tuple[Fraction, Fraction]] = {}


def _sqrt2_bounds(bits: int):
    got = _SQRT2_CACHE.get(bits)
    if got is None:
        got = (Fraction(isqrt(2 << (2 * bits)), 1 << bits),
               Fraction(isqrt(2 << (2 * bits)) + 1, 1 << bits))
        _SQRT2_CACHE[bits] = got
    return got


def basis_gram_cached(field: FieldData, bits: int = 64):
    """Gram matrix of the integral basis under the embedding (rational
    midpoints + error bound), computed once per field and precision."""
    cache = getattr(field, "_basis_gram_cache", None)
    if cache is None:
        cache = {}
        field._basis_gram_cache = cache
    got = cache.get(bits)
    if got is None:
        basis = [field.element([ONE if i == j else ZERO
                                for j in range(field.n)])
                 for i in range(field.n)]
        got = minkowski_gram(field, basis, bits)
        cache[bits] = got
    return got


def gram_of_columns(field: FieldData, cols, bits: int = 64):
    """Gram of integer-combination vectors over the integral basis:
    C^T G0 C with G0 the cached basis Gram (exact congruence)."""
    g0, err = basis_gram_cached(field, bits)
    n = field.n
    k = len(cols)
    tmp = [[sum(g0[a][b] * col[b] for b in range(n) if col[b])
            for col in cols] for a in range(n)]
    out = [[sum(cols[i][a] * tmp[a][j] for a in range(n) if cols[i][a])
            for j in range(k)] for i in range(k)]
    scale = max((sum(abs(c) for c in col) for col in cols), default=1)
    return out, err * scale * scale


def float_embeddings(field: FieldData):
    """Cached float matrix of basis embeddings (places x n) and the local
    degree weights, for steering only."""
    got = getattr(field, "_float_emb", None)
    if got is None:
        import numpy as np

        rows = []
        weights = []
        for i, p in enumerate(field.places):
            row = []
            for j in range(field.n):
                e = field.embed(field.element(
                    [ONE if t == j else ZERO for t in range(field.n)]), i, 64)
                if p.kind == "real":
                    row.append(complex(float(e.mid), 0.0))
                else:
                    row.append(complex(float(e.re.mid), float(e.im.mid)))
            rows.append(row)
            weights.append(1 if p.kind == "real" else 2)
        got = (np.array(rows), np.array(weights, dtype=float))
        field._float_emb = got
    return got


def minkowski_gram(field: FieldData, elements, bits: int = 128):
    """Rational midpoint Gram matrix of the embedded elements plus an
    entrywise error bound (exact rationals)."""
    embs = []
    for x in elements:
        vec = []
        for i, p in enumerate(field.places):
            e = field.embed(x, i, bits)
            if p.kind == "real":
                vec.append((e, None))
            else:
                vec.append((e.re, e.im))
        embs.append(vec)
    k = len(elements)
    mids = [[ZERO] * k for _ in range(k)]
    errs = ZERO
    for i in range(k):
        for j in range(i, k):
            acc = Ball.exact(0)
            for (ar, ai), (br, bi) in zip(embs[i], embs[j]):
                if ai is None:
                    acc = acc + ar * br
                else:
                    acc = acc + (ar * br + ai * bi) * 2
            mids[i][j] = mids[j][i] = acc.mid
            if acc.rad > errs:
                errs = acc.rad
    return mids, errs


def lll_reduced_integral_basis(field: FieldData, bits: int = 128):
    """Unimodular transform of the integral basis, reduced for the Minkowski
    geometry; returns (elements, transform rows)."""
    basis = [field.element([ONE if i == j else ZERO for j in range(field.n)])
             for i in range(field.n)]
    gram, _err = minkowski_gram(field, basis, bits)
    u = lll_gram(gram)
    new = []
    for row in u:
        acc = field.zero()
        for c, b in zip(row, basis):
            if c:
                acc = acc + b * Fraction(c)
        new.append(acc)
    return new, u


# ---------------------------------------------------------------------------
# Short vectors by enumeration (float-guided, exactness via the caller)
# ---------------------------------------------------------------------------

def short_vectors(gram, bound: Fraction, margin: float = 1e-6):
    """Integer vectors x != 0 with x^T G x <= bound*(1+margin), G the exact
    rational Gram input.  Float arithmetic only steers the recursion; the
    returned set is a superset of the exact solutions (callers re-check).
    Yields each +-pair once (first nonzero coordinate positive)."""
    import math

    n = len(gram)
    g = [[float(x) for x in row] for row in gram]
    # Cholesky: g = L D L^T
    d = [0.0] * n
    l = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i):
            s = g[i][j] - sum(l[i][k] * l[j][k] * d[k] for k in range(j))
            l[i][j] = s / d[j]
        d[i] = g[i][i] - sum(l[i][k] ** 2 * d[k] for k in range(i))
        if d[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
    c = float(bound) * (1.0 + margin) + 1e-12
    x = [0] * n

    def rec(i: int, remaining: float):
        if i < 0:
            if any(x):
                yield tuple(x)
            return
        # quadratic in x_i: d[i]*(x_i + center)^2 <= remaining
        center = sum(l[k][i] * x[k] for k in range(i + 1, n))
        half = (remaining / d[i]) ** 0.5 if remaining > 0 else 0.0
        lo = math.ceil(-half - center - 1e-9)
        hi = math.floor(half - center + 1e-9)
        for v in range(lo, hi + 1):
            x[i] = v
            used = d[i] * (v + center) ** 2
            yield from rec(i - 1, remaining - used)
        x[i] = 0

    for vec in rec(n - 1, c):
        for t in vec:
            if t > 0:
                yield vec
                break
            if t < 0:
                break


def lll_transform_float(gram, delta: float = 0.75):
    """Unimodular LLL transform steered by float arithmetic.

    The returned integer matrix is exactly unimodular by construction; only
    the reduction quality depends on floats.  Callers that rely on
    reducedness for a bound must re-verify that bound with certified
    arithmetic.
    """
    import numpy as np

    g0 = np.array([[float(x) for x in row] for row in gram], dtype=float)
    n = len(g0)
    u = np.eye(n, dtype=object)

    def gso():
        g = u @ g0 @ u.T
        g = g.astype(float)
        mu = np.zeros((n, n))
        b = np.zeros(n)
        for i in range(n):
            for j in range(i):
                mu[i, j] = (g[i, j] - (mu[i, :j] * mu[j, :j] * b[:j]).sum()) / b[j]
            b[i] = g[i, i] - ((mu[i, :i] ** 2) * b[:i]).sum()
            if b[i] <= 0:
                raise ValueError("float GSO broke down")
        return mu, b

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 20000:
            break
        mu, b = gso()
        changed = False
        for j in range(k - 1, -1, -1):
            m = round(mu[k, j])
            if m:
                u[k] = u[k] - m * u[j]
                changed = True
        if changed:
            mu, b = gso()
        if b[k] >= (delta - mu[k, k - 1] ** 2) * b[k - 1]:
            k += 1
        else:
            u[[k, k - 1]] = u[[k - 1, k]]
            k = max(k - 1, 1)
    return [[int(x) for x in row] for row in u]
