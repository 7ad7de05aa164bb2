"""Exact rational arithmetic, midpoint-radius balls, and exact linear algebra.

Every numeric object here is either a `fractions.Fraction` (exact, never
rounded) or a `Ball` whose closed interval [mid-rad, mid+rad] is guaranteed
to contain the exact real value it stands for.  All derived quantities keep
that guarantee: the result interval of any operation contains the exact
result of the same operation applied to any points of the input intervals.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class RefineNeeded(ArithmeticError):
    """An enclosure is too coarse to decide the requested question."""


class SingularMatrixError(ValueError):
    """Exact determinant is zero."""


def rat_from_str(s: str) -> Fraction:
    """Parse "p/q" or "p" into an exact rational."""
    return Fraction(s.strip())


def rat_to_str(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def dyadic_round(q: Fraction, bits: int) -> Fraction:
    """Nearest rational with denominator 2^bits (ties toward +inf).

    |result - q| <= 2^-(bits+1).
    """
    scaled = q * (1 << bits)
    n = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    return Fraction(n, 1 << bits)


def sqrt_bounds(q: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Dyadic lo, hi with lo <= sqrt(q) <= hi and hi - lo <= 2^-bits."""
    if q < 0:
        raise ValueError("negative radicand")
    if q == 0:
        return ZERO, ZERO
    shift = 2 * bits + 2
    # floor of sqrt(q * 4^(bits+1))
    n = (q.numerator << shift) // q.denominator
    s = isqrt(n)
    lo = Fraction(s, 1 << (bits + 1))
    hi = Fraction(s + 1, 1 << (bits + 1))
    return lo, hi


def sqrt_upper(q: Fraction, bits: int = 64) -> Fraction:
    return sqrt_bounds(q, bits)[1]


def sqrt_lower(q: Fraction, bits: int = 64) -> Fraction:
    return sqrt_bounds(q, bits)[0]


class Ball:
    """Midpoint-radius enclosure of a single real number.

    Invariant: rad >= 0 and the represented number lies in
    [mid - rad, mid + rad].  Arithmetic is exact on rationals, so the only
    growth of `rad` comes from genuine input uncertainty (plus explicit
    rounding done by `round_dyadic`).
    """

    __slots__ = ("mid", "rad")

    def __init__(self, mid: Fraction, rad: Fraction = ZERO):
        if rad < 0:
            raise ValueError("negative radius")
        self.mid = Fraction(mid)
        self.rad = Fraction(rad)

    # -- constructors -------------------------------------------------

    @classmethod
    def exact(cls, q) -> "Ball":
        return cls(Fraction(q), ZERO)

    @classmethod
    def from_endpoints(cls, lo: Fraction, hi: Fraction) -> "Ball":
        if hi < lo:
            raise ValueError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    # -- inspection ---------------------------------------------------

    def lower(self) -> Fraction:
        return self.mid - self.rad

    def upper(self) -> Fraction:
        return self.mid + self.rad

    def contains(self, q: Fraction) -> bool:
        return self.lower() <= q <= self.upper()

    def contains_zero(self) -> bool:
        return self.lower() <= 0 <= self.upper()

    def is_exact(self) -> bool:
        return self.rad == 0

    def sign(self) -> int:
        """-1, 0 or +1 when certain; raises RefineNeeded otherwise."""
        if self.lower() > 0:
            return 1
        if self.upper() < 0:
            return -1
        if self.rad == 0:
            return 0
        raise RefineNeeded("sign of interval straddling zero")

    def __repr__(self):
        return f"Ball({self.mid}, {self.rad})"

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "Ball":
        if isinstance(other, Ball):
            return Ball(self.mid + other.mid, self.rad + other.rad)
        return Ball(self.mid + Fraction(other), self.rad)

    __radd__ = __add__

    def __neg__(self) -> "Ball":
        return Ball(-self.mid, self.rad)

    def __sub__(self, other) -> "Ball":
        return self + (-other if isinstance(other, Ball) else -Fraction(other))

    def __rsub__(self, other) -> "Ball":
        return (-self) + other

    def __mul__(self, other) -> "Ball":
        if isinstance(other, Ball):
            m = self.mid * other.mid
            r = (abs(self.mid) * other.rad + abs(other.mid) * self.rad
                 + self.rad * other.rad)
            return Ball(m, r)
        q = Fraction(other)
        return Ball(self.mid * q, self.rad * abs(q))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Ball":
        if not isinstance(other, Ball):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError
            return Ball(self.mid / q, self.rad / abs(q))
        if other.contains_zero():
            raise RefineNeeded("division by interval containing zero")
        quotients = [self.lower() / other.lower(), self.lower() / other.upper(),
                     self.upper() / other.lower(), self.upper() / other.upper()]
        return Ball.from_endpoints(min(quotients), max(quotients))

    def abs(self) -> "Ball":
        lo, hi = self.lower(), self.upper()
        if lo >= 0:
            return Ball(self.mid, self.rad)
        if hi <= 0:
            return Ball(-self.mid, self.rad)
        return Ball.from_endpoints(ZERO, max(-lo, hi))

    def square(self) -> "Ball":
        lo, hi = self.lower(), self.upper()
        if lo >= 0:
            return Ball.from_endpoints(lo * lo, hi * hi)
        if hi <= 0:
            return Ball.from_endpoints(hi * hi, lo * lo)
        return Ball.from_endpoints(ZERO, max(lo * lo, hi * hi))

    def max_with(self, other: "Ball") -> "Ball":
        lo = max(self.lower(), other.lower())
        hi = max(self.upper(), other.upper())
        return Ball.from_endpoints(lo, hi)

    def min_with(self, other: "Ball") -> "Ball":
        lo = min(self.lower(), other.lower())
        hi = min(self.upper(), other.upper())
        return Ball.from_endpoints(lo, hi)

    def round_dyadic(self, bits: int) -> "Ball":
        """Midpoint snapped to denominator 2^bits; enclosure preserved."""
        m = dyadic_round(self.mid, bits)
        return Ball(m, self.rad + abs(m - self.mid))

    def dyadic_outer(self, bits: int) -> "Ball":
        """Midpoint and radius both snapped to denominator 2^bits, rounding
        the radius up; enclosure preserved, growth at most 2^-(bits-1)."""
        m = dyadic_round(self.mid, bits)
        r = self.rad + abs(m - self.mid)
        scaled = r * (1 << bits)
        rq = Fraction(-((-scaled.numerator) // scaled.denominator), 1 << bits)
        return Ball(m, rq)


def ball_sum(balls: Iterable[Ball]) -> Ball:
    m, r = ZERO, ZERO
    for b in balls:
        m += b.mid
        r += b.rad
    return Ball(m, r)


# ---------------------------------------------------------------------------
# Certified natural logarithm
# ---------------------------------------------------------------------------

_LN2_CACHE: dict[int, tuple[Fraction, Fraction]] = {}


def _atanh_series(z: Fraction, err: Fraction) -> tuple[Fraction, Fraction]:
    """(value, tail_bound) with |2*atanh(z) - value| <= tail_bound.

    Requires |z| <= 1/2.  Partial sums are exact.
    """
    if abs(z) > HALF:
        raise ValueError("argument reduction failed")
    z2 = z * z
    term = z
    total = ZERO
    k = 0
    while True:
        total += term / (2 * k + 1)
        k += 1
        term *= z2
        # tail of 2*sum z^(2j+1)/(2j+1), j >= k, geometric bound
        tail = 2 * abs(term) / ((2 * k + 1) * (1 - z2))
        if tail < err:
            return 2 * total, tail


def _ln2_ball(err: Fraction) -> Ball:
    bits = max(8, -(err.numerator.bit_length() - err.denominator.bit_length()) + 8)
    cached = _LN2_CACHE.get(bits)
    if cached is None:
        # ln 2 = 2 atanh(1/3)
        val, tail = _atanh_series(Fraction(1, 3), Fraction(1, 1 << (bits + 4)))
        cached = (val, tail)
        _LN2_CACHE[bits] = cached
    val, tail = cached
    if tail >= err:
        return _ln2_ball(err / 2)
    return Ball(val, tail)


def ln_ball(q: Fraction, err: Fraction) -> Ball:
    """Enclosure of ln(q) for rational q > 0, radius < err."""
    if q <= 0:
        raise ValueError("logarithm of non-positive rational")
    if err <= 0:
        raise ValueError("error target must be positive")
    if q == 1:
        return Ball(ZERO, ZERO)
    # Avoid giant exact series operands: pre-round very wide rationals.
    need_bits = max(16, err.denominator.bit_length() - err.numerator.bit_length() + 16)
    if q.numerator.bit_length() + q.denominator.bit_length() > 8 * need_bits + 128:
        lo = Fraction((q.numerator << need_bits) // q.denominator, 1 << need_bits)
        hi = lo + Fraction(1, 1 << need_bits)
        b_lo = ln_ball(lo if lo > 0 else q, err / 2)
        b_hi = ln_ball(hi, err / 2)
        return Ball.from_endpoints(b_lo.lower(), b_hi.upper())
    # write q = m * 2^k with m in [3/4, 3/2)
    k = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** k
    if m < Fraction(3, 4):
        m *= 2
        k -= 1
    # ln m = 2 atanh((m-1)/(m+1)), |z| <= 1/5
    z = (m - 1) / (m + 1)
    if k == 0:
        val, tail = _atanh_series(z, err / 2)
        return Ball(val, tail)
    ln2 = _ln2_ball(err / (4 * abs(k)))
    val, tail = _atanh_series(z, err / 4)
    return Ball(val, tail) + ln2 * k


def log_ball(x: Ball, target: Fraction) -> Ball:
    """Enclosure of {ln t : t in x}; needs the interval strictly positive.

    Radius is < target plus the contribution of the input width, and
    shrinks below target once the input is refined tightly enough.
    """
    lo, hi = x.lower(), x.upper()
    if lo <= 0:
        raise RefineNeeded("log of interval touching zero")
    if lo == hi:
        b = ln_ball(lo, target / 2)
        return b
    b_lo = ln_ball(lo, target / 4)
    b_hi = ln_ball(hi, target / 4)
    return Ball.from_endpoints(b_lo.lower(), b_hi.upper())


# ---------------------------------------------------------------------------
# Exact rational matrices (row-major lists of lists of Fraction)
# ---------------------------------------------------------------------------

RatMatrix = list


def mat_identity(n: int) -> RatMatrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def mat_copy(a: RatMatrix) -> RatMatrix:
    return [row[:] for row in a]


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    n, k, m = len(a), len(b), len(b[0])
    assert len(a[0]) == k
    out = [[ZERO] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            ait = ai[t]
            if ait == 0:
                continue
            bt = b[t]
            for j in range(m):
                oi[j] += ait * bt[j]
    return out


def mat_vec(a: RatMatrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a[i][j] * v[j] for j in range(len(v))), ZERO) for i in range(len(a))]


def mat_inverse(a: RatMatrix) -> RatMatrix:
    """Exact inverse via Gauss-Jordan; raises SingularMatrixError."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix not square")
    work = [[Fraction(x) for x in row] for row in a]
    inv = mat_identity(n)
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            inv[col], inv[piv] = inv[piv], inv[col]
        p = work[col][col]
        work[col] = [x / p for x in work[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r == col or work[r][col] == 0:
                continue
            f = work[r][col]
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def mat_det(a: RatMatrix) -> Fraction:
    """Exact determinant (fraction-free on a working copy)."""
    n = len(a)
    work = [[Fraction(x) for x in row] for row in a]
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            det = -det
        p = work[col][col]
        det *= p
        for r in range(col + 1, n):
            if work[r][col] == 0:
                continue
            f = work[r][col] / p
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return det


def mat_sup_norm(a: RatMatrix) -> Fraction:
    return max(abs(x) for row in a for x in row)


def operator_norm_bound(a: RatMatrix, bits: int = 64) -> Fraction:
    """Rational upper bound on the operator norm of a square matrix.

    Uses |A| <= r*sqrt(r)*max|a_ij| with sqrt(r) replaced by a dyadic
    upper bound, so the result is exact and always >= the true norm.
    """
    r = len(a)
    if any(len(row) != r for row in a):
        raise ValueError("matrix not square")
    if r == 0:
        return ZERO
    s = sqrt_upper(Fraction(r), bits)
    return r * s * mat_sup_norm(a)


def opnorm_sq_bounds(a: RatMatrix, iters: int = 30) -> tuple[Fraction, Fraction]:
    """(lo, hi) with lo <= |A|^2 <= hi, |A| the operator (spectral) norm.

    hi is the squared Frobenius norm; lo comes from exact power iteration
    on A^T A.  Both are exact rationals.
    """
    n = len(a)
    frob = sum(x * x for row in a for x in row)
    v = [ONE] * n
    at = [[a[j][i] for j in range(n)] for i in range(n)]
    lo = ZERO
    for _ in range(iters):
        w = mat_vec(a, v)
        u = mat_vec(at, w)
        num = sum(x * x for x in w)
        den = sum(x * x for x in v)
        if den == 0:
            break
        lo = max(lo, num / den)
        big = max(abs(x) for x in u) or ONE
        v = [x / big for x in u]
    return lo, frob


# ---------------------------------------------------------------------------
# Interval linear algebra (small systems only)
# ---------------------------------------------------------------------------

def inf_norm(a: RatMatrix) -> Fraction:
    return max(sum(abs(x) for x in row) for row in a)


def solve_verified(inv: RatMatrix, inv_inf: Fraction, e_inf: Fraction,
                   rhs: list[Ball]) -> list[Ball]:
    """Verified solution of (A_mid + E) t = rhs given the exact inverse of
    the midpoint matrix, its row-sum norm, and a row-sum bound on E.

    Standard perturbation bound: with kappa = |inv| * |E| < 1,
    |t - inv*rhs_mid| <= |inv| (rhs_rad + |E| |t0|) / (1 - kappa).
    """
    kappa = inv_inf * e_inf
    if kappa >= 1:
        raise RefineNeeded("matrix uncertainty too large for verified solve")
    mids = [x.mid for x in rhs]
    rad = max((x.rad for x in rhs), default=ZERO)
    t0 = mat_vec(inv, mids)
    t0_inf = max((abs(x) for x in t0), default=ZERO)
    err = inv_inf * (rad + e_inf * t0_inf) / (1 - kappa)
    return [Ball(x, err) for x in t0]


def solve_ball_system(a: list[list[Ball]], b: list[Ball]) -> list[Ball]:
    """Solve A x = b where entries are balls, by interval elimination.

    Raises RefineNeeded when a pivot interval contains zero; in that case
    the caller should supply tighter input enclosures.
    """
    n = len(a)
    work = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        best = ZERO
        for r in range(col, n):
            cand = work[r][col]
            if not cand.contains_zero():
                low = min(abs(cand.lower()), abs(cand.upper()))
                if piv is None or low > best:
                    piv, best = r, low
        if piv is None:
            raise RefineNeeded("interval pivot contains zero")
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
        for r in range(col + 1, n):
            if work[r][col].mid == 0 and work[r][col].rad == 0:
                continue
            f = work[r][col] / work[col][col]
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    xs: list[Ball] = [Ball(ZERO)] * n
    for i in range(n - 1, -1, -1):
        acc = work[i][n]
        for j in range(i + 1, n):
            acc = acc - work[i][j] * xs[j]
        xs[i] = acc / work[i][i]
    return xs
