"""Number field data model and exact element arithmetic.

A field is described by a monic integer defining polynomial together with an
integral basis, signature, class representatives, fundamental units, roots
of unity and certified enclosures of the defining polynomial's roots (one
per archimedean place).  Elements are stored as exact rational coordinate
vectors over the integral basis, so integrality is simply "all coordinates
are integers" and all ideal logic is integer matrix work.

Everything is immutable after construction; the only internal mutation is a
monotone cache of root enclosures refined to increasing precision, which is
safe under concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import (
    Ball,
    RefineNeeded,
    ZERO,
    ONE,
    ball_sum,
    log_ball,
    mat_det,
    mat_inverse,
    mat_vec,
)
from .roots import (
    BallC,
    Poly,
    poly_eval_ball,
    poly_eval_ballc,
    refine_complex_root,
    refine_real_root,
)


class FieldDataError(ValueError):
    """A field description violates the data model's invariants."""


@dataclass(frozen=True)
class Place:
    """One archimedean place: a certified enclosure of a defining-poly root.

    kind "real" uses `interval` = (lo, hi) bracketing one real root;
    kind "complex" uses `rect` around the root with positive imaginary part.
    """

    kind: str
    local_degree: int
    interval: tuple[Fraction, Fraction] | None = None
    rect_re: tuple[Fraction, Fraction] | None = None
    rect_im: tuple[Fraction, Fraction] | None = None

    def seed_rect(self) -> BallC:
        return BallC(Ball.from_endpoints(*self.rect_re),
                     Ball.from_endpoints(*self.rect_im))


@dataclass(frozen=True)
class LogVec:
    """Certified enclosures of (n_v * log|x|_v) over the archimedean places."""

    entries: tuple[Ball, ...]

    def mids(self) -> tuple[Fraction, ...]:
        return tuple(b.mid for b in self.entries)

    def sum_ball(self) -> Ball:
        return ball_sum(self.entries)


class NFElem:
    """Element of a number field as coordinates over the integral basis."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: "FieldData", coords: Sequence[Fraction]):
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)
        self._hash = None
        if len(self.coords) != field.n:
            raise ValueError("coordinate vector has wrong length")

    def __eq__(self, other):
        return isinstance(other, NFElem) and self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coords)
        return self._hash

    def __repr__(self):
        return f"NFElem({list(map(str, self.coords))})"

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    # -- ring operations --------------------------------------------------

    def __add__(self, other: "NFElem") -> "NFElem":
        return NFElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "NFElem") -> "NFElem":
        return NFElem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "NFElem":
        return NFElem(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, NFElem):
            return self.field.mul(self, other)
        q = Fraction(other)
        return NFElem(self.field, tuple(a * q for a in self.coords))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, NFElem):
            return self.field.mul(self, other.inverse())
        q = Fraction(other)
        return NFElem(self.field, tuple(a / q for a in self.coords))

    def inverse(self) -> "NFElem":
        return self.field.inv(self)

    def __pow__(self, k: int) -> "NFElem":
        return self.field.pow(self, k)

    def norm(self) -> Fraction:
        return self.field.norm(self)

    def trace(self) -> Fraction:
        return self.field.trace(self)


class FieldData:
    """Immutable description of a number field K.

    `basis_mat[i]` gives the power-basis coordinates of the i-th integral
    basis element; the first basis element must be 1.  Elements of K always
    use integral-basis coordinates.
    """

    def __init__(self, *, label: str, poly: Sequence[int],
                 basis_mat: Sequence[Sequence[Fraction]],
                 disc: int, places: Sequence[Place],
                 class_reps=(), fund_units=(), mu=(),
                 verify_ring: bool = True):
        self.label = label
        self.poly: tuple[int, ...] = tuple(int(c) for c in poly)
        if self.poly[-1] != 1:
            raise FieldDataError("defining polynomial must be monic")
        self.n = len(self.poly) - 1
        self.basis_mat = [[Fraction(x) for x in row] for row in basis_mat]
        if len(self.basis_mat) != self.n or any(len(r) != self.n for r in self.basis_mat):
            raise FieldDataError("integral basis has wrong shape")
        if self.basis_mat[0] != [ONE] + [ZERO] * (self.n - 1):
            raise FieldDataError("first integral basis element must be 1")
        self.basis_inv = mat_inverse(self.basis_mat)
        self.disc = int(disc)
        self.places = tuple(places)
        self.r1 = sum(1 for p in self.places if p.kind == "real")
        self.r2 = sum(1 for p in self.places if p.kind == "complex")
        if self.r1 + 2 * self.r2 != self.n:
            raise FieldDataError("local degrees do not sum to the field degree")
        self.r = self.r1 + self.r2 - 1
        self.mult_table = self._build_mult_table(verify_ring)
        self._trace_vec = self._build_trace_vec()
        self.class_reps = tuple(class_reps)
        self.fund_units: tuple[NFElem, ...] = tuple(fund_units)
        self.mu: tuple[NFElem, ...] = tuple(mu)
        self._root_cache: dict[int, list] = {}
        self._unit_log_cache: dict[int, list] = {}

    # -- construction helpers ------------------------------------------

    def _poly_mulmod(self, a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
        n = self.n
        prod = [ZERO] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj != 0:
                    prod[i + j] += ai * bj
        # reduce modulo the monic defining polynomial
        for d in range(2 * n - 2, n - 1, -1):
            c = prod[d]
            if c == 0:
                continue
            prod[d] = ZERO
            for k in range(n):
                prod[d - n + k] -= c * self.poly[k]
        return prod[:n]

    def _build_mult_table(self, verify_ring: bool):
        n = self.n
        table = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                prod_power = self._poly_mulmod(self.basis_mat[i], self.basis_mat[j])
                coords = mat_vec(self._basis_inv_t(), prod_power)
                if verify_ring and any(c.denominator != 1 for c in coords):
                    raise FieldDataError(
                        "integral basis is not multiplicatively closed")
                row = tuple(coords)
                table[i][j] = row
                table[j][i] = row
        return table

    def _basis_inv_t(self):
        # power coords -> integral coords: x_power = B^T x_basis, so
        # x_basis = (B^T)^-1 x_power = (B^-1)^T x_power
        if not hasattr(self, "_binv_t"):
            self._binv_t = [[self.basis_inv[j][i] for j in range(self.n)]
                            for i in range(self.n)]
        return self._binv_t

    def _build_trace_vec(self):
        out = []
        for i in range(self.n):
            m = self._mul_matrix_basis(i)
            out.append(sum(m[k][k] for k in range(self.n)))
        return tuple(out)

    def _mul_matrix_basis(self, i: int):
        """Matrix of multiplication by basis element i (columns = b_i*b_j)."""
        return [[self.mult_table[i][j][k] for j in range(self.n)]
                for k in range(self.n)]

    # -- basic elements --------------------------------------------------

    def element(self, coords) -> NFElem:
        return NFElem(self, coords)

    def zero(self) -> NFElem:
        return NFElem(self, (ZERO,) * self.n)

    def one(self) -> NFElem:
        return NFElem(self, (ONE,) + (ZERO,) * (self.n - 1))

    def from_rational(self, q) -> NFElem:
        return NFElem(self, (Fraction(q),) + (ZERO,) * (self.n - 1))

    def from_power_coords(self, coords) -> NFElem:
        vec = [Fraction(c) for c in coords]
        if len(vec) != self.n:
            raise ValueError("power coordinate vector has wrong length")
        return NFElem(self, mat_vec(self._basis_inv_t(), vec))

    def gen(self) -> NFElem:
        """The root of the defining polynomial as a field element."""
        return self.from_power_coords([ZERO, ONE] + [ZERO] * (self.n - 2)
                                      if self.n >= 2 else [ZERO])

    def to_power_coords(self, x: NFElem) -> list[Fraction]:
        return [sum((self.basis_mat[i][k] * x.coords[i] for i in range(self.n)), ZERO)
                for k in range(self.n)]

    # -- arithmetic -------------------------------------------------------

    def mul(self, x: NFElem, y: NFElem) -> NFElem:
        n = self.n
        out = [ZERO] * n
        tab = self.mult_table
        for i in range(n):
            xi = x.coords[i]
            if xi == 0:
                continue
            for j in range(n):
                yj = y.coords[j]
                if yj == 0:
                    continue
                f = xi * yj
                row = tab[i][j]
                for k in range(n):
                    if row[k] != 0:
                        out[k] += f * row[k]
        return NFElem(self, out)

    def mul_matrix(self, x: NFElem):
        """Matrix sending coords(y) to coords(x*y)."""
        n = self.n
        cols = []
        for j in range(n):
            col = [ZERO] * n
            for i in range(n):
                xi = x.coords[i]
                if xi == 0:
                    continue
                row = self.mult_table[i][j]
                for k in range(n):
                    if row[k] != 0:
                        col[k] += xi * row[k]
            cols.append(col)
        return [[cols[j][k] for j in range(n)] for k in range(n)]

    def norm(self, x: NFElem) -> Fraction:
        return mat_det(self.mul_matrix(x))

    def trace(self, x: NFElem) -> Fraction:
        return sum((c * t for c, t in zip(x.coords, self._trace_vec)), ZERO)

    def inv(self, x: NFElem) -> NFElem:
        if x.is_zero():
            raise ZeroDivisionError("division by zero field element")
        if x.is_rational():
            return self.from_rational(1 / x.coords[0])
        m = self.mul_matrix(x)
        e1 = [ONE] + [ZERO] * (self.n - 1)
        sol = mat_vec(mat_inverse(m), e1)
        return NFElem(self, sol)

    def pow(self, x: NFElem, k: int) -> NFElem:
        if k < 0:
            return self.pow(self.inv(x), -k)
        acc = self.one()
        base = x
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base) if k > 1 else base
            k >>= 1
        return acc

    # -- embeddings -------------------------------------------------------

    def roots_at(self, bits: int):
        """Enclosures of the defining-poly root at every place, radius < 2^-bits."""
        ladder = 1 << max(6, (bits - 1).bit_length())
        cached = self._root_cache.get(ladder)
        if cached is None:
            # refine a bit past the target, then snap the enclosure to the
            # dyadic grid so downstream arithmetic keeps small denominators
            target = Fraction(1, 1 << (ladder + 2))
            snap = ladder + 16
            poly = tuple(Fraction(c) for c in self.poly)
            out = []
            for p in self.places:
                if p.kind == "real":
                    b = refine_real_root(poly, p.interval[0],
                                         p.interval[1], target)
                    out.append(b.dyadic_outer(snap))
                else:
                    c = refine_complex_root(poly, p.seed_rect(), target)
                    out.append(BallC(c.re.dyadic_outer(snap),
                                     c.im.dyadic_outer(snap)))
            self._root_cache[ladder] = out
            cached = out
        return cached

    def embed(self, x: NFElem, place_index: int, bits: int):
        """Ball (real place) or BallC (complex place) enclosing the embedding."""
        root = self.roots_at(bits)[place_index]
        power = tuple(self.to_power_coords(x))
        if isinstance(root, Ball):
            return poly_eval_ball(power, root)
        return poly_eval_ballc(power, root)

    def abs_sq_ball(self, x: NFElem, place_index: int, bits: int) -> Ball:
        """Enclosure of |x|_v^2 at one place."""
        emb = self.embed(x, place_index, bits)
        if isinstance(emb, Ball):
            return emb.square()
        return emb.abs2()

    def lambda_vec(self, x: NFElem, delta: Fraction) -> LogVec:
        """Certified log vector: entry v encloses n_v*log|x|_v, radius < delta.

        Entries for a complex place are log(|x|_v^2) so that the vector sums
        to log|Norm(x)| over all places.
        """
        if x.is_zero():
            raise ValueError("log vector of zero")
        if delta <= 0:
            raise ValueError("delta must be positive")
        bits = 64
        while True:
            try:
                entries = []
                ok = True
                for i, p in enumerate(self.places):
                    sq = self.abs_sq_ball(x, i, bits)
                    if sq.lower() <= 0:
                        ok = False
                        break
                    ent = log_ball(sq, delta / 2)
                    if p.kind == "real":
                        ent = ent * Fraction(1, 2)
                    if ent.rad >= delta:
                        ok = False
                        break
                    entries.append(ent)
                if ok:
                    return LogVec(tuple(entries))
            except RefineNeeded:
                pass
            bits *= 2
            if bits > 1 << 20:
                raise RefineNeeded("log vector refinement exceeded precision cap")

    def log_norm_ball(self, value: Fraction, delta: Fraction) -> Ball:
        """Enclosure of log(value) for a positive rational, radius < delta."""
        return log_ball(Ball.exact(Fraction(value)), delta)

    def unit_logs(self, delta: Fraction) -> list[LogVec]:
        """Log vectors of the fundamental units at accuracy delta (cached on
        a dyadic ladder, so repeated callers share the refinement work)."""
        bits = max(4, (delta.denominator.bit_length()
                       - delta.numerator.bit_length()) + 1)
        bits = 1 << (bits - 1).bit_length()
        got = self._unit_log_cache.get(bits)
        if got is None:
            d = Fraction(1, 1 << bits)
            got = [self.lambda_vec(u, d) for u in self.fund_units]
            self._unit_log_cache[bits] = got
        return got

    def __repr__(self):
        return (f"FieldData({self.label!r}, n={self.n}, r1={self.r1}, "
                f"r2={self.r2}, disc={self.disc})")


def rationals_field() -> FieldData:
    """The degree-1 field (h = 1, no units beyond the sign)."""
    from .ideals import IdealHNF

    f = FieldData(
        label="Q",
        poly=(0, 1),
        basis_mat=[[ONE]],
        disc=1,
        places=(Place(kind="real", local_degree=1,
                      interval=(Fraction(-1, 2), Fraction(1, 2))),),
    )
    f.class_reps = (IdealHNF(((1,),)),)
    f.fund_units = ()
    f.mu = (f.one(), -f.one())
    return f
