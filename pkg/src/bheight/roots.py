"""Certified isolation and refinement of roots of integer polynomials.

Real roots are isolated with Sturm sequences and refined by bisection with
a verified Newton accelerator.  Nonreal roots are handled as axis-aligned
rectangles in the upper half plane, certified by an interval Newton
contraction test; approximate seeds come from mpmath but every certificate
is checked in exact rational arithmetic, so a wrong seed can only cause a
retry, never a wrong enclosure.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .arith import Ball, Fraction as Rat, RefineNeeded, ZERO, ONE, HALF

Poly = tuple  # coefficients, ascending degree


class NonIsolatingEnclosureError(ValueError):
    """The provided region does not isolate exactly one root."""


# ---------------------------------------------------------------------------
# Polynomial helpers (coefficients ascending, exact rationals or ints)
# ---------------------------------------------------------------------------

def poly_normalize(coeffs: Sequence) -> Poly:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_degree(p: Poly) -> int:
    return len(p) - 1


def poly_eval(p: Poly, x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_eval_ball(p: Poly, x: Ball) -> Ball:
    acc = Ball.exact(0)
    for c in reversed(p):
        acc = acc * x + Ball.exact(c)
    return acc


def poly_deriv(p: Poly) -> Poly:
    return tuple(c * k for k, c in enumerate(p) if k >= 1)


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = a[:]
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] / lb
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_gcd(p: Poly, q: Poly) -> Poly:
    a, b = list(p), list(q)
    while b:
        a, b = b, _poly_rem(a, b)
    if not a:
        return ()
    lead = a[-1]
    return tuple(c / lead for c in a)


def squarefree_part(p: Poly) -> Poly:
    g = poly_gcd(p, poly_deriv(p))
    if poly_degree(g) <= 0:
        return poly_normalize(p)
    q, r = _poly_divmod(list(p), list(g))
    assert not r
    return poly_normalize(q)


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    out = [ZERO] * max(1, len(a) - len(b) + 1)
    a = a[:]
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] / lb
        shift = len(a) - 1 - db
        out[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return out, a


def sturm_chain(p: Poly) -> list[Poly]:
    p = squarefree_part(p)
    chain = [list(p), list(poly_deriv(p))]
    while chain[-1]:
        r = _poly_rem(chain[-2], chain[-1])
        chain.append([-c for c in r])
    chain.pop()
    return [tuple(c) for c in chain]


def _sign_variations(chain: list[Poly], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(chain: list[Poly], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def cauchy_bound(p: Poly) -> Fraction:
    """All complex roots have absolute value < this rational."""
    p = poly_normalize(p)
    lead = abs(p[-1])
    if len(p) == 1:
        return ONE
    return ONE + max(abs(c) for c in p[:-1]) / lead


def isolate_real_roots(p: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open intervals, each containing exactly one real root."""
    p = squarefree_part(p)
    if poly_degree(p) <= 0:
        return []
    chain = sturm_chain(p)
    bound = cauchy_bound(p)
    out: list[tuple[Fraction, Fraction]] = []

    def rec(lo: Fraction, hi: Fraction, n: int):
        if n == 0:
            return
        if n == 1 and poly_eval(p, lo) != 0 and poly_eval(p, hi) != 0:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if poly_eval(p, mid) == 0:
            # nudge the split point off the root
            mid = (lo + 3 * hi) / 4
            if poly_eval(p, mid) == 0:
                mid = (3 * lo + hi) / 4
        nl = count_real_roots(chain, lo, mid)
        rec(lo, mid, nl)
        rec(mid, hi, n - nl)

    total = count_real_roots(chain, -bound, bound)
    rec(-bound, bound, total)
    out.sort()
    return out


def refine_real_root(p: Poly, lo: Fraction, hi: Fraction, target: Fraction) -> Ball:
    """Shrink a sign-change bracket below `target` radius.

    Bisection with a Newton accelerator; every accepted step re-verifies the
    sign change, so the bracket always contains the root.
    """
    p = poly_normalize(p)
    dp = poly_deriv(p)
    flo = poly_eval(p, lo)
    fhi = poly_eval(p, hi)
    if flo == 0:
        return Ball(lo, ZERO)
    if fhi == 0:
        return Ball(hi, ZERO)
    if (flo > 0) == (fhi > 0):
        raise NonIsolatingEnclosureError("no sign change on bracket")
    slo = flo > 0
    while hi - lo > 2 * target:
        width = hi - lo
        # verified Newton step from the midpoint
        mid = (lo + hi) / 2
        fm = poly_eval(p, mid)
        if fm == 0:
            return Ball(mid, ZERO)
        dm = poly_eval(dp, mid)
        stepped = False
        if dm != 0:
            cand = mid - fm / dm
            if poly_eval(p, cand) == 0:
                return Ball(cand, ZERO)
            if lo < cand < hi:
                # requantize to keep numbers small
                bits = max(8, (width.denominator.bit_length()
                               - width.numerator.bit_length()) + 16)
                cand = Fraction((cand.numerator << bits) // cand.denominator,
                                1 << bits)
                eps = max(width / 1024, Fraction(1, 1 << bits))
                a, b = max(lo, cand - eps), min(hi, cand + eps)
                if a < b:
                    fa, fb = poly_eval(p, a), poly_eval(p, b)
                    if fa == 0:
                        return Ball(a, ZERO)
                    if fb == 0:
                        return Ball(b, ZERO)
                    if (fa > 0) != (fb > 0):
                        lo, hi, slo = a, b, fa > 0
                        stepped = True
                    elif (fa > 0) == slo:
                        lo = a
                    else:
                        hi = b
        if not stepped:
            mid = (lo + hi) / 2
            fm = poly_eval(p, mid)
            if fm == 0:
                return Ball(mid, ZERO)
            if (fm > 0) == slo:
                lo = mid
            else:
                hi = mid
    return Ball.from_endpoints(lo, hi)


# ---------------------------------------------------------------------------
# Complex rectangles
# ---------------------------------------------------------------------------

class BallC:
    """Rectangle enclosure of a complex number (independent re/im balls)."""

    __slots__ = ("re", "im")

    def __init__(self, re: Ball, im: Ball):
        self.re = re
        self.im = im

    @classmethod
    def exact(cls, re, im=ZERO) -> "BallC":
        return cls(Ball.exact(re), Ball.exact(im))

    def __add__(self, other: "BallC") -> "BallC":
        return BallC(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "BallC") -> "BallC":
        return BallC(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "BallC") -> "BallC":
        return BallC(self.re * other.re - self.im * other.im,
                     self.re * other.im + self.im * other.re)

    def __truediv__(self, other: "BallC") -> "BallC":
        d = other.abs2()
        if d.contains_zero():
            raise RefineNeeded("complex division by rectangle containing zero")
        return BallC((self.re * other.re + self.im * other.im) / d,
                     (self.im * other.re - self.re * other.im) / d)

    def abs2(self) -> Ball:
        return self.re.square() + self.im.square()

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def max_rad(self) -> Fraction:
        return max(self.re.rad, self.im.rad)

    def __repr__(self):
        return f"BallC({self.re}, {self.im})"


def poly_eval_ballc(p: Poly, z: BallC) -> BallC:
    acc = BallC.exact(0)
    for c in reversed(p):
        acc = acc * z + BallC.exact(c)
    return acc


def _contained(inner: Ball, outer: Ball) -> bool:
    return outer.lower() < inner.lower() and inner.upper() < outer.upper()


def newton_test_complex(p: Poly, rect: BallC) -> BallC | None:
    """Interval Newton operator; a strict contraction proves the rectangle
    contains exactly one (simple) root and returns a tighter enclosure."""
    if rect.re.rad == 0 and rect.im.rad == 0:
        v = poly_eval_ballc(p, BallC.exact(rect.re.mid, rect.im.mid))
        if v.re.mid == 0 and v.im.mid == 0 and v.re.rad == 0 and v.im.rad == 0:
            return rect
        return None
    dp = poly_deriv(p)
    mid = BallC.exact(rect.re.mid, rect.im.mid)
    try:
        step = poly_eval_ballc(p, mid) / poly_eval_ballc(dp, rect)
    except RefineNeeded:
        return None
    n = mid - step
    if _contained(n.re, rect.re) and _contained(n.im, rect.im):
        return BallC(Ball.from_endpoints(max(n.re.lower(), rect.re.lower()),
                                         min(n.re.upper(), rect.re.upper())),
                     Ball.from_endpoints(max(n.im.lower(), rect.im.lower()),
                                         min(n.im.upper(), rect.im.upper())))
    return None


def _newton_image(p: Poly, rect: BallC) -> BallC | None:
    """N(X) intersected with X.  Contains every root of p inside X."""
    dp = poly_deriv(p)
    mid = BallC.exact(dyadic_trim(rect.re.mid), dyadic_trim(rect.im.mid))
    if not (rect.re.contains(mid.re.mid) and rect.im.contains(mid.im.mid)):
        mid = BallC.exact(rect.re.mid, rect.im.mid)
    try:
        n = mid - poly_eval_ballc(p, mid) / poly_eval_ballc(dp, rect)
    except RefineNeeded:
        return None
    lo_re = max(n.re.lower(), rect.re.lower())
    hi_re = min(n.re.upper(), rect.re.upper())
    lo_im = max(n.im.lower(), rect.im.lower())
    hi_im = min(n.im.upper(), rect.im.upper())
    if hi_re < lo_re or hi_im < lo_im:
        return None
    return BallC(Ball.from_endpoints(lo_re, hi_re),
                 Ball.from_endpoints(lo_im, hi_im))


def dyadic_trim(q: Fraction, extra_bits: int = 48) -> Fraction:
    """Round to a dyadic with a few guard bits beyond the current scale."""
    bits = max(8, q.denominator.bit_length() + extra_bits)
    bits = min(bits, q.denominator.bit_length() + extra_bits)
    from .arith import dyadic_round

    return dyadic_round(q, bits)


def _snap_rect(rect: BallC) -> BallC:
    """Dyadic requantization adapted to the current radius; keeps the
    numbers small without noticeably inflating the enclosure."""
    rad = rect.max_rad()
    if rad == 0:
        return rect
    bits = max(16, rad.denominator.bit_length()
               - rad.numerator.bit_length() + 48)
    return BallC(rect.re.dyadic_outer(bits), rect.im.dyadic_outer(bits))


def refine_complex_root(p: Poly, rect: BallC, target: Fraction) -> BallC:
    """Shrink a Newton-certified rectangle below `target` half-width."""
    cur = newton_test_complex(p, _snap_rect(rect))
    if cur is None:
        cur = newton_test_complex(p, rect)
    if cur is None:
        raise NonIsolatingEnclosureError("rectangle fails the contraction test")
    stall = 0
    while cur.max_rad() >= target:
        cur = _snap_rect(cur)
        img = _newton_image(p, cur)
        if img is not None and img.max_rad() < cur.max_rad() * Fraction(3, 4):
            cur = img
            stall = 0
            continue
        # try a small certified sub-box centered on the Newton image midpoint
        center = img if img is not None else cur
        progressed = False
        for shrink in (Fraction(1, 8), Fraction(1, 3), Fraction(2, 3)):
            half = cur.max_rad() * shrink
            cand = BallC(Ball(center.re.mid, half), Ball(center.im.mid, half))
            got = newton_test_complex(p, cand)
            if got is not None and got.max_rad() < cur.max_rad():
                cur = got
                progressed = True
                break
        if progressed:
            stall = 0
            continue
        stall += 1
        if img is not None and img.max_rad() < cur.max_rad():
            cur = img
        if stall > 200:
            raise RefineNeeded("complex refinement stalled")
    return _snap_rect(cur)


def isolate_complex_upper_roots(p: Poly, half_width_bits: int = 24) -> list[BallC]:
    """Certified disjoint rectangles for the roots with positive imaginary
    part, one per conjugate pair.  Together with `isolate_real_roots` this
    accounts for every root of a squarefree polynomial: k_real + 2*k_upper
    must equal the degree, which is checked by the caller."""
    p = squarefree_part(p)
    n = poly_degree(p)
    reals = isolate_real_roots(p)
    want = (n - len(reals)) // 2
    if (n - len(reals)) % 2:
        raise NonIsolatingEnclosureError("real root isolation is inconsistent")
    if want == 0:
        return []
    dps = 30
    for _ in range(8):
        with mp.workdps(dps):
            try:
                approx = mp.polyroots([mp.mpf(str(c)) for c in reversed(p)],
                                      maxsteps=200, extraprec=120)
            except mp.libmp.NoConvergence:
                dps *= 2
                continue
        upper = [z for z in approx if z.imag > 0]
        if len(upper) != want:
            dps *= 2
            continue
        sep = min([abs(a - b) for i, a in enumerate(approx)
                   for b in approx[i + 1:]] or [mp.mpf(1)])
        half0 = min(Fraction(str(mp.nstr(sep / 8, 20))), Fraction(1, 4))
        rects = []
        ok = True
        for z in upper:
            re = Fraction(str(mp.nstr(z.real, dps)))
            im = Fraction(str(mp.nstr(z.imag, dps)))
            cert = None
            half = half0
            for _ in range(12):
                rect = BallC(Ball(re, half), Ball(im, half))
                cert = newton_test_complex(p, rect)
                if cert is not None and cert.im.lower() > 0:
                    break
                cert = None
                half /= 4
            if cert is None:
                ok = False
                break
            rects.append(cert)
        if ok and _pairwise_disjoint(rects):
            rects.sort(key=lambda r: (r.im.mid, r.re.mid))
            return rects
        dps *= 2
    raise RefineNeeded("could not certify complex root isolation")


def _pairwise_disjoint(rects: list[BallC]) -> bool:
    for i, a in enumerate(rects):
        for b in rects[i + 1:]:
            if not (a.re.upper() < b.re.lower() or b.re.upper() < a.re.lower()
                    or a.im.upper() < b.im.lower() or b.im.upper() < a.im.lower()):
                return False
    return True


# ---------------------------------------------------------------------------
# Public refinement entry point
# ---------------------------------------------------------------------------

def refine_root(poly: Sequence, enclosure, target: Fraction):
    """Refine an isolating region to radius < target.

    `enclosure` is either a pair (lo, hi) of rationals bracketing one real
    root, or a BallC rectangle around one nonreal root.  Returns a Ball for
    the real case, a BallC for the complex case.  Rejects regions that do
    not isolate exactly one root and rejects the zero polynomial.
    """
    p = poly_normalize(poly)
    if not p:
        raise ValueError("zero polynomial")
    if target <= 0:
        raise ValueError("target must be positive")
    if isinstance(enclosure, BallC):
        return refine_complex_root(p, enclosure, target)
    lo, hi = Fraction(enclosure[0]), Fraction(enclosure[1])
    if hi <= lo:
        raise NonIsolatingEnclosureError("empty interval")
    sf = squarefree_part(p)
    chain = sturm_chain(sf)
    exact_end = None
    if poly_eval(sf, lo) == 0:
        exact_end = lo
    if poly_eval(sf, hi) == 0:
        exact_end = hi
    inside = count_real_roots(chain, lo, hi)
    if exact_end is not None:
        # count ignores lo, includes hi; accept only a root at an endpoint
        # with no other root strictly inside
        others = inside - (1 if exact_end == hi else 0)
        if others:
            raise NonIsolatingEnclosureError("interval holds several roots")
        return Ball(exact_end, ZERO)
    if inside != 1:
        raise NonIsolatingEnclosureError(f"interval holds {inside} roots")
    return refine_real_root(sf, lo, hi, target)
