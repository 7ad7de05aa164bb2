"""Box-scan enumeration baseline and search-space instrumentation.

The baseline writes every candidate as (a_1 w_1 + ... + a_n w_n)/c over an
LLL-reduced integral basis, with 1 <= c <= B and |a_i| <= floor(2^(n(n-1)/4)
* B * c), and keeps the candidates whose height passes the bound.  It is
independent of the class-group pipeline, which makes it the cross-check
oracle, but its candidate count grows like B^(2n), which is the point of
the comparison.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import ZERO, ONE, rat_to_str, sqrt_bounds
from .field import FieldData, NFElem
from .height import height_element, height_leq_exact
from .lattice import lll_reduced_integral_basis
from .search import SearchOutput, CapacityError


@dataclass
class BenchReport:
    method: str
    field_label: str
    bound: Fraction
    theta: Fraction | None
    elapsed_ms: int
    search_space: int
    found: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.search_space, self.found)

    def row(self) -> dict:
        return {
            "method": self.method,
            "field": self.field_label,
            "B": rat_to_str(self.bound),
            "theta": rat_to_str(self.theta) if self.theta is not None else "",
            "elapsed_ms": self.elapsed_ms,
            "search_space": self.search_space,
            "found": self.found,
            "ratio": rat_to_str(self.ratio),
        }


CSV_COLUMNS = ["method", "field", "B", "theta", "elapsed_ms",
               "search_space", "found", "ratio"]


@dataclass
class ScanOutput:
    elements: list[NFElem]
    borderline: list[NFElem]
    search_space: int
    field: FieldData


def _pow2_quarter_bounds(k: int, bits: int):
    """Dyadic brackets of 2^(k/4) for k in {1, 2, 3}."""
    if k == 2:
        return sqrt_bounds(Fraction(2), bits)
    radicand = Fraction(2) if k == 1 else Fraction(8)
    lo, hi = sqrt_bounds(radicand, bits)
    return sqrt_bounds(lo, bits)[0], sqrt_bounds(hi, bits)[1]


def _coeff_cap(n: int, bound: Fraction, c: int) -> int:
    """floor(2^(n(n-1)/4) * B * c), certified for fractional exponents."""
    e = n * (n - 1)
    base = Fraction(2) ** (e // 4) * bound * c
    k = e % 4
    if k == 0:
        return base.numerator // base.denominator
    bits = 96
    while bits <= 4096:
        lo, hi = _pow2_quarter_bounds(k, bits)
        flo = (base * lo).numerator // (base * lo).denominator
        fhi = (base * hi).numerator // (base * hi).denominator
        if flo == fhi:
            return flo
        bits *= 2
    raise RuntimeError("coefficient cap undecided (is 2^(k/4)*B*c an integer?)")


def scan_search_space(field_degree: int, bound: Fraction) -> int:
    """Exact candidate count sum_c (2*floor(2^(n(n-1)/4) B c) + 1)^n."""
    total = 0
    for c in range(1, int(bound) + 1):
        d = _coeff_cap(field_degree, bound, c)
        total += (2 * d + 1) ** field_degree
    return total


def scan_enumerate(field: FieldData, bound, cap: int = 50_000_000) -> ScanOutput:
    """All x with H(x) <= bound by the direct coefficient scan.

    Heights are decided exactly for degree <= 2; for larger degrees a
    certified refinement loop runs with a precision budget, and candidates
    that stay undecided (height equal to the bound up to the budget) are
    reported in `borderline`."""
    B = Fraction(bound)
    if B < 1:
        raise ValueError("bound must be at least 1")
    n = field.n
    space = scan_search_space(n, B)
    if space > cap:
        raise CapacityError(
            f"scan would visit {space} candidates (cap {cap})")
    basis, _u = lll_reduced_integral_basis(field)
    found: dict = {}
    borderline: dict = {}
    exact = n <= 2
    for c in range(1, int(B) + 1):
        d = _coeff_cap(n, B, c)
        if n == 1:
            for a in range(-d, d + 1):
                x = field.from_rational(Fraction(a, c))
                if x.coords not in found and height_leq_exact(x, B, field):
                    found[x.coords] = x
        elif n == 2:
            _scan_quadratic(field, basis, B, c, d, found)
        else:
            _scan_general(field, basis, B, c, d, found, borderline)
    zero = field.zero()
    found[zero.coords] = zero
    elements = sorted(found.values(), key=lambda e: e.coords)
    return ScanOutput(elements=elements,
                      borderline=sorted(borderline.values(),
                                        key=lambda e: e.coords),
                      search_space=space, field=field)


def _scan_quadratic(field, basis, B, c, d, found):
    """Vectorized filters for quadratic fields, then exact decisions.

    Sound pre-filters only: with g | gcd(|N(num)|, c^2) maximal possible for
    the denominator ideal, H >= max(|N(num)|, c^2)/gcd(|N(num)|, c^2), so
    candidates failing that bound can never reach the height cut."""
    w0, w1 = basis
    a0v, a0w = int(w0.coords[0]), int(w0.coords[1])
    b0v, b0w = int(w1.coords[0]), int(w1.coords[1])
    c0, c1, _ = field.poly
    rng = np.arange(-d, d + 1, dtype=np.int64)
    A, Bc = np.meshgrid(rng, rng, indexing="ij")
    X = A * a0v + Bc * b0v
    Y = A * a0w + Bc * b0w
    # N(x + y w) = x^2 - c1 x y + c0 y^2
    N = X * X - int(c1) * X * Y + int(c0) * Y * Y
    absN = np.abs(N)
    c2 = c * c
    g = np.gcd(absN, c2)
    nb = B.numerator
    db = B.denominator
    okA = absN * db <= nb * g
    okB = c2 * db <= nb * g
    mask = okA & okB & (absN > 0)
    xs = X[mask]
    ys = Y[mask]
    for x, y in zip(xs.tolist(), ys.tolist()):
        elem = field.element((Fraction(x, c), Fraction(y, c)))
        if elem.coords in found:
            continue
        if height_leq_exact(elem, B, field):
            found[elem.coords] = elem


def _scan_general(field, basis, B, c, d, found, borderline):
    from itertools import product

    lam = Fraction(1, 1 << 24)
    logB = field.log_norm_ball(B, lam)
    for coeffs in product(range(-d, d + 1), repeat=field.n):
        if not any(coeffs):
            continue
        elem = field.zero()
        for a, w in zip(coeffs, basis):
            if a:
                elem = elem + w * Fraction(a)
        elem = elem * Fraction(1, c)
        if elem.coords in found or elem.coords in borderline:
            continue
        verdict = _height_leq_certified(field, elem, B, logB)
        if verdict is True:
            found[elem.coords] = elem
        elif verdict is None:
            borderline[elem.coords] = elem


def _height_leq_certified(field, elem, B, logB_ball, max_bits: int = 4096):
    from .height import height_element

    lam = Fraction(1, 1 << 16)
    while True:
        h = height_element(elem, lam, field)
        if h.value + h.bound <= logB_ball.lower():
            return True
        if h.value - h.bound >= logB_ball.upper():
            return False
        lam /= 256
        if lam < Fraction(1, 1 << max_bits):
            return None


# ---------------------------------------------------------------------------
# Search-space reports
# ---------------------------------------------------------------------------

def scan_report(field: FieldData, bound, theta=None,
                cap: int = 50_000_000) -> tuple[ScanOutput, BenchReport]:
    B = Fraction(bound)
    t0 = time.monotonic()
    out = scan_enumerate(field, B, cap=cap)
    ms = int((time.monotonic() - t0) * 1000)
    rep = BenchReport(method="ps", field_label=field.label, bound=B,
                      theta=None, elapsed_ms=ms,
                      search_space=out.search_space,
                      found=len(out.elements) + len(out.borderline))
    return out, rep


def pipeline_report(field: FieldData, out: SearchOutput, elapsed_ms: int,
                    theta=None) -> BenchReport:
    """Search-space accounting for the class-group pipeline.

    Candidate elements, not loop iterations: each examined unit tuple stands
    for #mu elements and each packet candidate surviving the unit-height
    filter stands for 2*#mu elements (the value and its inverse times the
    torsion orbit)."""
    w = len(field.mu)
    c = out.counters
    if "elements" in c:
        space = c["elements"]  # exact shortcut examines exactly its output
    else:
        space = 1 + w * c.get("tuples", 0) + 2 * w * c.get("pair_candidates", 0)
    found = len(out.L) + len(out.Lprime)
    return BenchReport(method="a", field_label=field.label,
                       bound=out.schedule.bound if out.schedule else ZERO,
                       theta=theta, elapsed_ms=elapsed_ms,
                       search_space=space, found=found)


def search_ratio(report: BenchReport) -> Fraction:
    return report.ratio


def scan_space_lower_bound(n: int, bound: Fraction) -> int:
    """Floor of B^(2n) * 2^(n^2(n-1)/4 + n); rounding the exponent down
    keeps it a valid lower bound when the power of two is fractional."""
    val = Fraction(bound) ** (2 * n) * Fraction(2) ** (n * n * (n - 1) // 4 + n)
    return val.numerator // val.denominator
