"""Certified height evaluation.

Heights are handled in logarithmic form.  For nonzero integral alpha, beta
the relative height of alpha/beta satisfies

    log N((alpha,beta)) + h(alpha/beta) = sum_v max(L(alpha)_v, L(beta)_v)

over the archimedean places, L the certified log map; so a rational
approximation of h with guaranteed error lambda follows from
delta-approximations of the three ingredients with delta = lambda/(r+2).
Unit heights come from exponent tuples alone: with entrywise unit-log error
below lambda/(r(r+1)M) and exponents bounded by M, the evaluated sum of
positive parts is within lambda of the true height.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .arith import ZERO, Ball, log_ball
from .field import FieldData, NFElem
from .ideals import ideal_from_gens


class Cmp(Enum):
    BELOW = "below"
    ABOVE = "above"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class HeightApprox:
    """Rational value with a guaranteed error bound: |h - value| < bound."""

    value: Fraction
    bound: Fraction

    def ball(self) -> Ball:
        return Ball(self.value, self.bound)


def cmp_certified(hx: HeightApprox, threshold: Fraction) -> Cmp:
    """Three-way comparison of the certified value against a threshold."""
    if hx.value + hx.bound <= threshold:
        return Cmp.BELOW
    if hx.value - hx.bound >= threshold:
        return Cmp.ABOVE
    return Cmp.INDETERMINATE


def height_pair(alpha: NFElem, beta: NFElem, lam: Fraction,
                field: FieldData) -> HeightApprox:
    """Certified log height of alpha/beta for nonzero integral inputs."""
    if alpha.is_zero() or beta.is_zero():
        raise ValueError("height of a pair needs nonzero entries")
    if lam <= 0:
        raise ValueError("accuracy must be positive")
    r = field.r
    delta = lam / (r + 2)
    pair_norm = ideal_from_gens([alpha, beta], field).norm()
    n_tilde = field.log_norm_ball(Fraction(pair_norm), delta).mid
    la = field.lambda_vec(alpha, delta)
    lb = field.lambda_vec(beta, delta)
    total = -n_tilde
    for s, t in zip(la.entries, lb.entries):
        total += max(s.mid, t.mid)
    return HeightApprox(total, lam)


def unit_height_from_tuple(tup, unit_log_mids, cap: int,
                           lam: Fraction) -> HeightApprox:
    """Certified log height of prod_j eps_j^(n_j) from stored unit log data.

    `unit_log_mids[j]` is the (r+1)-entry rational approximation of the
    j-th unit's log vector with entrywise error below lam/(r(r+1)cap), and
    every |n_j| must be at most cap; both are contract requirements.
    """
    r = len(unit_log_mids)
    if len(tup) != r:
        raise ValueError("tuple length does not match the unit system")
    if any(abs(n) > cap for n in tup):
        raise ValueError("exponent outside the certified window")
    total = ZERO
    for i in range(r + 1):
        s = sum((n * unit_log_mids[j][i] for j, n in enumerate(tup) if n), ZERO)
        if s > 0:
            total += s
    return HeightApprox(total, lam)


def height_element(x: NFElem, lam: Fraction, field: FieldData) -> HeightApprox:
    """Certified log height of an arbitrary nonzero element.

    Splits x = alpha/c with integral alpha and a positive integer c."""
    if x.is_zero():
        raise ValueError("height of zero is undefined here; H(0) = 1")
    den = 1
    for c in x.coords:
        den = den * c.denominator // _gcd(den, c.denominator)
    alpha = field.element([c * den for c in x.coords])
    beta = field.from_rational(den)
    return height_pair(alpha, beta, lam, field)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Exact heights for degree <= 2 (used by the scan baseline and for resolving
# borderline classifications in tests)
# ---------------------------------------------------------------------------

def exact_height_rational(q: Fraction) -> int:
    """Relative height of q in the rationals: max(|num|, den)."""
    q = Fraction(q)
    return max(abs(q.numerator), q.denominator)


def split_num_den(x: NFElem, field: FieldData):
    """x = alpha / c with alpha integral, c a positive integer."""
    den = 1
    for c in x.coords:
        den = den * c.denominator // _gcd(den, c.denominator)
    alpha = field.element([c * den for c in x.coords])
    return alpha, den


def quadratic_height_exact(x: NFElem, field: FieldData):
    """Exact relative height of x in a quadratic field when it is rational
    (as a number): an integer for imaginary fields and for real-field
    elements whose conjugate pair does not straddle 1; None otherwise."""
    if field.n != 2:
        raise ValueError("only for quadratic fields")
    if x.is_zero():
        return 1
    if x.is_rational():
        return exact_height_rational(x.as_rational()) ** 2
    alpha, c = split_num_den(x, field)
    gcd_ideal = ideal_from_gens([alpha, field.from_rational(c)], field)
    ng = gcd_ideal.norm()
    n_alpha = abs(field.norm(alpha))
    n_beta = c * c
    if field.r2 == 1:
        # both archimedean values agree: H = max(N(num), N(den)) / N(gcd)
        return max(n_alpha, n_beta) // ng
    side = _conjugates_vs_one(x, field)
    if side == "below":
        return n_beta // ng        # N(den ideal)
    if side == "above":
        return n_alpha // ng       # N(num ideal)
    return None


def _conjugates_vs_one(x: NFElem, field: FieldData):
    """Certified classification of max/min(|x|, |x'|) against 1 for real
    quadratic fields; exact for rationals, terminating for irrationals
    since |x| = 1 forces x = +-1."""
    bits = 64
    while True:
        vals = []
        undecided = False
        for i in range(2):
            b = field.embed(x, i, bits).abs()
            if b.lower() > 1:
                vals.append(1)
            elif b.upper() < 1:
                vals.append(-1)
            else:
                undecided = True
                break
        if not undecided:
            if max(vals) <= 0:
                return "below"
            if min(vals) >= 0:
                return "above"
            return "straddle"
        bits *= 2
        if bits > 1 << 16:
            raise RuntimeError("sign test stalled; is |x| exactly 1?")


def integer_height_or_none(x: NFElem, field: FieldData, max_bits: int = 4096):
    """Exact integer height when every archimedean value sits on one side
    of 1 (then H is the norm of the numerator or denominator ideal); None
    when the values certifiably straddle 1 or a side stays undecided."""
    if x.is_zero():
        return 1
    if x.is_rational():
        return exact_height_rational(x.as_rational()) ** field.n
    alpha, c = split_num_den(x, field)
    sides = []
    bits = 64
    while bits <= max_bits:
        sides = []
        undecided = False
        for i in range(len(field.places)):
            b = field.embed(x, i, bits)
            b = b.abs() if isinstance(b, Ball) else b.abs2()
            if b.lower() > 1:
                sides.append(1)
            elif b.upper() < 1:
                sides.append(-1)
            else:
                undecided = True
                break
        if not undecided:
            break
        bits *= 2
    else:
        return None
    gcd_ideal = ideal_from_gens([alpha, field.from_rational(c)], field)
    ng = gcd_ideal.norm()
    if max(sides) <= 0:
        return (c ** field.n) // ng
    if min(sides) >= 0:
        return abs(int(field.norm(alpha))) // ng
    return None


def height_decide_leq(x: NFElem, bound: Fraction, field: FieldData,
                      max_bits: int = 512):
    """Certified decision H(x) <= bound for any degree; None only when the
    height appears to equal the bound beyond the precision budget and no
    exact route applies."""
    if x.is_zero():
        return bound >= 1
    if field.n == 1:
        return exact_height_rational(x.as_rational()) <= bound
    if field.n == 2:
        return height_leq_exact(x, bound, field)
    h = integer_height_or_none(x, field)
    if h is not None:
        return Fraction(h) <= bound
    from .arith import log_ball

    logb = log_ball(Ball.exact(Fraction(bound)), Fraction(1, 1 << 96))
    lam = Fraction(1, 1 << 24)
    while lam > Fraction(1, 1 << max_bits):
        ha = height_element(x, lam, field)
        if ha.value + ha.bound <= logb.lower():
            return True
        if ha.value - ha.bound >= logb.upper():
            return False
        lam /= 1 << 12
    return None


def height_leq_exact(x: NFElem, bound: Fraction, field: FieldData) -> bool:
    """Exact decision H(x) <= bound for degree <= 2 fields.

    Irrational heights are decided by certified refinement, which
    terminates because an irrational number never equals the rational
    bound."""
    if x.is_zero():
        return bound >= 1
    if field.n == 1:
        return exact_height_rational(x.as_rational()) <= bound
    h = quadratic_height_exact(x, field)
    if h is not None:
        return h <= bound
    # irrational height: N(den/gcd) * |x|_large with exactly one conjugate
    # above 1 in absolute value
    alpha, c = split_num_den(x, field)
    gcd_ideal = ideal_from_gens([alpha, field.from_rational(c)], field)
    nj = (c * c) // gcd_ideal.norm()
    bits = 64
    while True:
        prod = Ball.exact(Fraction(nj))
        for i in range(2):
            b = field.embed(x, i, bits).abs()
            prod = prod * b.max_with(Ball.exact(1))
        if prod.upper() <= bound:
            return True
        if prod.lower() > bound:
            return False
        bits *= 2
        if bits > 1 << 16:
            raise RuntimeError("height comparison stalled at an exact tie")
