"""Self-contained quadratic field backend.

Builds complete field data for K = Q(sqrt(d)), d squarefree: integral basis,
signature, ideal class representatives obtained from reduced binary quadratic
forms of the field discriminant, the fundamental unit from the continued
fraction expansion of the integral generator (d > 0), and the roots of unity.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from sympy import factorint

from .arith import ZERO, ONE
from .field import FieldData, NFElem, Place
from .ideals import IdealHNF, ideal_from_gens, unit_ideal
from .roots import isolate_complex_upper_roots, isolate_real_roots


def is_squarefree(d: int) -> bool:
    if d == 0:
        return False
    return all(e == 1 for e in factorint(abs(d)).values())


def quadratic_field(d: int) -> FieldData:
    """Field data for Q(sqrt(d)); rejects d that is 0, 1 or not squarefree."""
    d = int(d)
    if d in (0, 1) or not is_squarefree(d):
        raise ValueError(f"d={d} must be squarefree and different from 0, 1")
    if d % 4 == 1:
        # omega = (1 + sqrt d)/2, minimal polynomial x^2 - x + (1-d)/4
        poly = ((1 - d) // 4, -1, 1)
        disc = d
    else:
        poly = (-d, 0, 1)
        disc = 4 * d

    fpoly = tuple(Fraction(c) for c in poly)
    if d > 0:
        intervals = isolate_real_roots(fpoly)
        assert len(intervals) == 2
        places = tuple(Place(kind="real", local_degree=1, interval=iv)
                       for iv in intervals)
    else:
        rects = isolate_complex_upper_roots(fpoly)
        assert len(rects) == 1
        r = rects[0]
        places = (Place(kind="complex", local_degree=2,
                        rect_re=(r.re.lower(), r.re.upper()),
                        rect_im=(r.im.lower(), r.im.upper())),)

    field = FieldData(
        label=f"quad:{d}",
        poly=poly,
        basis_mat=[[ONE, ZERO], [ZERO, ONE]],
        disc=disc,
        places=places,
    )

    field.mu = _roots_of_unity(field, d)
    if d > 0:
        field.fund_units = (fundamental_unit(field, d),)
    else:
        field.fund_units = ()
    field.class_reps = _class_representatives(field, d, disc)
    return field


def _roots_of_unity(field: FieldData, d: int) -> tuple[NFElem, ...]:
    one = field.one()
    w = field.element((ZERO, ONE))
    if d == -1:
        return (one, -one, w, -w)
    if d == -3:
        # omega = (1+sqrt(-3))/2 is a primitive 6th root of unity
        w2 = field.mul(w, w)
        return (one, -one, w, -w, w2, -w2)
    return (one, -one)


# ---------------------------------------------------------------------------
# Fundamental unit by continued fractions (d > 0)
# ---------------------------------------------------------------------------

def _surd_cf_convergents(P0: int, Q0: int, D: int, limit: int):
    """Continued fraction of (P0 + sqrt D)/Q0; yields (p_k, q_k) convergents."""
    sq = isqrt(D)
    P, Q = P0, Q0
    assert (D - P * P) % Q == 0
    p0, p1 = 1, 0
    q0, q1 = 0, 1
    for _ in range(limit):
        a = (P + sq) // Q if Q > 0 else -((-P - sq + abs(Q) - 1) // abs(Q))
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        yield p0, q0
        P = a * Q - P
        Q = (D - P * P) // Q


def fundamental_unit(field: FieldData, d: int, limit: int = 200000) -> NFElem:
    """Smallest unit > 1 of the maximal order, via the continued fraction of
    the integral generator omega.  Exact: every candidate is norm-checked."""
    if d % 4 == 1:
        gen_p, gen_q, D = 1, 2, d   # omega = (1 + sqrt d)/2
    else:
        gen_p, gen_q, D = 0, 1, d   # omega = sqrt d
    tr = 1 if d % 4 == 1 else 0     # trace of omega
    for p, q in _surd_cf_convergents(gen_p, gen_q, D, limit):
        # u = p - q*conj(omega) = (p - q*tr) + q*omega
        x = p - q * tr
        cand = field.element((Fraction(x), Fraction(q)))
        if abs(field.norm(cand)) == 1 and not (q == 0 and abs(x) == 1):
            return _canonical_unit(field, cand)
    raise RuntimeError("continued fraction produced no unit (limit too small?)")


def _canonical_unit(field: FieldData, u: NFElem) -> NFElem:
    best = min((u, -u), key=lambda e: e.coords)
    return best


# ---------------------------------------------------------------------------
# Class representatives from binary quadratic forms
# ---------------------------------------------------------------------------

def _form_to_ideal(field: FieldData, disc: int, a: int, b: int) -> IdealHNF:
    """Ideal a*Z + ((-b+sqrt(disc))/2)*Z for a form (a, b, *) with a > 0."""
    assert a > 0
    if disc % 2 != b % 2:
        raise ValueError("form parity mismatch")
    if disc % 4 == 1:
        # omega = (1+sqrt d)/2, sqrt(disc) = 2*omega - 1
        x = Fraction(-(b + 1), 2)
    else:
        # omega = sqrt d, sqrt(disc) = 2*omega
        x = Fraction(-b, 2)
    second = field.element((x, ONE))
    return ideal_from_gens([field.from_rational(a), second], field)


def reduced_forms_negative(disc: int) -> list[tuple[int, int, int]]:
    """All reduced positive definite forms of negative discriminant."""
    assert disc < 0
    forms = []
    amax = isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (abs(b) == a or a == c):
                continue
            forms.append((a, b, c))
    forms.sort()
    return forms


def reduced_forms_positive(disc: int) -> set[tuple[int, int, int]]:
    """All reduced indefinite forms: 0 < b < sqrt(disc) < b + 2|a| and
    2|a| < sqrt(disc) + b (integer comparisons, disc not a square)."""
    assert disc > 0
    sq = isqrt(disc)
    assert sq * sq != disc
    forms = set()
    for b in range(1, sq + 1):
        if (b - disc) % 2:
            continue
        ac4 = b * b - disc
        if ac4 % 4:
            continue
        ac = ac4 // 4  # negative
        lo = (sq - b) // 2 + 1
        hi = (sq + b) // 2
        for absa in range(max(lo, 1), hi + 1):
            if ac % absa:
                continue
            for a in (absa, -absa):
                forms.add((a, b, ac // a))
    return forms


def _rho(disc: int, sq: int, form: tuple[int, int, int]) -> tuple[int, int, int]:
    """Reduction/cycle step for indefinite forms."""
    _a, b, c = form
    t = 2 * abs(c)
    b2 = (-b) % t
    while b2 <= sq - t:
        b2 += t
    while b2 > sq:
        b2 -= t
    c2 = (b2 * b2 - disc) // (4 * c)
    return (c, b2, c2)


def form_cycles(disc: int) -> list[list[tuple[int, int, int]]]:
    """Cycles of reduced indefinite forms; one cycle per narrow class."""
    forms = reduced_forms_positive(disc)
    sq = isqrt(disc)
    cycles = []
    seen = set()
    for f in sorted(forms):
        if f in seen:
            continue
        cyc = []
        g = f
        while g not in seen:
            seen.add(g)
            cyc.append(g)
            g = _rho(disc, sq, g)
        cycles.append(cyc)
    return cycles


def _principal_form(disc: int) -> tuple[int, int, int]:
    sq = isqrt(disc)
    b = sq if (sq - disc) % 2 == 0 else sq - 1
    return (1, b, (b * b - disc) // 4)


def _class_representatives(field: FieldData, d: int, disc: int) -> tuple[IdealHNF, ...]:
    if d < 0:
        forms = reduced_forms_negative(disc)
        reps = [unit_ideal(2)]
        for a, b, _c in forms:
            if a == 1:
                continue
            reps.append(_form_to_ideal(field, disc, a, b))
        return tuple(reps)

    # real quadratic: cycles give the narrow classes; if the fundamental unit
    # has norm +1, classes pair up under (a,b,c) -> (-a,b,-c) to give the
    # ordinary (wide) class group.
    cycles = form_cycles(disc)
    index_of = {}
    for idx, cyc in enumerate(cycles):
        for f in cyc:
            index_of[f] = idx
    eps_norm = field.norm(field.fund_units[0])
    assert abs(eps_norm) == 1
    groups: list[set[int]] = []
    assigned = {}
    for idx, cyc in enumerate(cycles):
        if idx in assigned:
            continue
        members = {idx}
        if eps_norm == 1:
            a, b, c = cyc[0]
            members.add(index_of[(-a, b, -c)])
        for m in members:
            assigned[m] = len(groups)
        groups.append(members)

    principal_cycle = index_of[_principal_form(disc)]
    reps: list[IdealHNF] = []
    order = sorted(range(len(groups)),
                   key=lambda g: (assigned[principal_cycle] != g,
                                  _canonical_form_of_group(cycles, groups[g])))
    for gidx in order:
        if gidx == assigned[principal_cycle]:
            reps.append(unit_ideal(2))
            continue
        a, b, _c = _canonical_form_of_group(cycles, groups[gidx])
        reps.append(_form_to_ideal(field, disc, a, b))
    return tuple(reps)


def _canonical_form_of_group(cycles, members) -> tuple[int, int, int]:
    cand = [f for m in members for f in cycles[m] if f[0] > 0]
    return min(cand)
