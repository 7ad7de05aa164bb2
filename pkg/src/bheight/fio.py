"""Field-data files and result documents (versioned JSON, bit-exact).

The field-data file is the ingestion path for fields of degree three and
up, whose class representatives and fundamental units come from offline
computation.  The loader re-verifies everything verifiable from scratch
rather than trusting the file: basis discriminant, ring closure, unit norms
and independence, torsion orders, ideal validity, and root enclosures.
Rationals travel as "p/q" strings; serialization is canonical so that a
parse/serialize round trip is byte-identical.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arith import Ball, RefineNeeded, ZERO, ONE, rat_from_str, rat_to_str
from .field import FieldData, FieldDataError, NFElem, Place
from .ideals import IdealHNF, ideal_from_gens
from .roots import (
    BallC,
    count_real_roots,
    poly_eval_ballc,
    newton_test_complex,
    sturm_chain,
)

SCHEMA_KEYS = {"label", "degree", "poly", "integral_basis", "disc",
               "class_reps", "fund_units", "roots_of_unity",
               "root_enclosures"}


def parse_field_document(doc: dict) -> FieldData:
    """Build verified field data from a parsed JSON document."""
    missing = SCHEMA_KEYS - set(doc)
    if missing:
        raise FieldDataError(f"field document lacks keys: {sorted(missing)}")
    n = int(doc["degree"])
    poly = [int(c) for c in doc["poly"]]
    if len(poly) != n + 1:
        raise FieldDataError("polynomial length does not match the degree")
    _check_irreducible(poly)
    basis = [[rat_from_str(x) for x in row] for row in doc["integral_basis"]]
    disc = int(doc["disc"])

    places = []
    for enc in doc["root_enclosures"]:
        re_lo, re_hi = (rat_from_str(x) for x in enc["re"])
        im_lo, im_hi = (rat_from_str(x) for x in enc["im"])
        deg = int(enc["local_degree"])
        if deg == 1:
            if not (im_lo == im_hi == 0):
                raise FieldDataError("real place with nonzero imaginary part")
            places.append(Place(kind="real", local_degree=1,
                                interval=(re_lo, re_hi)))
        elif deg == 2:
            places.append(Place(kind="complex", local_degree=2,
                                rect_re=(re_lo, re_hi),
                                rect_im=(im_lo, im_hi)))
        else:
            raise FieldDataError(f"invalid local degree {deg}")

    field = FieldData(label=str(doc["label"]), poly=poly, basis_mat=basis,
                      disc=disc, places=tuple(places))

    _verify_enclosures(field)
    _verify_basis_disc(field)

    field.mu = tuple(_element_from_power(field, row, "root of unity")
                     for row in doc["roots_of_unity"])
    field.fund_units = tuple(_element_from_power(field, row, "unit")
                             for row in doc["fund_units"])
    field.class_reps = tuple(_ideal_from_rows(field, rows)
                             for rows in doc["class_reps"])
    _verify_torsion(field)
    _verify_units(field)
    _verify_class_reps(field)
    return field


def load_field(path) -> FieldData:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FieldDataError(f"not valid JSON: {exc}") from exc
    return parse_field_document(doc)


def field_document(field: FieldData) -> dict:
    places = []
    for p in field.places:
        if p.kind == "real":
            places.append({"re": [rat_to_str(p.interval[0]),
                                  rat_to_str(p.interval[1])],
                           "im": ["0", "0"], "local_degree": 1})
        else:
            places.append({"re": [rat_to_str(p.rect_re[0]),
                                  rat_to_str(p.rect_re[1])],
                           "im": [rat_to_str(p.rect_im[0]),
                                  rat_to_str(p.rect_im[1])],
                           "local_degree": 2})
    return {
        "label": field.label,
        "degree": field.n,
        "poly": list(field.poly),
        "integral_basis": [[rat_to_str(x) for x in row]
                           for row in field.basis_mat],
        "disc": field.disc,
        "class_reps": [[list(r) for r in rep.rows] for rep in field.class_reps],
        "fund_units": [[rat_to_str(x) for x in field.to_power_coords(u)]
                       for u in field.fund_units],
        "roots_of_unity": [[rat_to_str(x) for x in field.to_power_coords(z)]
                           for z in field.mu],
        "root_enclosures": places,
    }


def dump_field(field: FieldData, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(field_document(field), fh, indent=1, sort_keys=True)
        fh.write("\n")


# -- verification pieces ------------------------------------------------

def _check_irreducible(poly):
    import sympy

    x = sympy.Symbol("x")
    expr = sum(int(c) * x ** k for k, c in enumerate(poly))
    if not sympy.Poly(expr, x).is_irreducible:
        raise FieldDataError("defining polynomial is reducible")


def _element_from_power(field: FieldData, row, what: str) -> NFElem:
    coords = [rat_from_str(x) for x in row]
    if len(coords) != field.n:
        raise FieldDataError(f"{what} has wrong coordinate length")
    elem = field.from_power_coords(coords)
    if not elem.is_integral():
        raise FieldDataError(f"{what} is not integral over the given basis")
    return elem


def _ideal_from_rows(field: FieldData, rows) -> IdealHNF:
    try:
        ideal = IdealHNF(rows)
    except ValueError as exc:
        raise FieldDataError(f"class representative is not in HNF: {exc}")
    if ideal.n != field.n:
        raise FieldDataError("class representative has wrong dimension")
    # closure under multiplication by every basis element
    for col in ideal.columns():
        x = field.element([Fraction(v) for v in col])
        for j in range(field.n):
            e = field.element([ONE if t == j else ZERO for t in range(field.n)])
            if not ideal.contains_element(field.mul(x, e)):
                raise FieldDataError(
                    "class representative is not an ideal (not closed)")
    return ideal


def _verify_enclosures(field: FieldData):
    poly = tuple(Fraction(c) for c in field.poly)
    chain = sturm_chain(poly)
    reals = [p for p in field.places if p.kind == "real"]
    comps = [p for p in field.places if p.kind == "complex"]
    if len(reals) + 2 * len(comps) != field.n:
        raise FieldDataError("local degrees do not sum to the degree")
    for p in reals:
        lo, hi = p.interval
        if count_real_roots(chain, lo, hi) != 1:
            raise FieldDataError(
                f"real enclosure ({lo}, {hi}] does not isolate one root")
    for p in comps:
        rect = p.seed_rect()
        if rect.im.lower() <= 0:
            raise FieldDataError("complex enclosure must have positive "
                                 "imaginary part")
        if newton_test_complex(poly, rect) is None:
            raise FieldDataError("complex enclosure fails the uniqueness test")
    # pairwise disjoint (real intervals are separated by the Sturm counts;
    # check the rectangles against each other)
    for i, p in enumerate(comps):
        for q in comps[i + 1:]:
            a, b = p.seed_rect(), q.seed_rect()
            if not (a.re.upper() < b.re.lower() or b.re.upper() < a.re.lower()
                    or a.im.upper() < b.im.lower()
                    or b.im.upper() < a.im.lower()):
                raise FieldDataError("complex enclosures overlap")


def _verify_basis_disc(field: FieldData):
    from .arith import mat_det

    n = field.n
    tr = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            prod_coords = field.mult_table[i][j]
            tr[i][j] = sum((c * t for c, t in
                            zip(prod_coords, field._trace_vec)), ZERO)
    got = mat_det(tr)
    if got != field.disc:
        raise FieldDataError(
            f"basis discriminant {got} does not match the declared "
            f"discriminant {field.disc}")


def _verify_torsion(field: FieldData):
    w = len(field.mu)
    if w == 0 or w % 2:
        raise FieldDataError("torsion list must be nonempty of even size")
    seen = set()
    max_order = 0
    for z in field.mu:
        order = _mult_order(field, z, w)
        if order is None:
            raise FieldDataError("claimed root of unity has order > group size")
        max_order = max(max_order, order)
        if z.coords in seen:
            raise FieldDataError("duplicate root of unity")
        seen.add(z.coords)
    if max_order != w:
        raise FieldDataError("torsion group lacks a generator of full order")
    gen = next(z for z in field.mu if _mult_order(field, z, w) == w)
    acc = field.one()
    group = set()
    for _ in range(w):
        group.add(acc.coords)
        acc = field.mul(acc, gen)
    if group != seen:
        raise FieldDataError("torsion list is not the full cyclic group")


def _mult_order(field: FieldData, z: NFElem, cap: int):
    acc = z
    for k in range(1, cap + 1):
        if acc == field.one():
            return k
        acc = field.mul(acc, z)
    return None


def _verify_units(field: FieldData):
    r = field.r
    if len(field.fund_units) != r:
        raise FieldDataError(
            f"expected {r} fundamental units, got {len(field.fund_units)}")
    for u in field.fund_units:
        if abs(field.norm(u)) != 1:
            raise FieldDataError("claimed unit has norm != +-1")
    if r == 0:
        return
    # independence: the log matrix has certifiably nonzero determinant
    delta = Fraction(1, 1 << 16)
    while True:
        logs = field.unit_logs(delta)
        balls = [[logs[j].entries[i] for j in range(r)] for i in range(r)]
        det = _ball_det(balls)
        if not det.contains_zero():
            return
        delta /= 256
        if delta < Fraction(1, 1 << 2048):
            raise FieldDataError(
                "could not certify unit independence (determinant ~ 0)")


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


def _verify_class_reps(field: FieldData):
    if not field.class_reps:
        raise FieldDataError("need at least one class representative")
    from .ideals import unit_ideal

    if field.class_reps[0] != unit_ideal(field.n):
        raise FieldDataError("first class representative must be the ring")


# ---------------------------------------------------------------------------
# Result documents
# ---------------------------------------------------------------------------

def result_document(out, field_ref: str) -> dict:
    def recs(lst):
        return [{"coords": [rat_to_str(c) for c in r.elem.coords],
                 "height_mid": rat_to_str(r.height_mid),
                 "height_rad": rat_to_str(r.height_rad)} for r in lst]

    doc = {
        "field": field_ref,
        "B": rat_to_str(out.schedule.bound) if out.schedule else None,
        "theta": rat_to_str(out.schedule.theta) if out.schedule else None,
        "schedule": out.schedule.as_dict() if out.schedule else None,
        "L": recs(out.L),
        "Lprime": recs(out.Lprime),
        "counters": dict(sorted(out.counters.items())),
    }
    return doc


def write_result_document(out, field_ref: str, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result_document(out, field_ref), fh, indent=1,
                  sort_keys=True)
        fh.write("\n")


def verify_result_document(doc: dict, field: FieldData,
                           sample_cap: int = 200) -> bool:
    """Re-check recorded height enclosures by independent recomputation.

    For each sampled record, the height recomputed at a tolerance below the
    recorded radius must land inside the recorded enclosure."""
    from .height import height_element

    for key in ("L", "Lprime"):
        rows = doc[key]
        step = max(1, len(rows) // sample_cap)
        for rec in rows[::step]:
            coords = [rat_from_str(c) for c in rec["coords"]]
            elem = field.element(coords)
            mid = rat_from_str(rec["height_mid"])
            rad = rat_from_str(rec["height_rad"])
            if elem.is_zero():
                if mid != 0:
                    return False
                continue
            lam = max(rad / 4, Fraction(1, 1 << 64))
            h = height_element(elem, lam, field)
            if abs(h.value - mid) > rad + lam:
                return False
    return True
