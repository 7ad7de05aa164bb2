"""Bounded-height enumeration.

The production path factors every candidate x with H(x) <= B as
zeta * eps_1^n_1 ... eps_r^n_r * g_i/g_j, where the g's generate principal
ideals of bounded norm inside a class representative and the exponent tuple
ranges over integer points of a transformed box in the unit lattice.  All
numeric filtering happens on rational approximations whose error budgets
are fixed up front from the user tolerance theta, so membership decisions
are certified: the output splits into a list L (height certainly below B)
and a borderline list L' (height within theta of B), and no element of
height at most B can escape both.

Imaginary quadratic fields take an exact shortcut with no height
computations at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import Ball, ZERO, ONE, log_ball
from .field import FieldData, NFElem
from .height import (
    HeightApprox,
    quadratic_height_exact,
    unit_height_from_tuple,
)
from .ideals import (
    IdealHNF,
    PrincipalIdealIndex,
    ideal_sum,
    principal_ideal,
)
from .lattice import SMatrixApprox, build_S_approx, integer_points


@dataclass(frozen=True)
class Packet:
    """Index of one candidate value: class rep, generator pair, exponents."""

    l: int
    i: int
    j: int
    n: tuple[int, ...]


@dataclass(frozen=True)
class ToleranceSchedule:
    """All error budgets of one run, exact rationals throughout."""

    bound: Fraction
    theta: Fraction
    t: Fraction
    delta1: Fraction
    b: Fraction
    d_tilde: Fraction
    m: Fraction
    lam_tilde: Fraction
    delta_tilde: Fraction
    cap: int
    delta2: Fraction

    def as_dict(self):
        from .arith import rat_to_str

        return {
            "B": rat_to_str(self.bound),
            "theta": rat_to_str(self.theta),
            "t": rat_to_str(self.t),
            "delta1": rat_to_str(self.delta1),
            "b": rat_to_str(self.b),
            "d_tilde": rat_to_str(self.d_tilde),
            "m": rat_to_str(self.m),
            "lambda_tilde": rat_to_str(self.lam_tilde),
            "delta_tilde": rat_to_str(self.delta_tilde),
            "M": self.cap,
            "delta2": rat_to_str(self.delta2),
        }


@dataclass(frozen=True)
class ElementRecord:
    elem: NFElem
    height_mid: Fraction
    height_rad: Fraction

    def sort_key(self):
        from .ideals import _canonical_sort_key

        return (self.height_mid, _canonical_sort_key(self.elem))


@dataclass
class SearchOutput:
    L: list[ElementRecord]
    Lprime: list[ElementRecord]
    schedule: ToleranceSchedule | None
    counters: dict
    field: FieldData

    def elements(self) -> list[NFElem]:
        return [r.elem for r in self.L]

    def all_elements(self) -> list[NFElem]:
        return [r.elem for r in self.L] + [r.elem for r in self.Lprime]


class CapacityError(RuntimeError):
    """A run would exceed the configured search-space cap."""


def _as_rat(x, name: str) -> Fraction:
    if isinstance(x, float):
        raise ValueError(f"{name} must be rational (int, Fraction or 'p/q')")
    return Fraction(x)


def _dyadic_mid(ball: Ball, scale_bits: int) -> Fraction:
    snapped = ball.round_dyadic(scale_bits)
    return snapped.mid


def _scaled_int(q: Fraction, scale_bits: int) -> int:
    scaled = q * (1 << scale_bits)
    assert scaled.denominator == 1
    return scaled.numerator


def _le_cut(threshold: Fraction, scale_bits: int) -> int:
    """Largest integer k with k/2^bits <= threshold."""
    scaled = threshold * (1 << scale_bits)
    return scaled.numerator // scaled.denominator


def _lt_cut(threshold: Fraction, scale_bits: int) -> int:
    """Largest integer k with k/2^bits < threshold."""
    scaled = threshold * (1 << scale_bits)
    if scaled.denominator == 1:
        return scaled.numerator - 1
    return scaled.numerator // scaled.denominator


# ---------------------------------------------------------------------------
# Shared setup: class representatives, generators, pair data
# ---------------------------------------------------------------------------

@dataclass
class _ClassData:
    rep: IdealHNF
    rep_norm: int
    gens: list[NFElem]
    gen_ideals: list[IdealHNF]
    gen_norms: list[int]          # norm of the principal ideal / rep norm
    pairs: list[tuple[int, int]]


def _collect_class_data(field: FieldData, bound_floor: int,
                        index: PrincipalIdealIndex) -> list[_ClassData]:
    out = []
    for rep in field.class_reps:
        na = rep.norm()
        norm_set = {m * na for m in range(1, bound_floor + 1)}
        pairs_data = []
        gens: list[NFElem] = []
        gen_ideals: list[IdealHNF] = []
        gen_norms: list[int] = []
        for nm in sorted(norm_set):
            for ideal, gen in index.by_norm.get(nm, []):
                if rep.contains_ideal(ideal):
                    gens.append(gen)
                    gen_ideals.append(ideal)
                    gen_norms.append(nm // na)
        pairs = []
        for jj in range(len(gens)):
            for ii in range(jj):
                mi, mj = gen_norms[ii], gen_norms[jj]
                if gcd(mi, mj) == 1 or ideal_sum(gen_ideals[ii],
                                                 gen_ideals[jj]) == rep:
                    pairs.append((ii, jj))
        out.append(_ClassData(rep=rep, rep_norm=na, gens=gens,
                              gen_ideals=gen_ideals, gen_norms=gen_norms,
                              pairs=pairs))
    return out


# ---------------------------------------------------------------------------
# The certified pipeline
# ---------------------------------------------------------------------------

def bounded_height_elements(field: FieldData, bound, theta=Fraction(1, 100),
                            ) -> SearchOutput:
    """Two certified lists covering every x in K with H(x) <= bound."""
    B = _as_rat(bound, "bound")
    theta = _as_rat(theta, "theta")
    if B < 1:
        raise ValueError("bound must be at least 1")
    if not (0 < theta <= 1):
        raise ValueError("theta must lie in (0, 1]")
    r = field.r
    t = theta / (3 * B)
    delta1 = t / (6 * r + 12)
    bound_floor = int(B)

    counters = {"tuples": 0, "pair_candidates": 0, "pairs": 0,
                "packets_sure": 0, "packets_borderline": 0}

    index = PrincipalIdealIndex(field, bound_floor * max(
        (rep.norm() for rep in field.class_reps), default=1))
    classes = _collect_class_data(field, bound_floor, index)
    counters["pairs"] = sum(len(c.pairs) for c in classes)

    # log data for generators and class norms, dyadic at a common scale
    p1_bits = max(16, (delta1.denominator.bit_length()
                       - delta1.numerator.bit_length()) + 3)
    lam_g: list[list[tuple[Fraction, ...]]] = []
    ntil: list[Fraction] = []
    for cd in classes:
        ntil.append(_dyadic_mid(
            field.log_norm_ball(Fraction(cd.rep_norm), delta1 / 2), p1_bits))
        rows = []
        for g in cd.gens:
            lv = field.lambda_vec(g, delta1 / 2)
            rows.append(tuple(_dyadic_mid(e, p1_bits) for e in lv.entries))
        lam_g.append(rows)

    # certified pair heights r_{l,i,j} with |r - h(g_i/g_j)| < t/6
    r_pair: list[dict[tuple[int, int], Fraction]] = []
    max_rij = ZERO
    for l, cd in enumerate(classes):
        d = {}
        for (ii, jj) in cd.pairs:
            s_i, s_j = lam_g[l][ii], lam_g[l][jj]
            val = -ntil[l] + sum(
                (max(a, b) for a, b in zip(s_i, s_j)), ZERO)
            d[(ii, jj)] = val
            if val > max_rij:
                max_rij = val
        r_pair.append(d)

    # rational b with t/12 < b - log(B) < t/4
    logB_enc = log_ball(Ball.exact(B), t / 48)
    b = logB_enc.mid + t / 6
    assert b - logB_enc.upper() > t / 12 and b - logB_enc.lower() < t / 4

    d_tilde = b + t / 6 + max_rij

    if r > 0:
        sa = build_S_approx(field, d_tilde, t)
        tuples = integer_points(sa.stilde_inv, d_tilde, window=sa.cap)
        scale_bits = max(p1_bits, sa.scale_bits)
        unit_rows = [[_scaled_int(Fraction(v), scale_bits) for v in col]
                     for col in sa.unit_logs]
    else:
        sa = None
        tuples = [()]
        scale_bits = p1_bits
        unit_rows = []

    schedule = ToleranceSchedule(
        bound=B, theta=theta, t=t, delta1=delta1, b=b, d_tilde=d_tilde,
        m=sa.m if sa else ZERO, lam_tilde=sa.lam_tilde if sa else ZERO,
        delta_tilde=sa.delta_tilde if sa else ZERO,
        cap=sa.cap if sa else 0, delta2=sa.delta2 if sa else ZERO)

    # unit log sums and heights per tuple, exact dyadic integers
    n_places = r + 1
    ntuples = len(tuples)
    counters["tuples"] = ntuples
    if r > 0:
        vmat = np.array(unit_rows, dtype=np.int64)        # r x (r+1)
        worst = int(np.abs(vmat).max()) * sa.cap * r * (r + 2) + 1
        if worst >= (1 << 62):
            raise CapacityError("interval data exceeds the int64 fast path")
        umat = np.array(tuples, dtype=np.int64)           # N x r
        lam_u = umat @ vmat                               # N x (r+1)
        r_u = np.maximum(lam_u, 0).sum(axis=1)            # N
    else:
        lam_u = np.zeros((1, n_places), dtype=np.int64)
        r_u = np.zeros(1, dtype=np.int64)

    # classification of unit tuples
    cut_c = _lt_cut(b - 5 * t / 12, scale_bits)    # r_u < b - 5t/12
    cut_d = _lt_cut(b + t / 12, scale_bits)        # r_u < b + t/12
    cut_e = _le_cut(t / 12 + d_tilde, scale_bits)  # keep if r_u <= t/12 + d~
    u0_mask = r_u <= cut_c
    u0p_mask = (~u0_mask) & (r_u <= cut_d)
    keep_mask = r_u <= cut_e

    order = np.argsort(r_u[keep_mask], kind="stable")
    kept_idx = np.nonzero(keep_mask)[0][order]
    r_u_sorted = r_u[kept_idx]
    lam_u_sorted = lam_u[kept_idx]

    # packet filtering per generator pair
    sure_packets: list[tuple[int, int, int, np.ndarray, np.ndarray]] = []
    border_packets: list[tuple[int, int, int, np.ndarray, np.ndarray]] = []
    cut_sure = _le_cut(b - 7 * t / 12, scale_bits)   # r_P <= b - 7t/12
    cut_keep = _lt_cut(b + t / 4, scale_bits)        # r_P < b + t/4
    for l, cd in enumerate(classes):
        ntil_int = _scaled_int(ntil[l], scale_bits)
        rows_int = [np.array([_scaled_int(x, scale_bits) for x in row],
                             dtype=np.int64) for row in lam_g[l]]
        for (ii, jj) in cd.pairs:
            w = b + r_pair[l][(ii, jj)] + t / 4
            wcut = _lt_cut(w, scale_bits)
            k = int(np.searchsorted(r_u_sorted, wcut, side="right"))
            if k == 0:
                continue
            counters["pair_candidates"] += k
            s_i = rows_int[ii]
            s_j = rows_int[jj]
            r_p = np.maximum(lam_u_sorted[:k] + s_i, s_j).sum(axis=1) - ntil_int
            sure = r_p <= cut_sure
            borderline = (~sure) & (r_p < cut_keep)
            if sure.any():
                sure_packets.append((l, ii, jj, np.nonzero(sure)[0],
                                     r_p[sure]))
            if borderline.any():
                border_packets.append((l, ii, jj, np.nonzero(borderline)[0],
                                       r_p[borderline]))

    counters["packets_sure"] = sum(len(p[3]) for p in sure_packets)
    counters["packets_borderline"] = sum(len(p[3]) for p in border_packets)
    counters["search_space"] = counters["tuples"] + counters["pair_candidates"]

    # materialize units once per distinct tuple
    needed: set[tuple[int, ...]] = set()
    u0_tuples = [tuples[i] for i in np.nonzero(u0_mask)[0]]
    u0p_tuples = [tuples[i] for i in np.nonzero(u0p_mask)[0]]
    needed.update(u0_tuples)
    needed.update(u0p_tuples)
    for (_l, _i, _j, rows, _vals) in sure_packets + border_packets:
        for idx in rows:
            needed.add(tuples[kept_idx[idx]])
    unit_cache = _UnitCache(field)
    units = {tup: unit_cache.power(tup) for tup in needed}

    scale_den = 1 << scale_bits
    L: list[ElementRecord] = [ElementRecord(field.zero(), ZERO, ZERO)]
    Lp: list[ElementRecord] = []

    r_u_by_tuple = {tuples[i]: int(r_u[i]) for i in range(ntuples)}
    for tup in u0_tuples:
        hval = Fraction(r_u_by_tuple[tup], scale_den)
        for z in field.mu:
            L.append(ElementRecord(field.mul(z, units[tup]), hval, t / 6))
    for tup in u0p_tuples:
        hval = Fraction(r_u_by_tuple[tup], scale_den)
        for z in field.mu:
            Lp.append(ElementRecord(field.mul(z, units[tup]), hval, t / 6))

    inv_cache: dict[tuple[int, int], NFElem] = {}

    def gen_inv(l, jj):
        got = inv_cache.get((l, jj))
        if got is None:
            got = classes[l].gens[jj].inverse()
            inv_cache[(l, jj)] = got
        return got

    def emit(bucket, l, ii, jj, row_indices, r_p_vals):
        cd = classes[l]
        for idx, rp in zip(row_indices, r_p_vals):
            tup = tuples[kept_idx[idx]]
            c = field.mul(field.mul(units[tup], cd.gens[ii]), gen_inv(l, jj))
            cinv = c.inverse()
            hval = Fraction(int(rp), scale_den)
            for z in field.mu:
                bucket.append(ElementRecord(field.mul(z, c), hval, t / 3))
                bucket.append(ElementRecord(field.mul(z, cinv), hval, t / 3))

    for (l, ii, jj, rows, vals) in sure_packets:
        emit(L, l, ii, jj, rows, vals)
    for (l, ii, jj, rows, vals) in border_packets:
        emit(Lp, l, ii, jj, rows, vals)

    _assert_no_duplicates(L, Lp)
    L.sort(key=ElementRecord.sort_key)
    Lp.sort(key=ElementRecord.sort_key)
    return SearchOutput(L=L, Lprime=Lp, schedule=schedule, counters=counters,
                        field=field)


class _UnitCache:
    """Powers eps_1^n1 ... eps_r^nr with per-unit power memoization."""

    def __init__(self, field: FieldData):
        self.field = field
        self.pows: list[dict[int, NFElem]] = [
            {0: field.one(), 1: u} for u in field.fund_units]

    def _unit_pow(self, j: int, k: int) -> NFElem:
        cache = self.pows[j]
        got = cache.get(k)
        if got is None:
            if k < 0:
                got = self._unit_pow(j, -k).inverse()
            else:
                half = self._unit_pow(j, k // 2)
                got = self.field.mul(half, half)
                if k % 2:
                    got = self.field.mul(got, self.pows[j][1])
            cache[k] = got
        return got

    def power(self, tup) -> NFElem:
        acc = self.field.one()
        for j, n in enumerate(tup):
            if n:
                acc = self.field.mul(acc, self._unit_pow(j, n))
        return acc


def _assert_no_duplicates(L, Lp):
    seen = set()
    for rec in L:
        key = rec.elem.coords
        if key in seen:
            raise AssertionError(f"duplicate element emitted: {rec.elem}")
        seen.add(key)
    for rec in Lp:
        key = rec.elem.coords
        if key in seen:
            raise AssertionError(f"duplicate element emitted: {rec.elem}")
        seen.add(key)


def packet_value(packet: Packet, gens_by_class, unit_cache: dict) -> NFElem:
    """Exact value eps^n * g_i / g_j for an admitted packet; the unit must
    already be in the cache (built once per distinct tuple)."""
    unit = unit_cache.get(packet.n)
    if unit is None:
        raise KeyError(f"unit for tuple {packet.n} not materialized")
    gens = gens_by_class[packet.l]
    return unit * gens[packet.i] / gens[packet.j]


# ---------------------------------------------------------------------------
# Units of bounded height
# ---------------------------------------------------------------------------

@dataclass
class UnitsOutput:
    units: list[NFElem]
    borderline: list[NFElem]
    counters: dict


def units_of_bounded_height(field: FieldData, bound) -> UnitsOutput:
    """All units with H(u) <= bound; near-threshold units are flagged
    separately when the working tolerance cannot decide them."""
    D = _as_rat(bound, "bound")
    if D < 1:
        raise ValueError("bound must be at least 1")
    r = field.r
    if r == 0:
        return UnitsOutput(units=list(field.mu), borderline=[],
                           counters={"tuples": 1, "search_space": len(field.mu)})
    t_u = Fraction(1, 1 << 26)
    logD_enc = log_ball(Ball.exact(D), t_u / 48)
    b_u = logD_enc.mid + t_u / 6
    sa = build_S_approx(field, b_u, t_u)
    tuples = integer_points(sa.stilde_inv, b_u, window=sa.cap)
    unit_rows = [[_scaled_int(Fraction(v), sa.scale_bits) for v in col]
                 for col in sa.unit_logs]
    vmat = np.array(unit_rows, dtype=np.int64)
    umat = np.array(tuples, dtype=np.int64)
    r_u = np.maximum(umat @ vmat, 0).sum(axis=1)
    lo_cut = _le_cut(logD_enc.lower() - t_u / 6, sa.scale_bits)
    hi_cut = _le_cut(logD_enc.upper() + t_u / 6, sa.scale_bits)
    cache = _UnitCache(field)
    units: list[NFElem] = []
    borderline: list[NFElem] = []
    for tup, val in zip(tuples, r_u.tolist()):
        if not any(tup):
            # exact: the torsion units have height exactly 1 <= D
            bucket = units
        elif val <= lo_cut:
            bucket = units
        elif val <= hi_cut:
            bucket = borderline
        else:
            continue
        u = cache.power(tup)
        for z in field.mu:
            bucket.append(field.mul(z, u))
    units.sort(key=_unit_sort_key)
    borderline.sort(key=_unit_sort_key)
    return UnitsOutput(units=units, borderline=borderline,
                       counters={"tuples": len(tuples),
                                 "search_space": len(tuples)})


def _unit_sort_key(e: NFElem):
    from .ideals import _canonical_sort_key

    return _canonical_sort_key(e)


# ---------------------------------------------------------------------------
# Imaginary quadratic shortcut (exact, no height computations)
# ---------------------------------------------------------------------------

def bounded_height_iq(field: FieldData, bound) -> SearchOutput:
    """Exact bounded-height list for an imaginary quadratic field.

    Every packet value automatically satisfies H <= B here, so the output
    has an empty borderline list and carries exact integer heights."""
    B = _as_rat(bound, "bound")
    if not (field.n == 2 and field.r2 == 1):
        raise ValueError("field is not imaginary quadratic")
    if B < 1:
        raise ValueError("bound must be at least 1")
    bound_floor = int(B)
    index = PrincipalIdealIndex(field, bound_floor * max(
        rep.norm() for rep in field.class_reps))
    classes = _collect_class_data(field, bound_floor, index)

    counters = {"pairs": sum(len(c.pairs) for c in classes)}
    L: list[ElementRecord] = [ElementRecord(field.zero(), ZERO, ZERO)]
    for z in field.mu:
        L.append(ElementRecord(z, ZERO, ZERO))

    inv_cache: dict[tuple[int, int], NFElem] = {}
    for l, cd in enumerate(classes):
        for (ii, jj) in cd.pairs:
            inv = inv_cache.get((l, jj))
            if inv is None:
                inv = cd.gens[jj].inverse()
                inv_cache[(l, jj)] = inv
            c = field.mul(cd.gens[ii], inv)
            cinv = c.inverse()
            h_exact = max(cd.gen_norms[ii], cd.gen_norms[jj])
            hlog = _cached_log_int(h_exact)
            for z in field.mu:
                L.append(ElementRecord(field.mul(z, c), hlog.mid, hlog.rad))
                L.append(ElementRecord(field.mul(z, cinv), hlog.mid, hlog.rad))

    counters["elements"] = len(L)
    counters["search_space"] = len(L)
    _assert_no_duplicates(L, [])
    L.sort(key=ElementRecord.sort_key)
    return SearchOutput(L=L, Lprime=[], schedule=None, counters=counters,
                        field=field)


_LOG_INT_CACHE: dict[int, Ball] = {}


def _cached_log_int(n: int) -> Ball:
    got = _LOG_INT_CACHE.get(n)
    if got is None:
        got = log_ball(Ball.exact(Fraction(n)), Fraction(1, 1 << 32))
        got = got.round_dyadic(40)
        _LOG_INT_CACHE[n] = got
    return got


# ---------------------------------------------------------------------------
# Real quadratic refinement of the borderline list
# ---------------------------------------------------------------------------

def refine_real_quadratic(out: SearchOutput, field: FieldData,
                          theta) -> SearchOutput:
    """Move or drop borderline elements with rational (hence integer)
    height; only irrational heights within theta of B remain borderline.

    Requires a real quadratic field and theta < 1/2 so that at most one
    integer is within theta of B."""
    theta = _as_rat(theta, "theta")
    if not (field.n == 2 and field.r1 == 2):
        raise ValueError("refinement applies to real quadratic fields")
    if not theta < Fraction(1, 2):
        raise ValueError("refinement needs theta < 1/2")
    B = out.schedule.bound if out.schedule else None
    if B is None:
        raise ValueError("missing schedule on the search output")
    L = list(out.L)
    Lp: list[ElementRecord] = []
    moved = dropped = 0
    for rec in out.Lprime:
        h = quadratic_height_exact(rec.elem, field)
        if h is None:
            Lp.append(rec)
            continue
        assert abs(Fraction(h) - B) < theta
        if Fraction(h) <= B:
            hlog = _cached_log_int(int(h))
            L.append(ElementRecord(rec.elem, hlog.mid, hlog.rad))
            moved += 1
        else:
            dropped += 1
    counters = dict(out.counters)
    counters.update({"refined_moved": moved, "refined_dropped": dropped})
    L.sort(key=ElementRecord.sort_key)
    Lp.sort(key=ElementRecord.sort_key)
    return SearchOutput(L=L, Lprime=Lp, schedule=out.schedule,
                        counters=counters, field=field)


def resolve_borderline_exact(out: SearchOutput, field: FieldData):
    """Exact set of elements with H <= B, for degree <= 2 fields: L plus
    the borderline members that really satisfy the bound."""
    from .height import height_leq_exact

    B = out.schedule.bound if out.schedule else None
    elems = {r.elem for r in out.L}
    for r in out.Lprime:
        if height_leq_exact(r.elem, B, field):
            elems.add(r.elem)
    return elems
