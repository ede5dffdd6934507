"""Point-motion incidence counting, rich-motion spectra and bound audits.

A "point" here is a pair (u, v) of points of F_q^d drawn from a product
set P = U x V; it is incident to a motion r = (g, z) when g u + z = v.
Counting is always O(|R| * |U|) by testing membership of the image in a
hashed V.

Bound audits never assert asymptotic statements.  Each audit evaluates
the exact left-hand side, the bound's main term, and the bound's second
term with constant 1, then reports the empirical constant

    c_star = max(0, lhs - main_term) / error_term_unit

so regressions are caught by comparing c_star against ceilings frozen by
the calibration corpus.  Side-condition violations never abort an audit;
they flag the report as informational.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

from .errors import DimensionMismatch
from . import motions as mo
from .ffield import Field


class SideCondition(NamedTuple):
    name: str
    ok: bool


class PairSet:
    """A product set U x V of incidence points over one field and dimension."""

    def __init__(self, field: Field, U, V):
        self.field = field
        U = tuple(sorted(set(U)))
        V = tuple(sorted(set(V)))
        dims = {len(p) for p in U} | {len(p) for p in V}
        if len(dims) > 1:
            raise DimensionMismatch(f"mixed point dimensions {sorted(dims)}")
        self.d = dims.pop() if dims else 2
        for pt in itertools.chain(U, V):
            for c in pt:
                if not 0 <= c < field.q:
                    raise DimensionMismatch(f"coordinate {c} outside field of order {field.q}")
        self.U = U
        self.V = V
        self.u_set = frozenset(U)
        self.v_set = frozenset(V)

    @property
    def size(self) -> int:
        return len(self.U) * len(self.V)

    def pairs(self):
        return itertools.product(self.U, self.V)

    def __repr__(self):
        return f"PairSet(|U|={len(self.U)}, |V|={len(self.V)}, d={self.d}, q={self.field.q})"


def _check_dim(P: PairSet, motion):
    if len(motion[1]) != P.d:
        raise DimensionMismatch(f"motion dimension {len(motion[1])} != point dimension {P.d}")


def incidence_count(P: PairSet, R) -> int:
    """Exact number of incident (pair, motion) combinations."""
    field = P.field
    U, v_set = P.U, P.v_set
    if not U or not v_set:
        return 0
    add = field._add
    total = 0
    for g, z in R:
        if len(z) != P.d:
            raise DimensionMismatch(f"motion dimension {len(z)} != point dimension {P.d}")
        for u in U:
            img = mo.mat_vec(field, g, u)
            if tuple(add[a][b] for a, b in zip(img, z)) in v_set:
                total += 1
    return total


def _resolve_universe(P: PairSet, universe, force=False):
    if isinstance(universe, str):
        return mo.motion_universe(P.field, P.d, universe, force=force)
    return list(universe)


@dataclass
class MotionSpectrum:
    """Histogram of incidence counts i(r) over a motion universe."""

    histogram: dict
    universe_size: int

    @property
    def total_incidences(self) -> int:
        return sum(k * v for k, v in self.histogram.items())

    def moment(self, t: int) -> int:
        return sum((k ** t) * v for k, v in self.histogram.items())

    def rich_count(self, k: int) -> int:
        return sum(v for key, v in self.histogram.items() if key >= k)

    def max_count(self) -> int:
        return max((k for k, v in self.histogram.items() if v), default=0)


def _spectrum_chunk(field: Field, U, v_set, chunk) -> dict:
    """Histogram over one run of motions; motions grouped by matrix."""
    add = field._add
    hist: dict = {}
    planar = bool(U) and len(U[0]) == 2
    for g, run in itertools.groupby(chunk, key=lambda m: m[0]):
        images = [mo.mat_vec(field, g, u) for u in U]
        if planar:
            for _, z in run:
                z0, z1 = z
                r0, r1 = add[z0], add[z1]
                c = 0
                for w0, w1 in images:
                    if (r0[w0], r1[w1]) in v_set:
                        c += 1
                hist[c] = hist.get(c, 0) + 1
        else:
            for _, z in run:
                c = 0
                for w in images:
                    if tuple(add[a][b] for a, b in zip(w, z)) in v_set:
                        c += 1
                hist[c] = hist.get(c, 0) + 1
    return hist


def merge_histograms(parts) -> dict:
    out: dict = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, 0) + v
    return out


def motion_spectrum(P: PairSet, universe="general", *, workers: int = 1, force: bool = False) -> MotionSpectrum:
    """Exact histogram of i(r) over a motion universe (tag or explicit list)."""
    motions = _resolve_universe(P, universe, force)
    if motions:
        _check_dim(P, motions[0])
    if not P.U or not P.V:
        return MotionSpectrum({0: len(motions)} if motions else {}, len(motions))
    if workers > 1 and len(motions) > 1:
        from . import parallel

        n = min(workers * 4, len(motions))
        bounds = [(len(motions) * i // n, len(motions) * (i + 1) // n) for i in range(n)]
        chunks = [motions[a:b] for a, b in bounds]
        parts = parallel.run_jobs(
            _spectrum_job,
            [(P.field.p, P.field.r, P.field.modulus, P.U, P.V, c) for c in chunks],
            workers,
        )
        hist = merge_histograms(parts)
    else:
        hist = _spectrum_chunk(P.field, P.U, P.v_set, motions)
    return MotionSpectrum(hist, len(motions))


def _spectrum_job(args):
    from .ffield import make_field_with_modulus

    p, r, modulus, U, V, chunk = args
    field = make_field_with_modulus(p, r, modulus, force=True)
    return _spectrum_chunk(field, U, frozenset(V), chunk)


def rich_motions(P: PairSet, k: int, universe="general", *, force: bool = False) -> tuple:
    """Motions of the universe incident to at least k pairs, in universe order."""
    if k < 1:
        raise ValueError(f"richness threshold must be >= 1, got {k}")
    motions = _resolve_universe(P, universe, force)
    field = P.field
    add = field._add
    out = []
    for g, z in motions:
        c = 0
        for u in P.U:
            img = mo.mat_vec(field, g, u)
            if tuple(add[a][b] for a, b in zip(img, z)) in P.v_set:
                c += 1
                if c >= k:
                    out.append((g, z))
                    break
    return tuple(out)


def moment_sum(P: PairSet, t: int, universe="general", *, workers: int = 1, force: bool = False) -> int:
    """Exact sum of i(r)**t over the universe."""
    if t < 1:
        raise ValueError(f"moment exponent must be >= 1, got {t}")
    return motion_spectrum(P, universe, workers=workers, force=force).moment(t)


@dataclass
class TripleCorrelation:
    exact: int
    bound_333: float
    bound_442: float
    holds_333: bool
    holds_442: bool


def triple_correlation(field: Field, A, B, C, universe="general", *, force: bool = False) -> TripleCorrelation:
    """Sum of i_A(r) i_B(r) i_C(r) with its two Hoelder-split upper bounds.

    i_S(r) counts pairs (x, y) in S x S with g x + z = y.  The bound
    comparisons are done in exact integer arithmetic (both sides raised to
    the lcm power), so `holds_*` are never float artifacts.
    """
    sets = [tuple(sorted(set(S))) for S in (A, B, C)]
    d = len(sets[0][0]) if sets[0] else (len(sets[1][0]) if sets[1] else 2)
    motions = mo.motion_universe(field, d, universe, force=force) if isinstance(universe, str) else list(universe)
    add = field._add
    counts = []
    for g, z in motions:
        row = []
        for S in sets:
            sset = frozenset(S)
            c = 0
            for x in S:
                img = mo.mat_vec(field, g, x)
                if tuple(add[a][b] for a, b in zip(img, z)) in sset:
                    c += 1
            row.append(c)
        counts.append(row)
    exact = sum(a * b * c for a, b, c in counts)
    m3 = [sum(row[i] ** 3 for row in counts) for i in range(3)]
    m4 = [sum(row[i] ** 4 for row in counts) for i in range(3)]
    m2 = [sum(row[i] ** 2 for row in counts) for i in range(3)]
    bound_333 = (m3[0] * m3[1] * m3[2]) ** (1.0 / 3.0)
    bound_442 = (m4[0] ** 0.25) * (m4[1] ** 0.25) * (m2[2] ** 0.5)
    holds_333 = exact ** 3 <= m3[0] * m3[1] * m3[2]
    holds_442 = exact ** 4 <= m4[0] * m4[1] * (m2[2] ** 2)
    return TripleCorrelation(exact, bound_333, bound_442, holds_333, holds_442)


# -- audit reports ----------------------------------------------------------------

@dataclass
class AuditReport:
    """Exact count vs. a two-term bound template, with the empirical constant."""

    theorem: str
    q: int
    d: int
    sizes: dict
    lhs: float
    main_term: float
    error_term_unit: float
    c_star: float
    side_conditions: list = dc_field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "ok" if all(c.ok for c in self.side_conditions) else "flagged"

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "q": self.q,
            "d": self.d,
            "sizes": dict(sorted(self.sizes.items())),
            "lhs": self.lhs,
            "main_term": self.main_term,
            "error_term_unit": self.error_term_unit,
            "c_star": self.c_star,
            "side_conditions": [{"name": c.name, "ok": c.ok} for c in self.side_conditions],
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


CSV_FIELDS = ["theorem", "q", "d", "sizes", "lhs", "main_term", "error_term_unit", "c_star", "side_conditions", "verdict"]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rep in reports:
        d = rep.to_dict()
        w.writerow(
            [
                d["theorem"],
                d["q"],
                d["d"],
                ";".join(f"{k}={v}" for k, v in d["sizes"].items()),
                d["lhs"],
                d["main_term"],
                d["error_term_unit"],
                d["c_star"],
                ";".join(f"{c['name']}={c['ok']}" for c in d["side_conditions"]),
                d["verdict"],
            ]
        )
    return buf.getvalue()


def _report(theorem, P, sizes, lhs, main, unit, conds) -> AuditReport:
    resid = lhs - main
    c_star = (resid / unit) if unit > 0 and resid > 0 else 0.0
    return AuditReport(theorem, P.field.q, P.d, sizes, lhs, main, unit, c_star, conds)


AUDIT_IDS = ("T2.1", "T2.3(1)", "T2.3(2)", "T2.4", "T2.6", "T8.2")


def audit_bound(P: PairSet, R, which: str) -> AuditReport:
    """Audit one incidence bound template against an exact count.

    Side conditions are checked and reported, never silently assumed; a
    violated condition downgrades the report to informational.  For T2.4 the
    bound is evaluated with (|U|, |V|) sorted increasingly, which matches the
    exact count because swapping U and V corresponds to inverting R.
    """
    R = list(R)
    field = P.field
    q, d = field.q, P.d
    nu, nv, nr = len(P.U), len(P.V), len(R)
    np_ = nu * nv
    lhs = incidence_count(P, R)
    om1 = mo.orthogonal_group_size(field, d - 1)
    sizes = {"|U|": nu, "|V|": nv, "|P|": np_, "|R|": nr}
    conds = []

    if which == "T2.1":
        main = np_ * nr / q ** d
        unit = q ** (d / 2.0) * math.sqrt(om1) * math.sqrt(np_ * nr)
    elif which in ("T2.3(1)", "T2.3(2)"):
        dim_ok = (d >= 3 and d % 2 == 1) or (d % 4 == 2 and field.q_mod_4 == 3)
        conds.append(SideCondition("dimension_residue", dim_ok))
        main = np_ * nr / q ** d
        if which == "T2.3(1)":
            conds.append(SideCondition("small_U", nu < q ** ((d - 1) / 2.0)))
            unit = q ** ((d - 1) / 2.0) * math.sqrt(om1) * math.sqrt(np_ * nr)
        else:
            in_range = q ** ((d - 1) / 2.0) <= nu <= q ** ((d + 1) / 2.0)
            conds.append(SideCondition("mid_U", in_range))
            unit = q ** ((d - 1) / 4.0) * math.sqrt(om1) * math.sqrt(np_ * nr * nu)
    elif which == "T2.4":
        conds.append(SideCondition("planar", d == 2))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        m, mx = min(nu, nv), max(nu, nv)
        main = np_ * nr / q ** 2
        unit = math.sqrt(q) * m ** 0.75 * mx ** 0.5 * math.sqrt(nr)
    elif which == "T2.6":
        conds.append(SideCondition("planar", d == 2))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        conds.append(SideCondition("square_pairset", P.U == P.V))
        conds.append(SideCondition("oriented_motions", all(mo.is_sf_prime(field, r) for r in R)))
        main = 0.0
        unit = max(np_ * nr ** 0.4, nr ** 1.2)
    elif which == "T8.2":
        conds.append(SideCondition("prime_field", field.r == 1))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        conds.append(SideCondition("square_pairset", P.U == P.V))
        conds.append(SideCondition("U_window", q ** 1.25 <= nu <= q ** (4.0 / 3.0)))
        main = np_ * nr / q ** 2
        unit = q ** 0.125 * nu ** 1.5 * math.sqrt(nr)
    else:
        raise ValueError(f"unknown audit id {which!r}; known: {AUDIT_IDS}")
    return _report(which, P, sizes, lhs, main, unit, conds)


def audit_cs_bounds(P: PairSet, R) -> list:
    """The two counting bounds that need no theorem side conditions.

    I3.1 asserts lhs <= |P| sqrt(|R|) + |R| with constant exactly 1 (checked
    in integers).  I3.3 is the prime-field refinement lhs <= C (|P|^(5/6)
    sqrt(|R|) + |R|), reported with its empirical constant.
    """
    R = list(R)
    lhs = incidence_count(P, R)
    nu, nv, nr = len(P.U), len(P.V), len(R)
    np_ = nu * nv
    sizes = {"|U|": nu, "|V|": nv, "|P|": np_, "|R|": nr}

    excess = lhs - nr
    holds = excess <= 0 or excess * excess <= np_ * np_ * nr
    unit31 = np_ * math.sqrt(nr) + nr
    rep31 = _report("I3.1", P, sizes, lhs, 0.0, unit31, [SideCondition("constant_one_holds", holds)])

    conds33 = [
        SideCondition("prime_field", P.field.r == 1),
        SideCondition("square_pairset", P.U == P.V),
        SideCondition("U_at_most_q", nu <= P.field.q),
    ]
    unit33 = np_ ** (5.0 / 6.0) * math.sqrt(nr) + nr
    rep33 = _report("I3.3", P, sizes, lhs, 0.0, unit33, conds33)
    return [rep31, rep33]


RICH_VARIANTS = ("R2.2", "R2.5", "R8.3")


def rich_shape_report(P: PairSet, universe="general", variant: str = "R2.2", *, force: bool = False) -> AuditReport:
    """Worst-case empirical constant for a rich-motion count bound.

    For every k above the 2|P|/q^d threshold the bound predicts
    |R_k| <= C * unit(k); the report records the k maximizing |R_k|/unit(k).
    """
    spec = motion_spectrum(P, universe, force=force)
    field = P.field
    q, d = field.q, P.d
    nu, nv = len(P.U), len(P.V)
    np_ = nu * nv
    om1 = mo.orthogonal_group_size(field, d - 1)
    conds = [SideCondition("square_pairset", P.U == P.V)]
    if variant == "R2.2":
        unit_of = lambda k: om1 * np_ * q ** d / k ** 2
    elif variant == "R2.5":
        conds.append(SideCondition("planar", d == 2))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        unit_of = lambda k: q * np_ ** 1.25 / k ** 2
    elif variant == "R8.3":
        conds.append(SideCondition("prime_field", field.r == 1))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        conds.append(SideCondition("U_window", q ** 1.25 <= nu <= q ** (4.0 / 3.0)))
        unit_of = lambda k: q ** 0.25 * nu ** 3 / k ** 2
    else:
        raise ValueError(f"unknown rich-shape variant {variant!r}; known: {RICH_VARIANTS}")

    kmin = 2 * np_ / q ** d
    best = (0.0, 0, 0)
    for k in range(int(kmin) + 1, spec.max_count() + 1):
        if k <= kmin:
            continue
        rk = spec.rich_count(k)
        if rk == 0:
            continue
        unit = unit_of(k)
        ratio = rk / unit if unit > 0 else 0.0
        if ratio > best[0]:
            best = (ratio, k, rk)
    ratio, k_star, rk_star = best
    sizes = {"|U|": nu, "|V|": nv, "|P|": np_, "k_star": k_star, "universe": spec.universe_size}
    unit = unit_of(k_star) if k_star else 0.0
    return AuditReport(variant, q, d, sizes, rk_star, 0.0, unit, ratio, conds)


MOMENT_VARIANTS = ("M5.1", "M5.2", "M8.3")


def moment_shape_report(P: PairSet, t: int, universe="general", variant: str = "M5.1", *, force: bool = False) -> AuditReport:
    """Empirical constant for a moment-sum bound template."""
    lhs = moment_sum(P, t, universe, force=force)
    field = P.field
    q, d = field.q, P.d
    nu, nv = len(P.U), len(P.V)
    np_ = nu * nv
    conds = [SideCondition("square_pairset", P.U == P.V)]
    if variant == "M5.1":
        conds.append(SideCondition("t_at_least_3", t >= 3))
        unit = np_ ** t * mo.orthogonal_group_size(field, d) / q ** ((t - 1) * d) + q ** d * mo.orthogonal_group_size(field, d - 1) * np_ ** (t / 2.0)
    elif variant == "M5.2":
        conds.append(SideCondition("planar", d == 2))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        conds.append(SideCondition("t_at_least_2", t >= 2))
        unit = np_ ** t / q ** (2 * t - 3) + q * np_ ** ((2 * t + 1) / 4.0)
    elif variant == "M8.3":
        conds.append(SideCondition("prime_field", field.r == 1))
        conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
        conds.append(SideCondition("t_at_least_2", t >= 2))
        conds.append(SideCondition("U_window", q ** 1.25 <= nu <= q ** (4.0 / 3.0)))
        unit = np_ ** t / q ** (2 * t - 3) + q ** 0.25 * nu ** (t + 1)
    else:
        raise ValueError(f"unknown moment variant {variant!r}; known: {MOMENT_VARIANTS}")
    sizes = {"|U|": nu, "|V|": nv, "|P|": np_, "t": t}
    c_star = lhs / unit if unit > 0 else 0.0
    return AuditReport(variant, q, d, sizes, lhs, 0.0, unit, c_star, conds)
