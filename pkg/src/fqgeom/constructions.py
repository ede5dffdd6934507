"""Motion-image computations and the sharpness example generators.

The image of a point set A under a motion set R is the union of the
translated-rotated copies of A.  Its audits report, for each lower-bound
template, the achieved ratio |image| / bound so calibration can freeze a
band per template; the exact double-count identity I(A x image, R) =
|A| |R| is verified on every instance as a cross-check between modules.

Three generator recipes reproduce the extreme instances at desk scale:
a strip plus short translation set (images barely grow), scaled orbits
of a small-order rotation (few distances, few triangle classes), and a
subfield plane inside a cubic extension (every pair rich in motions).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import BadParameters, TooLarge
from . import motions as mo
from . import simplex
from .ffield import Field, all_points, make_field
from .incidence import AuditReport, PairSet, SideCondition, incidence_count


@dataclass
class FurInstance:
    field: Field
    d: int
    A: tuple
    R: tuple
    image: tuple


def furstenberg_image(field: Field, A, R) -> FurInstance:
    """Exact union of the motion images of A."""
    A = tuple(sorted(set(A)))
    R = tuple(R)
    image = set()
    for r in R:
        for a in A:
            image.add(mo.apply(field, r, a))
    d = len(A[0]) if A else (len(R[0][1]) if R else 2)
    return FurInstance(field, d, A, R, tuple(sorted(image)))


FUR_IDS = ("T1.8", "T1.9(1)", "T1.9(2)", "T1.10", "T1.11")


def fur_reports(inst: FurInstance, which=FUR_IDS) -> list:
    """Achieved-ratio reports for the image lower-bound templates.

    lhs is the exact image size and error_term_unit the bound value, so
    c_star = |image| / bound.  A report whose side conditions fail is
    informational only.
    """
    field, d = inst.field, inst.d
    q = field.q
    na, nr, nimg = len(inst.A), len(inst.R), len(inst.image)
    om1 = mo.orthogonal_group_size(field, d - 1)
    sizes = {"|A|": na, "|R|": nr, "|image|": nimg}
    double_count_ok = True
    if na and nr:
        P = PairSet(field, inst.A, inst.image)
        double_count_ok = incidence_count(P, inst.R) == na * nr
    base_conds = [SideCondition("image_double_count_exact", double_count_ok)]

    out = []
    for wid in which:
        conds = list(base_conds)
        if wid == "T1.8":
            bound = min(q ** d, na * nr / (q ** d * om1))
        elif wid in ("T1.9(1)", "T1.9(2)"):
            dim_ok = (d >= 3 and d % 2 == 1) or (d % 4 == 2 and field.q_mod_4 == 3)
            conds.append(SideCondition("dimension_residue", dim_ok))
            if wid == "T1.9(1)":
                conds.append(SideCondition("small_A", na < q ** ((d - 1) / 2.0)))
                bound = min(q ** d, na * nr / (q ** (d - 1) * om1))
            else:
                conds.append(
                    SideCondition("mid_A", q ** ((d - 1) / 2.0) <= na <= q ** ((d + 1) / 2.0))
                )
                bound = min(q ** d, nr / (q ** ((d - 1) / 2.0) * om1))
        elif wid == "T1.10":
            conds.append(SideCondition("planar", d == 2))
            conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
            bound = min(q ** 2, na ** 0.5 * nr / q)
        elif wid == "T1.11":
            conds.append(SideCondition("planar", d == 2))
            conds.append(SideCondition("q_3_mod_4", field.q_mod_4 == 3))
            oriented = all(mo.is_sf_prime(field, r) for r in inst.R) if d == 2 else False
            conds.append(SideCondition("oriented_motions", oriented))
            conds.append(
                SideCondition("size_window", nr > 0 and 2 * nr ** 0.2 < na < nr ** 0.6)
            )
            bound = nr ** 0.6
        else:
            raise ValueError(f"unknown image bound id {wid!r}; known: {FUR_IDS}")
        c_star = nimg / bound if bound > 0 else 0.0
        out.append(AuditReport(wid, q, d, dict(sizes), nimg, 0.0, bound, c_star, conds))
    return out


# -- strip construction ---------------------------------------------------------------

def embed_top_left(g, d: int) -> tuple:
    """Embed an m x m matrix into d x d with an identity lower-right block."""
    m = len(g)
    return tuple(
        tuple(
            g[i][j] if i < m and j < m else (1 if i == j else 0)
            for j in range(d)
        )
        for i in range(d)
    )


def build_fur1_strip(field: Field, d: int, X) -> tuple:
    """The strip set and its motion set: A = F_q^{d-1} x X, R = O(d-1) x A."""
    if not 2 <= d <= 3:
        raise TooLarge(f"strip construction supports d in 2..3, got {d}")
    X = tuple(sorted(set(X)))
    A = tuple(sorted((*w, x) for w in all_points(field, d - 1) for x in X))
    small = mo.enumerate_orthogonal(field, d - 1)
    R = tuple((embed_top_left(g, d), a) for g in small for a in A)
    return A, R


def arithmetic_progression(field: Field, start: int, step: int, length: int) -> tuple:
    if length < 1:
        raise BadParameters("progression length must be >= 1")
    out = []
    x = start % field.q
    for _ in range(length):
        out.append(x)
        x = field.add(x, step)
    if len(set(out)) != length:
        raise BadParameters("progression wraps onto itself; shorten it")
    return tuple(out)


def strip_audit(field: Field, d: int, X, *, assume_ap: bool = False) -> dict:
    """Exact image facts for the strip instance.

    The image must sit inside F_q^{d-1} x (X + X); with an arithmetic
    progression the image can never exceed twice |A|.
    """
    X = tuple(sorted(set(X)))
    A, R = build_fur1_strip(field, d, X)
    inst = furstenberg_image(field, A, R)
    sums = {field.add(a, b) for a in X for b in X}
    contained = all(pt[-1] in sums for pt in inst.image)
    result = {
        "q": field.q,
        "d": d,
        "|X|": len(X),
        "|A|": len(A),
        "|R|": len(R),
        "|image|": len(inst.image),
        "|X+X|": len(sums),
        "containment_exact": contained,
    }
    if assume_ap:
        result["image_at_most_2A"] = len(inst.image) <= 2 * len(A)
    return result


# -- scaled-orbit construction -----------------------------------------------------------

@dataclass
class Sec3Construction:
    field: Field
    k: int
    X: tuple
    v: tuple
    theta: tuple
    A: tuple
    C: tuple


def build_sec3_cyclic(field: Field, k: int, X) -> Sec3Construction:
    """Scaled orbits of an order-k rotation applied to a unit vector.

    Requires q = p^3 with p = 3 (mod 4), k dividing q + 1, and a scale set
    X avoiding 0, 1, -1 with no pair {t, -t}; those constraints make
    |A| = (|X| + 1) k hold exactly.
    """
    if field.r != 3:
        raise BadParameters(f"construction needs a cubic extension, got r = {field.r}")
    if field.p % 4 != 3:
        raise BadParameters(f"construction needs p = 3 (mod 4), got p = {field.p}")
    if k < 1 or (field.q + 1) % k != 0:
        raise BadParameters(f"k = {k} does not divide q + 1 = {field.q + 1}")
    X = tuple(sorted(set(X)))
    minus_one = field.neg(1)
    for t in X:
        if t in (0, 1, minus_one):
            raise BadParameters(f"scale {t} must avoid 0, 1 and -1")
        if field.neg(t) in X:
            raise BadParameters(f"scales {t} and -{t} cannot both appear")

    v = next(pt for pt in all_points(field, 2) if field.norm(pt) == 1)
    gen = mo.so2_generator(field)
    theta = mo.identity(2)
    for _ in range((field.q + 1) // k):
        theta = mo.mat_mul(field, theta, gen)

    orbit = []
    g = mo.identity(2)
    for _ in range(k):
        orbit.append(mo.mat_vec(field, g, v))
        g = mo.mat_mul(field, g, theta)
    A = set(orbit)
    for t in X:
        A.update(field.scale(t, w) for w in orbit)
    A = tuple(sorted(A))
    if len(A) != (len(X) + 1) * k:
        raise BadParameters(
            f"orbit collision: |A| = {len(A)} != {(len(X) + 1) * k}"
        )
    return Sec3Construction(field, k, X, v, theta, A, ((0, 0),))


def sec3_audit(field: Field, k: int, X) -> dict:
    """Distance-set sizes between scaled orbits plus the triangle class count."""
    cons = build_sec3_cyclic(field, k, X)
    scales = (1,) + cons.X
    orbits = {}
    # regroup A by scale: ||t w|| = t^2 for unit w, and the squares are distinct
    for t in scales:
        t2 = field.mul(t, t)
        orbits[t] = [pt for pt in cons.A if field.norm(pt) == t2]
    dist_sizes = {}
    for s in scales:
        for t in scales:
            values = {
                field.norm(field.vec_sub(a, b)) for a in orbits[s] for b in orbits[t]
            }
            dist_sizes[(s, t)] = len(values)
    census = simplex.count_classes(field, [cons.C, cons.A, cons.A], 2)
    return {
        "q": field.q,
        "k": k,
        "|X|": len(cons.X),
        "|A|": len(cons.A),
        "size_identity": len(cons.A) == (len(cons.X) + 1) * k,
        "distance_set_sizes": dist_sizes,
        "max_distance_set": max(dist_sizes.values()),
        "distance_ceiling_2k": max(dist_sizes.values()) <= 2 * k,
        "triangle_classes_with_origin": census.class_count,
        "q_cubed": field.q ** 3,
    }


# -- subfield construction ------------------------------------------------------------

@dataclass
class SubfieldInstance:
    field: Field
    prime_field: Field
    U: tuple
    R: tuple


def build_inci_subfield(p: int, *, force: bool = False) -> SubfieldInstance:
    """Points on the subfield plane of F_{p^3} with all subfield motions.

    U is the first round(p^1.5) subfield points in canonical order, so
    |U x U| is close to p^3; R is every motion with subfield entries.
    """
    if p % 4 != 3:
        raise BadParameters(f"construction needs p = 3 (mod 4), got {p}")
    if p >= 7 and not force:
        raise TooLarge(f"subfield instance at p = {p} exceeds desk scale; pass force=True")
    big = make_field(p, 3, force=force)
    prime = make_field(p, 1)
    # subfield elements encode as the constants 0..p-1 in the cubic field
    target = round(p ** 1.5)
    U = tuple((a, b) for a in range(p) for b in range(p))[:target]
    R = tuple(
        (g, z)
        for g in mo.enumerate_orthogonal(prime, 2)
        for z in ((a, b) for a in range(p) for b in range(p))
    )
    return SubfieldInstance(big, prime, U, R)


def subfield_audit(p: int, *, force: bool = False) -> dict:
    inst = build_inci_subfield(p, force=force)
    P = PairSet(inst.field, inst.U, inst.U)
    lhs = incidence_count(P, inst.R)
    np_ = len(inst.U) ** 2
    nr = len(inst.R)
    ratio = lhs / (np_ * nr ** (1.0 / 3.0)) if np_ and nr else 0.0
    return {
        "p": p,
        "q": inst.field.q,
        "|U|": len(inst.U),
        "|P|": np_,
        "|R|": nr,
        "incidences": lhs,
        "ratio_vs_PR13": ratio,
    }


# -- recipe manifests --------------------------------------------------------------------

def run_recipe(manifest: dict) -> dict:
    """Replay a sharpness recipe manifest: {kind, p, r, d, k, X, ap, force}."""
    kind = manifest["kind"]
    if kind == "fur1_strip":
        field = make_field(manifest["p"], manifest.get("r", 1), force=manifest.get("force", False))
        if "ap" in manifest:
            start, step, length = manifest["ap"]
            X = arithmetic_progression(field, start, step, length)
            return strip_audit(field, manifest.get("d", 2), X, assume_ap=True)
        return strip_audit(field, manifest.get("d", 2), tuple(manifest["X"]))
    if kind == "sec3_cyclic":
        field = make_field(manifest["p"], 3, force=manifest.get("force", False))
        return sec3_audit(field, manifest["k"], tuple(manifest.get("X", ())))
    if kind == "inci_subfield":
        return subfield_audit(manifest["p"], force=manifest.get("force", False))
    raise BadParameters(f"unknown recipe kind {kind!r}")


def recipe_to_json(manifest: dict) -> str:
    return json.dumps(manifest, sort_keys=True)
