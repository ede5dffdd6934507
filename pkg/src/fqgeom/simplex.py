"""Distances, triangle extension, congruence keys, censuses and spheres.

A labeled simplex is an ordered tuple of points.  Its congruence key is
the symmetric matrix of pairwise norms together with the rank of the
difference vectors; the key is stored as (rank, upper-triangle norms in
row-major order).  Keys are motion invariants; for non-degenerate
simplices with nonzero side lengths the key decides congruence, and the
orbit oracle provides the independent exhaustive check of that fact.

The module also hosts the exhaustive plane sweeps used by the audit
suite: for a fixed segment (x, y) one pass over all z buckets the pair
(||x-z||, ||y-z||), which yields the witness counts for every radius pair
at once.  That single kernel backs both the triangle-extension audit and
the sphere-intersection cap audit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import BadParameters, DegenerateSegment, DimensionMismatch, TooLarge
from . import motions as mo
from .ffield import Field, all_points

CENSUS_GUARDRAIL = 10 ** 8


class SimplexKey(NamedTuple):
    rank: int
    norms: tuple


def key_string(key: SimplexKey) -> str:
    return f"{key.rank}|" + ",".join(str(n) for n in key.norms)


def parse_key(text: str) -> SimplexKey:
    rank, _, rest = text.partition("|")
    norms = tuple(int(t) for t in rest.split(",")) if rest else ()
    return SimplexKey(int(rank), norms)


def rank_of_vectors(field: Field, vectors) -> int:
    """Rank over F_q by Gaussian elimination (tiny systems only)."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return 0
    d = len(rows[0])
    rank = 0
    for col in range(d):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = field.inv(rows[rank][col])
        prow = [field.mul(inv, x) for x in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col]
                rows[i] = [field.sub(x, field.mul(c, y)) for x, y in zip(rows[i], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def classify(field: Field, vertices) -> SimplexKey:
    """Congruence key of a labeled simplex: difference rank + pairwise norms."""
    vertices = tuple(vertices)
    if len(vertices) < 2:
        raise DimensionMismatch("a simplex needs at least two vertices")
    norms = tuple(
        field.norm(field.vec_sub(vertices[i], vertices[j]))
        for i in range(len(vertices))
        for j in range(i + 1, len(vertices))
    )
    diffs = [field.vec_sub(v, vertices[0]) for v in vertices[1:]]
    return SimplexKey(rank_of_vectors(field, diffs), norms)


def is_nondegenerate(field: Field, vertices) -> bool:
    k = len(vertices) - 1
    d = len(vertices[0])
    diffs = [field.vec_sub(v, vertices[0]) for v in vertices[1:]]
    return rank_of_vectors(field, diffs) == min(k, d)


# -- distances -----------------------------------------------------------------

def distance_count(field: Field, A, B, lam: int) -> int:
    """Exact number of pairs (x, y) in A x B with ||x - y|| = lam."""
    A = tuple(A)
    B = tuple(B)
    if not A or not B:
        return 0
    if len(A[0]) == 2:
        n2 = field.norm2_table()
        sub = [[field._add[a][field._neg[b]] for b in range(field.q)] for a in range(field.q)]
        count = 0
        for x0, x1 in A:
            s0, s1 = sub[x0], sub[x1]
            for y0, y1 in B:
                if n2[s0[y0]][s1[y1]] == lam:
                    count += 1
        return count
    count = 0
    for x in A:
        for y in B:
            if field.norm(field.vec_sub(x, y)) == lam:
                count += 1
    return count


def distance_bound_holds(field: Field, n_a: int, n_b: int, count: int) -> bool:
    """Exact check of |N - |A||B|/q| <= 4 sqrt(q) sqrt(|A||B|) (integers only)."""
    q = field.q
    lhs = q * count - n_a * n_b
    return lhs * lhs <= 16 * q ** 3 * n_a * n_b


def distance_report(field: Field, A, B, lam: int):
    """Distance-count audit with the explicit constant 4 (pass/fail)."""
    from .incidence import AuditReport, SideCondition

    A, B = tuple(sorted(set(A))), tuple(sorted(set(B)))
    n = distance_count(field, A, B, lam)
    q = field.q
    na, nb = len(A), len(B)
    main = na * nb / q
    unit = 4 * q ** 0.5 * (na * nb) ** 0.5
    holds = distance_bound_holds(field, na, nb, n)
    conds = [
        SideCondition("planar", bool(A and len(A[0]) == 2)),
        SideCondition("lambda_nonzero", lam != 0),
        SideCondition("explicit_constant_4_holds", holds),
    ]
    c_star = abs(n - main) / unit if unit > 0 else 0.0
    d = len(A[0]) if A else 2
    return AuditReport("T3.1", q, d, {"|A|": na, "|B|": nb, "lambda": lam}, n, main, unit, c_star, conds)


# -- triangle extension ----------------------------------------------------------

def mu_from_lambdas(field: Field, l1: int, l2: int, l3: int) -> int:
    """Predicted apex count from the discriminant 4*s2 - s1**2."""
    s1 = field.add(field.add(l1, l2), l3)
    s2 = field.add(field.add(field.mul(l1, l2), field.mul(l2, l3)), field.mul(l3, l1))
    disc = field.sub(field.mul(field.scalar(4), s2), field.mul(s1, s1))
    ch = field.quad_char(disc)
    if ch == 1:
        return 2
    if ch == 0:
        return 1
    return 0


def extend_segment(field: Field, x, y, l2: int, l3: int):
    """Witness apexes z with ||x-z|| = l2, ||y-z|| = l3, plus the predicted count.

    The witness set is found by brute force; the predicted count comes from
    the discriminant trichotomy.  They must agree (asserted).
    """
    if len(x) != 2 or len(y) != 2:
        raise DimensionMismatch("segment extension is a planar operation")
    l1 = field.norm(field.vec_sub(x, y))
    if l1 == 0:
        raise DegenerateSegment(f"||x - y|| = 0 for x={x}, y={y}")
    witnesses = tuple(
        z
        for z in all_points(field, 2)
        if field.norm(field.vec_sub(x, z)) == l2 and field.norm(field.vec_sub(y, z)) == l3
    )
    mu = mu_from_lambdas(field, l1, l2, l3)
    assert len(witnesses) == mu, (
        f"witness count {len(witnesses)} != predicted {mu} for "
        f"segment {x},{y} with radii ({l2},{l3})"
    )
    return witnesses, mu


def segment_witness_counts(field: Field, x, y) -> list:
    """counts[a][b] = number of z with ||x-z|| = a and ||y-z|| = b (d = 2)."""
    q = field.q
    n2 = field.norm2_table()
    neg = field._neg
    add = field._add
    sx0, sx1 = add[neg[x[0]]], add[neg[x[1]]]
    sy0, sy1 = add[neg[y[0]]], add[neg[y[1]]]
    counts = [[0] * q for _ in range(q)]
    for z0 in range(q):
        rowx = n2[sx0[z0]]
        rowy = n2[sy0[z0]]
        for z1 in range(q):
            counts[rowx[sx1[z1]]][rowy[sy1[z1]]] += 1
    return counts


_MU_MATRIX_CACHE: dict = {}


def mu_expected_matrix(field: Field, l1: int) -> list:
    key = (field, l1)
    cached = _MU_MATRIX_CACHE.get(key)
    if cached is None:
        q = field.q
        cached = [[mu_from_lambdas(field, l1, a, b) for b in range(q)] for a in range(q)]
        _MU_MATRIX_CACHE[key] = cached
    return cached


@dataclass
class SweepAudit:
    """Outcome of the exhaustive all-segments plane sweep."""

    q: int
    segments: int
    mu_cases: int
    mu_mismatches: list
    cap_cases: int
    cap_violations: list


def segment_sweep_audit(field: Field) -> SweepAudit:
    """One exhaustive pass over all segments and all radius pairs.

    For every ordered pair x != y the witness-count matrix is computed by
    brute force over all apexes.  When ||x-y|| != 0 the matrix must equal
    the discriminant prediction for every radius pair; independently of the
    norm, every entry with both radii nonzero is a two-sphere intersection
    with linearly independent centers and must be at most 2.
    """
    q = field.q
    pts = all_points(field, 2)
    mu_mismatches = []
    cap_violations = []
    mu_cases = 0
    cap_cases = 0
    segments = 0
    for x in pts:
        for y in pts:
            if x == y:
                continue
            segments += 1
            counts = segment_witness_counts(field, x, y)
            l1 = field.norm(field.vec_sub(x, y))
            if l1 != 0:
                mu_cases += q * q
                if counts != mu_expected_matrix(field, l1):
                    expected = mu_expected_matrix(field, l1)
                    for a in range(q):
                        for b in range(q):
                            if counts[a][b] != expected[a][b]:
                                mu_mismatches.append((x, y, a, b, counts[a][b], expected[a][b]))
            cap_cases += (q - 1) * (q - 1)
            for a in range(1, q):
                row = counts[a]
                for b in range(1, q):
                    if row[b] > 2:
                        cap_violations.append((x, y, a, b, row[b]))
    return SweepAudit(q, segments, mu_cases, mu_mismatches, cap_cases, cap_violations)


# -- spheres ---------------------------------------------------------------------

def sphere_points(field: Field, center, radius: int) -> tuple:
    d = len(center)
    return tuple(z for z in all_points(field, d) if field.norm(field.vec_sub(z, center)) == radius)


def differences_independent(field: Field, centers) -> bool:
    base = centers[0]
    diffs = [field.vec_sub(c, base) for c in centers[1:]]
    return rank_of_vectors(field, diffs) == len(diffs)


def sphere_intersection(field: Field, centers, radii) -> frozenset:
    """Exact intersection of spheres; the cap 2 q**(d-k) is asserted when
    the center differences are independent (k <= d)."""
    centers = tuple(tuple(c) for c in centers)
    radii = tuple(radii)
    if len(centers) != len(radii):
        raise BadParameters(f"{len(centers)} centers but {len(radii)} radii")
    if any(r == 0 for r in radii):
        raise BadParameters("sphere radii must be nonzero")
    d = len(centers[0])
    pts = [z for z in sphere_points(field, centers[0], radii[0])]
    for c, r in zip(centers[1:], radii[1:]):
        pts = [z for z in pts if field.norm(field.vec_sub(z, c)) == r]
    out = frozenset(pts)
    k = len(centers)
    if k <= d and differences_independent(field, centers):
        cap = 2 * field.q ** (d - k)
        assert len(out) <= cap, f"intersection size {len(out)} exceeds cap {cap}"
    return out


# -- orbit oracle and stabilizers ---------------------------------------------------

def orbit_oracle(field: Field, s1, s2) -> Optional[tuple]:
    """First motion carrying s1 to s2 vertex-wise, or None.

    The search is exhaustive over the full motion set: for each matrix in
    canonical order the translation is forced by the first vertex, so
    scanning matrices alone visits exactly the motions that can match and
    preserves the (matrix, translation)-lexicographic first hit.
    """
    s1, s2 = tuple(s1), tuple(s2)
    if len(s1) != len(s2):
        raise DimensionMismatch("simplices must have the same number of vertices")
    d = len(s1[0])
    add, neg = field._add, field._neg
    for g in mo.enumerate_orthogonal(field, d):
        img0 = mo.mat_vec(field, g, s1[0])
        z = tuple(add[a][neg[b]] for a, b in zip(s2[0], img0))
        ok = True
        for xv, yv in zip(s1[1:], s2[1:]):
            img = mo.mat_vec(field, g, xv)
            if tuple(add[a][b] for a, b in zip(img, z)) != yv:
                ok = False
                break
        if ok:
            return (g, z)
    return None


def stabilizer_size(field: Field, vertices) -> int:
    """Number of motions fixing every vertex of the simplex."""
    vertices = tuple(vertices)
    d = len(vertices[0])
    add, neg = field._add, field._neg
    count = 0
    for g in mo.enumerate_orthogonal(field, d):
        img0 = mo.mat_vec(field, g, vertices[0])
        z = tuple(add[a][neg[b]] for a, b in zip(vertices[0], img0))
        ok = True
        for v in vertices:
            img = mo.mat_vec(field, g, v)
            if tuple(add[a][b] for a, b in zip(img, z)) != v:
                ok = False
                break
        if ok:
            count += 1
    return count


# -- censuses --------------------------------------------------------------------

@dataclass
class ClassCensus:
    """Multiplicities of congruence keys over a product of vertex sets."""

    q: int
    d: int
    k: int
    classes: dict
    total: int

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def degenerate_count(self) -> int:
        full = min(self.k, self.d)
        return sum(1 for key in self.classes if key.rank < full)

    @property
    def nondegenerate_count(self) -> int:
        return self.class_count - self.degenerate_count

    @property
    def pair_collisions(self) -> int:
        """Number of ordered pairs of tuples sharing a key (sum of |C|^2)."""
        return sum(c * c for c in self.classes.values())


def _census_accumulate(field: Field, sets, classes: dict) -> int:
    d = len(sets[0][0]) if sets[0] else 0
    k = len(sets) - 1
    total = 0
    if d == 2 and k == 2:
        n2 = field.norm2_table()
        sub = [[field._add[a][field._neg[b]] for b in range(field.q)] for a in range(field.q)]
        mul, s_, a_ = field._mul, field.sub, field._add
        for x in sets[0]:
            x0, x1 = x
            sx0, sx1 = sub[x0], sub[x1]
            for y in sets[1]:
                y0, y1 = y
                u0, u1 = sub[y0][x0], sub[y1][x1]
                n01 = n2[sx0[y0]][sx1[y1]]
                sy0, sy1 = sub[y0], sub[y1]
                for z0, z1 in sets[2]:
                    v0, v1 = sub[z0][x0], sub[z1][x1]
                    det = s_(mul[u0][v1], mul[u1][v0])
                    if det:
                        rank = 2
                    elif u0 or u1 or v0 or v1:
                        rank = 1
                    else:
                        rank = 0
                    key = (rank, n01, n2[sx0[z0]][sx1[z1]], n2[sy0[z0]][sy1[z1]])
                    classes[key] = classes.get(key, 0) + 1
                    total += 1
        return total
    for tup in itertools.product(*sets):
        key = classify(field, tup)
        classes[(key.rank,) + key.norms] = classes.get((key.rank,) + key.norms, 0) + 1
        total += 1
    return total


def _census_job(args):
    from .ffield import make_field_with_modulus

    p, r, modulus, sets = args
    field = make_field_with_modulus(p, r, modulus, force=True)
    classes: dict = {}
    total = _census_accumulate(field, sets, classes)
    return classes, total


def count_classes(field: Field, sets, k: int = None, *, workers: int = 1, force: bool = False) -> ClassCensus:
    """Census of congruence keys over tuples from the product of vertex sets.

    Tuples are streamed; only the key histogram is kept.  The merge of
    partial histograms is associative, so the result is identical for any
    worker count.
    """
    sets = [tuple(sorted(set(s))) for s in sets]
    if k is None:
        k = len(sets) - 1
    if k != len(sets) - 1:
        raise BadParameters(f"expected {k + 1} vertex sets, got {len(sets)}")
    if not all(sets):
        return ClassCensus(field.q, 0, k, {}, 0)
    d = len(sets[0][0])
    if any(len(p) != d for s in sets for p in s):
        raise DimensionMismatch("vertex sets of mixed dimension")
    n_tuples = 1
    for s in sets:
        n_tuples *= len(s)
    if n_tuples > CENSUS_GUARDRAIL and not force:
        raise TooLarge(f"census of {n_tuples} tuples exceeds guardrail {CENSUS_GUARDRAIL}")

    if workers > 1 and len(sets[0]) > 1:
        from . import parallel

        n = min(workers * 4, len(sets[0]))
        bounds = [(len(sets[0]) * i // n, len(sets[0]) * (i + 1) // n) for i in range(n)]
        jobs = [
            (field.p, field.r, field.modulus, [sets[0][a:b]] + sets[1:])
            for a, b in bounds
        ]
        classes: dict = {}
        total = 0
        for part, sub_total in parallel.run_jobs(_census_job, jobs, workers):
            total += sub_total
            for key, c in part.items():
                classes[key] = classes.get(key, 0) + c
    else:
        classes = {}
        total = _census_accumulate(field, sets, classes)
    tidy = {SimplexKey(key[0], tuple(key[1:])): c for key, c in classes.items()}
    return ClassCensus(field.q, d, k, tidy, total)


def count_classes_containing(field: Field, A, B, C, lam: int) -> int:
    """Distinct congruence keys of triangles in A x B x C whose (A, B) edge
    has norm lam.  Runs in any residue class; the q = 3 (mod 4) regime is
    the caller's concern."""
    A, B, C = (tuple(sorted(set(s))) for s in (A, B, C))
    if not (A and B and C):
        return 0
    keys = set()
    for x in A:
        for y in B:
            if field.norm(field.vec_sub(x, y)) != lam:
                continue
            for z in C:
                keys.add(classify(field, (x, y, z)))
    return len(keys)


def copy_count(field: Field, sets, delta: SimplexKey) -> int:
    """Labeled tuples from the product of sets whose key equals delta.

    delta must have nonzero side lengths; candidates are pruned edge by
    edge and the difference rank is checked at the leaves.
    """
    sets = [tuple(sorted(set(s))) for s in sets]
    kv = len(sets)
    expected = kv * (kv - 1) // 2
    if len(delta.norms) != expected:
        raise BadParameters(f"key has {len(delta.norms)} norms, expected {expected}")
    if any(n == 0 for n in delta.norms):
        raise BadParameters("copy counting requires nonzero side lengths")
    if not all(sets):
        return 0
    pos = {}
    idx = 0
    for i in range(kv):
        for j in range(i + 1, kv):
            pos[(i, j)] = idx
            idx += 1
    norms = delta.norms
    count = 0
    chosen = []

    def rec(i):
        nonlocal count
        if i == kv:
            diffs = [field.vec_sub(v, chosen[0]) for v in chosen[1:]]
            if rank_of_vectors(field, diffs) == delta.rank:
                count += 1
            return
        for cand in sets[i]:
            ok = True
            for j in range(i):
                if field.norm(field.vec_sub(cand, chosen[j])) != norms[pos[(j, i)]]:
                    ok = False
                    break
            if ok:
                chosen.append(cand)
                rec(i + 1)
                chosen.pop()

    rec(0)
    return count


def copy_count_report(field: Field, sets, delta: SimplexKey):
    """Copy count with the ratio against the product main term."""
    from .incidence import AuditReport, SideCondition

    count = copy_count(field, sets, delta)
    kv = len(sets)
    sizes = {f"|A{i + 1}|": len(set(s)) for i, s in enumerate(sets)}
    prod = 1
    for s in sets:
        prod *= len(set(s))
    main = prod / field.q ** (kv * (kv - 1) // 2)
    c_star = count / main if main > 0 else 0.0
    d = len(next(iter(sets[0]))) if sets and sets[0] else 2
    sizes["vertices"] = kv
    return AuditReport(
        "T4.1", field.q, d, sizes, count, 0.0, main, c_star,
        [SideCondition("nonzero_sides", all(n != 0 for n in delta.norms))],
    )


# -- unordered post-processing and export ----------------------------------------------

def unordered_key(key: SimplexKey, k: int) -> SimplexKey:
    """Canonical representative of a key under vertex relabeling.

    Only meaningful for censuses where all vertex sets coincide.
    """
    pos = {}
    idx = 0
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            pos[(i, j)] = idx
            idx += 1
    best = None
    for perm in itertools.permutations(range(k + 1)):
        norms = tuple(
            key.norms[pos[tuple(sorted((perm[i], perm[j])))]]
            for i in range(k + 1)
            for j in range(i + 1, k + 1)
        )
        if best is None or norms < best:
            best = norms
    return SimplexKey(key.rank, best)


def unordered_census(census: ClassCensus) -> dict:
    out: dict = {}
    for key, c in census.classes.items():
        u = unordered_key(key, census.k)
        out[u] = out.get(u, 0) + c
    return out


def census_csv(census: ClassCensus) -> str:
    lines = ["key,count"]
    rows = sorted((key_string(k), c) for k, c in census.classes.items())
    lines.extend(f"{s},{c}" for s, c in rows)
    return "\n".join(lines) + "\n"
