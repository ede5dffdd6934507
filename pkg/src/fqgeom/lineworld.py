"""Reduction of planar oriented motions to points and lines in F_q^3.

For q = 3 (mod 4) the non-identity rotations are parameterized by the
field: phi(r) is the rotation with cosine (r^2-1)/(r^2+1) and sine
2r/(r^2+1) (well defined because r^2 + 1 never vanishes).  An oriented
non-translation motion (g, z) becomes the space point ((I-g)^{-1} z, r)
with r = phi^{-1}(g), and the motions mapping a plane point p to a plane
point q form the line

    ((p+q)/2, 0) + r * ((p-q)^perp / 2, 1),        (a, b)^perp = (b, -a).

``line_from_pair`` computes that line twice - from the definition and
from the closed form - and raises FormMismatch if they ever disagree;
the mismatch path is a permanent regression tripwire, not a reachable
error.

Lines are canonicalized by scaling the direction so its last nonzero
coordinate is 1 and sliding the base point to zero out that coordinate;
planes by scaling the normal so its first nonzero coordinate is 1.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import FormMismatch, NotInDomain, NotOriented, TooLarge, WrongResidue
from . import motions as mo
from .ffield import Field, format_point, parse_point


class Line3(NamedTuple):
    base: tuple
    direction: tuple


class Plane3(NamedTuple):
    normal: tuple
    offset: int


def _require_residue(field: Field):
    if field.q_mod_4 != 3:
        raise WrongResidue(f"q = {field.q} is {field.q_mod_4} (mod 4), need 3")


def phi_of(field: Field, rparam: int) -> tuple:
    """Rotation attached to a field element; never the identity."""
    _require_residue(field)
    r2 = field.mul(rparam, rparam)
    denom = field.inv(field.add(r2, 1))
    a = field.mul(field.sub(r2, 1), denom)
    c = field.mul(field.add(rparam, rparam), denom)
    return ((a, field.neg(c)), (c, a))


def phi_inverse(field: Field, g) -> int:
    """The unique parameter with phi_of(param) = g; g must be a non-identity rotation."""
    _require_residue(field)
    if len(g) != 2 or mo.mat_det(field, g) != 1 or not mo.is_orthogonal(field, g):
        raise NotInDomain(f"{g} is not a rotation")
    if g == mo.identity(2):
        raise NotInDomain("the identity rotation has no parameter")
    a, c = g[0][0], g[1][0]
    if c == 0:
        # the only parameter-free-denominator case: g = -I at r = 0
        return 0
    rparam = field.div(field.add(a, 1), c)
    if phi_of(field, rparam) != g:
        raise NotInDomain(f"{g} is outside the parameterized rotations")
    return rparam


def canonical_line(field: Field, base, direction) -> Line3:
    """Canonical (base, direction) pair determining the same point set."""
    if not any(direction):
        raise ValueError("line direction must be nonzero")
    piv = max(i for i, c in enumerate(direction) if c)
    inv = field.inv(direction[piv])
    direction = tuple(field.mul(inv, c) for c in direction)
    t = base[piv]
    base = tuple(field.sub(b, field.mul(t, c)) for b, c in zip(base, direction))
    return Line3(base, direction)


def line_points(field: Field, line: Line3):
    base, direction = line
    for t in range(field.q):
        yield tuple(field.add(b, field.mul(t, c)) for b, c in zip(base, direction))


def point_on_line(field: Field, line: Line3, pt) -> bool:
    base, direction = line
    piv = max(i for i, c in enumerate(direction) if c)
    t = field.div(field.sub(pt[piv], base[piv]), direction[piv])
    return all(
        field.add(b, field.mul(t, c)) == x for b, c, x in zip(base, direction, pt)
    )


def line_from_pair(field: Field, p, q_pt) -> Line3:
    """The space line of motions sending p to q_pt.

    Computed from the definition (one point per rotation parameter) and
    from the midpoint closed form; both must coincide exactly.
    """
    _require_residue(field)
    half = field.half
    ident = mo.identity(2)

    definitional = set()
    for rparam in range(field.q):
        g = phi_of(field, rparam)
        z = field.vec_sub(q_pt, mo.mat_vec(field, g, p))
        w = tuple(
            tuple(field.sub(ident[i][j], g[i][j]) for j in range(2)) for i in range(2)
        )
        det = field.sub(field.mul(w[0][0], w[1][1]), field.mul(w[0][1], w[1][0]))
        dinv = field.inv(det)
        s0 = field.mul(dinv, field.sub(field.mul(w[1][1], z[0]), field.mul(w[0][1], z[1])))
        s1 = field.mul(dinv, field.sub(field.mul(w[0][0], z[1]), field.mul(w[1][0], z[0])))
        definitional.add((s0, s1, rparam))

    base = (
        field.mul(half, field.add(p[0], q_pt[0])),
        field.mul(half, field.add(p[1], q_pt[1])),
        0,
    )
    diff = field.vec_sub(p, q_pt)
    direction = (field.mul(half, diff[1]), field.mul(half, field.neg(diff[0])), 1)
    closed = canonical_line(field, base, direction)
    if set(line_points(field, closed)) != definitional:
        raise FormMismatch(f"line forms disagree for p={p}, q={q_pt}")
    return closed


def motion_point(field: Field, motion) -> tuple:
    """The F_q^3 point encoding an oriented non-translation motion."""
    g, z = motion
    if not mo.is_sf_prime(field, motion):
        raise NotOriented(f"{motion} is not an oriented non-translation planar motion")
    rparam = phi_inverse(field, g)
    ident = mo.identity(2)
    w = tuple(tuple(field.sub(ident[i][j], g[i][j]) for j in range(2)) for i in range(2))
    det = field.sub(field.mul(w[0][0], w[1][1]), field.mul(w[0][1], w[1][0]))
    dinv = field.inv(det)
    s0 = field.mul(dinv, field.sub(field.mul(w[1][1], z[0]), field.mul(w[0][1], z[1])))
    s1 = field.mul(dinv, field.sub(field.mul(w[0][0], z[1]), field.mul(w[1][0], z[0])))
    return (s0, s1, rparam)


def incidence_equivalence(P, R) -> tuple:
    """Incidences counted on the motion side and on the point-line side.

    Every motion of R must be oriented and not a translation.  Both counts
    are computed independently and exhaustively; they must agree.
    """
    field = P.field
    _require_residue(field)
    R = list(R)
    for r in R:
        if not mo.is_sf_prime(field, r):
            raise NotOriented(f"{r} is not in the oriented non-translation motions")
    from .incidence import incidence_count

    motion_side = incidence_count(P, R)
    pts = [motion_point(field, r) for r in R]
    line_side = 0
    for u in P.U:
        for v in P.V:
            line = line_from_pair(field, u, v)
            for pt in pts:
                if point_on_line(field, line, pt):
                    line_side += 1
    return motion_side, line_side


# -- planes ------------------------------------------------------------------------

def iter_planes(field: Field):
    """All affine planes of F_q^3 as canonical (normal, offset) pairs.

    Canonical normals: (1, a, b), (0, 1, c), (0, 0, 1); q offsets each, so
    q^3 + q^2 + q planes.  The ideal plane of the projective closure holds
    no affine lines and is skipped.
    """
    q = field.q
    for a in range(q):
        for b in range(q):
            for off in range(q):
                yield Plane3((1, a, b), off)
    for c in range(q):
        for off in range(q):
            yield Plane3((0, 1, c), off)
    for off in range(q):
        yield Plane3((0, 0, 1), off)


def plane_count_with_ideal(field: Field) -> int:
    # q^3 + q^2 + q affine planes plus the ideal plane of the closure
    return field.q ** 3 + field.q ** 2 + field.q + 1


def canonical_plane(field: Field, normal, offset) -> Plane3:
    if not any(normal):
        raise ValueError("plane normal must be nonzero")
    piv = min(i for i, c in enumerate(normal) if c)
    inv = field.inv(normal[piv])
    return Plane3(tuple(field.mul(inv, c) for c in normal), field.mul(inv, offset))


def _dot3(field: Field, a, b) -> int:
    mul, add = field._mul, field._add
    return add[add[mul[a[0]][b[0]]][mul[a[1]][b[1]]]][mul[a[2]][b[2]]]


def line_in_plane(field: Field, line: Line3, plane: Plane3) -> bool:
    # two evaluations: the base lies on the plane and the direction is parallel
    return (
        _dot3(field, plane.normal, line.base) == plane.offset
        and _dot3(field, plane.normal, line.direction) == 0
    )


class PlaneAudit(NamedTuple):
    max_lines: int
    plane: Plane3
    line_count: int
    pair_count: int
    collisions: int
    planes_scanned: int


PLANE_GUARDRAIL = 10 ** 4


def plane_audit(field: Field, U, *, force: bool = False) -> PlaneAudit:
    """Largest number of pair lines of U x U lying in a single plane.

    Exhaustive over every plane; ties resolve to the first plane in the
    canonical scan order.  ``collisions`` counts ordered pairs whose line
    coincides with an earlier pair's line (expected 0).
    """
    U = tuple(sorted(set(U)))
    if len(U) ** 2 > PLANE_GUARDRAIL and not force:
        raise TooLarge(f"{len(U) ** 2} pair lines exceed guardrail {PLANE_GUARDRAIL}")
    lines = []
    seen = set()
    for u in U:
        for v in U:
            line = line_from_pair(field, u, v)
            if line in seen:
                continue
            seen.add(line)
            lines.append(line)
    pair_count = len(U) ** 2
    collisions = pair_count - len(lines)
    best = (0, None)
    for plane in iter_planes(field):
        c = 0
        for line in lines:
            if line_in_plane(field, line, plane):
                c += 1
        if c > best[0]:
            best = (c, plane)
    return PlaneAudit(best[0], best[1], len(lines), pair_count, collisions, plane_count_with_ideal(field))


def max_lines_in_plane(field: Field, lines) -> tuple:
    """(max, witness plane) over all planes for an arbitrary line family."""
    best = (0, None)
    for plane in iter_planes(field):
        c = 0
        for line in lines:
            if line_in_plane(field, line, plane):
                c += 1
        if c > best[0]:
            best = (c, plane)
    return best


def kollar_check(field: Field, points, lines):
    """Point-line incidence audit against max(|L||P|^(2/5), |P|^(6/5)).

    The plane-richness hypothesis (no plane holds more than c sqrt(|L|)
    lines) is audited first and its implied constant reported in sizes.
    """
    from .incidence import AuditReport, SideCondition

    points = sorted(set(points))
    lines = sorted(set(lines))
    npts, nl = len(points), len(lines)
    lhs = 0
    for line in lines:
        for pt in points:
            if point_on_line(field, line, pt):
                lhs += 1
    plane_max, _ = max_lines_in_plane(field, lines) if lines else (0, None)
    c_plane = plane_max / nl ** 0.5 if nl else 0.0
    unit = max(nl * npts ** 0.4, npts ** 1.2) if npts and nl else 0.0
    c_star = lhs / unit if unit > 0 else 0.0
    sizes = {"|points|": npts, "|lines|": nl, "plane_max": plane_max, "c_plane": round(c_plane, 6)}
    conds = [SideCondition("some_lines", nl > 0)]
    return AuditReport("T7.2", field.q, 3, sizes, lhs, 0.0, unit, c_star, conds)


# -- text encodings ----------------------------------------------------------------

def format_line(line: Line3) -> str:
    return f"base={format_point(line.base)};dir={format_point(line.direction)}"


def parse_line(field: Field, text: str) -> Line3:
    bpart, dpart = text.strip().split(";")
    base = parse_point(field, bpart.split("=", 1)[1])
    direction = parse_point(field, dpart.split("=", 1)[1])
    return canonical_line(field, base, direction)


def format_plane(plane: Plane3) -> str:
    return f"n={format_point(plane.normal)};off={plane.offset}"


def parse_plane(field: Field, text: str) -> Plane3:
    npart, opart = text.strip().split(";")
    normal = parse_point(field, npart.split("=", 1)[1])
    offset = int(opart.split("=", 1)[1])
    return canonical_plane(field, normal, offset)
