"""Orthogonal groups O(d, q), rotations, translations and rigid motions.

A matrix is a tuple of row tuples of element integers; a rigid motion is a
pair (g, z) acting by x -> g x + z.  Groups are enumerated exhaustively by
orthonormal column extension (pick a unit column, then unit columns
orthogonal to all previous ones), which keeps d = 3 at desk scale, and are
returned sorted by the row-major tuple of entries so every run sees the
same order.
"""

from __future__ import annotations

import itertools

from .errors import TooLarge, WrongResidue
from .ffield import Field, all_points, format_point, parse_point

MAX_ENUM_DIMENSION = 3
UNIVERSE_GUARDRAIL = 10 ** 7

_ORTHO_CACHE: dict = {}
_UNIVERSE_CACHE: dict = {}


def identity(d: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_vec(field: Field, g, x) -> tuple:
    mul, add = field._mul, field._add
    out = []
    for row in g:
        acc = 0
        for a, b in zip(row, x):
            acc = add[acc][mul[a][b]]
        out.append(acc)
    return tuple(out)


def mat_mul(field: Field, a, b) -> tuple:
    mul, add = field._mul, field._add
    d = len(a)
    cols = list(zip(*b))
    out = []
    for row in a:
        orow = []
        for col in cols:
            acc = 0
            for x, y in zip(row, col):
                acc = add[acc][mul[x][y]]
            orow.append(acc)
        out.append(tuple(orow))
    return tuple(out)


def mat_transpose(g) -> tuple:
    return tuple(zip(*g))


def mat_det(field: Field, g) -> int:
    d = len(g)
    mul, sub = field.mul, field.sub
    if d == 1:
        return g[0][0]
    if d == 2:
        return sub(mul(g[0][0], g[1][1]), mul(g[0][1], g[1][0]))
    if d == 3:
        (a, b, c), (e, f, h), (i, j, k) = g
        m1 = mul(a, sub(mul(f, k), mul(h, j)))
        m2 = mul(b, sub(mul(e, k), mul(h, i)))
        m3 = mul(c, sub(mul(e, j), mul(f, i)))
        return field.add(sub(m1, m2), m3)
    raise TooLarge(f"determinant only supported for d <= 3, got {d}")


def is_orthogonal(field: Field, g) -> bool:
    return mat_mul(field, mat_transpose(g), g) == identity(len(g))


def _dot(field: Field, x, y) -> int:
    mul, add = field._mul, field._add
    acc = 0
    for a, b in zip(x, y):
        acc = add[acc][mul[a][b]]
    return acc


def unit_vectors(field: Field, d: int) -> list:
    return [x for x in all_points(field, d) if field.norm(x) == 1]


def enumerate_orthogonal(field: Field, d: int) -> list:
    """All of O(d, q) for d <= 3, sorted by row-major entries."""
    if not 1 <= d <= MAX_ENUM_DIMENSION:
        raise TooLarge(f"orthogonal enumeration supports d in 1..{MAX_ENUM_DIMENSION}, got {d}")
    key = (field, d)
    cached = _ORTHO_CACHE.get(key)
    if cached is not None:
        return cached

    units = unit_vectors(field, d)
    mats = []

    def extend(cols):
        if len(cols) == d:
            mats.append(tuple(zip(*cols)))
            return
        for u in units:
            if all(_dot(field, u, c) == 0 for c in cols):
                extend(cols + [u])

    extend([])
    mats.sort()
    _ORTHO_CACHE[key] = mats
    return mats


def orthogonal_group_size(field: Field, m: int) -> int:
    """|O(m, q)| with the degenerate convention |O(0, q)| = 1."""
    if m == 0:
        return 1
    return len(enumerate_orthogonal(field, m))


def special_orthogonal(field: Field, d: int) -> list:
    return [g for g in enumerate_orthogonal(field, d) if mat_det(field, g) == 1]


def element_order(field: Field, g) -> int:
    d = len(g)
    ident = identity(d)
    acc = g
    n = 1
    while acc != ident:
        acc = mat_mul(field, acc, g)
        n += 1
        if n > field.q ** d + 1:
            raise RuntimeError("order search did not terminate")
    return n


def so2_generator(field: Field) -> tuple:
    """A rotation whose powers exhaust SO(2, q); requires q = 3 (mod 4).

    The rotation group is then cyclic of order q + 1; the first maximal-order
    element in the canonical matrix order is returned.
    """
    if field.q_mod_4 != 3:
        raise WrongResidue(f"q = {field.q} is {field.q_mod_4} (mod 4), need 3")
    target = field.q + 1
    for g in special_orthogonal(field, 2):
        if element_order(field, g) == target:
            return g
    raise RuntimeError("rotation group has no element of full order")


# -- rigid motions -------------------------------------------------------------

def apply(field: Field, motion, x) -> tuple:
    g, z = motion
    add = field._add
    return tuple(add[a][b] for a, b in zip(mat_vec(field, g, x), z))


def compose(field: Field, r2, r1) -> tuple:
    """Motion acting as r2 after r1."""
    g2, z2 = r2
    g1, z1 = r1
    g = mat_mul(field, g2, g1)
    z = tuple(field._add[a][b] for a, b in zip(mat_vec(field, g2, z1), z2))
    return (g, z)


def invert(field: Field, motion) -> tuple:
    # for orthogonal g the inverse is the transpose
    g, z = motion
    gt = mat_transpose(g)
    return (gt, tuple(field._neg[c] for c in mat_vec(field, gt, z)))


def classify(field: Field, motion) -> str:
    """Most specific tag: 'translation', 'SF_prime' (d = 2) or 'general'."""
    g, _ = motion
    d = len(g)
    if g == identity(d):
        return "translation"
    if d == 2 and mat_det(field, g) == 1:
        return "SF_prime"
    return "general"


def motion_universe(field: Field, d: int, tag: str = "general", *, force: bool = False) -> list:
    """The full enumerated motion set for a universe tag.

    Tags: 'general' = O(d) x F_q^d; 'SF' = det +1; 'SF_prime' = det +1 and
    g != I; 'translation' = g = I; 'SO2' = pure rotations (z = 0, d = 2).
    Order is g-major with translations in point order.
    """
    key = (field, d, tag)
    cached = _UNIVERSE_CACHE.get(key)
    if cached is not None:
        return cached
    ident = identity(d)
    if tag == "general":
        mats = enumerate_orthogonal(field, d)
    elif tag == "SF":
        mats = special_orthogonal(field, d)
    elif tag == "SF_prime":
        mats = [g for g in special_orthogonal(field, d) if g != ident]
    elif tag == "translation":
        mats = [ident]
    elif tag == "SO2":
        if d != 2:
            raise TooLarge("SO2 universe is only defined for d = 2")
        zero = (0,) * d
        out = [(g, zero) for g in special_orthogonal(field, d)]
        _UNIVERSE_CACHE[key] = out
        return out
    else:
        raise ValueError(f"unknown motion universe tag {tag!r}")
    size = len(mats) * field.q ** d
    if size > UNIVERSE_GUARDRAIL and not force:
        raise TooLarge(f"motion universe of size {size} exceeds guardrail")
    translations = all_points(field, d)
    out = [(g, z) for g in mats for z in translations]
    _UNIVERSE_CACHE[key] = out
    return out


def is_sf_prime(field: Field, motion) -> bool:
    g, _ = motion
    return len(g) == 2 and g != identity(2) and mat_det(field, g) == 1


# -- text encodings -------------------------------------------------------------

def format_motion(motion) -> str:
    g, z = motion
    rows = ",".join("[" + ",".join(str(c) for c in row) + "]" for row in g)
    return f"g=[{rows}];z={format_point(z)}"


def parse_motion(field: Field, text: str) -> tuple:
    text = text.strip()
    gpart, zpart = text.split(";")
    if not gpart.startswith("g=[[") or not zpart.startswith("z="):
        raise ValueError(f"motion must look like g=[[a,b],[c,d]];z=[e,f], got {text!r}")
    body = gpart[len("g=["):-1]
    rows = []
    for chunk in body.replace("],[", "]|[").split("|"):
        rows.append(parse_point(field, chunk))
    z = parse_point(field, zpart[len("z="):])
    g = tuple(rows)
    if any(len(row) != len(z) for row in g) or len(g) != len(z):
        raise ValueError("matrix shape does not match translation length")
    return (g, z)


def load_motion_file(field: Field, path) -> list:
    """One motion per line, '#' starts a comment."""
    motions = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                motions.append(parse_motion(field, line))
    return motions
