"""Exact arithmetic in small finite fields F_q, q = p**r with p an odd prime.

An element is stored as the plain integer sum(c[j] * p**j) built from its
polynomial coefficients c (constant term first).  Every operation goes
through dense tables built once per field, so exhaustive sweeps over whole
planes stay cheap and elements are hashable everywhere (they are ints).

The extension modulus is the lexicographically smallest monic irreducible
polynomial of degree r over Z_p, comparing the constant coefficient first,
so a given (p, r) always produces identical tables across runs.

Points of F_q^d are tuples of element integers.  The canonical text
encoding of an element is its integer; points render as "[a,b]".
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import NonPrime, TooLarge, UnsupportedDegree

MAX_Q = 49
MAX_DEGREE = 3
MAX_DIMENSION = 4


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality check (desk-scale inputs)."""
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_has_root(coeffs, p):
    for x in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


def is_irreducible(coeffs, p) -> bool:
    """Irreducibility over Z_p for monic polynomials of degree <= 3.

    Degree 1 is always irreducible; degrees 2 and 3 are irreducible exactly
    when they have no root in Z_p.
    """
    deg = len(coeffs) - 1
    if coeffs[-1] != 1:
        return False
    if deg == 1:
        return True
    if deg in (2, 3):
        return not _poly_has_root(coeffs, p)
    raise UnsupportedDegree(f"degree {deg} modulus not supported")


def smallest_irreducible(p: int, r: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree r over Z_p.

    Candidates are compared by their low-degree coefficients first.
    """
    for low in itertools.product(range(p), repeat=r):
        coeffs = low + (1,)
        if is_irreducible(coeffs, p):
            return coeffs
    raise RuntimeError(f"no irreducible polynomial of degree {r} over Z_{p}")


class Field:
    """Tabulated arithmetic for F_{p^r}.

    Elements are integers in [0, q); use ``coeffs``/``element`` to move
    between the integer encoding and coefficient vectors.
    """

    def __init__(self, p: int, r: int, modulus: tuple):
        self.p = p
        self.r = r
        self.q = p ** r
        self.modulus = tuple(modulus)
        self.q_mod_4 = self.q % 4
        self._norm2 = None
        self._build_tables()

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.r, self.modulus))

    def __repr__(self):
        return f"Field(p={self.p}, r={self.r}, q={self.q})"

    # -- encoding ----------------------------------------------------------

    def coeffs(self, a: int) -> tuple:
        """Polynomial coefficients of a, constant term first, length r."""
        out = []
        for _ in range(self.r):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def element(self, coeffs) -> int:
        acc = 0
        for c in reversed(tuple(coeffs)):
            acc = acc * self.p + (c % self.p)
        return acc

    @property
    def elements(self):
        return range(self.q)

    # -- table construction --------------------------------------------------

    def _reduce(self, prod):
        # long division by the monic modulus, in place on a coefficient list
        p, r = self.p, self.r
        mod = self.modulus
        for i in range(len(prod) - 1, r - 1, -1):
            c = prod[i] % p
            if c:
                for j in range(r + 1):
                    prod[i - r + j] = (prod[i - r + j] - c * mod[j]) % p
        return tuple(c % p for c in prod[:r])

    def _build_tables(self):
        p, r, q = self.p, self.r, self.q
        coeff = [self.coeffs(a) for a in range(q)]

        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            ca = coeff[a]
            for b in range(a, q):
                cb = coeff[b]
                s = self.element((x + y) % p for x, y in zip(ca, cb))
                add[a][b] = s
                add[b][a] = s
                prod = [0] * (2 * r - 1)
                for i, x in enumerate(ca):
                    if x:
                        for j, y in enumerate(cb):
                            prod[i + j] += x * y
                m = self.element(self._reduce(prod))
                mul[a][b] = m
                mul[b][a] = m
        self._add = add
        self._mul = mul
        self._neg = [self.element((-c) % p for c in coeff[a]) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            row = mul[a]
            for b in range(1, q):
                if row[b] == 1:
                    inv[a] = b
                    break
        self._inv = inv
        self._sq = [mul[a][a] for a in range(q)]

        # quadratic character via a^((q-1)/2); 0 maps to 0
        e = (q - 1) // 2
        char = [0] * q
        for a in range(1, q):
            v = self.pow_(a, e)
            char[a] = 1 if v == 1 else -1
        self._char = char

        roots = [[] for _ in range(q)]
        for y in range(q):
            roots[self._sq[y]].append(y)
        self._roots = [tuple(sorted(v)) for v in roots]

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def div(self, a, b):
        return self._mul[a][self.inv(b)]

    def pow_(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        acc = 1
        base = a
        while n:
            if n & 1:
                acc = self._mul[acc][base]
            base = self._mul[base][base]
            n >>= 1
        return acc

    def scalar(self, n: int) -> int:
        """The image of the integer n in the field (the constant n mod p)."""
        return n % self.p

    @property
    def half(self):
        return self._inv[2 % self.p]

    def quad_char(self, a) -> int:
        """+1 for nonzero squares, 0 for 0, -1 for non-squares."""
        return self._char[a]

    def sqrt_all(self, a) -> tuple:
        """All y with y*y == a, in increasing order (size 0, 1 or 2)."""
        return self._roots[a]

    # -- points --------------------------------------------------------------

    def norm(self, point) -> int:
        """Sum of squared coordinates."""
        acc = 0
        for c in point:
            acc = self._add[acc][self._sq[c]]
        return acc

    def norm2_table(self):
        """norm2[dx][dy] = dx^2 + dy^2, built lazily for planar sweeps."""
        if self._norm2 is None:
            sq, add = self._sq, self._add
            self._norm2 = [[add[sq[x]][sq[y]] for y in range(self.q)] for x in range(self.q)]
        return self._norm2

    def vec_sub(self, x, y):
        return tuple(self._add[a][self._neg[b]] for a, b in zip(x, y))

    def vec_add(self, x, y):
        return tuple(self._add[a][b] for a, b in zip(x, y))

    def scale(self, c, x):
        row = self._mul[c]
        return tuple(row[a] for a in x)


def all_points(field: Field, d: int):
    """All points of F_q^d in canonical (coordinate-lexicographic) order."""
    if not 1 <= d <= MAX_DIMENSION:
        raise TooLarge(f"dimension {d} outside supported range 1..{MAX_DIMENSION}")
    return list(itertools.product(range(field.q), repeat=d))


@lru_cache(maxsize=None)
def _field_cached(p, r, modulus):
    return Field(p, r, modulus)


def make_field(p: int, r: int = 1, *, force: bool = False) -> Field:
    """Field F_{p^r} with the canonical smallest irreducible modulus.

    Raises NonPrime unless p is an odd prime, UnsupportedDegree for r
    outside 1..3, and TooLarge when q exceeds the guardrail (override
    with force=True).
    """
    if not isinstance(p, int) or not is_prime(p) or p == 2:
        raise NonPrime(f"p must be an odd prime, got {p}")
    if not 1 <= r <= MAX_DEGREE:
        raise UnsupportedDegree(f"extension degree must be in 1..{MAX_DEGREE}, got {r}")
    if p ** r > MAX_Q and not force:
        raise TooLarge(f"q = {p ** r} exceeds guardrail {MAX_Q}; pass force=True to override")
    return _field_cached(p, r, smallest_irreducible(p, r))


def make_field_with_modulus(p: int, r: int, modulus, *, force: bool = False) -> Field:
    """Field with an explicitly chosen irreducible modulus.

    Audit outcomes must not depend on the modulus choice; this constructor
    exists so tests can compare two moduli for the same (p, r).
    """
    if not isinstance(p, int) or not is_prime(p) or p == 2:
        raise NonPrime(f"p must be an odd prime, got {p}")
    if not 1 <= r <= MAX_DEGREE:
        raise UnsupportedDegree(f"extension degree must be in 1..{MAX_DEGREE}, got {r}")
    if p ** r > MAX_Q and not force:
        raise TooLarge(f"q = {p ** r} exceeds guardrail {MAX_Q}; pass force=True to override")
    modulus = tuple(int(c) % p for c in modulus)
    if len(modulus) != r + 1 or not is_irreducible(modulus, p):
        raise ValueError(f"modulus {modulus} is not a monic irreducible of degree {r} over Z_{p}")
    return _field_cached(p, r, modulus)


def field_for_order(q: int, *, force: bool = False) -> Field:
    """Field of order q for q = p**r with r <= 3 (used by the CLI's --q)."""
    for r in (1, 2, 3):
        p = round(q ** (1.0 / r))
        for cand in (p - 1, p, p + 1):
            if cand >= 3 and cand ** r == q and is_prime(cand):
                return make_field(cand, r, force=force)
    raise NonPrime(f"{q} is not p**r for an odd prime p and r <= 3")


# -- text encodings ----------------------------------------------------------

def format_point(point) -> str:
    return "[" + ",".join(str(c) for c in point) + "]"


def parse_point(field: Field, text: str) -> tuple:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"point must look like [a,b], got {text!r}")
    coords = tuple(int(t) for t in text[1:-1].split(","))
    for c in coords:
        if not 0 <= c < field.q:
            raise ValueError(f"coordinate {c} outside [0, {field.q})")
    return coords


def load_point_file(field: Field, path) -> tuple:
    """One point per line, '#' starts a comment."""
    points = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                points.append(parse_point(field, line))
    return tuple(points)
