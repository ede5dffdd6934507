import itertools

import pytest

from fqgeom import NonPrime, TooLarge, UnsupportedDegree, make_field, make_field_with_modulus
from fqgeom.ffield import all_points, format_point, is_prime, load_point_file, parse_point, smallest_irreducible

SUPPORTED = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1),
             (13, 1), (17, 1), (19, 1), (23, 1), (29, 1), (31, 1), (37, 1),
             (41, 1), (43, 1), (47, 1)]


def test_smallest_irreducible_frozen():
    assert smallest_irreducible(3, 1) == (0, 1)
    assert smallest_irreducible(3, 2) == (1, 0, 1)
    assert smallest_irreducible(3, 3) == (1, 0, 2, 1)
    assert smallest_irreducible(7, 2) == (1, 0, 1)


def test_make_field_examples():
    assert make_field(3).q_mod_4 == 3
    assert make_field(3, 3).q_mod_4 == 3
    assert make_field(5).q_mod_4 == 1


def test_q_mod_4_iff_characteristic_fact():
    for p, r in SUPPORTED:
        field = make_field(p, r)
        assert (field.q_mod_4 == 3) == (p % 4 == 3 and r % 2 == 1)


def test_make_field_rejections():
    with pytest.raises(NonPrime):
        make_field(9)
    with pytest.raises(NonPrime):
        make_field(2)
    with pytest.raises(UnsupportedDegree):
        make_field(3, 4)
    with pytest.raises(TooLarge):
        make_field(11, 2)
    assert make_field(11, 2, force=True).q == 121


def test_is_prime():
    assert [n for n in range(2, 30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_field_axioms_exhaustive_f9():
    field = make_field(3, 2)
    els = range(field.q)
    for a in els:
        assert field.add(a, 0) == a
        assert field.mul(a, 1) == a
        assert field.add(a, field.neg(a)) == 0
        if a:
            assert field.mul(a, field.inv(a)) == 1
    for a, b, c in itertools.product(els, repeat=3):
        assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b), field.mul(a, c))
        assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))


def test_encoding_round_trip():
    field = make_field(3, 3)
    for a in field.elements:
        assert field.element(field.coeffs(a)) == a
    assert field.coeffs(5) == (2, 1, 0)
    assert field.scalar(4) == 1


def test_pow_matches_repeated_mul():
    field = make_field(7)
    for a in range(1, 7):
        acc = 1
        for n in range(1, 10):
            acc = field.mul(acc, a)
            assert field.pow_(a, n) == acc


def test_quad_char_examples():
    assert make_field(3).quad_char(2) == -1
    assert make_field(7).quad_char(0) == 0
    assert make_field(11).quad_char(3) == 1
    # oracle: enumerate the squares directly
    field = make_field(11)
    squares = {field.mul(a, a) for a in range(1, 11)}
    assert squares == {1, 3, 4, 5, 9}


def test_quad_char_agrees_with_square_enumeration():
    for p, r in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3)]:
        field = make_field(p, r)
        squares = {field.mul(a, a) for a in range(1, field.q)}
        for a in range(1, field.q):
            assert field.quad_char(a) == (1 if a in squares else -1)


def test_quad_char_multiplicative_exhaustive_small_q():
    for p, r in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3)]:
        field = make_field(p, r)
        for a in range(1, field.q):
            for b in range(1, field.q):
                assert field.quad_char(field.mul(a, b)) == field.quad_char(a) * field.quad_char(b)


def test_quad_char_minus_one_iff_q_3_mod_4():
    for p, r in SUPPORTED:
        field = make_field(p, r)
        assert (field.quad_char(field.neg(1)) == -1) == (field.q_mod_4 == 3)


def test_sqrt_examples():
    assert make_field(7).sqrt_all(2) == (3, 4)
    assert make_field(11).sqrt_all(0) == (0,)
    assert make_field(3).sqrt_all(2) == ()


def test_sqrt_char_consistency():
    for p, r in [(3, 1), (7, 1), (3, 2), (11, 1), (3, 3)]:
        field = make_field(p, r)
        for a in range(1, field.q):
            roots = field.sqrt_all(a)
            assert all(field.mul(y, y) == a for y in roots)
            assert len(roots) == {1: 2, -1: 0}[field.quad_char(a)]


def test_norm_examples():
    assert make_field(3).norm((1, 1)) == 2
    assert make_field(7).norm((0, 0, 0)) == 0
    assert make_field(7).norm((1, 2)) == 5


def test_sphere_sizes_planar():
    # every nonzero norm value is hit q - chi(-1) times
    for q in (3, 7, 11):
        field = make_field(q)
        expected = q - field.quad_char(field.neg(1))
        counts = {}
        for pt in all_points(field, 2):
            counts[field.norm(pt)] = counts.get(field.norm(pt), 0) + 1
        for lam in range(1, q):
            assert counts.get(lam, 0) == expected


def test_modulus_independence():
    default = make_field(3, 2)
    other = make_field_with_modulus(3, 2, (2, 1, 1))
    assert default.modulus != other.modulus
    for field in (default, other):
        squares = sum(1 for a in range(1, 9) if field.quad_char(a) == 1)
        assert squares == 4
        counts = {}
        for pt in all_points(field, 2):
            counts[field.norm(pt)] = counts.get(field.norm(pt), 0) + 1
        # 2q-1 isotropic points, q - chi(-1) = 8 per nonzero norm value
        assert counts[0] == 17
        assert sorted(counts.values()) == [8] * 8 + [17]
    with pytest.raises(ValueError):
        make_field_with_modulus(3, 2, (0, 0, 1))


def test_point_text_encoding(tmp_path):
    field = make_field(7)
    assert format_point((3, 0)) == "[3,0]"
    assert parse_point(field, " [3,0] ") == (3, 0)
    with pytest.raises(ValueError):
        parse_point(field, "[9,0]")
    path = tmp_path / "pts.txt"
    path.write_text("# header\n[1,2]\n[0,0]  # origin\n\n")
    assert load_point_file(field, path) == ((1, 2), (0, 0))
