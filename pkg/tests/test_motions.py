import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fqgeom import TooLarge, WrongResidue, make_field
from fqgeom import motions as mo
from fqgeom.ffield import all_points


def brute_force_orthogonal(field, d):
    out = []
    ident = mo.identity(d)
    for entries in itertools.product(range(field.q), repeat=d * d):
        g = tuple(entries[i * d:(i + 1) * d] for i in range(d))
        if mo.mat_mul(field, mo.mat_transpose(g), g) == ident:
            out.append(g)
    return sorted(out)


@pytest.mark.parametrize("p,r,d", [(3, 1, 2), (5, 1, 2), (7, 1, 2), (3, 2, 2), (3, 1, 3)])
def test_enumeration_matches_brute_force(p, r, d):
    field = make_field(p, r)
    assert mo.enumerate_orthogonal(field, d) == brute_force_orthogonal(field, d)


def test_group_sizes_frozen():
    assert len(mo.enumerate_orthogonal(make_field(3), 1)) == 2
    assert mo.enumerate_orthogonal(make_field(3), 1) == [((1,),), ((2,),)]
    assert len(mo.enumerate_orthogonal(make_field(3), 2)) == 8
    assert len(mo.enumerate_orthogonal(make_field(7), 2)) == 16
    assert len(mo.enumerate_orthogonal(make_field(11), 2)) == 24
    assert len(mo.enumerate_orthogonal(make_field(3), 3)) == 48


def test_enumeration_is_sorted_and_valid():
    field = make_field(7)
    mats = mo.enumerate_orthogonal(field, 2)
    assert mats == sorted(mats)
    for g in mats:
        assert mo.is_orthogonal(field, g)
        assert mo.mat_det(field, g) in (1, field.q - 1)


def test_orthogonal_size_degenerate_convention():
    field = make_field(3)
    assert mo.orthogonal_group_size(field, 0) == 1
    assert mo.orthogonal_group_size(field, 2) == 8


def test_enumeration_dimension_guardrail():
    with pytest.raises(TooLarge):
        mo.enumerate_orthogonal(make_field(3), 4)


def test_so2_sizes():
    for p, r in [(3, 1), (7, 1), (11, 1), (19, 1), (3, 3)]:
        field = make_field(p, r)
        expected = field.q - field.quad_char(field.neg(1))
        assert len(mo.special_orthogonal(field, 2)) == expected
        if field.q_mod_4 == 3:
            assert expected == field.q + 1


def test_so2_generator_orders():
    for q, order in [(3, 4), (7, 8), (11, 12)]:
        field = make_field(q)
        gen = mo.so2_generator(field)
        assert mo.element_order(field, gen) == order


def test_so2_generator_powers_exhaust():
    field = make_field(7)
    gen = mo.so2_generator(field)
    powers = set()
    g = mo.identity(2)
    for _ in range(field.q + 1):
        assert g not in powers
        powers.add(g)
        g = mo.mat_mul(field, g, gen)
    assert powers == set(mo.special_orthogonal(field, 2))


def test_so2_generator_wrong_residue():
    with pytest.raises(WrongResidue):
        mo.so2_generator(make_field(5))


def test_apply_examples():
    field = make_field(7)
    ident = (mo.identity(2), (0, 0))
    assert mo.apply(field, ident, (4, 5)) == (4, 5)
    neg = (((6, 0), (0, 6)), (0, 0))
    assert mo.apply(field, neg, (1, 2)) == (6, 5)
    field3 = make_field(3)
    shift = (mo.identity(2), (1, 0))
    assert mo.apply(field3, shift, (2, 2)) == (0, 2)


def test_invert_examples():
    field = make_field(7)
    shift = (mo.identity(2), (1, 3))
    assert mo.invert(field, shift) == (mo.identity(2), (6, 4))
    g = mo.so2_generator(field)
    motion = (g, (2, 5))
    assert mo.compose(field, motion, mo.invert(field, motion)) == (mo.identity(2), (0, 0))
    gt = mo.mat_transpose(g)
    z_inv = tuple(field.neg(c) for c in mo.mat_vec(field, gt, (2, 5)))
    assert mo.invert(field, motion) == (gt, z_inv)


def test_group_axioms_exhaustive_q3():
    field = make_field(3)
    universe = mo.motion_universe(field, 2)
    assert len(universe) == 72
    asset = set(universe)
    ident = (mo.identity(2), (0, 0))
    for r in universe:
        assert mo.compose(field, r, ident) == r
        assert mo.compose(field, ident, r) == r
        assert mo.invert(field, r) in asset
        assert mo.compose(field, r, mo.invert(field, r)) == ident
    for r2 in universe[:12]:
        for r1 in universe:
            assert mo.compose(field, r2, r1) in asset


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 71), st.integers(0, 71), st.integers(0, 8))
def test_compose_is_function_composition(i, j, pi):
    field = make_field(3)
    universe = mo.motion_universe(field, 2)
    pts = all_points(field, 2)
    r2, r1, x = universe[i], universe[j], pts[pi]
    assert mo.apply(field, mo.compose(field, r2, r1), x) == mo.apply(field, r2, mo.apply(field, r1, x))


def test_classify_examples():
    field = make_field(3)
    assert mo.classify(field, (mo.identity(2), (1, 1))) == "translation"
    neg_ident = ((2, 0), (0, 2))
    assert mo.classify(field, (neg_ident, (0, 0))) == "SF_prime"
    reflection = ((1, 0), (0, 2))
    assert mo.classify(field, (reflection, (0, 0))) == "general"


def test_motions_fixing_a_pair_count():
    # z is forced by g, so each (u, v) is fixed by exactly |O(d, q)| motions
    field = make_field(3)
    universe = mo.motion_universe(field, 2)
    pts = all_points(field, 2)
    for u in pts:
        for v in pts:
            hits = sum(1 for r in universe if mo.apply(field, r, u) == v)
            assert hits == 8


def test_universe_tags():
    field = make_field(3)
    general = mo.motion_universe(field, 2, "general")
    sf = mo.motion_universe(field, 2, "SF")
    sfp = mo.motion_universe(field, 2, "SF_prime")
    trans = mo.motion_universe(field, 2, "translation")
    rot = mo.motion_universe(field, 2, "SO2")
    assert (len(general), len(sf), len(sfp), len(trans), len(rot)) == (72, 36, 27, 9, 4)
    assert set(sfp) == set(sf) - set(trans)
    assert set(trans) <= set(sf) <= set(general)
    with pytest.raises(ValueError):
        mo.motion_universe(field, 2, "nope")


def test_motion_text_encoding(tmp_path):
    field = make_field(7)
    motion = (((0, 6), (1, 0)), (3, 4))
    text = mo.format_motion(motion)
    assert text == "g=[[0,6],[1,0]];z=[3,4]"
    assert mo.parse_motion(field, text) == motion
    path = tmp_path / "motions.txt"
    path.write_text(f"# one motion\n{text}\n")
    assert mo.load_motion_file(field, path) == [motion]
