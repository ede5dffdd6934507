import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fqgeom import BadParameters, DegenerateSegment, make_field
from fqgeom import motions as mo
from fqgeom import simplex as sx
from fqgeom.ffield import all_points
from fqgeom.seeds import instance_rng, sample_points

F3 = make_field(3)
F7 = make_field(7)
F11 = make_field(11)
FULL3 = all_points(F3, 2)


# -- distances ------------------------------------------------------------------

def test_distance_count_full_plane():
    assert sx.distance_count(F3, FULL3, FULL3, 1) == 36


def test_distance_count_empty_and_miss():
    assert sx.distance_count(F3, [(0, 0)], [(0, 0)], 1) == 0
    assert sx.distance_count(F3, [], FULL3, 1) == 0


def test_distance_count_matches_generic_path():
    pts = all_points(F3, 3)[:12]
    planar = FULL3[:7]
    naive = sum(1 for x in planar for y in planar if F3.norm(F3.vec_sub(x, y)) == 2)
    assert sx.distance_count(F3, planar, planar, 2) == naive
    naive3 = sum(1 for x in pts for y in pts if F3.norm(F3.vec_sub(x, y)) == 1)
    assert sx.distance_count(F3, pts, pts, 1) == naive3


def test_distance_report_full_plane_instance():
    rep = sx.distance_report(F3, FULL3, FULL3, 1)
    assert rep.lhs == 36
    assert rep.main_term == pytest.approx(27.0)
    # |36 - 27| = 9 <= 4 sqrt(3) * 9
    assert all(c.ok for c in rep.side_conditions)


def test_distance_bound_exact_arithmetic():
    assert sx.distance_bound_holds(F3, 9, 9, 36)
    assert not sx.distance_bound_holds(F3, 1, 1, 9)


# -- triangle extension -----------------------------------------------------------

def test_mu_examples():
    for field in (F3, F7, F11):
        assert sx.mu_from_lambdas(field, field.scalar(4), 1, 1) == 1
    assert sx.mu_from_lambdas(F11, 1, 1, 1) == 2
    assert sx.mu_from_lambdas(F11, 1, 1, 6) == 0


def test_extend_segment_witnesses():
    w, mu = sx.extend_segment(F11, (0, 0), (1, 0), 1, 1)
    assert mu == 2 and len(w) == 2
    for z in w:
        assert F11.norm(z) == 1 and F11.norm(F11.vec_sub((1, 0), z)) == 1
    w0, mu0 = sx.extend_segment(F11, (0, 0), (1, 0), 1, 6)
    assert mu0 == 0 and w0 == ()


def test_extend_segment_degenerate():
    with pytest.raises(DegenerateSegment):
        sx.extend_segment(F7, (1, 1), (1, 1), 1, 1)


def test_segment_sweep_exhaustive_q3():
    sweep = sx.segment_sweep_audit(F3)
    assert sweep.segments == 72
    assert sweep.mu_mismatches == []
    assert sweep.cap_violations == []
    assert sweep.mu_cases == 72 * 9


def test_witness_counts_agree_with_extend_segment():
    counts = sx.segment_witness_counts(F7, (0, 0), (2, 1))
    for l2, l3 in [(0, 0), (1, 3), (2, 2), (6, 5)]:
        w, _ = (None, None)
        expect = counts[l2][l3]
        actual = sum(
            1
            for z in all_points(F7, 2)
            if F7.norm(z) == l2 and F7.norm(F7.vec_sub((2, 1), z)) == l3
        )
        assert expect == actual


# -- keys and the orbit oracle ------------------------------------------------------

def test_classify_example():
    key = sx.classify(F3, ((0, 0), (1, 0), (0, 1)))
    assert key == sx.SimplexKey(2, (1, 1, 2))
    assert sx.key_string(key) == "2|1,1,2"
    assert sx.parse_key("2|1,1,2") == key


def test_classify_motion_invariance():
    rng = instance_rng(31, 0)
    universe = mo.motion_universe(F7, 2)
    for i in range(20):
        pts = sample_points(rng, F7, 2, 3)
        r = universe[rng.below(len(universe))]
        moved = tuple(mo.apply(F7, r, v) for v in pts)
        assert sx.classify(F7, pts) == sx.classify(F7, moved)


def test_classify_collinear_rank():
    key = sx.classify(F7, ((0, 0), (1, 0), (2, 0)))
    assert key.rank == 1
    assert not sx.is_nondegenerate(F7, ((0, 0), (1, 0), (2, 0)))
    assert sx.is_nondegenerate(F7, ((0, 0), (1, 0), (0, 1)))


def test_orbit_oracle_identity_and_mismatch():
    s = ((0, 0), (1, 0), (0, 1))
    w = sx.orbit_oracle(F7, s, s)
    assert w is not None
    assert all(mo.apply(F7, w, v) == v for v in s)
    assert sx.orbit_oracle(F7, s, ((0, 0), (1, 0), (1, 1))) is None


def test_orbit_oracle_finds_witness_for_equal_keys():
    s1 = ((0, 0), (1, 0), (0, 1))
    r = (mo.so2_generator(F7), (3, 4))
    s2 = tuple(mo.apply(F7, r, v) for v in s1)
    w = sx.orbit_oracle(F7, s1, s2)
    assert w is not None
    assert all(mo.apply(F7, w, v) == y for v, y in zip(s1, s2))


def test_orbit_oracle_equals_naive_full_scan():
    universe = mo.motion_universe(F3, 2)

    def naive(s1, s2):
        for r in universe:
            if all(mo.apply(F3, r, v) == y for v, y in zip(s1, s2)):
                return r
        return None

    rng = instance_rng(37, 0)
    for _ in range(120):
        idx = [rng.below(9) for _ in range(6)]
        s1 = tuple(FULL3[i] for i in idx[:3])
        s2 = tuple(FULL3[i] for i in idx[3:])
        assert sx.orbit_oracle(F3, s1, s2) == naive(s1, s2)


def test_stabilizer_sizes():
    assert sx.stabilizer_size(F3, ((0, 0),)) == 8
    assert sx.stabilizer_size(F7, ((0, 0), (1, 0))) == 2
    assert sx.stabilizer_size(F7, ((0, 0), (1, 0), (0, 1))) == 1


# -- censuses -------------------------------------------------------------------

def test_census_singleton():
    census = sx.count_classes(F3, [[(1, 2)]] * 3, 2)
    assert census.total == 1
    assert census.class_count == 1
    assert census.degenerate_count == 1


def test_census_k1_full_plane():
    census = sx.count_classes(F3, [FULL3, FULL3], 1)
    assert census.class_count == 3
    assert census.total == 81


def test_census_full_plane_q3_frozen():
    census = sx.count_classes(F3, [FULL3] * 3, 2)
    assert census.total == 729
    assert census.class_count == 15
    assert census.degenerate_count == 9
    assert census.pair_collisions == 41553
    assert census.total ** 2 <= census.class_count * census.pair_collisions


def test_census_total_identity_random():
    rng = instance_rng(41, 0)
    A = sample_points(rng, F7, 2, 9)
    census = sx.count_classes(F7, [A] * 3, 2)
    assert census.total == 9 ** 3
    assert sum(census.classes.values()) == census.total
    assert census.total ** 2 <= census.class_count * census.pair_collisions


def test_census_fast_path_matches_classify():
    rng = instance_rng(43, 0)
    A = sample_points(rng, F7, 2, 6)
    census = sx.count_classes(F7, [A] * 3, 2)
    brute = {}
    for tup in itertools.product(A, repeat=3):
        key = sx.classify(F7, tup)
        brute[key] = brute.get(key, 0) + 1
    assert census.classes == brute


def test_census_worker_independence():
    rng = instance_rng(47, 0)
    A = sample_points(rng, F7, 2, 10)
    c1 = sx.count_classes(F7, [A] * 3, 2, workers=1)
    c2 = sx.count_classes(F7, [A] * 3, 2, workers=3)
    assert c1.classes == c2.classes and c1.total == c2.total


def test_census_bad_k():
    with pytest.raises(BadParameters):
        sx.count_classes(F3, [FULL3] * 3, 1)


def test_count_classes_containing():
    assert sx.count_classes_containing(F3, FULL3, FULL3, FULL3, 1) == 6
    assert sx.count_classes_containing(F3, FULL3, FULL3, [], 1) == 0
    assert sx.count_classes_containing(F3, [(0, 0)], [(1, 1)], FULL3, 1) == 0


def test_copy_count_unit_segment():
    seg = sx.SimplexKey(1, (1,))
    assert sx.copy_count(F3, [FULL3, FULL3], seg) == 36
    rep = sx.copy_count_report(F3, [FULL3, FULL3], seg)
    assert rep.lhs == 36
    assert rep.c_star == pytest.approx(36 / 27)


def test_copy_count_unrealizable_and_empty():
    ghost = sx.SimplexKey(2, (1, 1, 6))  # zero-witness radii over F_11
    assert sx.copy_count(F11, [all_points(F11, 2)[:40]] * 3, ghost) == 0
    seg = sx.SimplexKey(1, (1,))
    assert sx.copy_count(F3, [[], FULL3], seg) == 0
    with pytest.raises(BadParameters):
        sx.copy_count(F3, [FULL3, FULL3], sx.SimplexKey(1, (0,)))
    with pytest.raises(BadParameters):
        sx.copy_count(F3, [FULL3, FULL3], sx.SimplexKey(2, (1, 1, 2)))


def test_copy_count_matches_census_class_size():
    rng = instance_rng(53, 0)
    A = sample_points(rng, F7, 2, 8)
    census = sx.count_classes(F7, [A] * 3, 2)
    for key, size in census.classes.items():
        if key.rank == 2 and all(n != 0 for n in key.norms):
            assert sx.copy_count(F7, [A] * 3, key) == size


# -- spheres --------------------------------------------------------------------

def test_sphere_sizes():
    assert len(sx.sphere_points(F7, (0, 0), 1)) == 8
    assert len(sx.sphere_points(F11, (3, 4), 1)) == 12


def test_sphere_intersection_examples():
    inter = sx.sphere_intersection(F11, [(0, 0), (1, 0)], [1, 1])
    assert len(inter) == 2
    assert sx.sphere_intersection(F7, [(2, 2), (2, 2)], [1, 3]) == frozenset()
    with pytest.raises(BadParameters):
        sx.sphere_intersection(F7, [(0, 0)], [0])
    with pytest.raises(BadParameters):
        sx.sphere_intersection(F7, [(0, 0), (1, 1)], [1])


def test_sphere_intersection_d3():
    field = F3
    inter = sx.sphere_intersection(field, [(0, 0, 0), (1, 0, 0)], [1, 1])
    assert len(inter) <= 2 * 3  # cap 2q^(d-k) with d=3, k=2
    assert sx.differences_independent(field, [(0, 0, 0), (1, 0, 0)])
    assert not sx.differences_independent(field, [(0, 0, 0), (0, 0, 0)])


def test_sphere_intersection_matches_sweep_counts():
    counts = sx.segment_witness_counts(F7, (1, 2), (3, 1))
    for l2, l3 in [(1, 1), (2, 5), (3, 3)]:
        inter = sx.sphere_intersection(F7, [(1, 2), (3, 1)], [l2, l3])
        assert len(inter) == counts[l2][l3]


# -- keys: soundness/completeness sample, unordered mode --------------------------------

def test_key_decides_congruence_on_sample():
    rng = instance_rng(59, 0)
    pts = sample_points(rng, F7, 2, 6)
    tris = []
    for tup in itertools.permutations(pts, 3):
        key = sx.classify(F7, tup)
        if key.rank == 2 and all(n != 0 for n in key.norms):
            tris.append((tup, key))
    tris = tris[:40]
    for s1, k1 in tris:
        for s2, k2 in tris:
            assert (sx.orbit_oracle(F7, s1, s2) is not None) == (k1 == k2)


def test_unordered_census():
    census = sx.count_classes(F3, [FULL3] * 3, 2)
    unordered = sx.unordered_census(census)
    assert sum(unordered.values()) == census.total
    assert len(unordered) <= census.class_count
    key = sx.SimplexKey(2, (1, 2, 1))
    canon = sx.unordered_key(key, 2)
    assert canon.norms == (1, 1, 2)


def test_census_csv():
    census = sx.count_classes(F3, [FULL3, FULL3], 1)
    text = sx.census_csv(census)
    lines = text.strip().split("\n")
    assert lines[0] == "key,count"
    assert len(lines) == 1 + census.class_count
    assert lines[1].split(",")[0].count("|") == 1
