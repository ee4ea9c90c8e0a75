import itertools

import pytest
from hypothesis import given, strategies as st

from dualfan.errors import InputError, ViolationError
from dualfan.fan import (Fan, PosetInterval, barycentric_subdivision, boundary_cube_faces, cubical_decomposition,
                         cubical_to_dual, face_closure, face_poset, geometric_boundary, in_regime,
                         is_closed_orbit_set, orbit_poset, require_valid, sigma_R_c, sigma_subsets, star,
                         validate_fan)
from dualfan.randomfans import random_fan
from dualfan.serialize import fan_from_obj

from oracles import powerset


def _fan(rays, cones, **kw):
    return fan_from_obj({"dim": len(rays[0]), "rays": rays, "cones": cones, **kw})


# -- validation ---------------------------------------------------------------


def test_split_quadrant_is_valid(split_quadrant):
    report = validate_fan(split_quadrant)
    assert report.ok
    assert report.to_json() == {"valid": True, "repairable": False, "violations": []}


def test_overlapping_cones_violate_a2_with_witness_point():
    # cone(e1, e2) contains cone(e1 + e2, e2)
    fan = _fan([[1, 0], [0, 1], [1, 1]], [[0, 1], [2, 1]])
    report = validate_fan(fan)
    kinds = {v.kind for v in report.violations}
    assert kinds == {"A2"}
    point = report.violations[0].detail["point"]
    assert len(point) == 2


def test_two_triangles_crossing_in_the_plane():
    # cone(e1, e2) and cone((1,2), (2,1)) overlap without sharing rays
    fan = _fan([[1, 0], [0, 1], [1, 2], [2, 1]], [[0, 1], [2, 3]])
    assert not validate_fan(fan).ok


def test_missing_face_is_repairable():
    fan = Fan(2, ((1, 0), (0, 1)), frozenset({(0, 1), (0,)}), "strict")
    report = validate_fan(fan)
    assert report.repairable
    assert [v.kind for v in report.violations] == ["A1"]
    assert validate_fan(face_closure(fan)).ok


def test_non_primitive_and_duplicate_rays():
    fan = Fan(2, ((2, 0), (0, 1), (0, 1)), frozenset({(0,), (1,), (2,)}), "strict")
    kinds = sorted(v.kind for v in validate_fan(fan).violations)
    assert kinds == ["duplicate-ray", "non-primitive"]


def test_dependent_rays_in_a_cone():
    fan = _fan([[1, 0, 0], [0, 1, 0], [1, 1, 0]], [[0, 1, 2]])
    assert [v.kind for v in validate_fan(fan).violations] == ["dependent"]


def test_loose_mode_checks_shared_face():
    # two cones sharing ray 1 only along a face that is absent from the loose list
    fan = Fan(2, ((1, 0), (1, 1), (0, 1)), frozenset({(0, 1), (1, 2)}), "loose")
    report = validate_fan(fan)
    assert {v.kind for v in report.violations} == {"A2'"}
    fixed = Fan(2, fan.rays, fan.cones | {(1,)}, "loose")
    assert validate_fan(fixed).ok


def test_require_valid_raises_violation():
    fan = _fan([[1, 0], [0, 1], [1, 1]], [[0, 1], [2, 1]])
    with pytest.raises(ViolationError):
        require_valid(fan)


def test_color_on_boundary_ray_is_rejected(split_quadrant):
    fan = Fan(2, split_quadrant.rays, split_quadrant.cones, "strict", split_quadrant.boundary, {"red": [0]})
    assert [v.kind for v in validate_fan(fan).violations] == ["color"]


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_random_fans_are_valid(seed, dim):
    fan = random_fan(seed, dim=dim, max_cones=10)
    assert validate_fan(fan).ok
    assert len(fan.maximal_cones) <= 10


# -- posets ---------------------------------------------------------------------


def test_face_poset_of_split_quadrant(split_quadrant):
    p = face_poset(split_quadrant)
    assert len(p.elements) == 5
    assert ((0,), (0, 1)) in p.covers and len(p.covers) == 4


def test_orbit_poset_of_split_quadrant(split_quadrant):
    p = orbit_poset(split_quadrant)
    assert len(p.orbits) == 6
    assert p.closure[(1,)] == ((1,), (0, 1), (1, 2))
    assert p.closure[()] == p.orbits
    assert len(p.patch[(0, 1)]) == 4


def test_orbit_codim_monotone_along_closure(small_random_fan):
    p = orbit_poset(small_random_fan)
    for c in p.orbits:
        for o in p.closure[c]:
            assert o == c or p.codim[o] > p.codim[c]


# -- stars and marked subcomplexes --------------------------------------------------


def test_star_examples(split_quadrant):
    assert star(split_quadrant, [(1,)]) == {(1,), (0, 1), (1, 2)}
    assert star(split_quadrant, split_quadrant.simplices) == set(split_quadrant.simplices)
    assert star(split_quadrant, []) == frozenset()
    with pytest.raises(InputError):
        star(split_quadrant, [(0, 2)])


def test_closed_orbit_sets(split_quadrant):
    assert is_closed_orbit_set(split_quadrant, [(1,), (0, 1), (1, 2)])
    assert not is_closed_orbit_set(split_quadrant, [(1,)])
    # a proper subfan is never closed
    assert not is_closed_orbit_set(split_quadrant, [(0,), (1,), (0, 1)])


def test_sigma_subsets_examples(split_quadrant, half_marked):
    assert sigma_subsets(split_quadrant) == ({(1,)}, {(1,), (0, 1), (1, 2)})
    assert sigma_subsets(half_marked) == ({(1,)}, {(1,), (0, 1)})
    all_interior = Fan(2, split_quadrant.rays, split_quadrant.cones, "strict", frozenset())
    closed, open_ = sigma_subsets(all_interior)
    assert closed == open_ == set(split_quadrant.simplices)


def test_interior_part_is_star_of_all_interior(small_random_fan):
    closed, open_ = sigma_subsets(small_random_fan)
    assert closed <= open_ <= set(small_random_fan.simplices)
    assert star(small_random_fan, closed) == open_


@given(st.sets(st.sampled_from([(0,), (1,), (2,), (0, 1), (1, 2)])))
def test_star_is_extensive_on_vertices_and_idempotent_on_vertex_sets(s):
    fan = fan_from_obj({"dim": 2, "rays": [[1, 0], [1, 1], [0, 1]], "cones": [[0, 1], [1, 2]]})
    out = star(fan, s)
    assert {t for t in s if len(t) == 1} <= out
    verts = {v for t in out for v in t if (v,) in out}
    assert {v for t in star(fan, out) for v in t if (v,) in star(fan, out)} == verts


def test_sigma_r_c_examples():
    fan = Fan(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), frozenset(powerset((0, 1, 2))), "strict",
              frozenset(), {"1": [0, 2], "2": [1], "3": []})
    assert sigma_R_c(fan, ["1", "2"]) == {(0, 1), (1, 2), (0, 1, 2)}
    assert sigma_R_c(fan, ["1"]) == {(0,), (2,), (0, 2)}
    assert sigma_R_c(fan, ["3"]) == frozenset()
    with pytest.raises(InputError):
        sigma_R_c(fan, ["missing"])


@given(st.lists(st.sampled_from(["a", "b", "c", None]), min_size=4, max_size=4))
def test_colored_subsets_partition_fully_colored_simplices(labels):
    rays = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
    cones = frozenset(f for c in [(0, 1, 3), (1, 2, 3), (0, 2, 3)] for f in powerset(c))
    colors = {k: [i for i, lab in enumerate(labels) if lab == k] for k in "abc"}
    fan = Fan(3, rays, cones, "strict", frozenset(), colors)
    colored = {t for t in fan.simplices if all(labels[r] is not None for r in t)}
    parts = [sigma_R_c(fan, s) for k in (1, 2, 3) for s in itertools.combinations("abc", k)]
    assert sum(len(p) for p in parts) == len(colored)
    assert set().union(*parts) == colored


# -- geometry of the marking ---------------------------------------------------------


def test_geometric_boundary_and_regime(split_quadrant, conecircle, half_marked):
    assert geometric_boundary(split_quadrant.rays) == split_quadrant.boundary
    assert in_regime(split_quadrant)
    # the cone over a triangle has every circle ray on its boundary, so the
    # marking of the fixture is not the geometric one
    assert geometric_boundary(conecircle.rays) == {1, 2, 3}
    assert not in_regime(conecircle)
    assert not in_regime(half_marked)


# -- subdivision and cubes ----------------------------------------------------------


def test_barycentric_subdivision_counts(split_quadrant):
    edge = fan_from_obj({"dim": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]]})
    sd = barycentric_subdivision(edge)
    assert (len(sd.rays), sum(len(s) == 2 for s in sd.simplices)) == (3, 2)
    tri = fan_from_obj({"dim": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "cones": [[0, 1, 2]]})
    sd = barycentric_subdivision(tri)
    assert len(sd.rays) == 7 and sum(len(s) == 3 for s in sd.simplices) == 6
    sd = barycentric_subdivision(split_quadrant)
    counts = [sum(len(s) == k for s in sd.simplices) for k in (1, 2, 3)]
    assert counts == [5, 4, 0]
    assert validate_fan(sd).ok


def test_barycentric_marking(split_quadrant):
    sd = barycentric_subdivision(split_quadrant)
    interior = {split_quadrant.simplices[i] for i in sd.interior_rays}
    assert interior == {(1,), (0, 1), (1, 2)}


def test_cubical_decomposition_counts():
    assert len(cubical_decomposition((0,))) == 1
    one = cubical_decomposition((0, 1))
    assert [c.dim for c in one].count(1) == 2 and [c.dim for c in one].count(0) == 3
    two = cubical_decomposition((0, 1, 2))
    assert [sum(c.dim == k for c in two) for k in (0, 1, 2)] == [7, 9, 3]


@pytest.mark.parametrize("n", range(1, 6))
def test_cubical_decomposition_euler_characteristic(n):
    cells = cubical_decomposition(tuple(range(n)))
    assert sum((-1) ** c.dim for c in cells) == 1
    assert len(cells) == 3 ** n - 2 ** n


@pytest.mark.parametrize("n", range(1, 6))
def test_cubical_to_dual_is_graded_bijection(n):
    ambient = tuple(range(n))
    cells = cubical_decomposition(ambient)
    images = [cubical_to_dual(c, ambient) for c in cells]
    assert len(set(images)) == len(images)
    assert set(images) == set(boundary_cube_faces(ambient))
    assert all(i.dim == c.dim for i, c in zip(images, cells))
    # incidence is preserved: a face of an interval maps to a face of its image
    for c, img in zip(cells, images):
        for d, other in zip(cells, images):
            if set(c.lower) >= set(d.lower) and set(c.upper) <= set(d.upper):
                assert set(img.z) >= set(other.z) and set(img.o) >= set(other.o)


def test_cubical_to_dual_examples():
    assert cubical_to_dual(PosetInterval((0,), (0,)), (0, 1)) == ((0,), (1,), ())
    assert cubical_to_dual(PosetInterval((0,), (0, 1)), (0, 1, 2)) == ((0,), (2,), (1,))
    # the barycenter goes to the corner at the origin
    assert cubical_to_dual(PosetInterval((0, 1), (0, 1)), (0, 1)) == ((0, 1), (), ())
    with pytest.raises(InputError):
        cubical_to_dual(PosetInterval((0,), (0, 3)), (0, 1))


@given(st.permutations([0, 1, 2, 3]))
def test_cubical_to_dual_is_equivariant(perm):
    ambient = (0, 1, 2, 3)
    for c in cubical_decomposition(ambient):
        moved = PosetInterval(tuple(sorted(perm[x] for x in c.lower)), tuple(sorted(perm[x] for x in c.upper)))
        image = cubical_to_dual(c, ambient)
        assert cubical_to_dual(moved, ambient) == tuple(tuple(sorted(perm[x] for x in part)) for part in image)
