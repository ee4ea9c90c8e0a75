from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dualfan.errors import InputError, ViolationError
from dualfan.fan import Fan, sigma_subsets
from dualfan.homology import homology_of
from dualfan.toroidal import (DualCell, b_of, b_of_by_joins, boundary_complex, cell_boundary, chart_point_cell,
                              contract_point, dual, dual_chartwise, dual_intersection, dual_of_set, interior_dual,
                              join, real_cube_cells, retract_flow, strata_of_interior_dual)

from oracles import betti_numbers, boundary_cells


def _edges(cells):
    return sum(c.dim == 1 for c in cells)


def test_boundary_complex_matches_exhaustive_enumeration(split_quadrant, square, single_ray, conecircle):
    assert set(boundary_complex(split_quadrant).cells) == boundary_cells(split_quadrant)
    assert len(boundary_complex(split_quadrant).cells) == 9
    assert _edges(boundary_complex(split_quadrant).cells) == 4
    assert len(boundary_complex(square).cells) == 5
    assert _edges(boundary_complex(square).cells) == 2
    assert boundary_complex(single_ray).cells == (DualCell((0,), ()),)
    assert set(boundary_complex(conecircle).cells) == boundary_cells(conecircle)


def test_boundary_complex_on_random_fans_matches_oracle(small_random_fan):
    assert set(boundary_complex(small_random_fan).cells) == boundary_cells(small_random_fan)


def test_split_quadrant_boundary_is_a_path(split_quadrant):
    cells = boundary_complex(split_quadrant).cells
    vertices = [c for c in cells if c.dim == 0]
    degree = {v: 0 for v in vertices}
    for c in cells:
        for face, _ in cell_boundary(c):
            degree[face] += 1
    assert sorted(degree.values()) == [1, 1, 2, 2, 2]


def test_loose_fans_are_rejected(split_quadrant):
    loose = Fan(2, split_quadrant.rays, split_quadrant.cones, "loose", split_quadrant.boundary)
    with pytest.raises(ViolationError):
        boundary_complex(loose)


def test_incidence_export(split_quadrant):
    doc = boundary_complex(split_quadrant).to_json()
    assert len(doc["cells"]) == 9
    # cells are sorted by (dimension, zero set, free set)
    assert doc["cells"][0] == {"z": [0], "f": []}
    edge = doc["cells"].index({"z": [0], "f": [1]})
    assert sorted(doc["incidence"][edge]) == sorted([[doc["cells"].index({"z": [0, 1], "f": []}), 1],
                                                     [doc["cells"].index({"z": [0], "f": []}), -1]])


def test_dual_examples(split_quadrant):
    d1 = dual(split_quadrant, (1,))
    assert len(d1) == 5 and _edges(d1) == 2
    assert dual(split_quadrant, (0,)) == {DualCell((0,), ()), DualCell((0,), (1,)), DualCell((0, 1), ())}
    assert dual(split_quadrant, (0, 1)) == {DualCell((0, 1), ())}
    with pytest.raises(InputError):
        dual(split_quadrant, (0, 2))


def test_dual_equals_chartwise_assembly(small_random_fan):
    for t in small_random_fan.simplices:
        assert dual(small_random_fan, t) == dual_chartwise(small_random_fan, t)


def test_dual_is_closed_under_faces(small_random_fan):
    for t in small_random_fan.simplices:
        cells = dual(small_random_fan, t)
        assert all(f in cells for c in cells for f, _ in cell_boundary(c))


def test_dual_dimension_law(small_random_fan):
    fan = small_random_fan
    for sigma in fan.maximal_cones:
        for t in fan.simplices:
            if set(t) <= set(sigma):
                in_chart = [c for c in dual(fan, t) if set(c.support) <= set(sigma)]
                assert max(c.dim for c in in_chart) == len(sigma) - len(t)


def test_dual_of_set(split_quadrant):
    closed, _ = sigma_subsets(split_quadrant)
    assert dual_of_set(split_quadrant, closed) == dual(split_quadrant, (1,))
    assert dual_of_set(split_quadrant, split_quadrant.simplices) == set(boundary_complex(split_quadrant).cells)
    assert dual_of_set(split_quadrant, []) == frozenset()


def test_interior_dual_matches_definitional_union(small_random_fan):
    closed, _ = sigma_subsets(small_random_fan)
    assert interior_dual(small_random_fan) == dual_of_set(small_random_fan, closed)


def test_join_and_intersection(split_quadrant):
    assert join(split_quadrant, (0,), (1,)) == (0, 1)
    assert join(split_quadrant, (0,), (2,)) is None
    assert join(split_quadrant, (0, 1), (0,)) == (0, 1)
    assert dual_intersection(split_quadrant, (0,), (1,)) == {DualCell((0, 1), ())} == dual(split_quadrant, (0, 1))
    assert dual_intersection(split_quadrant, (0,), (2,)) == frozenset()
    assert dual_intersection(split_quadrant, (1,), (1,)) == dual(split_quadrant, (1,))


def test_join_dual_identity_on_random_fans(small_random_fan):
    fan = small_random_fan
    for t in fan.simplices:
        for w in fan.simplices:
            j = join(fan, t, w)
            assert join(fan, w, t) == j
            assert dual_intersection(fan, t, w) == (dual(fan, j) if j else frozenset())


def test_chart_keys_agree_on_overlaps(small_random_fan):
    fan = small_random_fan
    for s1 in fan.maximal_cones:
        for s2 in fan.maximal_cones:
            for t in fan.simplices:
                c1 = {c for c in dual_chartwise(fan, t) if set(c.support) <= set(s1)}
                c2 = {c for c in dual_chartwise(fan, t) if set(c.support) <= set(s2)}
                common = set(s1) & set(s2)
                assert c1 & c2 == {c for c in c1 if set(c.support) <= common}


def test_b_of_examples(split_quadrant, conecircle):
    assert b_of(split_quadrant, (0,)) == {DualCell((0, 1), ())}
    assert b_of(split_quadrant, (1,)) == dual(split_quadrant, (1,))
    hexagon = b_of(conecircle, (conecircle.ray_id("apex"),))
    assert len(hexagon) == 12 and _edges(hexagon) == 6
    assert betti_numbers(hexagon, cell_boundary, lambda c: c.dim) == [1, 1]


def test_b_of_by_joins_and_monotonicity(small_random_fan):
    fan = small_random_fan
    for t in fan.simplices:
        assert b_of(fan, t) == b_of_by_joins(fan, t)
        assert b_of(fan, t) == dual(fan, t) & interior_dual(fan)
        for s in fan.simplices:
            if set(t) <= set(s):
                assert b_of(fan, s) <= b_of(fan, t)


def test_stratification_of_interior_dual(small_random_fan):
    strata = strata_of_interior_dual(small_random_fan)
    cells = interior_dual(small_random_fan)
    union = set()
    for t, part in strata.items():
        assert not union & part
        union |= part
    assert union == cells


def test_duals_are_acyclic(split_quadrant, small_random_fan):
    for fan in (split_quadrant, small_random_fan):
        for t in fan.simplices:
            assert homology_of(dual(fan, t), reduced=True).acyclic
        assert homology_of(real_cube_cells(fan), reduced=True).acyclic


def test_contract_point(split_quadrant):
    assert contract_point(split_quadrant, (1,), (0, 1)) == contract_point(split_quadrant, (1,), (1, 2)) == DualCell((1,), ())
    assert contract_point(split_quadrant, (0, 1), (0, 1)) == DualCell((0, 1), ())
    assert contract_point(split_quadrant, (0,), (0, 1)) in dual(split_quadrant, (0,))
    with pytest.raises(InputError):
        contract_point(split_quadrant, (0,), (1, 2))


def test_retract_flow_examples():
    p = {0: Fraction(7, 10), 1: Fraction(0)}
    assert retract_flow(p, 0, [0, 1]) == p
    assert retract_flow(p, 1, [0, 1]) == {0: 1, 1: 1}
    assert retract_flow(p, Fraction(1, 2), [0]) == {0: 1, 1: 0}
    with pytest.raises(InputError):
        retract_flow(p, 2, [0])


@given(st.lists(st.fractions(0, 1), min_size=3, max_size=3), st.fractions(0, 1), st.sets(st.sampled_from([0, 1, 2])))
def test_flow_keeps_fixed_coordinates_and_dual_faces(coords, s, moving):
    point = dict(enumerate(coords))
    out = retract_flow(point, s, moving)
    assert all(out[r] == point[r] for r in point if r not in moving)
    assert all(out[r] >= point[r] for r in point)
    # the zero set of the fixed coordinates survives, so dual faces are closed under the flow
    fixed_zero = {r for r in point if point[r] == 0 and r not in moving}
    assert fixed_zero <= set(chart_point_cell(out).z)
    assert retract_flow(point, 1, moving) == {r: (1 if r in moving else point[r]) for r in point}
