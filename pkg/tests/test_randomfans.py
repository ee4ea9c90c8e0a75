from hypothesis import given, strategies as st

from dualfan.fan import geometric_boundary, in_regime, validate_fan
from dualfan.randomfans import MAX_CONES, random_fan, random_fans
from dualfan.serialize import fan_to_obj


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 4]))
def test_random_fans_are_valid_and_in_regime(seed, dim):
    fan = random_fan(seed, dim=dim, max_cones=16)
    assert fan.dim == dim
    assert validate_fan(fan).ok
    assert fan.boundary == geometric_boundary(fan.rays)
    assert fan.interior_rays
    assert in_regime(fan)
    assert len(fan.maximal_cones) <= 16


def test_default_bound_and_dimension_cycle():
    fans = random_fans(6, seed=7)
    assert [f.dim for f in fans] == [2, 3, 4, 2, 3, 4]
    assert all(len(f.maximal_cones) <= MAX_CONES for f in fans)


def test_generation_is_seeded():
    assert fan_to_obj(random_fan(42)) == fan_to_obj(random_fan(42))
    assert [fan_to_obj(f) for f in random_fans(3, 5)] == [fan_to_obj(f) for f in random_fans(3, 5)]
    assert fan_to_obj(random_fan(1, dim=3)) != fan_to_obj(random_fan(2, dim=3))


def test_every_maximal_cone_is_full_dimensional():
    for fan in random_fans(9, seed=3):
        assert all(len(sigma) == fan.dim for sigma in fan.maximal_cones)
