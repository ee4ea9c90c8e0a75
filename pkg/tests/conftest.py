import pytest
from hypothesis import settings

from dualfan.fixtures import load_fixture_fan
from dualfan.randomfans import random_fan
from dualfan.serialize import fan_from_obj

settings.register_profile("default", max_examples=30, deadline=None)
settings.load_profile("default")


@pytest.fixture
def split_quadrant():
    return load_fixture_fan("split-quadrant.json")


@pytest.fixture
def conecircle():
    return load_fixture_fan("conecircle.json")


@pytest.fixture
def half_marked():
    return load_fixture_fan("half-marked.json")


@pytest.fixture
def square():
    """A single unimodular 2-cone with both rays on the boundary."""
    return fan_from_obj({"dim": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]], "boundary": [0, 1]})


@pytest.fixture
def single_ray():
    return fan_from_obj({"dim": 1, "rays": [[1]], "cones": [[0]], "boundary": []})


@pytest.fixture(params=range(8))
def small_random_fan(request):
    return random_fan(100 + request.param, dim=2 + request.param % 3, max_cones=12)
