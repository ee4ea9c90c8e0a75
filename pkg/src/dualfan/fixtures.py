"""Fixture files shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .fan import Fan
from .serialize import fan_from_obj, parse_json

FAN_FIXTURES = ("split-quadrant.json", "half-marked.json", "conecircle.json")
GROUP_FIXTURES = ("swap.json", "shift1.json", "shift2.json")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("fixtures").joinpath(name)))


def load_json(name: str):
    path = fixture_path(name)
    return parse_json(path.read_text(encoding="utf-8"), str(path))


def load_fixture_fan(name: str) -> Fan:
    return fan_from_obj(load_json(name))
