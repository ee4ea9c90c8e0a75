"""JSON interchange for fans and group generators.

Fan documents use the keys ``dim``, ``rays``, ``cones``, ``mode``,
``boundary``, ``colors``, ``full_boundary`` and optionally ``names`` (a
name → ray index table so rays can be referred to symbolically).  The ray
table keeps its input order because cones refer to rays by index; every
index list is written sorted.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InputError
from .fan import Fan, face_closure

_FAN_KEYS = {"dim", "rays", "cones", "mode", "boundary", "colors", "full_boundary", "names"}


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, compact separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def parse_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}",
                         witness={"line": exc.lineno, "column": exc.colno}) from exc


def _int_list(value: Any, what: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise InputError(f"{what} must be an array of integers")
    return value


def fan_from_obj(doc: Any) -> Fan:
    if not isinstance(doc, dict):
        raise InputError("fan document must be a JSON object")
    extra = set(doc) - _FAN_KEYS
    if extra:
        raise InputError(f"unknown fan keys {sorted(extra)}")
    for key in ("dim", "rays", "cones"):
        if key not in doc:
            raise InputError(f"fan document lacks {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise InputError("dim must be an integer")
    if not isinstance(doc["rays"], list) or not isinstance(doc["cones"], list):
        raise InputError("rays and cones must be arrays")
    rays = [tuple(_int_list(r, "ray")) for r in doc["rays"]]
    cones = [tuple(_int_list(c, "cone")) for c in doc["cones"]]
    mode = doc.get("mode", "strict")
    if mode not in ("strict", "loose"):
        raise InputError(f"mode must be 'strict' or 'loose', got {mode!r}")
    boundary = doc.get("boundary")
    if boundary is not None:
        boundary = frozenset(_int_list(boundary, "boundary"))
    colors = doc.get("colors")
    if colors is not None:
        if not isinstance(colors, dict):
            raise InputError("colors must be an object label -> ray indices")
        colors = {k: _int_list(v, "color") for k, v in colors.items()}
    names = doc.get("names")
    if names is not None:
        if not isinstance(names, dict) or not all(isinstance(v, int) for v in names.values()):
            raise InputError("names must be an object name -> ray index")
    full_boundary = doc.get("full_boundary", False)
    if not isinstance(full_boundary, bool):
        raise InputError("full_boundary must be a boolean")
    fan = Fan(dim, tuple(rays), frozenset(cones), mode, boundary, colors, full_boundary, names)
    if mode == "strict":
        fan = face_closure(fan)
    return fan


def fan_to_obj(fan: Fan) -> dict:
    cones = fan.maximal_cones if fan.mode == "strict" else fan.simplices
    doc: dict[str, Any] = {
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "cones": [list(c) for c in cones],
        "mode": fan.mode,
        "full_boundary": fan.full_boundary,
    }
    if fan.boundary is not None:
        doc["boundary"] = sorted(fan.boundary)
    if fan.colors is not None:
        doc["colors"] = {label: list(rays) for label, rays in fan.colors}
    if fan.names is not None:
        doc["names"] = dict(fan.names)
    return doc


def load_fan(path: str) -> Fan:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return fan_from_obj(parse_json(text, path))


def group_from_obj(doc: Any) -> tuple[list[list[list[int]]], int | None]:
    """Return ``(generators, bound)``; ``bound`` is ``None`` for closure."""
    if not isinstance(doc, dict) or "generators" not in doc:
        raise InputError("group document must be an object with 'generators'")
    gens = doc["generators"]
    if not isinstance(gens, list):
        raise InputError("generators must be an array of matrices")
    out = []
    for g in gens:
        if not isinstance(g, list) or not g:
            raise InputError("each generator must be a nonempty matrix")
        out.append([_int_list(row, "matrix row") for row in g])
    bound = doc.get("bound", "closure")
    if bound == "closure":
        return out, None
    if not isinstance(bound, int) or isinstance(bound, bool) or bound < 0:
        raise InputError("bound must be a nonnegative integer or 'closure'")
    return out, bound
