"""The acceptance suite: nine checks shared by ``dualfan verify`` and the tests.

Every criterion is a function of ``(seed, trials, jobs)`` returning a
:class:`CriterionResult` whose ``detail`` is canonical JSON data.  Nothing in
``detail`` depends on wall time, so repeated runs with the same seed produce
identical bytes; timings are attached separately.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .errors import ViolationError
from .fan import (Fan, barycentric_subdivision, boundary_cube_faces, cubical_decomposition, cubical_to_dual,
                  faces, in_regime, sigma_R_c, sigma_subsets, star)
from .fixtures import load_fixture_fan, load_json
from .groups import (diagonality_check, enumerate_group, explicit_model_from_obj, fan_elements, fan_model,
                     freeness_on_interior, quotient_lcm)
from .homology import chain_complex_of, homology_of
from .lcm import (FULL, EXCENTRIC, CellModel, basechange_check, group_by_dual, group_by_simplex, lcm_boundary,
                  direction_stratum, lcm_definitional, simplex_model)
from .limits import (DEFAULT_TOL, classify_sequence, core_limit, geometric_samples, limit_pair, realizing_curve,
                     sample_verify_lcm)
from .randomfans import random_fans
from .serialize import dumps, fan_from_obj, fan_to_obj
from .toroidal import b_of, boundary_complex, dual, join, real_cube_cells

RANDOM_FANS = 20
DEFAULT_TRIALS = 200
PER_FAN_SECONDS = 10.0
HOMOLOGY_SECONDS = 5.0


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    runtime_ms: int = 0

    def line(self) -> str:
        return f"criterion {self.id} ({self.name}): {'PASS' if self.passed else 'FAIL'}"

    def to_json(self, timings: bool = False) -> dict:
        out = {"id": self.id, "name": self.name, "pass": self.passed, "detail": self.detail}
        if timings:
            out["runtime_ms"] = self.runtime_ms
        return out


# ---------------------------------------------------------------------------
# Test fans


def fixture_fans() -> dict[str, Fan]:
    names = ("split_quadrant", "half_marked", "conecircle")
    return {name: load_fixture_fan(name.replace("_", "-") + ".json") for name in names}


def test_fans(seed: int) -> dict[str, Fan]:
    fans = fixture_fans()
    for i, fan in enumerate(random_fans(RANDOM_FANS, seed)):
        fans[f"random{i:02d}"] = fan
    return fans


def _sampling_fans(seed: int) -> dict[str, Fan]:
    fans = test_fans(seed)
    return {k: v for k, v in fans.items() if k == "split_quadrant" or k.startswith("random")}


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(*x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*items)))


def _sample_one(name: str, fan: Fan, variant: str, trials: int, seed: int) -> tuple[str, dict, float]:
    start = time.perf_counter()
    report = sample_verify_lcm(fan, variant, trials, seed)
    return name, report.to_json(), time.perf_counter() - start


def _sampling(variant: str, seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    fans = _sampling_fans(seed)
    items = [(name, fan, variant, trials, seed) for name, fan in fans.items()]
    rows = _map(_sample_one, items, jobs)
    failures = []
    slow = []
    for name, report, seconds in rows:
        if report["discrepancies"] or report["cells_expected"] != report["cells_realized"]:
            failures.append({"fan": name, "report": report})
        if seconds >= PER_FAN_SECONDS:
            slow.append(name)
    detail = {"fans": len(rows), "cells": sum(r["cells_expected"] for _, r, _ in rows),
              "trials_per_fan": trials, "failures": failures[:3], "over_time_budget": slow}
    return not failures and not slow, detail


# ---------------------------------------------------------------------------
# Criteria


def criterion_1(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    return _sampling(FULL, seed, trials, jobs)


def criterion_2(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    ok, detail = _sampling(EXCENTRIC, seed, trials, jobs)
    mismatches = []
    for name, fan in test_fans(seed).items():
        for variant in (FULL, EXCENTRIC):
            if set(lcm_boundary(fan, variant).cells) != lcm_definitional(fan, variant):
                mismatches.append({"fan": name, "variant": variant})
    detail["closed_form_mismatches"] = mismatches
    return ok and not mismatches, detail


def criterion_3(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    pairs = 0
    bad = []
    for name, fan in test_fans(seed).items():
        duals = {t: dual(fan, t) for t in fan.simplices}
        for t, w in itertools.combinations_with_replacement(fan.simplices, 2):
            pairs += 1
            j = join(fan, t, w)
            expected = duals[j] if j is not None else frozenset()
            if duals[t] & duals[w] != expected:
                bad.append({"fan": name, "t": list(t), "w": list(w)})
    return not bad, {"pairs": pairs, "failures": bad[:5]}


def criterion_4(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    bad = []
    checked = 0
    for name, fan in test_fans(seed).items():
        for variant in (FULL, EXCENTRIC):
            lcm = lcm_boundary(fan, variant)
            for b, fiber in group_by_dual(lcm).items():
                checked += 1
                if fiber != tuple(faces(b.z)):
                    bad.append({"fan": name, "variant": variant, "over": b.to_json()})
            by_simplex = group_by_simplex(lcm)
            for a in fan.simplices:
                checked += 1
                expected = dual(fan, a) if variant == FULL else b_of(fan, a)
                if by_simplex.get(a, frozenset()) != expected:
                    bad.append({"fan": name, "variant": variant, "over": list(a)})
    return not bad, {"strata": checked, "failures": bad[:5]}


def criterion_5(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    start = time.perf_counter()
    bad = []
    complexes = 0
    for name, fan in test_fans(seed).items():
        regime = in_regime(fan)
        for t in fan.simplices:
            targets = [("dual", dual(fan, t))]
            if regime:
                targets.append(("b_of", b_of(fan, t)))
            for kind, cells in targets:
                if not cells:
                    continue
                complexes += 1
                if not homology_of(cells, reduced=True).acyclic:
                    bad.append({"fan": name, "kind": kind, "t": list(t)})
        complexes += 1
        if not homology_of(real_cube_cells(fan), reduced=True).acyclic:
            bad.append({"fan": name, "kind": "real_cube"})
    circle = load_fixture_fan("conecircle.json")
    apex = circle.ray_id("apex")
    betti = list(homology_of(b_of(circle, (apex,))).betti)
    elapsed = time.perf_counter() - start
    return (not bad and betti == [1, 1] and elapsed < HOMOLOGY_SECONDS,
            {"complexes": complexes, "failures": bad[:5], "cone_over_circle_betti": betti})


def criterion_6(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    window = load_json("line-window.json")
    unit = enumerate_group([[[1, 1], [0, 1]]], 3)
    even = enumerate_group([[[1, 2], [0, 1]]], 3)
    unit_report = diagonality_check(explicit_model_from_obj(window, unit.elements), "strong")
    unit_plain = diagonality_check(explicit_model_from_obj(window, unit.elements), "diagonal")
    expected_witness = {"pair": [[0], ["1/2"]], "element": "shift+1"}
    even_model = explicit_model_from_obj(window, even.elements)
    even_strong = diagonality_check(even_model, "strong")
    try:
        quotient_lcm(explicit_model_from_obj(window, unit.elements))
        refused = False
    except ViolationError:
        refused = True

    split_quadrant = load_fixture_fan("split-quadrant.json")
    swap = fan_elements(split_quadrant, enumerate_group([[[0, 1], [1, 0]]], None, dim=2).elements)
    checks = {
        "unit_shift_fails": not unit_report.holds and expected_witness in unit_report.witnesses,
        "unit_shift_not_diagonal": not unit_plain.holds,
        "unit_shift_quotient_refused": refused,
        "even_shift_strong": even_strong.holds,
        "even_shift_quotient": quotient_lcm(even_model, complete=even.complete).verified,
    }
    for variant in (FULL, EXCENTRIC):
        model = fan_model(split_quadrant, swap, variant)
        checks[f"split_quadrant_swap_strong_{variant}"] = diagonality_check(model, "strong").holds
        free = freeness_on_interior(split_quadrant, swap) if variant == EXCENTRIC else None
        report = quotient_lcm(model, free)
        checks[f"split_quadrant_swap_quotient_{variant}"] = report.verified
        checks[f"split_quadrant_swap_orbits_{variant}"] = report.lcm_orbits
    return all(v is not False for v in checks.values()), checks


def _modification_pattern() -> tuple[bool, dict]:
    base_fan = fan_from_obj({"dim": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]]})
    upstairs_fan = load_fixture_fan("split-quadrant.json")
    directions = {(p, q): (p, q) for p in range(4) for q in range(4) if p or q}
    base = simplex_model(base_fan, directions)
    upstairs = simplex_model(upstairs_fan, directions)
    to_base = {t: direction_stratum(base_fan, _sum_direction(upstairs_fan, t)) for t in upstairs.cells}
    result = basechange_check(base, (upstairs, to_base), (upstairs, to_base))
    witness = [list(x) for x in result.witness] if result.witness else None
    return (not result.holds and witness is not None,
            {"holds": result.holds, "witness": witness, "lcm": len(result.lcm), "fiber_product": len(result.fiber_product)})


def _sum_direction(fan: Fan, t: tuple) -> tuple:
    return tuple(sum(fan.rays[r][k] for r in t) for k in range(fan.dim))


def _trivial_factor_pattern() -> tuple[bool, dict]:
    fan = load_fixture_fan("split-quadrant.json")
    lcm_cells = lcm_boundary(fan, FULL).cells
    factor_fan = fan_from_obj({"dim": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]]})
    factor_dirs = {"u": (1, 0), "v": (0, 1), "uv": (1, 1)}
    factor = simplex_model(factor_fan, factor_dirs)
    sampled = {}
    for i, cell in enumerate(lcm_cells):
        got = classify_sequence(geometric_samples(realizing_curve(fan, cell)), DEFAULT_TOL).cell
        if got is None:
            return False, {"unclassified": cell.to_json()}
        sampled[i] = got
    escapes = [(i, f) for i in sampled for f in factor_dirs]
    base = CellModel(frozenset(fan.simplices), {e: sampled[e[0]].a for e in escapes})
    product = CellModel(frozenset((t, c) for t in fan.simplices for c in factor.cells),
                        {e: (sampled[e[0]].a, factor.limits[e[1]]) for e in escapes})
    third = CellModel(frozenset(lcm_cells), {e: sampled[e[0]] for e in escapes})
    first_map = {c: c[0] for c in product.cells}
    third_map = {c: c.a for c in third.cells}
    result = basechange_check(base, (product, first_map), (third, third_map))
    return (result.holds and result.lcm == result.fiber_product,
            {"holds": result.holds, "lcm": len(result.lcm), "fiber_product": len(result.fiber_product)})


def criterion_7(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    mod_ok, mod = _modification_pattern()
    triv_ok, triv = _trivial_factor_pattern()
    return mod_ok and triv_ok, {"strict_modification": mod, "trivial_factor": triv}


def criterion_8(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    bad = []
    cells = 0
    for name, fan in test_fans(seed).items():
        if not fan.interior_rays:
            continue
        for cell in lcm_boundary(fan, EXCENTRIC).cells:
            cells += 1
            curve = realizing_curve(fan, cell)
            exact = limit_pair(curve)
            points = geometric_samples(curve)
            sampled = classify_sequence(points, DEFAULT_TOL)
            core = core_limit(fan, points, DEFAULT_TOL)
            agree = (exact.cell == cell and sampled.cell == cell and core.kind == "boundary"
                     and core.radius_escapes and core.stratum == exact.linear.stratum)
            if not agree:
                bad.append({"fan": name, "cell": cell.to_json(), "core": core.to_json()})
    return not bad, {"cells": cells, "failures": bad[:5]}


def _color_partition_ok(fan: Fan) -> bool:
    labels = sorted({label for label, _ in fan.colors or ()})
    colored = {t for t in fan.simplices if all(r in fan.ray_colors for r in t)}
    seen: set = set()
    for k in range(1, len(labels) + 1):
        for subset in itertools.combinations(labels, k):
            part = sigma_R_c(fan, subset)
            if part & seen:
                return False
            seen |= part
    return seen == colored


def _colored_fans(seed: int) -> list[Fan]:
    rng = random.Random(seed)
    out = []
    for fan in random_fans(6, seed + 1):
        labels = ["red", "green", "blue"]
        colors = {label: [] for label in labels}
        for r in range(len(fan.rays)):
            if rng.random() < 0.8:
                colors[rng.choice(labels)].append(r)
        out.append(Fan(fan.dim, fan.rays, fan.cones, fan.mode, fan.boundary, colors))
    return out


def criterion_9(seed: int, trials: int, jobs: int) -> tuple[bool, dict]:
    fans = test_fans(seed)
    checks: dict[str, bool] = {}
    checks["star_of_interior"] = all(star(f, sigma_subsets(f)[0]) == sigma_subsets(f)[1] for f in fans.values())
    checks["color_partition"] = all(_color_partition_ok(f) for f in _colored_fans(seed))

    graded = True
    for n in range(1, 6):
        ambient = tuple(range(n))
        images = [cubical_to_dual(c, ambient) for c in cubical_decomposition(ambient)]
        dims_ok = all(i.dim == c.dim for i, c in zip(images, cubical_decomposition(ambient)))
        graded &= dims_ok and len(set(images)) == len(images) and set(images) == set(boundary_cube_faces(ambient))
    checks["cubical_bijection"] = graded

    boundary_ok = True
    for fan in fans.values():
        for cells in (boundary_complex(fan).cells, real_cube_cells(fan), lcm_boundary(fan, FULL).cells,
                      lcm_boundary(fan, EXCENTRIC).cells, barycentric_subdivision(fan).simplices):
            try:
                chain_complex_of(cells)
            except ViolationError:
                boundary_ok = False
    checks["boundary_squared_zero"] = boundary_ok

    round_trip = True
    for fan in fans.values():
        text = dumps(fan_to_obj(fan))
        again = fan_from_obj(json.loads(text))
        round_trip &= again == fan and dumps(fan_to_obj(again)) == text
    checks["json_round_trip"] = round_trip

    first = dumps(_seeded_reports(seed, trials))
    second = dumps(_seeded_reports(seed, trials))
    checks["seeded_reports_deterministic"] = first == second
    return all(checks.values()), checks


def _seeded_reports(seed: int, trials: int) -> list:
    fans = _sampling_fans(seed)
    return [sample_verify_lcm(fans[name], EXCENTRIC, min(trials, 50), seed).to_json()
            for name in sorted(fans)[:4]]


CRITERIA: dict[int, tuple[str, Callable[[int, int, int], tuple[bool, dict]]]] = {
    1: ("canonical duality by curve limits", criterion_1),
    2: ("excentric formula", criterion_2),
    3: ("join and dual identity", criterion_3),
    4: ("fiber formulas", criterion_4),
    5: ("acyclicity certificates", criterion_5),
    6: ("diagonality and quotients", criterion_6),
    7: ("basechange patterns", criterion_7),
    8: ("core cross-section", criterion_8),
    9: ("structural suites", criterion_9),
}


def run_criterion(cid: int, seed: int = 7, trials: int = DEFAULT_TRIALS, jobs: int = 1) -> CriterionResult:
    name, fn = CRITERIA[cid]
    start = time.perf_counter()
    try:
        passed, detail = fn(seed, trials, jobs)
    except ViolationError as exc:  # a violation anywhere is a failure, not a crash
        passed, detail = False, {"error": str(exc), "witness": exc.witness}
    return CriterionResult(cid, name, passed, detail, int((time.perf_counter() - start) * 1000))


def run_all(seed: int = 7, trials: int = DEFAULT_TRIALS, jobs: int = 1,
            only: list[int] | None = None) -> list[CriterionResult]:
    return [run_criterion(cid, seed, trials, jobs) for cid in (only or sorted(CRITERIA))]


def summary(results: list[CriterionResult], seed: int, trials: int, timings: bool = False) -> dict:
    return {"criteria": [r.to_json(timings) for r in results], "seed": seed, "trials": trials,
            "passed": all(r.passed for r in results)}
