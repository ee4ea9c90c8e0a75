"""Command-line front end.

Every subcommand prints one canonical JSON document (sorted keys, compact)
and exits with 0 on success, 1 when a mathematical check fails or an
operation is refused, and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Any, Callable

from . import acceptance
from .errors import DualFanError, InputError, ViolationError
from .fan import (Fan, barycentric_subdivision, boundary_cube_faces, cubical_decomposition, cubical_to_dual,
                  face_poset, orbit_poset, require_valid, sigma_R_c, sigma_subsets, star, validate_fan)
from .fixtures import fixture_path
from .groups import (ExplicitModel, check_automorphism, diagonality_check, enumerate_group,
                     explicit_model_from_obj, fan_model, freeness_on_interior, neat_surrogate, quotient_complex,
                     quotient_lcm)
from .homology import homology_of
from .lcm import EXCENTRIC, fibers_to_json, lcm_boundary, normalize_variant
from .limits import (DEFAULT_SAMPLES, DEFAULT_TOL, classify_sequence, core_limit, curve_from_obj,
                     geometric_samples, limit_pair, sample_verify_lcm)
from .serialize import dumps, fan_from_obj, fan_to_obj, group_from_obj, parse_json
from .toroidal import DualComplex, b_of, boundary_complex, dual, real_cube_cells, sort_cells

EXIT_OK, EXIT_VIOLATION, EXIT_MALFORMED = 0, 1, 2


class Refusal(DualFanError):
    """An operation declined because its precondition fails; exits with 1."""


# ---------------------------------------------------------------------------
# Input helpers


def _resolve(path: str) -> str:
    """Use a packaged fixture when ``path`` is a bare fixture name not on disk."""
    if os.path.exists(path) or os.path.dirname(path):
        return path
    candidate = fixture_path(path)
    return str(candidate) if candidate.exists() else path


def _read_json(path: str) -> Any:
    path = _resolve(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_json(text, path)


def _need(args: argparse.Namespace, name: str) -> Any:
    value = getattr(args, name, None)
    if value is None:
        raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")
    return value


def _fan(args: argparse.Namespace) -> Fan:
    fan = fan_from_obj(_read_json(_need(args, "fan")))
    require_valid(fan)
    return fan


def _simplex(fan: Fan, text: str) -> tuple[int, ...]:
    tokens = [t.strip() for t in text.replace("[", "").replace("]", "").split(",") if t.strip()]
    if not tokens:
        raise InputError("empty simplex")
    return fan.require_simplex(fan.ray_id(t) for t in tokens)


def _simplex_set(fan: Fan, text: str) -> list[tuple[int, ...]]:
    """Parse ``"0;1,2"`` (semicolon separated simplices); empty text is the empty set."""
    return [_simplex(fan, part) for part in text.split(";") if part.strip()]


def _tol(args: argparse.Namespace) -> Fraction:
    if args.tol is None:
        return DEFAULT_TOL
    try:
        tol = Fraction(args.tol)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"tolerance {args.tol!r} is not a rational number") from exc
    if tol <= 0:
        raise InputError("tolerance must be positive")
    return tol


def _group(args: argparse.Namespace, dim: int):
    gens, bound = group_from_obj(_read_json(_need(args, "group")))
    return gens, bound, enumerate_group(gens, bound, dim=dim)


def _explicit_model(args: argparse.Namespace) -> tuple[ExplicitModel, Any]:
    doc = _read_json(args.model)
    if not isinstance(doc, dict) or doc.get("model") != "explicit":
        raise InputError("model file must be an explicit model document")
    _, _, group = _group(args, 2)
    return explicit_model_from_obj(doc, group.elements), group


def _fan_model(args: argparse.Namespace):
    fan = _fan(args)
    _, _, group = _group(args, fan.dim)
    elements = [check_automorphism(fan, g) for g in group.elements]
    return fan, elements, group


def _cells_json(cells) -> list:
    return [c.to_json() for c in sort_cells(cells)]


# ---------------------------------------------------------------------------
# Subcommands; each returns (status, payload)


def cmd_validate(args):
    fan = fan_from_obj(_read_json(_need(args, "fan")))
    report = validate_fan(fan)
    return ("ok" if report.ok else "violation"), report.to_json()


def cmd_poset(args):
    p = face_poset(_fan(args))
    return "ok", {"elements": [list(s) for s in p.elements], "covers": [[list(a), list(b)] for a, b in p.covers]}


def cmd_orbits(args):
    p = orbit_poset(_fan(args))
    return "ok", {"orbits": [{"cone": list(c), "codim": p.codim[c], "patch": [list(f) for f in p.patch[c]],
                              "closure": [list(f) for f in p.closure[c]]} for c in p.orbits]}


def cmd_star(args):
    fan = _fan(args)
    s = _simplex_set(fan, _need(args, "simplices"))
    return "ok", {"star": [list(t) for t in sorted(star(fan, s))]}


def cmd_subsets(args):
    fan = _fan(args)
    out: dict[str, Any] = {}
    if fan.has_marking:
        closed, open_ = sigma_subsets(fan)
        out.update(all_interior=[list(t) for t in sorted(closed)], meets_interior=[list(t) for t in sorted(open_)])
    if args.colors is not None:
        labels = [c.strip() for c in args.colors.split(",") if c.strip()]
        out["colored"] = [list(t) for t in sorted(sigma_R_c(fan, labels))]
    if not out:
        raise InputError("fan carries no marking and no --colors were given")
    return "ok", out


def cmd_subdivide(args):
    return "ok", fan_to_obj(barycentric_subdivision(_fan(args)))


def cmd_cubes(args):
    ambient = tuple(int(x) for x in _need(args, "simplex").replace("[", "").replace("]", "").split(",") if x.strip())
    cells = cubical_decomposition(ambient)
    rows = [{"lower": list(c.lower), "upper": list(c.upper), "dim": c.dim,
             "cube": dict(zip("zof", map(list, cubical_to_dual(c, ambient))))} for c in cells]
    return "ok", {"cells": rows, "cube_faces": len(boundary_cube_faces(ambient))}


def cmd_dual(args):
    fan = _fan(args)
    if args.simplex is None:
        return "ok", boundary_complex(fan).to_json()
    return "ok", DualComplex(sort_cells(dual(fan, _simplex(fan, args.simplex)))).to_json()


def cmd_b_of(args):
    fan = _fan(args)
    return "ok", {"cells": _cells_json(b_of(fan, _simplex(fan, _need(args, "simplex"))))}


def _lcm(args, variant: str):
    fan = _fan(args)
    lcm = lcm_boundary(fan, variant)
    return "ok", {"variant": lcm.variant, "cells": lcm.to_json(), "count": len(lcm.cells)}


def cmd_lcm(args):
    return _lcm(args, args.variant)


def cmd_lcm_exc(args):
    return _lcm(args, EXCENTRIC)


def cmd_fibers(args):
    return "ok", fibers_to_json(lcm_boundary(_fan(args), args.variant))


def cmd_limits(args):
    fan = _fan(args)
    text = _need(args, "curve")
    doc = parse_json(text, "--curve") if text.lstrip().startswith("{") else _read_json(text)
    curve = curve_from_obj(doc)
    if curve.chart not in fan.maximal_cones:
        raise InputError("curve chart is not a maximal cone of the fan", witness=list(curve.chart))
    points = geometric_samples(curve, args.samples)
    out = {"curve": curve.to_json(), "closed_form": limit_pair(curve).to_json(),
           "sampled": classify_sequence(points, _tol(args)).to_json()}
    if fan.has_marking and fan.interior_rays:
        out["core"] = core_limit(fan, points, _tol(args)).to_json()
    return "ok", out


def cmd_sample_verify(args):
    report = sample_verify_lcm(_fan(args), args.variant, args.trials, args.seed, args.samples, _tol(args))
    return ("ok" if report.ok else "violation"), report.to_json()


def cmd_group(args):
    if args.model:
        model, group = _explicit_model(args)
        return "ok", {"elements": [e.name for e in model.elements], "complete": group.complete,
                      "word_length": group.word_length}
    fan, elements, group = _fan_model(args)
    free, free_witness = freeness_on_interior(fan, elements) if fan.has_marking else (None, None)
    neat, neat_witness = neat_surrogate(fan, elements)
    return "ok", {"elements": [g.to_json() for g in elements], "complete": group.complete,
                  "word_length": group.word_length, "free_on_interior": free, "free_witness": free_witness,
                  "neat": neat, "neat_witness": neat_witness}


def cmd_diag(args):
    if args.model:
        model, group = _explicit_model(args)
    else:
        fan, elements, group = _fan_model(args)
        model = fan_model(fan, elements, args.variant)
    report = diagonality_check(model, args.mode, complete=group.complete)
    return ("ok" if report.holds else "violation"), report.to_json()


def cmd_quotient(args):
    if args.model:
        model, _ = _explicit_model(args)
        sides = {"a": model.cells_a, "b": model.cells_b}
        out = {}
        for key, cells in sides.items():
            q = quotient_complex(cells, model.elements)
            out[key] = {"counts": q.counts, "orbits": [[model.display(c) for c in o] for o in q.orbits]}
        return "ok", out
    fan, elements, _ = _fan_model(args)
    q = quotient_complex(boundary_complex(fan).cells, elements)
    return "ok", {"counts": q.counts, "orbits": [[c.to_json() for c in o] for o in q.orbits],
                  "incidence": [list(i) for i in q.incidence]}


def cmd_quotient_lcm(args):
    if args.model:
        model, group = _explicit_model(args)
        free = None
    else:
        fan, elements, group = _fan_model(args)
        variant = normalize_variant(args.variant)
        model = fan_model(fan, elements, variant)
        free = freeness_on_interior(fan, elements) if variant == EXCENTRIC else None
    try:
        report = quotient_lcm(model, free, group.complete)
    except ViolationError as exc:
        raise Refusal(str(exc), exc.witness) from exc
    return ("ok" if report.verified else "violation"), report.to_json()


def cmd_homology(args):
    fan = _fan(args)
    chosen = [x for x in (args.b_of, args.dual_of) if x is not None]
    if len(chosen) > 1:
        raise InputError("give at most one of --b-of and --dual-of")
    if args.b_of is not None:
        cells, what = b_of(fan, _simplex(fan, args.b_of)), "b_of"
    elif args.dual_of is not None:
        cells, what = dual(fan, _simplex(fan, args.dual_of)), "dual"
    elif args.complex == "real-cube":
        cells, what = real_cube_cells(fan), "real_cube"
    elif args.complex in ("lcm", "lcm-exc"):
        variant = "full" if args.complex == "lcm" else EXCENTRIC
        cells, what = lcm_boundary(fan, variant).cells, args.complex
    else:
        cells, what = boundary_complex(fan).cells, "boundary"
    report = homology_of(cells, reduced=args.reduced)
    return "ok", {"complex": what, "cells": len(cells), **report.to_json()}


def cmd_verify(args):
    only = sorted({int(x) for x in args.criteria.split(",")}) if args.criteria else None
    if only and not set(only) <= set(acceptance.CRITERIA):
        raise InputError(f"criteria must be among {sorted(acceptance.CRITERIA)}")
    results = acceptance.run_all(args.seed, args.trials, args.jobs, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = acceptance.summary(results, args.seed, args.trials, args.timings)
    return ("ok" if payload["passed"] else "violation"), payload


COMMANDS: dict[str, tuple[Callable, str]] = {
    "validate": (cmd_validate, "check the fan axioms"),
    "poset": (cmd_poset, "face poset of the simplicial complex"),
    "orbits": (cmd_orbits, "orbit poset with codimensions, patches and closures"),
    "star": (cmd_star, "star of a set of simplices"),
    "subsets": (cmd_subsets, "all-interior and interior-meeting simplices; colored subsets"),
    "subdivide": (cmd_subdivide, "barycentric subdivision"),
    "cubes": (cmd_cubes, "cubical decomposition of a simplex and its cube faces"),
    "dual": (cmd_dual, "toroidal boundary complex or the dual face of a simplex"),
    "b-of": (cmd_b_of, "part of a dual face over the all-interior subcomplex"),
    "lcm": (cmd_lcm, "LCM boundary cells"),
    "lcm-exc": (cmd_lcm_exc, "excentric LCM boundary cells"),
    "fibers": (cmd_fibers, "fibers of the two projections of the LCM boundary"),
    "limits": (cmd_limits, "limit pair of a curve, closed form and sampled"),
    "sample-verify": (cmd_sample_verify, "check the LCM boundary against sampled curve limits"),
    "group": (cmd_group, "enumerate a group and check it acts by automorphisms"),
    "diag": (cmd_diag, "diagonality check"),
    "quotient": (cmd_quotient, "orbits of a complex under a group"),
    "quotient-lcm": (cmd_quotient_lcm, "compare orbits of LCM cells with the LCM of the quotients"),
    "homology": (cmd_homology, "integer homology of a complex"),
    "verify": (cmd_verify, "run the acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fan", help="fan JSON file (bare fixture names resolve to packaged fixtures)")
    common.add_argument("--group", help="group JSON file")
    common.add_argument("--model", help="explicit model JSON file, used instead of --fan")
    common.add_argument("--variant", default="full", help="full or exc")
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--trials", type=int, default=acceptance.DEFAULT_TRIALS)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    common.add_argument("--tol", help="positive rational tolerance, e.g. 1/1048576")
    common.add_argument("--out", help="write the JSON payload here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes; never changes the payload")
    common.add_argument("--timings", action="store_true", help="include runtime_ms in verify output")
    common.add_argument("--simplex", help="comma separated ray ids or names")
    common.add_argument("--simplices", help="semicolon separated simplices")
    common.add_argument("--colors", help="comma separated color labels")
    common.add_argument("--curve", help="curve JSON, inline or as a file")
    common.add_argument("--mode", default="strong", choices=("strong", "diagonal"))
    common.add_argument("--b-of", dest="b_of", help="homology of b-of this simplex")
    common.add_argument("--dual-of", dest="dual_of", help="homology of the dual face of this simplex")
    common.add_argument("--complex", default="boundary", choices=("boundary", "real-cube", "lcm", "lcm-exc"))
    common.add_argument("--reduced", action="store_true")
    common.add_argument("--criteria", help="comma separated criterion ids for verify")

    parser = argparse.ArgumentParser(prog="dualfan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed its message
        return EXIT_MALFORMED if exc.code else EXIT_OK
    fn, _ = COMMANDS[args.command]
    try:
        if args.jobs < 1:
            raise InputError("--jobs must be at least 1")
        if args.trials < 0 or args.samples < 1:
            raise InputError("--trials must be nonnegative and --samples positive")
        status, payload = fn(args)
        code = EXIT_OK if status == "ok" else EXIT_VIOLATION
    except Refusal as exc:
        status, payload, code = "refused", {"error": str(exc), "witness": exc.witness}, EXIT_VIOLATION
    except InputError as exc:
        print(f"dualfan: {exc}", file=sys.stderr)
        status, payload, code = "malformed", {"error": str(exc), "witness": exc.witness}, EXIT_MALFORMED
    except ViolationError as exc:
        status, payload, code = "violation", {"error": str(exc), "witness": exc.witness}, EXIT_VIOLATION
    text = dumps({"status": status, "result": payload})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
