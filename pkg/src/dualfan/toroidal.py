"""The real toroidal boundary of a fan as a cubical complex.

In the chart of a cone every ray carries a toroidal coordinate in ``[0, 1]``
(``t = exp(-q)`` for the linear coordinate ``q``).  A cube face is described by
the rays whose coordinate is 0, the rays whose coordinate is free, and the
rest at 1.  Gluing charts identifies faces along coordinates at 1, so a cell
is determined by the pair ``(z, f)`` of zero rays and free rays alone.  The
boundary of the compactification consists of the cells with ``z`` nonempty.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import InputError, ViolationError
from .fan import Fan, Simplex, as_simplex, faces, sigma_subsets


class DualCell(NamedTuple):
    z: Simplex
    f: Simplex

    @property
    def dim(self) -> int:
        return len(self.f)

    @property
    def support(self) -> Simplex:
        return as_simplex(self.z + self.f)

    def to_json(self) -> dict:
        return {"z": list(self.z), "f": list(self.f)}


def cell_key(c: DualCell) -> tuple:
    return (len(c.f), c.z, c.f)


def cell_boundary(c: DualCell) -> list[tuple[DualCell, int]]:
    """Signed faces: for the free ray in position ``i`` the 0-end enters with
    sign ``(-1)**i`` and the 1-end with the opposite sign."""
    out = []
    for i, r in enumerate(c.f):
        rest = tuple(x for x in c.f if x != r)
        sign = -1 if i % 2 else 1
        out.append((DualCell(as_simplex(c.z + (r,)), rest), sign))
        out.append((DualCell(c.z, rest), -sign))
    return out


@dataclass(frozen=True)
class DualComplex:
    cells: tuple[DualCell, ...]

    @property
    def incidence(self) -> dict[DualCell, list[tuple[DualCell, int]]]:
        return {c: cell_boundary(c) for c in self.cells}

    def to_json(self) -> dict:
        index = {c: i for i, c in enumerate(self.cells)}
        return {
            "cells": [c.to_json() for c in self.cells],
            "incidence": [[[index[b], s] for b, s in cell_boundary(c) if b in index] for c in self.cells],
        }


def sort_cells(cells: Iterable[DualCell]) -> tuple[DualCell, ...]:
    return tuple(sorted(set(cells), key=cell_key))


def _cells_with_zero_superset(fan: Fan, required: Iterable[int]) -> set[DualCell]:
    req = set(required)
    out = set()
    for cone in fan.simplices:
        if not req <= set(cone):
            continue
        rest = [r for r in cone if r not in req]
        for extra in faces(rest, include_empty=True):
            z = as_simplex(req | set(extra))
            if z:
                out.add(DualCell(z, as_simplex(set(cone) - set(z))))
    return out


def boundary_complex(fan: Fan) -> DualComplex:
    if fan.mode != "strict":
        raise ViolationError("the toroidal boundary needs a strict fan", witness={"mode": fan.mode})
    return DualComplex(sort_cells(_cells_with_zero_superset(fan, ())))


def real_cube_cells(fan: Fan) -> tuple[DualCell, ...]:
    """Every glued cube face, including those with no zero coordinate."""
    out = {DualCell(as_simplex(z), as_simplex(set(c) - set(z)))
           for c in fan.cones for z in faces(c, include_empty=True)}
    return sort_cells(out)


def dual(fan: Fan, t: Sequence[int]) -> frozenset[DualCell]:
    """Closed dual face: the cells whose zero set contains the rays of ``t``."""
    t = fan.require_simplex(t)
    return frozenset(_cells_with_zero_superset(fan, t))


def dual_chartwise(fan: Fan, t: Sequence[int]) -> frozenset[DualCell]:
    """The same dual face assembled chart by chart from cube faces.

    For each maximal cone containing ``t`` every labelling of its rays by
    0 / free / 1 with the rays of ``t`` at 0 is listed, then keyed by ``(z, f)``.
    Used as an independent cross-check of :func:`dual`.
    """
    t = fan.require_simplex(t)
    out = set()
    for sigma in fan.maximal_cones:
        if not set(t) <= set(sigma):
            continue
        rest = [r for r in sigma if r not in t]
        n = len(rest)
        for code in range(3 ** n):
            z, f = list(t), []
            for r in rest:
                code, digit = divmod(code, 3)
                if digit == 0:
                    z.append(r)
                elif digit == 1:
                    f.append(r)
            out.add(DualCell(as_simplex(z), as_simplex(f)))
    return frozenset(out)


def dual_of_set(fan: Fan, s: Iterable[Sequence[int]]) -> frozenset[DualCell]:
    out: set[DualCell] = set()
    for t in s:
        out |= dual(fan, t)
    return frozenset(out)


def interior_dual(fan: Fan) -> frozenset[DualCell]:
    """Dual of the all-interior subcomplex: cells whose zero set meets an interior ray."""
    interior = fan.interior_rays
    return frozenset(c for c in boundary_complex(fan).cells if interior.intersection(c.z))


def join(fan: Fan, t: Sequence[int], w: Sequence[int]) -> Simplex | None:
    t, w = fan.require_simplex(t), fan.require_simplex(w)
    u = as_simplex(t + w)
    return u if u in fan.cones else None


def dual_intersection(fan: Fan, t: Sequence[int], w: Sequence[int]) -> frozenset[DualCell]:
    return dual(fan, t) & dual(fan, w)


def b_of(fan: Fan, t: Sequence[int]) -> frozenset[DualCell]:
    """Part of the dual face of ``t`` lying over the all-interior subcomplex."""
    t = fan.require_simplex(t)
    interior = fan.interior_rays
    return frozenset(c for c in dual(fan, t) if interior.intersection(c.z))


def b_of_by_joins(fan: Fan, t: Sequence[int]) -> frozenset[DualCell]:
    """The same set rebuilt as a union of duals of joins with interior vertices."""
    t = fan.require_simplex(t)
    out: set[DualCell] = set()
    for alpha in sorted(fan.interior_rays):
        u = join(fan, t, (alpha,))
        if u is not None:
            out |= dual(fan, u)
    return frozenset(out)


def contract_point(fan: Fan, t: Sequence[int], sigma: Sequence[int]) -> DualCell:
    t, sigma = fan.require_simplex(t), fan.require_simplex(sigma)
    if not set(t) <= set(sigma):
        raise InputError("simplex is not a face of the chart", witness={"t": list(t), "sigma": list(sigma)})
    return DualCell(t, ())


def retract_flow(point: Mapping[int, Fraction], s: Fraction | int, moving: Iterable[int]) -> dict[int, Fraction]:
    """Push the designated coordinates towards 1: ``t -> min(t + s, 1)``."""
    s = Fraction(s)
    if not 0 <= s <= 1:
        raise InputError(f"flow time {s} outside [0, 1]")
    moving = set(moving)
    out = {}
    for r, t in point.items():
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise InputError(f"coordinate {t} of ray {r} outside [0, 1]")
        out[r] = min(t + s, Fraction(1)) if r in moving else t
    return out


def chart_point_cell(point: Mapping[int, Fraction]) -> DualCell:
    """The open cell containing a chart point."""
    z = as_simplex(r for r, t in point.items() if t == 0)
    f = as_simplex(r for r, t in point.items() if 0 < t < 1)
    return DualCell(z, f)


def strata_of_interior_dual(fan: Fan) -> dict[Simplex, frozenset[DualCell]]:
    """Group the interior dual cells by the simplex spanned by their zero set."""
    _, open_ = sigma_subsets(fan)
    cells = interior_dual(fan)
    return {t: frozenset(c for c in cells if c.z == t) for t in sorted(open_)}
