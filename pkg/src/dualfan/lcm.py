"""Boundary of the least common modification of the two cone compactifications.

One compactification adds a simplex at infinity (linear coordinates), the
other the cube boundary (toroidal coordinates).  A boundary cell of their
least common modification is a pair ``(a, b)`` with ``a`` a simplex and ``b``
a toroidal cell; it belongs to the boundary exactly when the rays of ``a`` lie
in the zero set of ``b``.  The excentric variant keeps only cells whose zero
set meets an interior ray.

The membership rule is a closed form; :func:`lcm_definitional` rebuilds the
same sets as unions of products over simplices so the two can be compared.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from . import _exact
from .errors import InputError
from .fan import Fan, Simplex, faces, sigma_subsets
from .homology import ProductCell
from .toroidal import DualCell, b_of, boundary_complex, cell_key, dual, dual_chartwise

FULL = "full"
EXCENTRIC = "exc"


def normalize_variant(variant: str) -> str:
    if variant in ("full",):
        return FULL
    if variant in ("exc", "excentric"):
        return EXCENTRIC
    raise InputError(f"unknown variant {variant!r}; expected 'full' or 'exc'")


def product_key(c: ProductCell) -> tuple:
    return (c.dim, c.a, cell_key(c.b))


@dataclass(frozen=True)
class LcmBoundary:
    cells: tuple[ProductCell, ...]
    variant: str

    @property
    def simplex_image(self) -> frozenset[Simplex]:
        return frozenset(c.a for c in self.cells)

    @property
    def dual_image(self) -> frozenset[DualCell]:
        return frozenset(c.b for c in self.cells)

    def to_json(self) -> list:
        return [c.to_json() for c in self.cells]


def _sorted(cells: Iterable[ProductCell]) -> tuple[ProductCell, ...]:
    return tuple(sorted(set(cells), key=product_key))


def lcm_boundary_full(fan: Fan) -> LcmBoundary:
    cells = [ProductCell(a, b) for b in boundary_complex(fan).cells for a in faces(b.z)]
    return LcmBoundary(_sorted(cells), FULL)


def lcm_boundary_exc(fan: Fan) -> LcmBoundary:
    interior = fan.interior_rays
    cells = [ProductCell(a, b) for b in boundary_complex(fan).cells
             if interior.intersection(b.z) for a in faces(b.z)]
    return LcmBoundary(_sorted(cells), EXCENTRIC)


def lcm_boundary(fan: Fan, variant: str) -> LcmBoundary:
    return lcm_boundary_full(fan) if normalize_variant(variant) == FULL else lcm_boundary_exc(fan)


def lcm_definitional(fan: Fan, variant: str) -> frozenset[ProductCell]:
    """Union of (faces of t) x (chart-assembled dual of t) over the relevant t."""
    if normalize_variant(variant) == FULL:
        strata = fan.simplices
    else:
        strata = sorted(sigma_subsets(fan)[1])
    out: set[ProductCell] = set()
    for t in strata:
        duals = dual_chartwise(fan, t)
        out.update(ProductCell(a, b) for a in faces(t) for b in duals)
    return frozenset(out)


def open_strata(fan: Fan, variant: str) -> dict[Simplex, frozenset[ProductCell]]:
    """The open pieces over each simplex ``t``: ``t° x dual(t)`` or ``t° x b_of(t)``.

    Simplices with an empty fiber are left out.
    """
    fiber = dual if normalize_variant(variant) == FULL else b_of
    pieces = {t: frozenset(ProductCell(t, b) for b in fiber(fan, t)) for t in fan.simplices if t}
    return {t: cells for t, cells in pieces.items() if cells}


def fiber_over_dual(lcm: LcmBoundary, b0: DualCell) -> tuple[Simplex, ...]:
    """Simplices paired with ``b0``: every face of the simplex spanned by its zero set."""
    b0 = DualCell(tuple(b0[0]), tuple(b0[1]))
    if b0 not in lcm.dual_image:
        raise InputError("cell is not in the dual-side image", witness=b0.to_json())
    return tuple(faces(b0.z))


def fiber_over_simplex(lcm: LcmBoundary, a0: Sequence[int]) -> frozenset[DualCell]:
    """Dual cells paired with ``a0`` (the fiber over the open stratum of ``a0``)."""
    a0 = tuple(sorted(a0))
    return frozenset(c.b for c in lcm.cells if c.a == a0)


def group_by_dual(lcm: LcmBoundary) -> dict[DualCell, tuple[Simplex, ...]]:
    out: dict[DualCell, list[Simplex]] = defaultdict(list)
    for c in lcm.cells:
        out[c.b].append(c.a)
    return {b: tuple(sorted(v)) for b, v in out.items()}


def group_by_simplex(lcm: LcmBoundary) -> dict[Simplex, frozenset[DualCell]]:
    out: dict[Simplex, set[DualCell]] = defaultdict(set)
    for c in lcm.cells:
        out[c.a].add(c.b)
    return {a: frozenset(v) for a, v in out.items()}


def fibers_to_json(lcm: LcmBoundary) -> dict:
    by_dual = group_by_dual(lcm)
    by_simplex = group_by_simplex(lcm)
    return {
        "over_dual": [{"b": b.to_json(), "fiber": [list(a) for a in by_dual[b]]}
                      for b in sorted(by_dual, key=cell_key)],
        "over_simplex": [{"a": list(a), "fiber": [b.to_json() for b in sorted(by_simplex[a], key=cell_key)]}
                         for a in sorted(by_simplex)],
    }


# ---------------------------------------------------------------------------
# Basechange on finite cell models


@dataclass(frozen=True)
class CellModel:
    """A finite compactification model seen through its limit cells.

    ``limits`` assigns to every escape type (a sequence class of the common
    open space) the cell of this model containing its limit.
    """

    cells: frozenset
    limits: Mapping[Hashable, Hashable] = field(hash=False)

    def __post_init__(self) -> None:
        stray = {v for v in self.limits.values() if v not in self.cells}
        if stray:
            raise InputError("limit assigned to an unknown cell", witness=sorted(map(repr, stray)))


@dataclass(frozen=True)
class BasechangeResult:
    holds: bool
    witness: tuple | None
    lcm: frozenset
    fiber_product: frozenset


def lcm_of_models(m1: CellModel, m2: CellModel) -> frozenset:
    if set(m1.limits) != set(m2.limits):
        raise InputError("cell models are indexed by different escape types")
    return frozenset((m1.limits[x], m2.limits[x]) for x in m1.limits)


def basechange_check(base: CellModel,
                     upstairs: tuple[CellModel, Mapping],
                     third: tuple[CellModel, Mapping]) -> BasechangeResult:
    """Compare the LCM of two models over ``base`` with their fiber product."""
    (m1, phi), (m2, psi) = upstairs, third
    for model, mapping in ((m1, phi), (m2, psi)):
        missing = [c for c in model.cells if c not in mapping]
        if missing:
            raise InputError("map is not defined on every cell", witness=sorted(map(repr, missing))[:5])
        for x, y in model.limits.items():
            if mapping[y] != base.limits[x]:
                raise InputError("map does not carry limits to limits", witness=repr(x))
    lcm = lcm_of_models(m1, m2)
    fiber = frozenset((y1, y2) for y1 in m1.cells for y2 in m2.cells if phi[y1] == psi[y2])
    extra = sorted(fiber - lcm, key=repr)
    return BasechangeResult(not extra, extra[0] if extra else None, lcm, fiber)


def direction_stratum(fan: Fan, x: Sequence[int]) -> Simplex:
    """The simplex whose open part contains the direction of ``x``."""
    for sigma in fan.maximal_cones:
        coords = _exact.coordinates([fan.rays[r] for r in sigma], x)
        if coords is not None and all(c >= 0 for c in coords):
            support = tuple(r for r, c in zip(sigma, coords) if c > 0)
            if support:
                return support
    raise InputError("direction lies outside the support of the fan", witness=list(x))


def simplex_model(fan: Fan, directions: Mapping[Hashable, Sequence[int]]) -> CellModel:
    """Simplex-at-infinity model; escape types are directions in the support."""
    return CellModel(frozenset(fan.simplices), {k: direction_stratum(fan, v) for k, v in directions.items()})


def core_section_limits(fan: Fan, curve, tol=None):
    """Limit of a curve in the core model; see :func:`dualfan.limits.core_limit`."""
    from .limits import core_limit

    return core_limit(fan, curve, tol)
