"""Integer matrix actions on fans and on explicit pairs of cell complexes.

Group elements act on cells through their effect on cell labels (rays for
fans, vertex coordinates for explicit models).  A cell is fixed pointwise
exactly when every label is fixed; this is the generic-point criterion used
throughout.  Elements of explicit models may act partially: a label leaving
the finite window has no image, and pairs involving it are skipped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from . import _exact
from .errors import InputError, ViolationError
from .fan import Fan, Simplex, as_simplex, sigma_subsets
from .homology import ProductCell
from .lcm import EXCENTRIC, lcm_boundary, normalize_variant
from .toroidal import DualCell, boundary_complex, cell_boundary, interior_dual

IntMatrix = tuple[tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(d: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


def mat_vec(a: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_inverse(a: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    m, pivots = _exact.row_echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ViolationError("matrix is singular")
    inv = [[m[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ViolationError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


# ---------------------------------------------------------------------------
# Cell labels and images


class Pair(NamedTuple):
    """A cell of a product complex."""

    left: Any
    right: Any


@dataclass(frozen=True)
class ProductAction:
    left: Mapping
    right: Mapping


def image(cell: Any, action: Mapping | ProductAction) -> Any:
    """Image of a cell, or ``None`` when some label leaves the action's domain."""
    if isinstance(cell, Pair):
        if not isinstance(action, ProductAction):
            raise InputError("product cells need a product action")
        left, right = image(cell.left, action.left), image(cell.right, action.right)
        return None if left is None or right is None else Pair(left, right)
    if isinstance(cell, DualCell):
        z, f = _map(cell.z, action), _map(cell.f, action)
        return None if z is None or f is None else DualCell(z, f)
    if isinstance(cell, ProductCell):
        a, b = _map(cell.a, action), image(cell.b, action)
        return None if a is None or b is None else ProductCell(a, b)
    return _map(cell, action)


def _map(rays: Sequence[Hashable], action: Mapping) -> Simplex | None:
    try:
        return as_simplex(action[r] for r in rays)
    except KeyError:
        return None


def _generic_parts(cell: Any) -> tuple[tuple, tuple[tuple, ...]]:
    """Labels a generic point of ``cell`` depends on individually, and label blocks it sees only as sets.

    A generic point of a simplex cell has distinct barycentric weights on all
    of its rays.  A generic point of a toroidal cell ``(z, f)`` has distinct
    values on ``f`` but the same coordinate 0 on every ray of ``z``, so
    permuting ``z`` among itself does not move it.
    """
    if isinstance(cell, DualCell):
        return cell.f, (cell.z,)
    if isinstance(cell, ProductCell):
        return cell.a + cell.b.f, (cell.b.z,)
    return tuple(cell), ()


def fixes_pointwise(cell: Any, action: Mapping | ProductAction) -> bool:
    """Whether ``action`` fixes a generic point (hence every point) of ``cell``."""
    if isinstance(cell, Pair):
        return fixes_pointwise(cell.left, action.left) and fixes_pointwise(cell.right, action.right)  # type: ignore[union-attr]
    single, blocks = _generic_parts(cell)
    return (all(action.get(x) == x for x in single)  # type: ignore[union-attr]
            and all(_map(b, action) == b for b in blocks))  # type: ignore[arg-type]


def agrees_on(cell: Any, g: Mapping | ProductAction, h: Mapping | ProductAction) -> bool:
    """Whether two elements move a generic point of ``cell`` to the same place."""
    if isinstance(cell, Pair):
        return agrees_on(cell.left, g.left, h.left) and agrees_on(cell.right, g.right, h.right)  # type: ignore[union-attr]
    single, blocks = _generic_parts(cell)
    if not all(x in g and x in h and g[x] == h[x] for x in single):  # type: ignore[operator, index]
        return False
    return all(_map(b, g) is not None and _map(b, g) == _map(b, h) for b in blocks)  # type: ignore[arg-type]


def is_identity(action: Mapping | ProductAction) -> bool:
    if isinstance(action, ProductAction):
        return is_identity(action.left) and is_identity(action.right)
    return all(k == v for k, v in action.items())


# ---------------------------------------------------------------------------
# Fan automorphisms


@dataclass(frozen=True)
class GroupElement:
    matrix: IntMatrix
    perm: tuple[int, ...]  # ray i -> ray perm[i]

    @property
    def action(self) -> dict[int, int]:
        return dict(enumerate(self.perm))

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "perm": list(self.perm)}


def check_automorphism(fan: Fan, g: Sequence[Sequence[int]]) -> GroupElement:
    m = as_matrix(g)
    if len(m) != fan.dim or any(len(row) != fan.dim for row in m):
        raise InputError(f"matrix must be {fan.dim}x{fan.dim}")
    det = _exact.determinant(m)
    if det not in (1, -1):
        raise ViolationError("matrix is not unimodular", witness={"determinant": det})
    index = {r: i for i, r in enumerate(fan.rays)}
    perm = []
    for i, r in enumerate(fan.rays):
        target = mat_vec(m, r)
        if target not in index:
            raise ViolationError("image of a ray is not a ray", witness={"ray": i, "image": list(target)})
        perm.append(index[target])
    for c in fan.simplices:
        if as_simplex(perm[r] for r in c) not in fan.cones:
            raise ViolationError("image of a cone is not a cone", witness={"cone": list(c)})
    if fan.boundary is not None:
        for r in range(len(fan.rays)):
            if (r in fan.boundary) != (perm[r] in fan.boundary):
                raise ViolationError("boundary marking not preserved", witness={"ray": r})
    colors = fan.ray_colors
    for r, label in colors.items():
        if colors.get(perm[r]) != label:
            raise ViolationError("colors not preserved", witness={"ray": r})
    if any(perm[r] in colors for r in range(len(perm)) if r not in colors):
        raise ViolationError("colors not preserved")
    return GroupElement(m, tuple(perm))


@dataclass(frozen=True)
class GroupEnumeration:
    elements: tuple[IntMatrix, ...]
    complete: bool
    word_length: int


def enumerate_group(generators: Iterable[Sequence[Sequence[int]]], bound: int | None = None,
                    dim: int | None = None, max_elements: int = 100_000) -> GroupEnumeration:
    """Breadth-first enumeration by word length over generators and inverses.

    ``bound=None`` asks for the whole (finite) group.  ``complete`` is set
    once a word length produces nothing new.
    """
    gens = [as_matrix(g) for g in generators]
    if dim is None:
        if not gens:
            raise InputError("dimension needed when there are no generators")
        dim = len(gens[0])
    if any(len(g) != dim or any(len(r) != dim for r in g) for g in gens):
        raise InputError("generators must be square matrices of one size")
    steps = []
    for g in gens:
        steps.append(g)
        inv = mat_inverse(g)
        if inv not in steps:
            steps.append(inv)
    ident = identity(dim)
    seen = {ident}
    order = [ident]
    frontier = [ident]
    length = rounds = 0
    complete = False
    while True:
        if not frontier:
            complete = True
            break
        if bound is not None and rounds >= bound:
            break
        rounds += 1
        if len(seen) >= max_elements:
            break
        new = []
        for w in frontier:
            for s in steps:
                x = mat_mul(s, w)
                if x not in seen:
                    seen.add(x)
                    new.append(x)
        new.sort()
        order.extend(new)
        frontier = new
        if new:
            length += 1
    if bound is not None and not complete:
        # a further layer producing nothing new would certify closure
        complete = not any(mat_mul(s, w) not in seen for w in frontier for s in steps)
    return GroupEnumeration(tuple(order), complete, length)


def fan_elements(fan: Fan, matrices: Iterable[IntMatrix]) -> list[GroupElement]:
    return [check_automorphism(fan, m) for m in matrices]


def freeness_on_interior(fan: Fan, elements: Sequence[GroupElement]) -> tuple[bool, dict | None]:
    _, open_ = sigma_subsets(fan)
    return _setwise_pointwise(sorted(open_), elements)


def neat_surrogate(fan: Fan, elements: Sequence[GroupElement]) -> tuple[bool, dict | None]:
    """Every element fixing a simplex setwise fixes it pointwise."""
    return _setwise_pointwise(fan.simplices, elements)


def _setwise_pointwise(simplices: Iterable[Simplex], elements: Sequence[GroupElement]) -> tuple[bool, dict | None]:
    simplices = list(simplices)
    for g in elements:
        act = g.action
        if is_identity(act):
            continue
        for t in simplices:
            if image(t, act) == t and not fixes_pointwise(t, act):
                return False, {"element": [list(r) for r in g.matrix], "simplex": list(t)}
    return True, None


# ---------------------------------------------------------------------------
# Explicit models and diagonality


@dataclass(frozen=True)
class Element:
    name: Any
    action: Mapping | ProductAction = field(hash=False)


@dataclass
class ExplicitModel:
    """Two finite cell complexes, a set ``pairs`` of product cells, and a group.

    ``member`` decides membership of a product cell from its components; it
    defaults to lookup in ``pairs`` but fan models pass the closed-form rule
    so that quotient checks do not just re-read the same table.
    """

    cells_a: frozenset
    cells_b: frozenset
    pairs: frozenset
    elements: list[Element]
    member: Callable[[Any, Any], bool] | None = None
    display: Callable[[Any], Any] = lambda c: c

    def __post_init__(self) -> None:
        unknown = [p for p in self.pairs if p[0] not in self.cells_a or p[1] not in self.cells_b]
        if unknown:
            raise InputError("pairs reference unknown cells", witness=[repr(p) for p in sorted(unknown, key=repr)[:5]])
        if self.member is None:
            self.member = lambda e1, e2: (e1, e2) in self.pairs


@dataclass(frozen=True)
class DiagonalityReport:
    mode: str
    holds: bool
    witnesses: tuple = ()
    complete: bool = True

    def to_json(self) -> dict:
        return {"mode": self.mode, "verdict": "holds" if self.holds else "fails",
                "witnesses": list(self.witnesses), "complete": self.complete}


def diagonality_check(model: ExplicitModel, mode: str = "strong", complete: bool = True,
                      limit: int = 50) -> DiagonalityReport:
    """Scan every product cell and element for the (strong) diagonality condition."""
    if mode not in ("strong", "diagonal"):
        raise InputError("mode must be 'strong' or 'diagonal'")
    witnesses = []
    for e1, e2 in sorted(model.pairs, key=repr):
        for g in model.elements:
            moved = image(e1, g.action)
            if moved is None or (moved, e2) not in model.pairs:
                continue
            if fixes_pointwise(e1, g.action) or fixes_pointwise(e2, g.action):
                continue
            if mode == "diagonal" and any(
                    fixes_pointwise(e2, d.action) and agrees_on(e1, d.action, g.action) for d in model.elements):
                continue
            witnesses.append({"pair": [model.display(e1), model.display(e2)], "element": g.name})
            if len(witnesses) >= limit:
                break
        if len(witnesses) >= limit:
            break
    return DiagonalityReport(mode, not witnesses, tuple(witnesses), complete)


def fan_model(fan: Fan, elements: Sequence[GroupElement], variant: str) -> ExplicitModel:
    """The simplex complex, the (interior) dual complex and their LCM boundary."""
    variant = normalize_variant(variant)
    lcm = lcm_boundary(fan, variant)
    if variant == EXCENTRIC:
        duals = interior_dual(fan)
        interior = fan.interior_rays

        def member(a, b):
            return set(a) <= set(b.z) and bool(interior.intersection(b.z))
    else:
        duals = frozenset(boundary_complex(fan).cells)

        def member(a, b):
            return set(a) <= set(b.z)
    pairs = frozenset((c.a, c.b) for c in lcm.cells)
    els = [Element([list(r) for r in g.matrix], g.action) for g in elements]

    def display(c):
        return c.to_json() if isinstance(c, DualCell) else list(c)
    return ExplicitModel(frozenset(fan.simplices), duals, pairs, els, member, display)


def product_model(m1: ExplicitModel, m2: ExplicitModel) -> ExplicitModel:
    cells_a = frozenset(Pair(x, y) for x in m1.cells_a for y in m2.cells_a)
    cells_b = frozenset(Pair(x, y) for x in m1.cells_b for y in m2.cells_b)
    pairs = frozenset((Pair(a1, a2), Pair(b1, b2)) for a1, b1 in m1.pairs for a2, b2 in m2.pairs)
    els = [Element([g.name, h.name], ProductAction(g.action, h.action)) for g in m1.elements for h in m2.elements]

    def display(c):
        return [m1.display(c.left), m2.display(c.right)]
    return ExplicitModel(cells_a, cells_b, pairs, els, None, display)


# -- the window on the real line ---------------------------------------------


def line_window_obj(radius: int = 3) -> dict:
    """Explicit data for a window of the real line and its dual line.

    Labels are doubled coordinates: vertex ``n`` has label ``2n`` and the
    dual vertex ``n + 1/2`` has label ``2n + 1``.  Each edge ``[n, n+1]`` is
    paired with the dual vertex at its midpoint, together with its two ends.
    """
    verts = [(2 * n,) for n in range(-radius, radius + 1)]
    edges = [(2 * n, 2 * n + 2) for n in range(-radius, radius)]
    dual_verts = [(2 * n + 1,) for n in range(-radius, radius)]
    dual_edges = [(2 * n - 1, 2 * n + 1) for n in range(-radius + 1, radius)]
    pairs = []
    for n in range(-radius, radius):
        mid = [2 * n + 1]
        pairs += [[[2 * n], mid], [[2 * n + 2], mid], [[2 * n, 2 * n + 2], mid]]
    return {"model": "explicit", "label_scale": 2,
            "cells_a": [list(c) for c in verts + edges],
            "cells_b": [list(c) for c in dual_verts + dual_edges],
            "pairs": pairs}


def explicit_model_from_obj(doc: Mapping, matrices: Sequence[IntMatrix]) -> ExplicitModel:
    """Build an explicit model whose labels are integers acted on affinely.

    A 2x2 matrix ``[[a, b], [0, 1]]`` sends the point ``x`` to ``a x + b``.
    Labels are stored multiplied by ``label_scale``, so the label action is
    ``x -> a x + b * label_scale``.  Labels leaving the model are dropped
    from the (partial) action.
    """
    try:
        cells_a = frozenset(as_simplex(c) for c in doc["cells_a"])
        cells_b = frozenset(as_simplex(c) for c in doc["cells_b"])
        pairs = frozenset((as_simplex(a), as_simplex(b)) for a, b in doc["pairs"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed explicit model: {exc}") from exc
    scale = doc.get("label_scale", 1)
    all_labels = {x for c in cells_a | cells_b for x in c}
    elements = []
    for m in matrices:
        if len(m) != 2 or m[1] != (0, 1):
            raise InputError("explicit models take affine 2x2 matrices [[a, b], [0, 1]]")
        action = {x: m[0][0] * x + m[0][1] * scale for x in all_labels}
        action = {x: y for x, y in action.items() if y in all_labels}
        elements.append(Element(_affine_name(m), action))

    def display(c):
        return [_label_text(x, scale) for x in c]
    return ExplicitModel(cells_a, cells_b, pairs, elements, None, display)


def _label_text(x: int, scale: int) -> str | int:
    if x % scale == 0:
        return x // scale
    from fractions import Fraction

    return str(Fraction(x, scale))


def _affine_name(m: IntMatrix) -> str:
    a, b = m[0]
    if a == 1:
        return "identity" if b == 0 else f"shift{'+' if b > 0 else ''}{b}"
    return f"affine[{a},{b}]"


# ---------------------------------------------------------------------------
# Quotients


class _UnionFind:
    def __init__(self, items: Iterable[Hashable]):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry, key=repr)] = min(rx, ry, key=repr)


def _cell_sort_key(c: Any) -> tuple:
    if isinstance(c, DualCell):
        return (len(c.f), c.z, c.f)
    if isinstance(c, ProductCell):
        return (len(c.a) + len(c.b.f), c.a, c.b.z, c.b.f)
    if isinstance(c, Pair) or (isinstance(c, tuple) and c and not isinstance(c[0], int)):
        return tuple(_cell_sort_key(x) for x in c)
    return (len(c), tuple(c))


@dataclass(frozen=True)
class Quotient:
    orbits: tuple[tuple[Any, ...], ...]
    orbit_of: Mapping[Any, int] = field(hash=False)
    incidence: tuple[tuple[int, ...], ...] = ()

    @property
    def counts(self) -> dict:
        return {"cells": len(self.orbit_of), "orbits": len(self.orbits)}


def pair_image(pair: tuple, action: Mapping | ProductAction) -> tuple | None:
    """Diagonal action on a product cell given as a pair of cells."""
    left, right = image(pair[0], action), image(pair[1], action)
    return None if left is None or right is None else (left, right)


def quotient_complex(cells: Iterable[Any], elements: Sequence[Element | GroupElement],
                     faces_of: Callable[[Any], Iterable[Any]] | None = None,
                     act: Callable[[Any, Any], Any] = image) -> Quotient:
    """Orbits of cells; the representative of an orbit is its least cell."""
    cells = set(cells)
    uf = _UnionFind(cells)
    for g in elements:
        for c in cells:
            img = act(c, g.action)
            if img is None:
                continue
            if img not in cells:
                raise ViolationError("element does not act on the complex", witness={"cell": repr(c)})
            uf.union(c, img)
    groups: dict[Any, list] = {}
    for c in cells:
        groups.setdefault(uf.find(c), []).append(c)
    orbits = sorted((tuple(sorted(g, key=_cell_sort_key)) for g in groups.values()),
                    key=lambda o: _cell_sort_key(o[0]))
    orbit_of = {c: i for i, o in enumerate(orbits) for c in o}
    faces_of = faces_of or _default_faces
    incidence = tuple(tuple(sorted({orbit_of[f] for c in o for f in faces_of(c) if f in orbit_of}))
                      for o in orbits)
    return Quotient(tuple(orbits), orbit_of, incidence)


def _default_faces(c: Any) -> list:
    if isinstance(c, DualCell):
        return [f for f, _ in cell_boundary(c)]
    if isinstance(c, tuple) and all(isinstance(x, int) for x in c) and len(c) > 1:
        return [c[:i] + c[i + 1:] for i in range(len(c))]
    return []


@dataclass(frozen=True)
class QuotientLcmReport:
    verified: bool
    lcm_cells: int
    lcm_orbits: int
    quotient_pairs: int
    orbit_pairs: tuple = ()
    problems: tuple = ()
    complete: bool = True

    def to_json(self) -> dict:
        return {"verified": self.verified, "lcm_cells": self.lcm_cells, "lcm_orbits": self.lcm_orbits,
                "quotient_pairs": self.quotient_pairs, "orbit_pairs": [list(p) for p in self.orbit_pairs],
                "problems": list(self.problems), "complete": self.complete}


def quotient_lcm(model: ExplicitModel, require_free: tuple[bool, dict | None] | None = None,
                 complete: bool = True) -> QuotientLcmReport:
    """Compare orbits of the product cells with the LCM of the two quotients.

    Refuses (raises :class:`ViolationError`) when strong diagonality fails or
    a required freeness check failed.  ``complete`` says whether the element
    list is the whole group; a verdict for a truncated group only covers
    the enumerated elements and is flagged as such.
    """
    diag = diagonality_check(model, "strong", complete=complete)
    if not diag.holds:
        raise ViolationError("action is not strongly diagonal", witness=diag.to_json())
    if require_free is not None and not require_free[0]:
        raise ViolationError("action is not free on the interior", witness=require_free[1])
    q_pairs = quotient_complex(model.pairs, model.elements, faces_of=lambda c: (), act=pair_image)
    q_a = quotient_complex(model.cells_a, model.elements)
    q_b = quotient_complex(model.cells_b, model.elements)
    # LCM of the quotients, decided from the membership rule on orbit members.
    downstairs = set()
    for i, oa in enumerate(q_a.orbits):
        for j, ob in enumerate(q_b.orbits):
            if any(model.member(x, y) for x in oa for y in ob):
                downstairs.add((i, j))
    problems = []
    image_pairs = []
    for orbit in q_pairs.orbits:
        projected = {(q_a.orbit_of[e1], q_b.orbit_of[e2]) for e1, e2 in orbit}
        if len(projected) != 1:
            problems.append({"orbit": repr(orbit[0]), "reason": "projections do not commute with orbit maps"})
        image_pairs.append(min(projected))
    if len(set(image_pairs)) != len(image_pairs):
        problems.append({"reason": "two orbits of product cells map to the same quotient pair"})
    if set(image_pairs) != downstairs:
        problems.append({"reason": "orbit images differ from the LCM of the quotients",
                         "missing": sorted(downstairs - set(image_pairs))[:5]})
    return QuotientLcmReport(not problems, len(model.pairs), len(q_pairs.orbits), len(downstairs),
                             tuple(sorted(image_pairs)), tuple(problems), complete)


def all_subsets(elements: Sequence, max_size: int | None = None) -> Iterable[tuple]:
    n = len(elements)
    for k in range(n + 1 if max_size is None else min(n, max_size) + 1):
        yield from itertools.combinations(elements, k)
