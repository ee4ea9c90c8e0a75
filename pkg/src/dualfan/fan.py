"""Finite simplicial fans with a boundary marking.

A fan is stored as a table of primitive integer rays plus a set of cones, each
cone being a sorted tuple of ray indices.  The zero cone is the empty tuple
and is always implicitly present.  Nonzero cones double as the simplices of
the associated simplicial complex (the projectivisation of the fan), so the
same tuple type ``Simplex`` is used for both.

Besides validation (face closure, geometric intersection property) the module
provides the combinatorial layers built on top of a fan: face and orbit
posets, stars, the interior/colored subcomplexes, barycentric subdivision and
the cubical decomposition of a simplex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import _exact
from .errors import InputError

Simplex = tuple[int, ...]


def as_simplex(rays: Iterable[int]) -> Simplex:
    return tuple(sorted(set(rays)))


def faces(s: Sequence[int], include_empty: bool = False) -> list[Simplex]:
    """All faces of a ray set, ordered canonically."""
    s = tuple(sorted(s))
    lo = 0 if include_empty else 1
    out = [c for k in range(lo, len(s) + 1) for c in itertools.combinations(s, k)]
    return sorted(out)


@dataclass(frozen=True)
class Fan:
    """An immutable finite fan.

    ``boundary`` is ``None`` when no marking is present; otherwise it is the
    set of boundary rays and every other ray is interior.  ``colors`` maps a
    label to the rays carrying it; a label may be declared with no rays.
    """

    dim: int
    rays: tuple[tuple[int, ...], ...]
    cones: frozenset[Simplex]
    mode: str = "strict"
    boundary: frozenset[int] | None = None
    colors: tuple[tuple[str, Simplex], ...] | None = None
    full_boundary: bool = False
    names: tuple[tuple[str, int], ...] | None = None
    simplices: tuple[Simplex, ...] = field(init=False, repr=False, compare=False)
    maximal_cones: tuple[Simplex, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        cones = frozenset(as_simplex(c) for c in self.cones) | {()}
        object.__setattr__(self, "cones", cones)
        if self.boundary is not None:
            object.__setattr__(self, "boundary", frozenset(self.boundary))
        if self.colors is not None:
            colors = self.colors.items() if isinstance(self.colors, Mapping) else self.colors
            object.__setattr__(self, "colors", tuple(sorted((str(k), as_simplex(v)) for k, v in colors)))
        if self.names is not None:
            names = self.names.items() if isinstance(self.names, Mapping) else self.names
            object.__setattr__(self, "names", tuple(sorted((str(k), int(v)) for k, v in names)))
        simplices = tuple(sorted(c for c in cones if c))
        object.__setattr__(self, "simplices", simplices)
        dominated = {f for o in simplices for k in range(1, len(o)) for f in itertools.combinations(o, k)}
        maximal = tuple(c for c in simplices if c not in dominated)
        object.__setattr__(self, "maximal_cones", maximal)

    # -- marking helpers ---------------------------------------------------

    @property
    def has_marking(self) -> bool:
        return self.boundary is not None

    def is_interior(self, ray: int) -> bool:
        if self.boundary is None:
            raise InputError("fan carries no boundary marking")
        return ray not in self.boundary

    @property
    def interior_rays(self) -> frozenset[int]:
        if self.boundary is None:
            raise InputError("fan carries no boundary marking")
        return frozenset(range(len(self.rays))) - self.boundary

    @property
    def ray_colors(self) -> dict[int, str]:
        out: dict[int, str] = {}
        for label, rays in self.colors or ():
            for r in rays:
                out[r] = label
        return out

    def require_simplex(self, s: Iterable[int]) -> Simplex:
        t = as_simplex(s)
        if not t or t not in self.cones:
            raise InputError(f"{list(t)} is not a simplex of the fan", witness=list(t))
        return t

    def ray_id(self, token: str | int) -> int:
        """Resolve a ray given by index or by a name from the fan's name table."""
        if isinstance(token, int):
            idx = token
        elif token.lstrip("-").isdigit():
            idx = int(token)
        else:
            table = dict(self.names or ())
            if token not in table:
                raise InputError(f"unknown ray name {token!r}")
            idx = table[token]
        if not 0 <= idx < len(self.rays):
            raise InputError(f"ray index {idx} out of range")
        return idx

    def is_cone(self, rays: Iterable[int]) -> bool:
        return as_simplex(rays) in self.cones


# ---------------------------------------------------------------------------
# Validation


class Violation(NamedTuple):
    kind: str
    detail: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def repairable(self) -> bool:
        """True when every violation is a missing face (fixed by face closure)."""
        return bool(self.violations) and all(v.kind == "A1" for v in self.violations)

    def to_json(self) -> dict:
        return {
            "valid": self.ok,
            "repairable": self.repairable,
            "violations": [v.to_json() for v in self.violations],
        }


def face_closure(fan: Fan) -> Fan:
    """Repair axiom A1 by adding every face of every cone."""
    closed = {f for c in fan.cones for f in faces(c, include_empty=True)}
    return Fan(fan.dim, fan.rays, frozenset(closed), fan.mode, fan.boundary,
               fan.colors, fan.full_boundary, fan.names)


def _intersection_witness(fan: Fan, c1: Simplex, c2: Simplex) -> list[Fraction] | None:
    """A point of cone(c1) ∩ cone(c2) outside the cone on their shared rays.

    Solves ``V λ - W μ = 0, λ, μ >= 0, Σ_{v ∉ shared} λ_v = 1`` exactly.  Since
    the shared rays are part of both (independent) generating sets, a point of
    the intersection lies in the shared cone iff its coordinates on the
    unshared generators of ``c1`` vanish.
    """
    shared = set(c1) & set(c2)
    only1 = [r for r in c1 if r not in shared]
    if not only1:
        return None
    a = [[fan.rays[r][i] for r in c1] + [-fan.rays[r][i] for r in c2] for i in range(fan.dim)]
    a.append([1 if r in only1 else 0 for r in c1] + [0] * len(c2))
    b = [0] * fan.dim + [1]
    sol = _exact.feasible_nonnegative(a, b)
    if sol is None:
        return None
    lam = sol[: len(c1)]
    point = [sum((lam[k] * fan.rays[r][i] for k, r in enumerate(c1)), Fraction(0)) for i in range(fan.dim)]
    return point


def validate_fan(fan: Fan) -> ValidationReport:
    """Check table shapes, primitivity, independence, marking and A1/A2 (or A2')."""
    out: list[Violation] = []
    if fan.dim < 1:
        return ValidationReport((Violation("dimension", {"dim": fan.dim}),))
    if fan.mode not in ("strict", "loose"):
        out.append(Violation("mode", {"mode": fan.mode}))
    seen: dict[tuple[int, ...], int] = {}
    for i, r in enumerate(fan.rays):
        if len(r) != fan.dim:
            out.append(Violation("ray-length", {"ray": i}))
            continue
        g = 0
        for x in r:
            g = gcd(g, x)
        if g == 0:
            out.append(Violation("zero-ray", {"ray": i}))
        elif g != 1:
            out.append(Violation("non-primitive", {"ray": i, "gcd": g}))
        if r in seen:
            out.append(Violation("duplicate-ray", {"rays": [seen[r], i]}))
        else:
            seen[r] = i
    n = len(fan.rays)
    bad_index = [list(c) for c in fan.simplices if any(not 0 <= x < n for x in c)]
    for c in bad_index:
        out.append(Violation("bad-index", {"cone": c}))
    if out:
        return ValidationReport(tuple(out))

    for c in fan.maximal_cones:
        if _exact.rank([fan.rays[r] for r in c]) < len(c):
            out.append(Violation("dependent", {"cone": list(c)}))

    if fan.boundary is not None:
        for r in sorted(fan.boundary):
            if not 0 <= r < n:
                out.append(Violation("bad-index", {"boundary": r}))
    if fan.colors is not None:
        owner: dict[int, str] = {}
        for label, rays in fan.colors:
            for r in rays:
                if not 0 <= r < n:
                    out.append(Violation("bad-index", {"color": label, "ray": r}))
                elif r in owner:
                    out.append(Violation("color", {"ray": r, "labels": [owner[r], label]}))
                else:
                    owner[r] = label
                if fan.boundary is None or r in fan.boundary:
                    out.append(Violation("color", {"ray": r, "reason": "colored ray must be interior"}))
    if any(v.kind in ("dependent", "bad-index") for v in out):
        return ValidationReport(tuple(out))

    if fan.mode == "strict":
        for c in fan.simplices:
            for f in faces(c):
                if f not in fan.cones:
                    out.append(Violation("A1", {"cone": list(c), "missing_face": list(f)}))
        pairs = itertools.combinations(fan.maximal_cones, 2)
        kind = "A2"
    else:
        pairs = itertools.combinations(fan.simplices, 2)
        kind = "A2'"
    for c1, c2 in pairs:
        point = _intersection_witness(fan, c1, c2) or _intersection_witness(fan, c2, c1)
        if point is not None:
            out.append(Violation(kind, {"cones": [list(c1), list(c2)], "point": [str(x) for x in point]}))
        elif kind == "A2'":
            shared = as_simplex(set(c1) & set(c2))
            if shared not in fan.cones:
                out.append(Violation(kind, {"cones": [list(c1), list(c2)], "missing": list(shared)}))
    return ValidationReport(tuple(out))


def require_valid(fan: Fan, strict: bool = False) -> None:
    from .errors import ViolationError

    report = validate_fan(fan)
    if not report.ok:
        raise ViolationError("invalid fan", witness=report.to_json())
    if strict and fan.mode != "strict":
        raise ViolationError("operation requires a strict fan", witness={"mode": fan.mode})


# ---------------------------------------------------------------------------
# Posets


@dataclass(frozen=True)
class Poset:
    elements: tuple[Simplex, ...]
    covers: tuple[tuple[Simplex, Simplex], ...]

    def rank_of(self, s: Simplex) -> int:
        return len(s) - 1


def face_poset(fan: Fan) -> Poset:
    covers = []
    for s in fan.simplices:
        for r in s:
            f = tuple(x for x in s if x != r)
            if f:
                covers.append((f, s))
    return Poset(fan.simplices, tuple(sorted(covers)))


@dataclass(frozen=True)
class OrbitPoset:
    """One orbit per cone (zero cone included), keyed by its cone."""

    orbits: tuple[Simplex, ...]
    codim: dict[Simplex, int]
    patch: dict[Simplex, tuple[Simplex, ...]]
    closure: dict[Simplex, tuple[Simplex, ...]]


def orbit_poset(fan: Fan) -> OrbitPoset:
    orbits = tuple(sorted(fan.cones, key=lambda c: (len(c), c)))
    codim = {c: len(c) for c in orbits}
    patch = {c: tuple(f for f in orbits if set(f) <= set(c)) for c in orbits}
    closure = {c: tuple(o for o in orbits if set(c) <= set(o)) for c in orbits}
    return OrbitPoset(orbits, codim, patch, closure)


# ---------------------------------------------------------------------------
# Stars and marked subcomplexes


def _check_subset(fan: Fan, s: Iterable[Sequence[int]]) -> frozenset[Simplex]:
    return frozenset(fan.require_simplex(t) for t in s)


def star(fan: Fan, s: Iterable[Sequence[int]]) -> frozenset[Simplex]:
    """Simplices having at least one vertex whose 0-simplex belongs to ``s``."""
    s = _check_subset(fan, s)
    verts = {t[0] for t in s if len(t) == 1}
    return frozenset(t for t in fan.simplices if verts.intersection(t))


def is_closed_orbit_set(fan: Fan, s: Iterable[Sequence[int]]) -> bool:
    s = _check_subset(fan, s)
    return star(fan, s) == s


def sigma_subsets(fan: Fan) -> tuple[frozenset[Simplex], frozenset[Simplex]]:
    """The all-interior subcomplex and the simplices with some interior ray."""
    interior = fan.interior_rays
    closed = frozenset(t for t in fan.simplices if interior.issuperset(t))
    open_ = frozenset(t for t in fan.simplices if interior.intersection(t))
    return closed, open_


def sigma_R_c(fan: Fan, color_subset: Iterable[str]) -> frozenset[Simplex]:
    """Fully colored simplices whose set of colors is exactly ``color_subset``."""
    wanted = frozenset(color_subset)
    if not wanted:
        raise InputError("color subset must be nonempty")
    declared = {label for label, _ in fan.colors or ()}
    unknown = wanted - declared
    if unknown:
        raise InputError(f"unknown color labels {sorted(unknown)}")
    colors = fan.ray_colors
    out = set()
    for t in fan.simplices:
        if all(r in colors for r in t) and {colors[r] for r in t} == wanted:
            out.add(t)
    return frozenset(out)


def geometric_boundary(rays: Sequence[Sequence[int]]) -> frozenset[int]:
    """Rays lying on a supporting hyperplane of the cone they generate.

    Intended for fans whose support is a full-dimensional pointed convex cone,
    in which case this is the set of rays on the topological boundary.
    """
    d = len(rays[0])
    n = len(rays)
    on_boundary: set[int] = set()
    for subset in itertools.combinations(range(n), d - 1):
        kernel = _exact.nullspace([rays[i] for i in subset], d)
        if len(kernel) != 1:
            continue
        normal = kernel[0]
        values = [sum((normal[k] * r[k] for k in range(d)), Fraction(0)) for r in rays]
        if all(v >= 0 for v in values) or all(v <= 0 for v in values):
            on_boundary.update(i for i, v in enumerate(values) if v == 0)
    return frozenset(on_boundary)


def in_regime(fan: Fan) -> bool:
    """Marking gate used for the acyclicity suites.

    The marking must agree with the geometric boundary of the support, the
    interior rays must span a nonempty connected all-interior subcomplex, and
    every maximal simplex must contain an interior ray.
    """
    if fan.boundary is None or not fan.rays:
        return False
    if _exact.rank(fan.rays) < fan.dim:
        return False
    if geometric_boundary(fan.rays) != fan.boundary:
        return False
    closed, _ = sigma_subsets(fan)
    interior = sorted(fan.interior_rays)
    if not interior:
        return False
    if not all(fan.interior_rays.intersection(m) for m in fan.maximal_cones):
        return False
    reach = {interior[0]}
    frontier = [interior[0]]
    while frontier:
        v = frontier.pop()
        for t in closed:
            if len(t) == 2 and v in t:
                w = t[0] if t[1] == v else t[1]
                if w not in reach:
                    reach.add(w)
                    frontier.append(w)
    return reach == set(interior)


# ---------------------------------------------------------------------------
# Subdivisions


def barycentric_subdivision(fan: Fan) -> Fan:
    """Barycentric subdivision; vertex ``i`` of the result is ``fan.simplices[i]``.

    The barycenter ray of a simplex is the primitive vector along the sum of
    its generators.  When the input carries a marking, a barycenter is
    interior exactly when its simplex has an interior ray.
    """
    index = {s: i for i, s in enumerate(fan.simplices)}
    rays = []
    for s in fan.simplices:
        total = [sum(fan.rays[r][k] for r in s) for k in range(fan.dim)]
        rays.append(_exact.primitive(total))
    chains: set[Simplex] = set()

    def extend(chain: list[Simplex]) -> None:
        chains.add(as_simplex(index[c] for c in chain))
        last = set(chain[-1])
        for s in fan.simplices:
            if last < set(s):
                extend(chain + [s])

    for s in fan.simplices:
        extend([s])
    boundary = None
    if fan.boundary is not None:
        _, open_ = sigma_subsets(fan)
        boundary = frozenset(i for s, i in index.items() if s not in open_)
    return Fan(fan.dim, tuple(rays), frozenset(chains), "strict", boundary, None, fan.full_boundary)


class PosetInterval(NamedTuple):
    lower: Simplex
    upper: Simplex

    @property
    def dim(self) -> int:
        return len(self.upper) - len(self.lower)


class CubeFace(NamedTuple):
    """A face of the unit cube: coordinates at 0, at 1, and free."""

    z: Simplex
    o: Simplex
    f: Simplex

    @property
    def dim(self) -> int:
        return len(self.f)


def cubical_decomposition(s: Sequence[int]) -> list[PosetInterval]:
    """Cells ``[lower, upper]`` with ``lower`` nonempty and ``lower ⊆ upper ⊆ s``."""
    s = as_simplex(s)
    out = []
    for upper in faces(s):
        for lower in faces(upper):
            out.append(PosetInterval(lower, upper))
    return sorted(out, key=lambda c: (c.dim, c.lower, c.upper))


def cubical_to_dual(interval: PosetInterval, ambient: Sequence[int]) -> CubeFace:
    """Send a cell of the cubical decomposition to the matching face of the cube.

    The lower end of the interval records the coordinates at 0, the rays added
    along the interval are free, and the rays outside the upper end sit at 1.
    Vertices of the simplex go to the cube vertices next to the origin, and the
    barycenter goes to the origin itself.
    """
    amb = set(ambient)
    lower, upper = as_simplex(interval.lower), as_simplex(interval.upper)
    if not lower or not set(lower) <= set(upper) or not set(upper) <= amb:
        raise InputError("interval is not contained in the ambient simplex",
                         witness={"lower": list(lower), "upper": list(upper), "ambient": sorted(amb)})
    return CubeFace(lower, as_simplex(amb - set(upper)), as_simplex(set(upper) - set(lower)))


def boundary_cube_faces(ambient: Sequence[int]) -> list[CubeFace]:
    """Faces of the cube on ``ambient`` that pass through the origin (some coordinate 0)."""
    amb = as_simplex(ambient)
    out = []
    for labels in itertools.product("zof", repeat=len(amb)):
        parts = {k: as_simplex(r for r, lab in zip(amb, labels) if lab == k) for k in "zof"}
        if parts["z"]:
            out.append(CubeFace(parts["z"], parts["o"], parts["f"]))
    return sorted(out)
