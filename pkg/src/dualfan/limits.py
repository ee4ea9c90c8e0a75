"""Limits of curves in the open cone, computed two independent ways.

A curve lives in the chart of a maximal cone and is given by its linear
coordinates as functions of a parameter ``s -> oo``:

* coordinates in ``J`` stay constant at ``q0``;
* coordinates in ``slow`` grow like ``q0 * sqrt(s)``;
* all other chart coordinates grow like ``q0 * s``.

With ``slow`` empty this is the standard two-speed family.  The slow rate is
what lets a curve land on a proper face of the simplex at infinity while its
toroidal limit keeps those coordinates at 0.

The closed forms :func:`limit_linear` and :func:`limit_toroidal` are exact.
:func:`classify_sequence` instead looks only at sampled points and decides
the limit by a Cauchy test on the tail, which makes it a useful independent
oracle for the combinatorial formulas in :mod:`dualfan.lcm`.
"""

from __future__ import annotations

import math
import random
from collections.abc import Sequence as SequenceABC
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InputError
from .fan import Fan, Simplex, as_simplex
from .homology import ProductCell
from .lcm import lcm_boundary, normalize_variant, EXCENTRIC
from .toroidal import DualCell

DEFAULT_TOL = Fraction(1, 2 ** 20)
DEFAULT_SAMPLES = 64
_EXP_CUTOFF = 745  # exp(-q) underflows to 0.0 beyond this


@dataclass(frozen=True)
class ConePoint:
    chart: Simplex
    q: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "chart", as_simplex(self.chart))
        q = {int(r): Fraction(v) for r, v in dict(self.q).items()}
        if any(v <= 0 for v in q.values()):
            raise InputError("linear coordinates of a cone point must be positive")
        if not set(q) <= set(self.chart):
            raise InputError("point support is not inside its chart")
        object.__setattr__(self, "q", q)

    @classmethod
    def _trusted(cls, chart: Simplex, q: dict[int, Fraction]) -> "ConePoint":
        """Skip validation for points built by :func:`eval_curve`."""
        p = object.__new__(cls)
        object.__setattr__(p, "chart", chart)
        object.__setattr__(p, "q", q)
        return p


@dataclass(frozen=True)
class CurveSpec:
    chart: Simplex
    J: frozenset[int]
    q0: Mapping[int, Fraction]
    slow: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        chart = as_simplex(self.chart)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "J", frozenset(self.J))
        object.__setattr__(self, "slow", frozenset(self.slow))
        q0 = {int(r): Fraction(v) for r, v in dict(self.q0).items()}
        object.__setattr__(self, "q0", q0)
        if not self.J <= set(chart) or not self.slow <= set(chart) - self.J:
            raise InputError("held and slow coordinates must be disjoint subsets of the chart")
        if set(q0) != set(chart):
            raise InputError("q0 must give a value for every chart ray")
        for r in chart:
            if q0[r] < 0 or (r not in self.J and q0[r] == 0):
                raise InputError(f"q0 must be positive off the held set (ray {r})")

    @property
    def escaping(self) -> Simplex:
        return as_simplex(set(self.chart) - self.J)

    def to_json(self) -> dict:
        return {"chart": list(self.chart), "J": sorted(self.J), "slow": sorted(self.slow),
                "q0": {str(r): str(v) for r, v in sorted(self.q0.items())}}


def curve_from_obj(doc: Mapping) -> CurveSpec:
    try:
        q0 = {int(k): Fraction(str(v)) for k, v in doc["q0"].items()}
        return CurveSpec(tuple(doc["chart"]), frozenset(doc.get("J", ())), q0, frozenset(doc.get("slow", ())))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed curve description: {exc}") from exc


def _sqrt(s: Fraction) -> Fraction:
    num, den = math.isqrt(s.numerator), math.isqrt(s.denominator)
    if num * num == s.numerator and den * den == s.denominator:
        return Fraction(num, den)
    return Fraction(math.sqrt(s))


def eval_curve(c: CurveSpec, s: Fraction | int, allow_faces: bool = False) -> ConePoint:
    """Exact point of the curve at parameter ``s``.

    A held coordinate with ``q0 = 0`` puts the point on a face of the chart;
    that is refused unless ``allow_faces`` is set, in which case the ray is
    simply absent from the point's support.
    """
    s = Fraction(s)
    if s <= 0:
        raise InputError("curve parameter must be positive")
    root = _sqrt(s) if c.slow else s
    q = {}
    for r in c.chart:
        if r in c.J:
            value = c.q0[r]
        elif r in c.slow:
            value = c.q0[r] * root
        else:
            value = c.q0[r] * s
        if value == 0:
            if not allow_faces:
                raise InputError(f"coordinate of ray {r} vanishes; the point is not in the open chart")
            continue
        q[r] = value
    return ConePoint._trusted(c.chart, q)


class CurveSamples(SequenceABC):
    """Lazily evaluated points of a curve at ``s = 1, 2, 4, ..., 2**(count-1)``.

    Classifiers only read the tail, so evaluating on demand avoids the cost
    of the exact arithmetic for the early points.
    """

    def __init__(self, curve: CurveSpec, count: int):
        if count < 1:
            raise InputError("need at least one sample")
        self.curve = curve
        self.count = count
        self._cache: dict[int, ConePoint] = {}

    @property
    def chart(self) -> Simplex:
        return self.curve.chart

    def __len__(self) -> int:
        return self.count

    def _point(self, k: int) -> ConePoint:
        if k not in self._cache:
            self._cache[k] = eval_curve(self.curve, Fraction(2) ** k, allow_faces=True)
        return self._cache[k]

    def __getitem__(self, index):  # type: ignore[override]
        if isinstance(index, slice):
            return [self._point(k) for k in range(*index.indices(self.count))]
        if index < 0:
            index += self.count
        if not 0 <= index < self.count:
            raise IndexError(index)
        return self._point(index)


def geometric_samples(c: CurveSpec, count: int = DEFAULT_SAMPLES) -> CurveSamples:
    """Points at ``s = 1, 2, 4, ..., 2**(count-1)``."""
    return CurveSamples(c, count)


def _charts(points: Sequence[ConePoint]) -> set[Simplex]:
    if isinstance(points, CurveSamples):
        return {points.chart}
    return {p.chart for p in points}


# ---------------------------------------------------------------------------
# Closed-form limits


@dataclass(frozen=True)
class LinearLimit:
    stratum: Simplex
    coords: Mapping[int, Fraction]

    def to_json(self) -> dict:
        return {"stratum": list(self.stratum), "coords": {str(r): str(v) for r, v in sorted(self.coords.items())}}


@dataclass(frozen=True)
class ToroidalLimit:
    cell: DualCell
    # ray -> (exponent e, exp(-e)) for held rays; the exponent is None when only
    # the sampled value is known
    coords: Mapping[int, tuple[Fraction | None, float]]

    def to_json(self) -> dict:
        return {"cell": self.cell.to_json(),
                "coords": {str(r): {"exponent": None if e is None else str(e), "value": v} for r, (e, v) in sorted(self.coords.items())}}


@dataclass(frozen=True)
class LimitPair:
    """Limit in both compactifications; ``kind`` is ``boundary`` or ``interior``."""

    kind: str
    linear: LinearLimit | None = None
    toroidal: ToroidalLimit | None = None
    diagnostic: str = ""

    @property
    def cell(self) -> ProductCell | None:
        if self.kind != "boundary" or self.linear is None or self.toroidal is None:
            return None
        return ProductCell(self.linear.stratum, self.toroidal.cell)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.linear is not None:
            out["linear"] = self.linear.to_json()
        if self.toroidal is not None:
            out["toroidal"] = self.toroidal.to_json()
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


INTERIOR = LimitPair("interior", diagnostic="no coordinate escapes; the curve stays bounded")


def limit_linear(c: CurveSpec) -> LinearLimit | LimitPair:
    if not c.escaping:
        return INTERIOR
    fast = [r for r in c.escaping if r not in c.slow] or list(c.escaping)
    total = sum(c.q0[r] for r in fast)
    return LinearLimit(as_simplex(fast), {r: c.q0[r] / total for r in fast})


def limit_toroidal(c: CurveSpec) -> ToroidalLimit | LimitPair:
    if not c.escaping:
        return INTERIOR
    free = as_simplex(r for r in c.J if c.q0[r] > 0)
    coords = {r: (c.q0[r], math.exp(-c.q0[r])) for r in sorted(c.J)}
    return ToroidalLimit(DualCell(c.escaping, free), coords)


def limit_pair(c: CurveSpec) -> LimitPair:
    lin, tor = limit_linear(c), limit_toroidal(c)
    if isinstance(lin, LimitPair):
        return lin
    return LimitPair("boundary", lin, tor)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Sampled limits


@dataclass(frozen=True)
class SequenceReport:
    """Outcome of :func:`classify_sequence`.

    ``kind`` is ``boundary`` or ``interior`` when the tails settle, otherwise
    ``divergent`` (an oscillation beyond tolerance was seen) or ``undecided``.
    """

    kind: str
    pair: LimitPair | None = None
    diagnostic: str = ""

    @property
    def cell(self) -> ProductCell | None:
        return self.pair.cell if self.pair else None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.pair is not None:
            out["limit"] = self.pair.to_json()
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


def _torus_value(q: float) -> float:
    return 0.0 if q > _EXP_CUTOFF else math.exp(-q)


def _settles(series: Sequence[float], tol: float, tail: int) -> bool:
    window = series[-tail:]
    return max(window) - min(window) <= tol


def _oscillates(series: Sequence[float], tol: float, tail: int) -> bool:
    window = series[-(2 * tail):]
    steps = [b - a for a, b in zip(window, window[1:]) if abs(b - a) > tol]
    return any(x * y < 0 for x, y in zip(steps, steps[1:]))


def classify_sequence(points: Sequence[ConePoint], tol: Fraction | float = DEFAULT_TOL,
                      tail: int = 4) -> SequenceReport:
    """Decide the limit of sampled points from their tails alone."""
    if not points:
        raise InputError("cannot classify an empty sequence")
    charts = _charts(points)
    if len(charts) > 1:
        raise InputError("sequence migrates between charts; split it per chart",
                         witness=[list(c) for c in sorted(charts)])
    tol_f = float(tol)
    if tol_f <= 0:
        raise InputError("tolerance must be positive")
    chart = points[0].chart
    tail = max(1, min(tail, len(points)))
    normalized: dict[int, list[float]] = {r: [] for r in chart}
    torus: dict[int, list[float]] = {r: [] for r in chart}
    # only the last 2 * tail points are ever inspected
    for p in points[-2 * tail:]:
        qf = {r: float(v) for r, v in p.q.items()}
        total = sum(qf.values())
        for r in chart:
            q = qf.get(r, 0.0)
            normalized[r].append(q / total if total else 0.0)
            torus[r].append(_torus_value(q))
    unsettled = [r for r in chart if not (_settles(normalized[r], tol_f, tail) and _settles(torus[r], tol_f, tail))]
    if unsettled:
        if any(_oscillates(normalized[r], tol_f, tail) or _oscillates(torus[r], tol_f, tail) for r in unsettled):
            return SequenceReport("divergent", diagnostic=f"coordinates {unsettled} oscillate beyond tolerance")
        return SequenceReport("undecided", diagnostic=f"coordinates {unsettled} have not settled within tolerance")
    t_lim = {r: torus[r][-1] for r in chart}
    zero = as_simplex(r for r in chart if t_lim[r] <= tol_f)
    if not zero:
        return SequenceReport("interior", INTERIOR)
    free = as_simplex(r for r in chart if tol_f < t_lim[r] < 1 - tol_f)
    stratum = as_simplex(r for r in chart if normalized[r][-1] > tol_f)
    if not set(stratum) <= set(zero):
        return SequenceReport("undecided", diagnostic="a coordinate carries mass at infinity without escaping")
    lin = LinearLimit(stratum, {r: Fraction(normalized[r][-1]) for r in stratum})
    tor = ToroidalLimit(DualCell(zero, free), {r: (None, t_lim[r]) for r in free})
    return SequenceReport("boundary", LimitPair("boundary", lin, tor))


# ---------------------------------------------------------------------------
# Realizing curves and the sampled double inclusion


def realizing_curve(fan: Fan, cell: ProductCell) -> CurveSpec:
    """A curve whose limit pair is the given boundary cell.

    The zero rays escape, the simplex rays at full speed and the remaining
    zero rays at the slow rate; free rays are held at ``q0 = 1`` and the
    other rays of the chart at ``q0 = 0``.
    """
    a, b = cell
    chart = next((m for m in fan.maximal_cones if set(b.support) <= set(m)), None)
    if chart is None or not a or not set(a) <= set(b.z):
        raise InputError("not a boundary cell of this fan", witness=cell.to_json())
    held = frozenset(chart) - set(b.z)
    q0 = {r: Fraction(int(r not in held or r in b.f)) for r in chart}
    return CurveSpec(chart, held, q0, frozenset(b.z) - set(a))


def random_curve(fan: Fan, rng: random.Random, excentric: bool = False) -> CurveSpec | None:
    charts = list(fan.maximal_cones)
    if excentric:
        interior = fan.interior_rays
        charts = [m for m in charts if interior.intersection(m)]
    if not charts:
        return None
    chart = rng.choice(charts)
    while True:
        escaping = [r for r in chart if rng.random() < 0.5]
        if escaping and (not excentric or fan.interior_rays.intersection(escaping)):
            break
    fast = [r for r in escaping if rng.random() < 0.6] or [rng.choice(escaping)]
    slow = frozenset(escaping) - set(fast)
    held = frozenset(chart) - set(escaping)

    def value() -> Fraction:
        return Fraction(rng.randint(1, 64), 8)

    q0 = {r: (Fraction(0) if r in held and rng.random() < 0.3 else value()) for r in chart}
    return CurveSpec(chart, held, q0, slow)


@dataclass
class SampleReport:
    cells_expected: int
    cells_realized: int
    discrepancies: list = field(default_factory=list)
    seed: int = 0
    trials: int = 0
    variant: str = "full"

    @property
    def ok(self) -> bool:
        return not self.discrepancies and self.cells_expected == self.cells_realized

    def to_json(self) -> dict:
        return {"cells_expected": self.cells_expected, "cells_realized": self.cells_realized,
                "discrepancies": self.discrepancies, "seed": self.seed, "trials": self.trials,
                "variant": self.variant}


def sample_verify_lcm(fan: Fan, variant: str, trials: int, seed: int,
                      samples: int = DEFAULT_SAMPLES, tol: Fraction = DEFAULT_TOL) -> SampleReport:
    """Check the LCM boundary against sampled curve limits in both directions."""
    variant = normalize_variant(variant)
    cells = set(lcm_boundary(fan, variant).cells)
    discrepancies = []
    realized = 0
    for cell in sorted(cells, key=lambda c: (c.a, c.b)):
        curve = realizing_curve(fan, cell)
        got = classify_sequence(geometric_samples(curve, samples), tol)
        if got.cell == cell:
            realized += 1
        else:
            discrepancies.append({"type": "unrealized", "cell": cell.to_json(), "got": got.to_json()})
    rng = random.Random(seed)
    for _ in range(trials):
        curve = random_curve(fan, rng, excentric=variant == EXCENTRIC)
        if curve is None:
            break
        got = classify_sequence(geometric_samples(curve, samples), tol)
        if got.cell is None or got.cell not in cells:
            discrepancies.append({"type": "unsound", "curve": curve.to_json(), "got": got.to_json()})
    return SampleReport(len(cells), realized, discrepancies, seed, trials, variant)


# ---------------------------------------------------------------------------
# Core model


@dataclass(frozen=True)
class CoreLimit:
    """Limit in the core model: direction stratum and whether the radius escapes."""

    kind: str
    stratum: Simplex = ()
    radius_escapes: bool = False
    diagnostic: str = ""

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "stratum": list(self.stratum), "radius_escapes": self.radius_escapes}
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


def core_radius(fan: Fan, p: ConePoint) -> Fraction:
    """Radial coordinate for the core section blowing up along the boundary.

    With the section ``x̂ -> x̂ / (sum of interior normalized coordinates)`` a
    point ``x`` sits at radius equal to the sum of its interior linear
    coordinates.
    """
    interior = fan.interior_rays
    return sum((v for r, v in p.q.items() if r in interior), Fraction(0))


def core_limit(fan: Fan, curve: CurveSpec | Sequence[ConePoint], tol: Fraction | None = None,
               samples: int = DEFAULT_SAMPLES) -> CoreLimit:
    tol_f = float(tol if tol is not None else DEFAULT_TOL)
    points = geometric_samples(curve, samples) if isinstance(curve, CurveSpec) else curve
    if not points:
        raise InputError("cannot classify an empty sequence")
    chart = points[0].chart
    if len(_charts(points)) > 1:
        raise InputError("sequence migrates between charts; split it per chart")
    tail = min(4, len(points))
    inverse_radius, direction = [], {r: [] for r in chart}
    for p in points[-2 * tail:]:
        radius = float(core_radius(fan, p))
        inverse_radius.append(1 / radius if radius else math.inf)
        qf = {r: float(v) for r, v in p.q.items()}
        total = sum(qf.values())
        for r in chart:
            direction[r].append(qf.get(r, 0.0) / total)
    if math.inf in inverse_radius[-tail:]:
        return CoreLimit("outside", diagnostic="points on the boundary of the open cone")
    series = [inverse_radius] + list(direction.values())
    if not all(_settles(x, tol_f, tail) for x in series):
        kind = "divergent" if any(_oscillates(x, tol_f, tail) for x in series) else "undecided"
        return CoreLimit(kind, diagnostic="tails did not settle")
    stratum = as_simplex(r for r in chart if direction[r][-1] > tol_f)
    escapes = inverse_radius[-1] <= tol_f
    return CoreLimit("boundary" if escapes else "interior", stratum, escapes)
