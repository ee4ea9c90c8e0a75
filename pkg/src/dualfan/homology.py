"""Integer cellular homology of the complexes built elsewhere in the package.

Three kinds of cells are understood:

* simplices (sorted ray tuples), oriented by increasing ray index;
* toroidal cells :class:`~dualfan.toroidal.DualCell`, oriented by the
  cubical rule of :func:`~dualfan.toroidal.cell_boundary`;
* product cells :class:`ProductCell` with the graded Leibniz sign.

Invariant factors come from a Smith normal form over Python integers, so
there is no overflow regime to worry about.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import InputError, ViolationError
from .toroidal import DualCell, cell_boundary as dual_boundary

Chain = list[tuple[object, int]]


class ProductCell(NamedTuple):
    a: tuple[int, ...]
    b: DualCell

    @property
    def dim(self) -> int:
        return len(self.a) - 1 + len(self.b.f)

    def to_json(self) -> dict:
        return {"a": list(self.a), "b": self.b.to_json()}


def simplex_boundary(s: tuple[int, ...]) -> Chain:
    if len(s) <= 1:
        return []
    return [(s[:i] + s[i + 1:], -1 if i % 2 else 1) for i in range(len(s))]


def product_boundary(c: ProductCell) -> Chain:
    out: Chain = [(ProductCell(a, c.b), s) for a, s in simplex_boundary(c.a)]
    sign = -1 if (len(c.a) - 1) % 2 else 1
    out += [(ProductCell(c.a, b), sign * s) for b, s in dual_boundary(c.b)]
    return out


def _dimension(c: object) -> int:
    if isinstance(c, ProductCell):
        return c.dim
    if isinstance(c, DualCell):
        return c.dim
    return len(c) - 1  # type: ignore[arg-type]


def _boundary(c: object) -> Chain:
    if isinstance(c, ProductCell):
        return product_boundary(c)
    if isinstance(c, DualCell):
        return dual_boundary(c)  # type: ignore[return-value]
    return simplex_boundary(c)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Chain complexes


SparseMatrix = dict[int, dict[int, int]]  # row -> column -> entry


@dataclass(frozen=True)
class ChainComplex:
    """``boundaries[k]`` maps ``C_k`` to ``C_{k-1}``; ``boundaries[0]`` is empty."""

    ranks: tuple[int, ...]
    boundaries: tuple[SparseMatrix, ...]
    cells: tuple[tuple[object, ...], ...] = ()

    def dense(self, k: int) -> list[list[int]]:
        rows = self.ranks[k - 1] if k >= 1 else 0
        out = [[0] * self.ranks[k] for _ in range(rows)]
        for i, row in self.boundaries[k].items():
            for j, v in row.items():
                out[i][j] = v
        return out

    @property
    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.ranks))


def _compose_is_zero(outer: SparseMatrix, inner: SparseMatrix) -> bool:
    """Whether ``outer @ inner`` vanishes (both sparse, rows -> cols)."""
    outer_cols: dict[int, dict[int, int]] = defaultdict(dict)
    for r, row in outer.items():
        for i, w in row.items():
            outer_cols[i][r] = w
    inner_cols: dict[int, dict[int, int]] = defaultdict(dict)
    for i, row in inner.items():
        for j, v in row.items():
            inner_cols[j][i] = v
    for col in inner_cols.values():
        acc: dict[int, int] = defaultdict(int)
        for i, v in col.items():
            for r, w in outer_cols.get(i, {}).items():
                acc[r] += v * w
        if any(acc.values()):
            return False
    return True


def chain_complex_of(cells: Iterable[object],
                     boundary: Callable[[object], Chain] | None = None) -> ChainComplex:
    """Cellular chain complex of a finite, incidence-closed cell set."""
    cells = set(cells)
    bd = boundary or _boundary
    if not cells:
        return ChainComplex((), (), ())
    by_dim: dict[int, list[object]] = defaultdict(list)
    for c in cells:
        by_dim[_dimension(c)].append(c)
    top = max(by_dim)
    ordered = tuple(tuple(sorted(by_dim.get(k, []), key=repr)) for k in range(top + 1))
    index = [{c: i for i, c in enumerate(level)} for level in ordered]
    mats: list[SparseMatrix] = [{}]
    for k in range(1, top + 1):
        mat: SparseMatrix = defaultdict(dict)
        for j, c in enumerate(ordered[k]):
            for face, sign in bd(c):
                if face not in index[k - 1]:
                    raise InputError("cell set is not closed under taking faces",
                                     witness={"cell": repr(c), "missing_face": repr(face)})
                i = index[k - 1][face]
                mat[i][j] = mat[i].get(j, 0) + sign
        mats.append({i: {j: v for j, v in row.items() if v} for i, row in mat.items()})
    for k in range(2, top + 1):
        if not _compose_is_zero(mats[k - 1], mats[k]):
            raise ViolationError(f"boundary of boundary is nonzero in degree {k}")
    return ChainComplex(tuple(len(level) for level in ordered), tuple(mats), ordered)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return ``(D, U, V)`` with ``U A V = D`` diagonal, ``d_i | d_{i+1}``, ``U, V`` unimodular."""
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, row)) for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src: int, dst: int, q: int) -> None:  # row_dst += q * row_src
        d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(src: int, dst: int, q: int) -> None:  # col_dst += q * col_src
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        entries = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            changed = False
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // d[t][t]))
                    if d[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // d[t][t]))
                    if d[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            add_row(bad, t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return d, u, v


def invariant_factors(mat: SparseMatrix) -> list[int]:
    """Nonzero invariant factors of a sparse integer matrix.

    Unit entries are eliminated first (each contributes a factor 1); the
    leftover block, typically tiny for boundary matrices, goes through the
    dense Smith normal form.
    """
    rows = {i: dict(r) for i, r in mat.items() if r}
    cols: dict[int, set[int]] = defaultdict(set)
    for i, r in rows.items():
        for j in r:
            cols[j].add(i)
    factors: list[int] = []
    while True:
        pivot = None
        for i, r in rows.items():
            for j, val in r.items():
                if val in (1, -1):
                    pivot = (i, j, val)
                    break
            if pivot:
                break
        if pivot is None:
            break
        pi, pj, pv = pivot
        prow = rows.pop(pi)
        for j in prow:
            cols[j].discard(pi)
        for k in list(cols[pj]):
            row = rows[k]
            q = row[pj] * pv
            for j, val in prow.items():
                new = row.get(j, 0) - q * val
                if new:
                    if j not in row:
                        cols[j].add(k)
                    row[j] = new
                elif j in row:
                    del row[j]
                    cols[j].discard(k)
            if not row:
                del rows[k]
        del cols[pj]
        factors.append(1)
    if rows:
        live_cols = sorted({j for r in rows.values() for j in r})
        cidx = {j: t for t, j in enumerate(live_cols)}
        dense = [[0] * len(live_cols) for _ in rows]
        for t, r in enumerate(rows.values()):
            for j, val in r.items():
                dense[t][cidx[j]] = val
        d, _, _ = smith_normal_form(dense)
        factors += [d[t][t] for t in range(min(len(d), len(live_cols))) if d[t][t]]
    return sorted(abs(f) for f in factors)


@dataclass(frozen=True)
class HomologyReport:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]
    reduced: bool
    cell_counts: tuple[int, ...]

    @property
    def acyclic(self) -> bool:
        """Vanishing reduced homology of a nonempty complex."""
        return self.reduced and bool(self.cell_counts) and not any(self.betti) and not any(self.torsion)

    def to_json(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion], "reduced": self.reduced}


def homology(c: ChainComplex, reduced: bool = False) -> HomologyReport:
    n = len(c.ranks)
    if n == 0:
        return HomologyReport((), (), reduced, ())
    factors = [[] for _ in range(n + 1)]
    for k in range(1, n):
        factors[k] = invariant_factors(c.boundaries[k])
    if reduced:
        factors[0] = invariant_factors({0: {j: 1 for j in range(c.ranks[0])}})
    betti, torsion = [], []
    for k in range(n):
        rank_out = len(factors[k])
        rank_in = len(factors[k + 1])
        betti.append(c.ranks[k] - rank_out - rank_in)
        torsion.append(tuple(f for f in factors[k + 1] if f > 1))
    return HomologyReport(tuple(betti), tuple(torsion), reduced, c.ranks)


def homology_of(cells: Iterable[object], reduced: bool = False) -> HomologyReport:
    return homology(chain_complex_of(cells), reduced)
