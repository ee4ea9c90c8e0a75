"""Seeded random fans built by stellar subdivision of the positive orthant.

The support is always the orthant spanned by the standard basis, whose
geometric boundary is the set of rays with some zero coordinate.  A new ray
is a positive integer combination of the rays of the subdivided cone, so it
is a boundary ray exactly when that cone lies in a coordinate hyperplane and
the marking stays geometric without any extra bookkeeping.
"""

from __future__ import annotations

import random

from . import _exact
from .fan import Fan, as_simplex, faces

MAX_CONES = 40


def _subdivide(cones: set, rays: list, tau: tuple, weights: list[int]) -> None:
    new = _exact.primitive([sum(w * rays[r][k] for w, r in zip(weights, tau)) for k in range(len(rays[0]))])
    idx = len(rays)
    rays.append(new)
    for sigma in [c for c in cones if set(tau) <= set(c)]:
        cones.discard(sigma)
        for r in tau:
            cones.add(as_simplex([x for x in sigma if x != r] + [idx]))


def random_fan(seed: int, dim: int | None = None, max_cones: int = MAX_CONES) -> Fan:
    """A valid strict fan of dimension 2 to 4 with a geometric boundary marking."""
    rng = random.Random(seed)
    d = dim if dim is not None else rng.randint(2, 4)
    rays = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    cones = {tuple(range(d))}
    # the first star makes sure there is an interior ray
    _subdivide(cones, rays, tuple(range(d)), [rng.randint(1, 2) for _ in range(d)])
    target = rng.randint(len(cones), max_cones)
    for _ in range(200):
        candidates = sorted({t for c in cones for t in faces(c) if len(t) >= 2})
        tau = rng.choice(candidates)
        hit = sum(1 for c in cones if set(tau) <= set(c))
        if len(cones) + hit * (len(tau) - 1) > max_cones:
            break
        _subdivide(cones, rays, tau, [rng.randint(1, 3) for _ in tau])
        if len(cones) >= target:
            break
    boundary = frozenset(i for i, r in enumerate(rays) if 0 in r)
    all_cones = frozenset(f for c in cones for f in faces(c, include_empty=True))
    return Fan(dim=d, rays=tuple(rays), cones=all_cones, mode="strict", boundary=boundary)


def random_fans(count: int, seed: int, max_cones: int = MAX_CONES) -> list[Fan]:
    """``count`` fans with seeds derived from ``seed``; dimensions cycle 2, 3, 4."""
    return [random_fan(seed * 1000 + i, dim=2 + i % 3, max_cones=max_cones) for i in range(count)]
