"""Seeded generators for property campaigns."""
from __future__ import annotations

import cmath
import math
from typing import Optional

import numpy as np

from .arcs import AdmissiblePath, CurvatureArc, arc_from_tangent, arc_through, validate_admissible
from .geometry import DISK, GeneralizedCircle, GeometryError, MoebiusMap, cross
from .horocycle import Horodisk

MAX_RETRIES = 100


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_disk_point(rng, rmax: float = 0.95) -> complex:
    r = rmax * math.sqrt(rng.uniform())
    return r * cmath.exp(2j * math.pi * rng.uniform())


def random_automorphism(rng, rmax: float = 0.9) -> MoebiusMap:
    return MoebiusMap.disk_auto(rng.uniform(-math.pi, math.pi), random_disk_point(rng, rmax))


def random_horodisk(rng, rmin: float = 0.05, rmax: float = 0.95) -> Horodisk:
    return Horodisk(cmath.exp(2j * math.pi * rng.uniform()), rng.uniform(rmin, rmax))


def random_generalized_circle(rng, model: str = DISK) -> GeneralizedCircle:
    """A circle or line meeting the model region, mixing the three classes."""
    kind = rng.integers(4)
    if model == DISK:
        if kind == 0:
            return GeneralizedCircle.line(random_disk_point(rng, 0.9), cmath.exp(1j * rng.uniform(0, math.pi)))
        c = random_disk_point(rng, 0.9)
        gap = 1 - abs(c)
        if kind == 1:  # horocyclic
            if abs(c) < 1e-3:
                c = 0.5
            return GeneralizedCircle.circle(c, 1 - abs(c))
        if kind == 2:  # interior
            return GeneralizedCircle.circle(c, gap * rng.uniform(0.05, 0.95))
        if abs(c) < 1e-3:
            c = 0.3
        # crossing: radius strictly between 1 - |c| and 1 + |c|
        return GeneralizedCircle.circle(c, gap + 2 * abs(c) * rng.uniform(0.02, 0.98))
    x = rng.uniform(-3, 3)
    if kind == 0:
        return GeneralizedCircle.line(complex(x, rng.uniform(0.1, 2)),
                                      cmath.exp(1j * rng.uniform(0, math.pi)))
    R = rng.uniform(0.1, 3)
    if kind == 1:
        return GeneralizedCircle.circle(complex(x, R), R)
    if kind == 2:
        return GeneralizedCircle.circle(complex(x, R * rng.uniform(1.05, 4)), R)
    return GeneralizedCircle.circle(complex(x, R * rng.uniform(-0.95, 0.95)), R)


def arc_to_point(p: complex, tangent: complex, q: complex, model: str = DISK,
                 strict: bool = True) -> CurvatureArc:
    """The arc leaving p in direction ``tangent`` that ends at q."""
    T = tangent / abs(tangent)
    d = q - p
    k_e = 2 * cross(T, d) / abs(d) ** 2
    if abs(k_e) * abs(d) < 1e-12:
        if abs(cross(T, d)) > 1e-12 * abs(d) or (T.conjugate() * d).real <= 0:
            raise GeometryError("target is behind the start on the tangent line")
        return CurvatureArc.segment(p, q, model, strict)
    center = p + 1j * T / k_e
    return CurvatureArc.circular(center, 1 / abs(k_e), p, q, 1 if k_e > 0 else -1, model, strict)


def random_admissible_arc(rng, rmax: float = 0.9) -> CurvatureArc:
    a = random_disk_point(rng, rmax)
    while True:
        b = random_disk_point(rng, rmax)
        if abs(a - b) > 1e-3:
            return arc_through(a, b, rng.uniform(-1.999, 1.999), int(rng.choice((-1, 1))))


def random_admissible_chain(rng, pieces: Optional[int] = None, rmax: float = 0.9) -> AdmissiblePath:
    """C^1 chain of 2-4 constant-curvature pieces, by rejection sampling.

    The first piece joins two random points; each further piece continues the
    tangent with a random curvature in (-2, 2) and a random euclidean length.
    """
    n = pieces if pieces is not None else int(rng.integers(2, 5))
    for _ in range(MAX_RETRIES):
        try:
            chain = [random_admissible_arc(rng, rmax)]
            for _k in range(n - 1):
                prev = chain[-1]
                room = 1 - abs(prev.end)
                chain.append(arc_from_tangent(prev.end, prev.end_tangent, rng.uniform(-1.99, 1.99),
                                              rng.uniform(0.05, 1.0) * max(room, 0.05)))
        except GeometryError:
            continue
        path = AdmissiblePath(chain, DISK)
        if validate_admissible(path).ok:
            return path
    raise GeometryError("no admissible chain found within the retry budget")


def random_scene_obstacles(rng, n: int, rmin: float = 0.05, rmax: float = 0.6,
                           attempts: int = 2000) -> list:
    """Up to n horodisks with pairwise disjoint closures."""
    out = []
    for _ in range(attempts):
        if len(out) == n:
            break
        h = random_horodisk(rng, rmin, rmax)
        if all(abs(h.center - g.center) > h.radius + g.radius + 1e-6 for g in out):
            out.append(h)
    return out


def random_free_point(rng, obstacles, rmax: float = 0.97, attempts: int = 10_000) -> complex:
    for _ in range(attempts):
        z = random_disk_point(rng, rmax)
        if all(abs(z - h.center) > h.radius for h in obstacles):
            return z
    raise GeometryError("could not find a free point")
