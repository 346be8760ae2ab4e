"""Hyperbolic densities of model domains and the sharp lower bound.

Densities are ratios nu_G = lambda_G / lambda_D with lambda_D = 1/(1-|z|^2),
i.e. the metric normalized to curvature -4.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .conformal import MapChain, MoebiusStep, PowerStep, ScaleStep
from .geometry import GeometryError, MoebiusMap, hyp_distance
from .horocycle import (
    ClassCDomain,
    HoroCrescent,
    Horodisk,
    Lens,
    STANDARD_CRESCENT,
    distance_to_horocycle,
)

GRID_POINTS = 10_000
T_MAX = 5.0


# --------------------------------------------------------------------------
# the bound and its reciprocal


def strip_density(w: complex, K: float, c: float) -> float:
    """Density of the strip |Im w - c| < K pi / 2."""
    y = (w.imag - c) / K
    if not abs(y) < math.pi / 2:
        raise GeometryError("point outside the strip")
    return 1 / (2 * K * math.cos(y))


def _x_over_sin(x: float) -> float:
    """pi x / sin(pi x) for x in (0, 1), stable near 0."""
    if x < 1e-4:
        px2 = (math.pi * x) ** 2
        return 1 + px2 / 6 + 7 * px2 * px2 / 360
    return math.pi * x / math.sin(math.pi * x)


def lower_bound(d: float) -> float:
    """(pi e^{-2d}) / sin(pi e^{-2d})."""
    if not d > 0:
        raise ValueError("distance must be positive")
    return _x_over_sin(math.exp(-2 * d))


def lower_bound_pseudo(e: float) -> float:
    """((1-e)/(1+e)) pi / sin(pi (1-e)/(1+e))."""
    if not 0 < e < 1:
        raise ValueError("pseudo-distance must lie in (0, 1)")
    return _x_over_sin((1 - e) / (1 + e))


def h(t: float) -> float:
    """(e^{2t}/pi) sin(pi e^{-2t}), the reciprocal of lower_bound."""
    if not t > 0:
        raise ValueError("t must be positive")
    return 1 / lower_bound(t)


def h_inverse(y: float, tol: float = 1e-14) -> float:
    if not 0 < y < 1:
        raise ValueError("h takes values in (0, 1)")
    lo, hi = 1e-300, 1.0
    while h(hi) < y:
        hi *= 2
        if hi > 1e3:
            raise ValueError("value too close to 1")
    return optimize.brentq(lambda t: h(t) - y, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def g(t: float) -> float:
    return t / h(t)


def s_form(s: float) -> float:
    """s times the pseudo-distance bound."""
    return s * lower_bound_pseudo(s)


@dataclass(frozen=True)
class ConstantScan:
    g_min: float
    t_star: float
    s_min: float
    s_star: float
    resolution: float
    grid_step_t: float
    grid_step_s: float


def _grid_then_golden(f, lo: float, hi: float, n: int, xtol: float):
    xs = np.linspace(lo, hi, n + 1)[1:]
    vals = np.array([f(x) for x in xs])
    k = int(np.argmin(vals))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, n - 1)]
    res = optimize.minimize_scalar(f, bracket=(a, xs[k], b), method="golden", tol=xtol)
    x = float(res.x)
    if not a <= x <= b:
        x = float(xs[k])
    return f(x), x, xs[1] - xs[0]


def scan_constants(n: int = GRID_POINTS, xtol: float = 1e-8) -> ConstantScan:
    """Minimize g(t) = t/h(t) over (0, 5] and the s-form over (0, 1)."""
    gv, t, dt = _grid_then_golden(g, 0.0, T_MAX, n, xtol)
    sv, s, ds = _grid_then_golden(s_form, 0.0, 1.0 - 1e-9, n, xtol)
    return ConstantScan(gv, t, sv, s, xtol, dt, ds)


# --------------------------------------------------------------------------
# evaluators


@dataclass(frozen=True)
class DensitySample:
    z: complex
    nu: float
    d: float
    e: float


class _Evaluator:
    name = "domain"

    def contains(self, z: complex) -> bool:  # pragma: no cover - interface
        raise NotImplementedError

    def density(self, z: complex) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def boundary_distance(self, z: complex) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def evaluate(self, z: complex) -> DensitySample:
        z = complex(z)
        if not self.contains(z):
            raise GeometryError(f"{z} is outside the {self.name}")
        d = self.boundary_distance(z)
        return DensitySample(z, self.density(z), d, math.tanh(d))


@dataclass(frozen=True)
class CrescentEvaluator(_Evaluator):
    """Horo-crescent; ``method`` picks the closed form or the strip transport."""

    crescent: HoroCrescent = STANDARD_CRESCENT
    method: str = "transport"
    name = "horo-crescent"

    def contains(self, z):
        return self.crescent.contains(z)

    def boundary_distance(self, z):
        return distance_to_horocycle(z, self.crescent.removed)

    def density(self, z):
        if self.method == "closed":
            return horocrescent_density(z, self.crescent.removed)
        return horocrescent_density_transport(z, self.crescent.removed)


def horocrescent_density(z: complex, removed: Horodisk = STANDARD_CRESCENT.removed) -> float:
    """Closed form in terms of the distance d to the removed horocycle."""
    z = complex(z)
    if not HoroCrescent(removed).contains(z):
        raise GeometryError("point outside the horo-crescent")
    d = distance_to_horocycle(z, removed)
    if d == 0:
        raise GeometryError("point on the removed horocycle")
    return lower_bound(d)


def horocrescent_density_transport(z: complex, removed: Horodisk = STANDARD_CRESCENT.removed) -> float:
    """Strip density pulled back by the chart of the removed horodisk."""
    z = complex(z)
    if not HoroCrescent(removed).contains(z):
        raise GeometryError("point outside the horo-crescent")
    T = removed.chart()
    w = T(z)
    return strip_density(w, 1 / math.pi, 0.5) * abs(T.derivative(z)) * (1 - abs(z) ** 2)


def _digon_chain(a: complex, b: complex, ray1: complex, ray2: complex, inner: complex):
    """Map of a circular digon with vertices a, b onto the upper half-plane.

    ray1/ray2 are points on the two boundary arcs, ``inner`` an interior point.
    Returns (chain, opening angle).
    """
    M = MoebiusMap(1, -a, 1, -b)
    angs = [cmath.phase(M(p)) for p in (ray1, ray2)]
    beta = cmath.phase(M(inner))
    two_pi = 2 * math.pi
    opts = []
    for s, t in ((angs[0], angs[1]), (angs[1], angs[0])):
        width = (t - s) % two_pi
        if (beta - s) % two_pi < width:
            opts.append((s, width))
    if len(opts) != 1:
        raise GeometryError("could not resolve the digon sector")
    start, theta = opts[0]
    chain = MapChain((MoebiusStep(M), ScaleStep(cmath.exp(-1j * start)), PowerStep(math.pi / theta)))
    return chain, theta


def _arc_point(center: complex, radius: float, a: complex, b: complex, keep) -> complex:
    """Midpoint of the arc of the circle between a and b selected by ``keep``."""
    ta, tb = cmath.phase(a - center), cmath.phase(b - center)
    t = ta + ((tb - ta) % (2 * math.pi)) / 2
    p = center + radius * cmath.exp(1j * t)
    if keep(p):
        return p
    return center - (p - center)


def _digon_density(chain: MapChain, z: complex) -> float:
    w, dw = chain.value_and_derivative(z)
    if not w.imag > 0:
        raise GeometryError("point maps outside the half-plane")
    return abs(dw) * (1 - abs(z) ** 2) / (2 * w.imag)


@dataclass(frozen=True)
class LensEvaluator(_Evaluator):
    lens: Lens
    name = "lens"
    chain: MapChain = field(init=False, repr=False, compare=False)
    angle: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        L = self.lens
        hp, hm = L.hplus, L.hminus
        q1 = _arc_point(hp.center, hp.radius, L.a, L.b, lambda p: abs(p - hm.center) < hm.radius)
        q2 = _arc_point(hm.center, hm.radius, L.a, L.b, lambda p: abs(p - hp.center) < hp.radius)
        chain, theta = _digon_chain(L.a, L.b, q1, q2, 0.5 * (q1 + q2))
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "angle", theta)

    def contains(self, z):
        return self.lens.contains(z)

    def boundary_distance(self, z):
        return min(distance_to_horocycle(z, self.lens.hplus, inside=True),
                   distance_to_horocycle(z, self.lens.hminus, inside=True))

    def density(self, z):
        return _digon_density(self.chain, z)


def lens_density(L: Lens, z: complex) -> float:
    ev = LensEvaluator(L)
    z = complex(z)
    if not ev.contains(z):
        raise GeometryError("point outside the lens")
    return ev.density(z)


@dataclass(frozen=True)
class ClassCEvaluator(_Evaluator):
    """D1 minus closure(D2), a digon with right angles at its vertices."""

    domain: ClassCDomain
    name = "class-C domain"
    chain: MapChain = field(init=False, repr=False, compare=False)
    angle: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        D1, D2 = self.domain.d1, self.domain.d2
        a, b = self.domain.vertices()
        c1, r1 = D1.euclid_center, D1.euclid_radius
        c2, r2 = D2.euclid_center, D2.euclid_radius
        q1 = _arc_point(c1, r1, a, b, lambda p: abs(p - c2) > r2)
        q2 = _arc_point(c2, r2, a, b, lambda p: abs(p - c1) < r1)
        # an interior point: step from the concave arc toward the far side of D1
        inner = 0.5 * (q1 + q2)
        chain, theta = _digon_chain(a, b, q1, q2, inner)
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "angle", theta)

    def contains(self, z):
        return self.domain.contains(z)

    def boundary_distance(self, z):
        D1, D2 = self.domain.d1, self.domain.d2
        return min(D1.radius - hyp_distance(0j + D1.center, z), hyp_distance(z, D2.center) - D2.radius)

    def density(self, z):
        return _digon_density(self.chain, z)


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class BoundCertificate:
    samples: tuple  # (z, nu, d, ratio)
    min_ratio: float
    argmin: complex
    skipped: tuple = ()

    @property
    def passed(self) -> bool:
        return self.min_ratio >= 1 - 1e-9


def _ratios(evaluator, points):
    out, skipped = [], []
    for z in points:
        try:
            s = evaluator.evaluate(z)
        except GeometryError:
            skipped.append(complex(z))
            continue
        out.append((s.z, s.nu, s.d, s.nu / lower_bound(s.d)))
    return out, skipped


def verify_theorem2(evaluator, samples: Sequence[complex], workers: int = 1) -> BoundCertificate:
    """Ratio nu / lower_bound(d) over the samples; points outside the domain are skipped."""
    pts = [complex(z) for z in samples]
    if not pts:
        raise ValueError("empty sample set")
    if workers > 1 and len(pts) > 1:
        chunks = [pts[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_ratios, [evaluator] * workers, chunks))
        # restore the input order so the result does not depend on scheduling
        order = {z: i for i, z in reversed(list(enumerate(pts)))}
        rows = sorted((r for part, _ in parts for r in part), key=lambda r: order[r[0]])
        skipped = tuple(sorted((s for _, sk in parts for s in sk), key=lambda z: order[z]))
    else:
        rows, skipped = _ratios(evaluator, pts)
        skipped = tuple(skipped)
    if not rows:
        raise ValueError("no sample lies in the domain")
    k = min(range(len(rows)), key=lambda i: rows[i][3])
    return BoundCertificate(tuple(rows), rows[k][3], rows[k][0], skipped)


def crescent_ray_samples(n: int = 1000, rays: int = 20) -> list:
    """Points of the standard crescent along rays from the origin."""
    per = max(1, n // rays)
    out = []
    for k in range(rays):
        th = 2 * math.pi * (k + 0.5) / rays
        lo = max(0.0, math.cos(th))
        rs = np.linspace(lo, 1.0, per + 2)[1:-1]
        out.extend(complex(r * math.cos(th), r * math.sin(th)) for r in rs)
    return out


def lens_samples(L: Lens, n: int, rng) -> list:
    """Uniform points of the lens by rejection from its bounding box."""
    hp, hm = L.hplus, L.hminus
    lo_x = max(hp.center.real - hp.radius, hm.center.real - hm.radius)
    hi_x = min(hp.center.real + hp.radius, hm.center.real + hm.radius)
    lo_y = max(hp.center.imag - hp.radius, hm.center.imag - hm.radius)
    hi_y = min(hp.center.imag + hp.radius, hm.center.imag + hm.radius)
    out = []
    while len(out) < n:
        z = complex(rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))
        if L.contains(z):
            out.append(z)
    return out


def sector_samples(evaluator, n_angle: int = 20, n_radius: int = 25, span: float = 3.0) -> list:
    """Grid of a digon evaluator (lens or class C) in its sector coordinates.

    Angles sit at cell centers of the opening, radii of (z-a)/(z-b) are
    log-spaced in [e^-span, e^span]. The ratio nu/bound tends to 1 at every
    boundary point, so a grid that stays off the boundary shows the strict gap.
    """
    M = evaluator.chain.steps[0].m.inverse()
    rot = evaluator.chain.steps[1].k
    out = []
    for i in range(n_angle):
        psi = evaluator.angle * (i + 0.5) / n_angle
        for j in range(n_radius):
            rho = math.exp(-span + 2 * span * (j + 0.5) / n_radius)
            out.append(M(rho * cmath.exp(1j * psi) / rot))
    return out


# --------------------------------------------------------------------------
# Schwarz-Pick type bound


@dataclass(frozen=True)
class SchwarzPickReport:
    lhs: float
    rhs: float
    slack: float
    covering_radius: float
    image: complex


def schwarz_pick_check(f: MapChain, evaluator, z: complex = 0j) -> SchwarzPickReport:
    """(1-|z|^2)|f'(z)|/(1-|f(z)|^2) against h(d_G(f(z))).

    ``covering_radius`` is h^{-1} of the left side at the origin: the
    hyperbolic radius of the disk about f(0) covered by f.
    """
    z = complex(z)
    w, dw = f.value_and_derivative(z)
    if not evaluator.contains(w):
        raise GeometryError("f(z) lies outside the domain")
    lhs = (1 - abs(z) ** 2) * abs(dw) / (1 - abs(w) ** 2)
    rhs = h(evaluator.boundary_distance(w))
    w0, dw0 = f.value_and_derivative(0j)
    lhs0 = abs(dw0) / (1 - abs(w0) ** 2)
    return SchwarzPickReport(lhs, rhs, rhs - lhs, h_inverse(lhs0), w)


def shrunk(f: MapChain, k: float = 0.5) -> MapChain:
    """f composed with z -> k z."""
    return MapChain((ScaleStep(k),) + f.steps)
