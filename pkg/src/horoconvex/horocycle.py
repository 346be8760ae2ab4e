"""Horodisks, lenses E(a, b), horo-crescents and the orthogonal-disk class."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .geometry import (
    GeneralizedCircle,
    GeometryError,
    MoebiusMap,
    hyp_distance,
)


@dataclass(frozen=True)
class Horodisk:
    """Open euclidean disk internally tangent to the unit circle at ``tangency``."""

    tangency: complex
    radius: float

    def __post_init__(self):
        zeta = complex(self.tangency)
        if abs(abs(zeta) - 1) > 1e-12:
            raise GeometryError(f"tangency point {zeta} is not on the unit circle")
        if not (0 < self.radius < 1):
            raise GeometryError(f"horodisk radius must lie in (0, 1), got {self.radius}")
        object.__setattr__(self, "tangency", zeta / abs(zeta))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def center(self) -> complex:
        return (1 - self.radius) * self.tangency

    @property
    def circle(self) -> GeneralizedCircle:
        return GeneralizedCircle.circle(self.center, self.radius)

    def contains(self, z: complex, closed: bool = False, tol: float = 0.0) -> bool:
        d = abs(z - self.center)
        if closed:
            return d <= self.radius + tol
        return d < self.radius - tol

    def boundary_residual(self, z: complex) -> float:
        return abs(z - self.center) - self.radius

    def chart(self) -> MoebiusMap:
        """Möbius map of the disk onto the upper half-plane sending this horodisk
        onto {Im w > 1} and its exterior onto the strip {0 < Im w < 1}."""
        return horodisk_chart(self)


def horodisk_from_tangency(zeta: complex, r: float) -> Horodisk:
    return Horodisk(complex(zeta), r)


def horodisk_through(center: complex, radius: float) -> Horodisk:
    """Horodisk from a euclidean center/radius pair satisfying |c| + r = 1."""
    if abs(abs(center) + radius - 1) > 1e-10:
        raise GeometryError("circle is not internally tangent to the unit circle")
    return Horodisk(center / abs(center) if center != 0 else 1 + 0j, radius)


def horodisk_chart(h: Horodisk) -> MoebiusMap:
    # rotate the tangency to 1, push the radius to 1/2 along the real axis, then Cayley
    rot = MoebiusMap(h.tangency.conjugate(), 0, 0, 1, disk_automorphism=True)
    t = 2 * h.radius - 1
    push = MoebiusMap(1, t, t, 1, disk_automorphism=True)
    return MoebiusMap.cayley() @ push @ rot


def horodisks_through_pair(a: complex, b: complex) -> tuple:
    """The two horodisks whose boundary horocycles pass through a and b.

    Ordered by the argument of their tangency points, larger first.
    """
    a, b = complex(a), complex(b)
    if abs(a) >= 1 or abs(b) >= 1:
        raise GeometryError("points must lie in the open unit disk")
    if abs(a - b) < 1e-15:
        raise GeometryError("points must be distinct")
    m = (a + b) / 2
    n = 1j * (b - a) / abs(b - a)
    h2 = abs(a - m) ** 2
    p = (m.conjugate() * n).real
    k = 1 + h2 - abs(m) ** 2
    # (p^2 - 1) t^2 - k p t + k^2/4 - h2 = 0 for the center m + t n
    qa, qb, qc = p * p - 1, -k * p, k * k / 4 - h2
    disc = math.sqrt(max(qb * qb - 4 * qa * qc, 0.0))
    out = []
    for t in ((-qb + disc) / (2 * qa), (-qb - disc) / (2 * qa)):
        r = (k - 2 * p * t) / 2
        c = m + t * n
        out.append(Horodisk(c / (1 - r), r))
    out.sort(key=lambda hd: cmath.phase(hd.tangency), reverse=True)
    return out[0], out[1]


@dataclass(frozen=True)
class Lens:
    """E(a, b): intersection of the two horodisks through a and b."""

    a: complex
    b: complex
    hplus: Horodisk
    hminus: Horodisk

    def contains(self, z: complex, closed: bool = False, tol: float = 0.0) -> bool:
        return self.hplus.contains(z, closed, tol) and self.hminus.contains(z, closed, tol)

    def contains_array(self, z: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Closed-membership mask for an array of points."""
        z = np.asarray(z, dtype=complex)
        return ((np.abs(z - self.hplus.center) <= self.hplus.radius + tol)
                & (np.abs(z - self.hminus.center) <= self.hminus.radius + tol))

    def vertex_angle(self) -> float:
        """Interior angle between the two boundary horocycles at the vertex a."""
        n1 = self.hplus.center - self.a
        n2 = self.hminus.center - self.a
        # each disk is a half-plane to first order at a; the corner is the
        # supplement of the angle between the inward normals
        return math.pi - abs(cmath.phase(n2 / n1))


def lens(a: complex, b: complex) -> Lens:
    hp, hm = horodisks_through_pair(a, b)
    return Lens(complex(a), complex(b), hp, hm)


@dataclass(frozen=True)
class HoroCrescent:
    """The disk minus a closed horodisk."""

    removed: Horodisk

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return abs(z) < 1 and not self.removed.contains(z, closed=True, tol=tol)


STANDARD_CRESCENT = HoroCrescent(Horodisk(1 + 0j, 0.5))


def distance_to_horocycle(z: complex, h: Horodisk, inside: bool = False) -> float:
    """Hyperbolic distance from z to the horocycle bounding h.

    By default z must lie outside closure(h); pass ``inside=True`` for points
    of the open horodisk.
    """
    z = complex(z)
    if abs(z) >= 1:
        raise GeometryError("point not in the open disk")
    w = h.chart()(z)
    v = w.imag
    if inside:
        if v < 1 and not math.isclose(v, 1.0, rel_tol=0, abs_tol=1e-14):
            raise GeometryError("point lies outside the horodisk")
        return 0.5 * math.log(max(v, 1.0))
    if v > 1 and not math.isclose(v, 1.0, rel_tol=0, abs_tol=1e-14):
        raise GeometryError("point lies inside the horodisk")
    return 0.5 * math.log(1.0 / min(v, 1.0))


def supporting_horodisk(scene, omega: complex, tol: float = 1e-10) -> Horodisk:
    """Obstacle horodisk of ``scene`` whose boundary carries omega.

    Each obstacle supports the free region at every boundary point it owns.
    """
    omega = complex(omega)
    if abs(omega) >= 1:
        raise GeometryError("omega must lie inside the open disk")
    for h in scene.obstacles:
        if abs(h.boundary_residual(omega)) <= tol:
            return h
    raise GeometryError(f"{omega} is not on the boundary of any obstacle")


# --------------------------------------------------------------------------
# hyperbolic disks and the orthogonal class


@dataclass(frozen=True)
class HyperbolicDisk:
    center: complex
    radius: float
    euclid_center: complex = field(init=False)
    euclid_radius: float = field(init=False)

    def __post_init__(self):
        p = complex(self.center)
        if abs(p) >= 1:
            raise GeometryError("hyperbolic center must lie in the disk")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError("hyperbolic radius must be positive")
        s = math.tanh(self.radius)
        q = abs(p) ** 2
        object.__setattr__(self, "center", p)
        object.__setattr__(self, "euclid_center", p * (1 - s * s) / (1 - q * s * s))
        object.__setattr__(self, "euclid_radius", s * (1 - q) / (1 - q * s * s))

    @property
    def circle(self) -> GeneralizedCircle:
        return GeneralizedCircle.circle(self.euclid_center, self.euclid_radius)

    def contains(self, z: complex) -> bool:
        return abs(z - self.euclid_center) < self.euclid_radius


@dataclass(frozen=True)
class ClassCDomain:
    """D1 minus closure(D2) for hyperbolic disks with orthogonal boundaries."""

    d1: HyperbolicDisk
    d2: HyperbolicDisk

    def orthogonality_residual(self) -> float:
        c1, c2 = self.d1.euclid_center, self.d2.euclid_center
        r1, r2 = self.d1.euclid_radius, self.d2.euclid_radius
        return abs(c1 - c2) ** 2 - r1 ** 2 - r2 ** 2

    def contains(self, z: complex) -> bool:
        return self.d1.contains(z) and abs(z - self.d2.euclid_center) > self.d2.euclid_radius

    def vertices(self) -> tuple:
        """The two intersection points of the boundary circles."""
        return _circle_intersections(self.d1.euclid_center, self.d1.euclid_radius,
                                     self.d2.euclid_center, self.d2.euclid_radius)


def _circle_intersections(c1, r1, c2, r2):
    d = abs(c2 - c1)
    x = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    y = math.sqrt(max(r1 * r1 - x * x, 0.0))
    u = (c2 - c1) / d
    return c1 + u * (x + 1j * y), c1 + u * (x - 1j * y)


def classC_construct(center2: complex, rho2: float, rho1: float) -> ClassCDomain:
    """Class-C domain with D1 centered at 0 (hyperbolic radius rho1) and D2 of
    hyperbolic radius rho2 on the ray through ``center2``.

    Only the direction of ``center2`` is used: the hyperbolic distance of D2's
    center from the origin is solved for so that the boundaries meet orthogonally.
    """
    center2 = complex(center2)
    if abs(center2) == 0:
        raise GeometryError("center2 must be nonzero to fix a direction")
    if not (rho1 > 1e-9 and rho2 > 1e-9):
        raise GeometryError("hyperbolic radii must be positive")
    if not (math.isfinite(rho1) and math.isfinite(rho2)):
        raise GeometryError("hyperbolic radii must be finite")
    u = center2 / abs(center2)
    r1 = math.tanh(rho1)
    s = math.tanh(rho2)

    def residual(x):
        q = x * x
        c = x * (1 - s * s) / (1 - q * s * s)
        r = s * (1 - q) / (1 - q * s * s)
        return c * c - r1 * r1 - r * r

    hi = 1.0 - 1e-15
    if residual(hi) <= 0:
        raise GeometryError("no orthogonal configuration for these radii")
    x = optimize.brentq(residual, 0.0, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
    d1 = HyperbolicDisk(0j, rho1)
    d2 = HyperbolicDisk(x * u, rho2)
    dom = ClassCDomain(d1, d2)
    if abs(dom.orthogonality_residual()) > 1e-10:
        raise GeometryError("orthogonality could not be resolved numerically")
    return dom


def _concave_arc(dom: ClassCDomain):
    """Angles (start, sweep) on the D2 circle of the arc lying inside D1."""
    c2, r2 = dom.d2.euclid_center, dom.d2.euclid_radius
    p, q = dom.vertices()
    t0 = cmath.phase(p - c2)
    t1 = cmath.phase(q - c2)
    sweep = (t1 - t0) % (2 * math.pi)
    mid = c2 + r2 * cmath.exp(1j * (t0 + sweep / 2))
    if not dom.d1.contains(mid):
        sweep -= 2 * math.pi
    return t0, sweep


def hyperbolic_arc_length(center: complex, radius: float, t0: float, t1: float) -> float:
    """Hyperbolic length of the circle arc center + radius e^{it}, t in [t0, t1]."""
    def integrand(t):
        z = center + radius * cmath.exp(1j * t)
        return radius / (1 - abs(z) ** 2)
    val, _ = integrate.quad(integrand, min(t0, t1), max(t0, t1), epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def classC_midpoint(dom: ClassCDomain, tol: float = 1e-10) -> complex:
    """Point of the arc (boundary of D2) inside D1 hyperbolically equidistant,
    along the arc, from its two endpoints. Found by parameter bisection."""
    c2, r2 = dom.d2.euclid_center, dom.d2.euclid_radius
    t0, sweep = _concave_arc(dom)
    t_end = t0 + sweep

    def imbalance(t):
        return hyperbolic_arc_length(c2, r2, t0, t) - hyperbolic_arc_length(c2, r2, t, t_end)

    lo, hi = t0, t_end
    flo = imbalance(lo)
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = imbalance(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return c2 + r2 * cmath.exp(1j * 0.5 * (lo + hi))


def hyperbolic_disk_distance(z: complex, disk: HyperbolicDisk) -> float:
    """Signed-free hyperbolic distance from z to the boundary circle of ``disk``."""
    return abs(hyp_distance(z, disk.center) - disk.radius)
