"""Complex-plane primitives for the disk and half-plane models.

Points are plain Python ``complex`` values. Möbius images may land on the
point at infinity, represented by the ``INF`` singleton.

Metric normalization: the disk carries ``|dz| / (1 - |z|^2)`` and the upper
half-plane ``|dw| / (2 Im w)``, i.e. Gaussian curvature -4.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

DISK = "disk"
HALFPLANE = "halfplane"
MODELS = (DISK, HALFPLANE)

# absolute tolerance for predicates on O(1) coordinates
TOL = 1e-12


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Point = Union[complex, _Infinity]


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


def is_inf(z) -> bool:
    return z is INF


def _check_model(model: str) -> None:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def cross(u: complex, v: complex) -> float:
    """z-component of the planar cross product u x v."""
    return u.real * v.imag - u.imag * v.real


def dot(u: complex, v: complex) -> float:
    return u.real * v.real + u.imag * v.imag


def wrap_angle(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    theta = math.fmod(theta, 2 * math.pi)
    if theta <= -math.pi:
        theta += 2 * math.pi
    elif theta > math.pi:
        theta -= 2 * math.pi
    return theta


# --------------------------------------------------------------------------
# Möbius maps


@dataclass(frozen=True)
class MoebiusMap:
    """w = (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex
    disk_automorphism: bool = False

    def __post_init__(self):
        coeffs = [complex(x) for x in (self.a, self.b, self.c, self.d)]
        scale = max(abs(x) for x in coeffs)
        if scale == 0 or not all(cmath.isfinite(x) for x in coeffs):
            raise GeometryError("Möbius coefficients must be finite and not all zero")
        a, b, c, d = (x / scale for x in coeffs)
        if abs(a * d - b * c) < 1e-14:
            raise GeometryError("degenerate Möbius map (ad - bc = 0)")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "d", complex(self.d))
        if self.disk_automorphism:
            self._check_disk_automorphism()

    def _check_disk_automorphism(self):
        for k in range(8):
            zeta = cmath.exp(2j * math.pi * (k + 0.25) / 8)
            w = self(zeta)
            if w is INF or abs(abs(w) - 1.0) > 1e-12:
                raise GeometryError("map tagged as disk automorphism does not preserve the unit circle")
        w0 = self(0j)
        if w0 is INF or abs(w0) >= 1.0:
            raise GeometryError("map tagged as disk automorphism does not preserve the disk")

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1, disk_automorphism=True)

    @classmethod
    def cayley(cls) -> "MoebiusMap":
        """tau(z) = i (1 + z) / (1 - z), sending the disk onto the upper half-plane."""
        return cls(1j, 1j, -1, 1)

    @classmethod
    def cayley_inverse(cls) -> "MoebiusMap":
        """w -> (w - i) / (w + i)."""
        return cls(1, -1j, 1, 1j)

    @classmethod
    def rotation(cls, theta: float) -> "MoebiusMap":
        return cls(cmath.exp(1j * theta), 0, 0, 1, disk_automorphism=True)

    @classmethod
    def disk_auto(cls, theta: float, p: complex) -> "MoebiusMap":
        """z -> e^{i theta} (z - p) / (1 - conj(p) z), |p| < 1."""
        p = complex(p)
        if abs(p) >= 1:
            raise GeometryError("disk automorphism needs |p| < 1")
        u = cmath.exp(1j * theta)
        return cls(u, -u * p, -p.conjugate(), 1, disk_automorphism=True)

    # -- evaluation --------------------------------------------------------
    def __call__(self, z: Point) -> Point:
        return mobius_apply(self, z)

    def apply_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation for finite points away from the pole."""
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z: complex) -> complex:
        den = self.c * z + self.d
        if den == 0:
            raise GeometryError("derivative undefined at the pole")
        return (self.a * self.d - self.b * self.c) / (den * den)

    def pole(self) -> Point:
        if self.c == 0:
            return INF
        return -self.d / self.c

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a, self.disk_automorphism)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        """(self @ other)(z) = self(other(z))."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        scale = max(abs(a), abs(b), abs(c), abs(d))
        return MoebiusMap(a / scale, b / scale, c / scale, d / scale,
                          self.disk_automorphism and other.disk_automorphism)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def map_circle(self, circle: "GeneralizedCircle") -> "GeneralizedCircle":
        return mobius_map_circle(self, circle)


def mobius_apply(m: MoebiusMap, z: Point) -> Point:
    if z is INF:
        if m.c == 0:
            return INF
        return m.a / m.c
    num = m.a * z + m.b
    den = m.c * z + m.d
    if den == 0:
        return INF
    return num / den


# --------------------------------------------------------------------------
# generalized circles


@dataclass(frozen=True)
class GeneralizedCircle:
    """A euclidean circle or a straight line.

    Circles use ``center``/``radius``; lines use ``anchor`` (any point on the
    line) and a unit ``direction``.
    """

    kind: str
    center: complex = 0j
    radius: float = 0.0
    anchor: complex = 0j
    direction: complex = 1 + 0j

    def __post_init__(self):
        if self.kind == "circle":
            if not (self.radius > 0 and math.isfinite(self.radius)):
                raise GeometryError(f"circle radius must be positive, got {self.radius}")
        elif self.kind == "line":
            if abs(abs(self.direction) - 1) > 1e-12:
                raise GeometryError("line direction must have unit modulus")
        else:
            raise GeometryError(f"unknown kind {self.kind!r}")

    @classmethod
    def circle(cls, center: complex, radius: float) -> "GeneralizedCircle":
        return cls("circle", center=complex(center), radius=float(radius))

    @classmethod
    def line(cls, anchor: complex, direction: complex) -> "GeneralizedCircle":
        direction = complex(direction)
        if direction == 0:
            raise GeometryError("line direction must be nonzero")
        return cls("line", anchor=complex(anchor), direction=direction / abs(direction))

    @classmethod
    def through(cls, p: complex, q: complex, r: complex, tol: float = 1e-13) -> "GeneralizedCircle":
        """The generalized circle through three distinct points."""
        scale = max(abs(q - p), abs(r - p), abs(r - q))
        if scale == 0:
            raise GeometryError("points must be distinct")
        u, v = q - p, r - p
        det = 2 * cross(u, v)
        if abs(det) <= tol * scale * scale:
            far = max((p, q), (p, r), (q, r), key=lambda s: abs(s[1] - s[0]))
            return cls.line(far[0], far[1] - far[0])
        uu, vv = abs(u) ** 2, abs(v) ** 2
        cx = (v.imag * uu - u.imag * vv) / det
        cy = (u.real * vv - v.real * uu) / det
        c = p + complex(cx, cy)
        return cls.circle(c, (abs(p - c) + abs(q - c) + abs(r - c)) / 3)

    @property
    def is_line(self) -> bool:
        return self.kind == "line"

    def distance(self, z: complex) -> float:
        """Euclidean distance from z to the curve."""
        if self.kind == "circle":
            return abs(abs(z - self.center) - self.radius)
        return abs(cross(self.direction, z - self.anchor))

    def hermitian(self) -> np.ndarray:
        """Matrix H with the curve = {z : (z,1)^* H (z,1) = 0}."""
        if self.kind == "circle":
            c = self.center
            return np.array([[1.0, -c], [-c.conjugate(), abs(c) ** 2 - self.radius ** 2]], dtype=complex)
        n = 1j * self.direction
        k = -(n.conjugate() * self.anchor).real
        return np.array([[0.0, n / 2], [n.conjugate() / 2, k]], dtype=complex)

    @classmethod
    def from_hermitian(cls, h: np.ndarray, tol: float = 1e-12) -> "GeneralizedCircle":
        A = h[0, 0].real
        B = h[0, 1]
        C = h[1, 1].real
        scale = max(abs(A), abs(B), abs(C))
        A, B, C = A / scale, B / scale, C / scale
        if abs(A) <= tol:
            n = 2 * B
            if abs(n) == 0:
                raise GeometryError("degenerate generalized circle")
            # Re(conj(n) z) = -C
            anchor = -C * n / abs(n) ** 2
            return cls.line(anchor, -1j * n)
        c = -B / A
        r2 = abs(c) ** 2 - C / A
        if r2 <= 0:
            raise GeometryError("imaginary circle")
        return cls.circle(c, math.sqrt(r2))

    def sample(self, n: int = 3) -> list:
        """n distinct points on the curve (used for refits)."""
        if self.kind == "circle":
            return [self.center + self.radius * cmath.exp(2j * math.pi * (k + 0.125) / n) for k in range(n)]
        return [self.anchor + (k - (n - 1) / 2) * self.direction for k in range(n)]


def mobius_map_circle(m: MoebiusMap, c: GeneralizedCircle) -> GeneralizedCircle:
    """Image of a generalized circle under m.

    Uses the Hermitian-form transport H -> N^* H N with N = m^{-1}; the image
    is a line exactly when the pole of m lies on ``c``.
    """
    n = m.inverse().matrix()
    h = n.conj().T @ c.hermitian() @ n
    pole = m.pole()
    if pole is not INF and c.distance(pole) <= 1e-12 * max(1.0, abs(pole)):
        h[0, 0] = 0.0
    return GeneralizedCircle.from_hermitian(h)


# --------------------------------------------------------------------------
# distances and densities


def _as_disk_point(z) -> complex:
    z = complex(z)
    r = abs(z)
    if r > 1 + 1e-15:
        raise GeometryError(f"point {z} lies outside the closed unit disk")
    return z


def pseudo_distance(z: complex, w: complex) -> float:
    """|(z - w) / (1 - conj(z) w)|; equals 1 when either point is on the unit circle."""
    z, w = _as_disk_point(z), _as_disk_point(w)
    if z == w:
        return 0.0
    den = abs(1 - z.conjugate() * w)
    if den == 0 or abs(z) >= 1 or abs(w) >= 1:
        return 1.0
    return min(abs(z - w) / den, 1.0)


def hyp_distance(z: complex, w: complex) -> float:
    """Hyperbolic distance in the disk (curvature -4); ``math.inf`` at the boundary."""
    e = pseudo_distance(z, w)
    if e >= 1.0:
        return math.inf
    return math.atanh(e)


def hyp_distance_halfplane(z: complex, w: complex) -> float:
    """Hyperbolic distance in the upper half-plane with metric |dw|/(2 Im w)."""
    if z.imag <= 0 or w.imag <= 0:
        raise GeometryError("points must lie in the upper half-plane")
    return math.atanh(abs(z - w) / abs(z - w.conjugate()))


def density_ratio_base(z: complex, model: str = DISK) -> float:
    """Reference density: 1/(1-|z|^2) in the disk, 1/(2 Im w) in the half-plane."""
    _check_model(model)
    z = complex(z)
    if model == DISK:
        if abs(z) >= 1:
            raise GeometryError("point not in the open disk")
        return 1.0 / (1.0 - abs(z) ** 2)
    if z.imag <= 0:
        raise GeometryError("point not in the open upper half-plane")
    return 1.0 / (2.0 * z.imag)


def in_model(z: complex, model: str, tol: float = 0.0) -> bool:
    if model == DISK:
        return abs(z) < 1 - tol
    return z.imag > tol


# --------------------------------------------------------------------------
# hyperbolic curvature of generalized circles


def _intersects_model(c: GeneralizedCircle, model: str) -> bool:
    if model == DISK:
        if c.kind == "circle":
            m = abs(c.center)
            return m < 1 + c.radius and c.radius < 1 + m
        return abs(cross(c.direction, -c.anchor)) < 1
    if c.kind == "circle":
        return c.center.imag + c.radius > 0
    if abs(c.direction.imag) > 0:
        return True
    return c.anchor.imag > 0


def hyperbolic_curvature(c: GeneralizedCircle, model: str = DISK, orientation: int = 1) -> float:
    """Signed constant hyperbolic curvature of ``c``.

    Circles traversed counterclockwise (orientation +1) and lines traversed
    along ``direction`` (orientation +1) bend toward their left normal when
    the value is positive.
    """
    _check_model(model)
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    if not _intersects_model(c, model):
        raise GeometryError("generalized circle does not meet the open model region")
    if model == DISK:
        if c.kind == "circle":
            k = (1 + c.radius ** 2 - abs(c.center) ** 2) / c.radius
        else:
            k = 2 * (c.direction * c.anchor.conjugate()).imag
    else:
        if c.kind == "circle":
            k = 2 * c.center.imag / c.radius
        else:
            k = 2 * c.direction.real
    return orientation * k


def classify(c: GeneralizedCircle, model: str = DISK, tol: float = TOL) -> str:
    """'crossing', 'horocyclic' or 'interior' relative to the model boundary."""
    _check_model(model)
    if not _intersects_model(c, model):
        raise GeometryError("generalized circle does not meet the open model region")
    if model == DISK:
        if c.kind == "line":
            return "crossing"
        gap = 1 - abs(c.center) - c.radius
        if abs(gap) <= tol:
            return "horocyclic"
        return "interior" if gap > 0 else "crossing"
    if c.kind == "line":
        return "horocyclic" if abs(c.direction.imag) <= tol else "crossing"
    gap = c.center.imag - c.radius
    if abs(gap) <= tol * max(1.0, c.radius):
        return "horocyclic"
    return "interior" if gap > 0 else "crossing"
