"""Constant-curvature arcs, admissible C^1 chains and the horodisk lemmas as predicates."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    DISK,
    GeneralizedCircle,
    GeometryError,
    MoebiusMap,
    INF,
    cross,
    dot,
    hyperbolic_curvature,
    mobius_map_circle,
    wrap_angle,
)
from .horocycle import Horodisk, lens

KAPPA_MARGIN = 1e-9
JUNCTION_TOL = 1e-10
TANGENT_TOL = 1e-9
CHORD_TOL = 1e-6
MAX_SAMPLES = 10_000

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class CurvatureArc:
    """Arc of a generalized circle from ``start`` to ``end``.

    For circle supports ``orientation`` is +1 for counterclockwise traversal;
    for line supports it is +1 when travelling along ``support.direction``.
    ``kappa`` caches the signed hyperbolic curvature in ``model``.
    """

    support: GeneralizedCircle
    start: complex
    end: complex
    orientation: int
    model: str = DISK
    kappa: float = field(default=float("nan"), compare=False)

    @classmethod
    def build(cls, support: GeneralizedCircle, start: complex, end: complex,
              orientation: int = 1, model: str = DISK, strict: bool = True) -> "CurvatureArc":
        start, end = complex(start), complex(end)
        if abs(start - end) <= 1e-15 * max(1.0, abs(start)):
            raise GeometryError("arc endpoints must differ")
        if support.is_line:
            orientation = 1 if dot(end - start, support.direction) > 0 else -1
        elif orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        k = hyperbolic_curvature(support, model, orientation)
        if strict and not abs(k) < 2 - KAPPA_MARGIN:
            raise GeometryError(f"hyperbolic curvature {k:.12g} is outside (-2, 2)")
        return cls(support, start, end, orientation, model, k)

    @classmethod
    def segment(cls, p: complex, q: complex, model: str = DISK, strict: bool = True) -> "CurvatureArc":
        return cls.build(GeneralizedCircle.line(p, q - p), p, q, 1, model, strict)

    @classmethod
    def circular(cls, center: complex, radius: float, start: complex, end: complex,
                 orientation: int, model: str = DISK, strict: bool = True) -> "CurvatureArc":
        return cls.build(GeneralizedCircle.circle(center, radius), start, end, orientation, model, strict)

    # -- geometry ------------------------------------------------------------
    @property
    def is_segment(self) -> bool:
        return self.support.is_line

    @property
    def start_angle(self) -> float:
        return cmath.phase(self.start - self.support.center)

    @property
    def sweep(self) -> float:
        """Signed euclidean turning of the tangent along the piece."""
        if self.is_segment:
            return 0.0
        c = self.support.center
        d = cmath.phase(self.end - c) - cmath.phase(self.start - c)
        o = self.orientation
        return o * ((o * d) % TWO_PI)

    def tangent_at(self, z: complex) -> complex:
        if self.is_segment:
            return self.orientation * self.support.direction
        v = (z - self.support.center) / self.support.radius
        return self.orientation * 1j * v / abs(v)

    @property
    def start_tangent(self) -> complex:
        return self.tangent_at(self.start)

    @property
    def end_tangent(self) -> complex:
        return self.tangent_at(self.end)

    def point_at(self, s):
        """Point(s) at parameter s in [0, 1] (angle-proportional on circles)."""
        s = np.asarray(s, dtype=float)
        if self.is_segment:
            return self.start + s * (self.end - self.start)
        c, r = self.support.center, self.support.radius
        return c + r * np.exp(1j * (self.start_angle + s * self.sweep))

    def euclid_length(self) -> float:
        if self.is_segment:
            return abs(self.end - self.start)
        return abs(self.sweep) * self.support.radius

    def sample(self, chord_tol: float = CHORD_TOL, cap: int = MAX_SAMPLES) -> np.ndarray:
        """Points along the piece with chord (sagitta) error at most ``chord_tol``."""
        if self.is_segment:
            return np.array([self.start, self.end])
        r = self.support.radius
        if chord_tol >= r:
            step = math.pi / 2
        else:
            step = 2 * math.acos(1 - chord_tol / r)
        n = min(max(2, math.ceil(abs(self.sweep) / step) + 1), cap)
        return self.point_at(np.linspace(0.0, 1.0, n))

    def param_of(self, z: complex) -> float:
        """Parameter of a point lying on the support (may fall outside [0, 1])."""
        if self.is_segment:
            d = self.end - self.start
            return dot(z - self.start, d) / abs(d) ** 2
        c = self.support.center
        ang = cmath.phase(z - c) - self.start_angle
        o = self.orientation
        t = (o * ang) % TWO_PI
        sw = abs(self.sweep)
        # points just before the start wrap to ~2pi; report them as slightly negative
        if t > sw and t - sw > (TWO_PI - t):
            t -= TWO_PI
        return t / sw

    def reversed(self) -> "CurvatureArc":
        if self.is_segment:
            return CurvatureArc.build(self.support, self.end, self.start, 1, self.model, strict=False)
        return CurvatureArc(self.support, self.end, self.start, -self.orientation, self.model, -self.kappa)

    def midpoint(self) -> complex:
        return complex(self.point_at(0.5))

    def transform(self, m: MoebiusMap, model: Optional[str] = None, strict: bool = False) -> "CurvatureArc":
        """Image of the arc under a Möbius map, expressed in ``model``."""
        pole = m.pole()
        if pole is not INF and self.distance_to_point(pole) < 1e-12:
            raise GeometryError("Möbius image of the arc passes through infinity")
        p0, pm, p1 = m(self.start), m(self.midpoint()), m(self.end)
        support = mobius_map_circle(m, self.support)
        orient = 1
        if not support.is_line:
            orient = 1 if cross(pm - p0, p1 - pm) > 0 else -1
        return CurvatureArc.build(support, p0, p1, orient, model or self.model, strict=strict)

    def distance_to_point(self, z: complex) -> float:
        """Euclidean distance from z to the piece."""
        if self.is_segment:
            d = self.end - self.start
            t = min(max(dot(z - self.start, d) / abs(d) ** 2, 0.0), 1.0)
            return abs(z - (self.start + t * d))
        c, r = self.support.center, self.support.radius
        ends = min(abs(z - self.start), abs(z - self.end))
        if abs(z - c) == 0:
            return r
        near = c + r * (z - c) / abs(z - c)
        if 0 <= self.param_of(near) <= 1:
            return min(ends, abs(abs(z - c) - r))
        return ends

    def extreme_modulus(self) -> float:
        """max |z| over the piece."""
        best = max(abs(self.start), abs(self.end))
        if not self.is_segment:
            c, r = self.support.center, self.support.radius
            if abs(c) > 0:
                far = c + r * c / abs(c)
                if 0 <= self.param_of(far) <= 1:
                    best = max(best, abs(far))
            else:
                best = max(best, r)
        return best

    def lowest_imag(self) -> float:
        best = min(self.start.imag, self.end.imag)
        if not self.is_segment:
            low = self.support.center - 1j * self.support.radius
            if 0 <= self.param_of(low) <= 1:
                best = min(best, low.imag)
        return best

    def in_model(self, margin: float = 0.0) -> bool:
        if self.model == DISK:
            return self.extreme_modulus() < 1 - margin
        return self.lowest_imag() > margin


def arc_through(a: complex, b: complex, kappa: float, side: int = 1) -> CurvatureArc:
    """Constant-curvature arc of the disk model from a to b.

    With positive ``kappa`` the arc bulges to the left of the geodesic from a
    to b when ``side`` is +1 and to the right when it is -1; its signed
    curvature is ``-side * kappa``. ``kappa = 0`` gives the geodesic segment.
    """
    a, b = complex(a), complex(b)
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if not abs(kappa) < 2:
        raise GeometryError("|kappa| must be < 2 for an admissible arc")
    if abs(a) >= 1 or abs(b) >= 1:
        raise GeometryError("endpoints must lie in the open disk")
    chord = b - a
    L = abs(chord)
    if L == 0:
        raise GeometryError("endpoints must differ")
    u = chord / L
    target = -side * kappa
    # curvature of the arc leaving a at angle theta from the chord: P sin + Q cos
    w = a.conjugate() * u
    P = -2 * (1 - abs(a) ** 2) / L + 2 * w.real
    Q = 2 * w.imag
    R = math.hypot(P, Q)
    phi0 = math.atan2(Q, P)
    theta = wrap_angle(math.pi - math.asin(max(-1.0, min(1.0, target / R))) - phi0)
    T = u * cmath.exp(1j * theta)
    k_e = -2 * math.sin(theta) / L
    if abs(k_e) * L < 1e-12:
        return CurvatureArc.segment(a, b, DISK)
    center = a + 1j * T / k_e
    return CurvatureArc.circular(center, 1 / abs(k_e), a, b, 1 if k_e > 0 else -1, DISK)


def arc_from_tangent(p: complex, tangent: complex, kappa: float, length: float,
                     model: str = DISK) -> CurvatureArc:
    """Arc starting at p in direction ``tangent`` with signed hyperbolic curvature
    ``kappa`` and euclidean length ``length``."""
    T = tangent / abs(tangent)
    if model == DISK:
        k_e = (kappa - 2 * (p.conjugate() * T).imag) / (1 - abs(p) ** 2)
    else:
        k_e = (kappa - 2 * T.real) / (2 * p.imag)
    if abs(k_e) * length < 1e-12:
        return CurvatureArc.segment(p, p + length * T, model)
    center = p + 1j * T / k_e
    r = 1 / abs(k_e)
    o = 1 if k_e > 0 else -1
    ang = o * length / r
    if abs(ang) >= TWO_PI:
        raise GeometryError("requested arc wraps the full circle")
    end = center + (p - center) * cmath.exp(1j * ang)
    return CurvatureArc.circular(center, r, p, end, o, model)


# --------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class AdmissiblePath:
    pieces: tuple
    model: str = DISK

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise GeometryError("a path needs at least one piece")

    @property
    def start(self) -> complex:
        return self.pieces[0].start

    @property
    def end(self) -> complex:
        return self.pieces[-1].end

    def __len__(self):
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def reversed(self) -> "AdmissiblePath":
        return AdmissiblePath(tuple(p.reversed() for p in reversed(self.pieces)), self.model)

    def transform(self, m: MoebiusMap, model: Optional[str] = None) -> "AdmissiblePath":
        model = model or self.model
        return AdmissiblePath(tuple(p.transform(m, model) for p in self.pieces), model)

    def concat(self, other: "AdmissiblePath") -> "AdmissiblePath":
        return AdmissiblePath(self.pieces + other.pieces, self.model)

    def sample(self, chord_tol: float = CHORD_TOL) -> np.ndarray:
        return np.concatenate([p.sample(chord_tol) for p in self.pieces])


def _as_pieces(path) -> Sequence[CurvatureArc]:
    if isinstance(path, AdmissiblePath):
        return path.pieces
    if isinstance(path, CurvatureArc):
        return (path,)
    return tuple(path)


def _scale(pieces) -> float:
    return max(1.0, max(max(abs(p.start), abs(p.end)) for p in pieces))


def vertex_angle(incoming: complex, outgoing: complex) -> float:
    """Exterior angle in (-pi, pi] turning from one tangent to the next."""
    return cmath.phase(outgoing / incoming)


def turning_angle(path, closed: bool = False) -> float:
    """Total change of the euclidean tangent angle, piece terms plus vertex terms."""
    pieces = _as_pieces(path)
    if not pieces:
        raise GeometryError("empty chain")
    tol = JUNCTION_TOL * _scale(pieces)
    total = sum(p.sweep for p in pieces)
    joints = list(zip(pieces[:-1], pieces[1:]))
    if closed:
        joints.append((pieces[-1], pieces[0]))
    for p, q in joints:
        if abs(p.end - q.start) > tol:
            raise GeometryError("broken chain: consecutive pieces do not share an endpoint")
        total += vertex_angle(p.end_tangent, q.start_tangent)
    return total


# --------------------------------------------------------------------------
# intersections


def support_intersections(s1: GeneralizedCircle, s2: GeneralizedCircle, tol: float = 1e-12):
    """Intersection points of two generalized circles, or None when they coincide."""
    if not s1.is_line and not s2.is_line:
        c1, r1, c2, r2 = s1.center, s1.radius, s2.center, s2.radius
        d = abs(c2 - c1)
        scale = max(r1, r2, 1.0)
        if d <= tol * scale and abs(r1 - r2) <= tol * scale:
            return None
        if d > r1 + r2 + tol * scale or d < abs(r1 - r2) - tol * scale or d == 0:
            return []
        x = (d * d + r1 * r1 - r2 * r2) / (2 * d)
        y2 = r1 * r1 - x * x
        u = (c2 - c1) / d
        if y2 <= (tol * scale) ** 2:
            return [c1 + u * x]
        y = math.sqrt(y2)
        return [c1 + u * (x + 1j * y), c1 + u * (x - 1j * y)]
    if s1.is_line and s2.is_line:
        u1, u2 = s1.direction, s2.direction
        den = cross(u1, u2)
        if abs(den) <= tol:
            if abs(cross(u1, s2.anchor - s1.anchor)) <= tol * max(1.0, abs(s2.anchor - s1.anchor)):
                return None
            return []
        t = cross(s2.anchor - s1.anchor, u2) / den
        return [s1.anchor + t * u1]
    line, circ = (s1, s2) if s1.is_line else (s2, s1)
    u = line.direction
    foot = line.anchor + dot(circ.center - line.anchor, u) * u
    h = abs(circ.center - foot)
    r = circ.radius
    if h > r + tol * max(1.0, r):
        return []
    s2_ = r * r - h * h
    if s2_ <= (tol * max(1.0, r)) ** 2:
        return [foot]
    s = math.sqrt(s2_)
    return [foot + s * u, foot - s * u]


def _on_arc(arc: CurvatureArc, z: complex, tol: float) -> Optional[float]:
    t = arc.param_of(z)
    slack = tol / max(arc.euclid_length(), 1e-300)
    if -slack <= t <= 1 + slack:
        return min(max(t, 0.0), 1.0)
    return None


def arc_intersections(p: CurvatureArc, q: CurvatureArc, tol: float = 1e-10):
    """Points common to two arcs as (z, t_p, t_q); None when they overlap along a sub-arc."""
    pts = support_intersections(p.support, q.support)
    if pts is None:
        # same support: overlap if either contains an interior point of the other
        for z in (q.start, q.end, q.midpoint()):
            t = _on_arc(p, z, tol)
            if t is not None and tol < t * p.euclid_length() < p.euclid_length() - tol:
                return None
        for z in (p.start, p.end, p.midpoint()):
            t = _on_arc(q, z, tol)
            if t is not None and tol < t * q.euclid_length() < q.euclid_length() - tol:
                return None
        out = []
        for z in (p.start, p.end):
            tq = _on_arc(q, z, tol)
            if tq is not None:
                out.append((z, p.param_of(z), tq))
        return out
    out = []
    for z in pts:
        tp = _on_arc(p, z, tol)
        tq = _on_arc(q, z, tol)
        if tp is not None and tq is not None:
            out.append((z, tp, tq))
    return out


def is_simple(path, tol: float = 1e-10) -> Optional[tuple]:
    """None when the chain is simple, else the first offending pair of piece indices."""
    pieces = _as_pieces(path)
    tol = tol * _scale(pieces)
    n = len(pieces)
    for i in range(n):
        for j in range(i + 1, n):
            hits = arc_intersections(pieces[i], pieces[j], tol)
            if hits is None:
                return (i, j)
            for z, ti, tj in hits:
                if j == i + 1 and abs(z - pieces[i].end) <= tol and abs(z - pieces[j].start) <= tol:
                    continue
                return (i, j)
    return None


# --------------------------------------------------------------------------
# admissibility and the lemmas


@dataclass(frozen=True)
class Diagnostics:
    ok: bool
    reason: Optional[str] = None
    piece: Optional[int] = None

    def __bool__(self):
        return self.ok


def validate_admissible(path, model: Optional[str] = None) -> Diagnostics:
    """Check curvature bounds, C^1 junctions, containment in the model and simplicity."""
    pieces = _as_pieces(path)
    if not pieces:
        return Diagnostics(False, "empty path")
    model = model or pieces[0].model
    tol = JUNCTION_TOL * _scale(pieces)
    for i, p in enumerate(pieces):
        try:
            k = hyperbolic_curvature(p.support, model, p.orientation)
        except GeometryError as exc:
            return Diagnostics(False, f"curvature undefined: {exc}", i)
        if not abs(k) < 2 - KAPPA_MARGIN:
            return Diagnostics(False, f"curvature {k:.12g} outside (-2, 2)", i)
        if not p.in_model():
            return Diagnostics(False, "piece leaves the open model region", i)
    for i, (p, q) in enumerate(zip(pieces[:-1], pieces[1:])):
        if abs(p.end - q.start) > tol:
            return Diagnostics(False, "consecutive pieces do not share an endpoint", i)
        if abs(vertex_angle(p.end_tangent, q.start_tangent)) > TANGENT_TOL:
            return Diagnostics(False, "tangent break at junction (not C^1)", i)
    bad = is_simple(pieces)
    if bad is not None:
        return Diagnostics(False, f"self-intersection between pieces {bad}", bad[0])
    return Diagnostics(True)


def path_in_lens(path, tol: float = 1e-9, chord_tol: float = CHORD_TOL) -> bool:
    """Whether every sampled point of the path lies in the closed lens E(start, end)."""
    pieces = _as_pieces(path)
    E = lens(pieces[0].start, pieces[-1].end)
    for p in pieces:
        if not np.all(E.contains_array(p.sample(chord_tol), tol)):
            return False
    return True


@dataclass
class EscapeReport:
    """Interaction of a path with a horodisk.

    ``events`` lists boundary contacts in path order as (piece, parameter, point);
    ``states`` the inside/outside status of the stretches between them.
    """

    events: list
    states: list
    violations: list
    both_inside: bool

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def contained(self) -> bool:
        return all(s == "in" for s in self.states) and not self.events


def horodisk_escape_check(path, h: Horodisk, tol: float = 1e-11) -> EscapeReport:
    """Once the path leaves closure(h) it never meets the horocycle again, and a
    path with both endpoints in h stays inside h."""
    pieces = _as_pieces(path)
    circ = h.circle
    events = []
    for i, p in enumerate(pieces):
        pts = support_intersections(p.support, circ)
        if pts is None:
            events.append((i, 0.0, p.start))
            continue
        for z in pts:
            t = _on_arc(p, z, 1e-12)
            if t is not None:
                events.append((i, t, z))
    events.sort(key=lambda e: (e[0], e[1]))
    # merge duplicates (junction points reported by both neighbouring pieces)
    merged = []
    for e in events:
        if merged and abs(e[2] - merged[-1][2]) <= tol:
            continue
        merged.append(e)
    events = merged

    def state_between(e0, e1):
        i0, t0 = (e0[0], e0[1]) if e0 else (0, 0.0)
        i1, t1 = (e1[0], e1[1]) if e1 else (len(pieces) - 1, 1.0)
        if i0 == i1:
            z = complex(pieces[i0].point_at(0.5 * (t0 + t1)))
        elif t0 < 1.0:
            z = complex(pieces[i0].point_at(0.5 * (t0 + 1.0)))
        else:
            z = complex(pieces[i0 + 1].point_at(0.5 * t1 if i0 + 1 == i1 else 0.5))
        return "in" if abs(z - h.center) < h.radius else "out"

    bounds = [None] + events + [None]
    states = [state_between(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]
    start_on = abs(h.boundary_residual(pieces[0].start)) <= tol
    end_on = abs(h.boundary_residual(pieces[-1].end)) <= tol
    violations = []
    exited = start_on and states[0] == "out"
    for k, ev in enumerate(events):
        before, after = states[k], states[k + 1]
        if k == 0 and start_on and abs(ev[2] - pieces[0].start) <= tol:
            continue
        if exited:
            violations.append(("returns to horocycle after leaving", ev[0], ev[2]))
            continue
        if before == "in" and after == "out":
            exited = True
        elif before == "in" and after == "in" and not (end_on and k == len(events) - 1):
            violations.append(("touches horocycle from inside", ev[0], ev[2]))
    both_inside = h.contains(pieces[0].start) and h.contains(pieces[-1].end)
    if both_inside and events:
        violations.append(("path with both endpoints inside leaves the horodisk", events[0][0], events[0][2]))
    return EscapeReport(events, states, violations, both_inside)
