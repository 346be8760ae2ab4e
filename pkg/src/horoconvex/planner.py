"""Admissible paths among horodisk obstacles.

The scene is carried to the upper half-plane, each obstacle becomes a disk
tangent to the real axis and is enlarged a little so that it crosses it. The
path is then assembled from non-horizontal tangent segments and upper arcs of
the enlarged circles, all of curvature strictly inside (-2, 2), and carried
back to the disk.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arcs import (
    AdmissiblePath,
    CurvatureArc,
    KAPPA_MARGIN,
    turning_angle,
    validate_admissible,
)
from .geometry import (
    DISK,
    HALFPLANE,
    GeneralizedCircle,
    GeometryError,
    MoebiusMap,
    cross,
    dot,
    mobius_map_circle,
    wrap_angle,
)
from .horocycle import Horodisk

ANGLE_TOL = 1e-12
EPS_RETRIES = 8
MAX_TRANSPORTS = 8


class PlanError(GeometryError):
    """Planning failed."""


class UnreachableError(PlanError):
    """An endpoint is not in the free region."""


class DegeneracyError(PlanError):
    """Numerical degeneracy: level budget exceeded or a piece left (-2, 2)."""


# --------------------------------------------------------------------------
# scenes


@dataclass(frozen=True)
class CoveringDisk:
    """Euclidean disk of the half-plane model; ``index`` is the obstacle it covers."""

    center: complex
    radius: float
    index: int = -1

    @property
    def circle(self) -> GeneralizedCircle:
        return GeneralizedCircle.circle(self.center, self.radius)

    @property
    def crossing(self) -> bool:
        return 0 <= self.center.imag < self.radius


@dataclass(frozen=True)
class ObstacleScene:
    """The disk minus finitely many pairwise disjoint closed horodisks."""

    obstacles: tuple
    transport: MoebiusMap
    tangent_disks: tuple  # half-plane images (center, radius), same order as obstacles
    epsilon: float
    covering: tuple  # CoveringDisk, ordered by Re(center)

    @property
    def mu(self) -> int:
        return len(self.covering)

    def free(self, z: complex, tol: float = 0.0) -> bool:
        """z in the open disk and outside every closed obstacle."""
        if not abs(z) < 1:
            return False
        return all(abs(z - h.center) > h.radius + tol for h in self.obstacles)

    def clearance_h(self, w: complex) -> float:
        """Euclidean gap in the half-plane picture from w to the nearest obstacle image."""
        if not self.tangent_disks:
            return math.inf
        return min(abs(w - c) - r for c, r in self.tangent_disks)

    def min_gap_h(self) -> float:
        gaps = [abs(c1 - c2) - r1 - r2
                for i, (c1, r1) in enumerate(self.tangent_disks)
                for (c2, r2) in self.tangent_disks[i + 1:]]
        return min(gaps) if gaps else math.inf

    def covering_for(self, eps: float) -> tuple:
        disks = [CoveringDisk(c, r + eps, i) for i, (c, r) in enumerate(self.tangent_disks)]
        disks.sort(key=lambda d: (d.center.real, d.index))
        return tuple(disks)

    def with_transport(self, zeta_star: complex) -> "ObstacleScene":
        return build_scene(self.obstacles, zeta_star=zeta_star)


def _check_obstacles(obstacles: Sequence[Horodisk]) -> None:
    for i, h in enumerate(obstacles):
        for g in obstacles[i + 1:]:
            d = abs(h.center - g.center)
            if d <= abs(h.radius - g.radius) + 1e-12:
                raise GeometryError("nested obstacles")
            if d <= h.radius + g.radius + 1e-12:
                raise GeometryError("obstacles must have disjoint closures")


def default_transport_point(obstacles: Sequence[Horodisk]) -> complex:
    """Boundary point sent to infinity: the middle of the widest gap between tangencies."""
    if not obstacles:
        return 1 + 0j
    angles = sorted(cmath.phase(h.tangency) % (2 * math.pi) for h in obstacles)
    gaps = [(angles[(k + 1) % len(angles)] - angles[k]) % (2 * math.pi) or 2 * math.pi
            for k in range(len(angles))]
    k = int(np.argmax(gaps))
    return cmath.exp(1j * (angles[k] + gaps[k] / 2))


def transport_map(zeta_star: complex) -> MoebiusMap:
    """Cayley map composed with the rotation taking zeta_star to 1."""
    zeta_star = zeta_star / abs(zeta_star)
    rot = MoebiusMap(zeta_star.conjugate(), 0, 0, 1)
    return MoebiusMap.cayley() @ rot


def build_scene(obstacles: Sequence[Horodisk], zeta_star: Optional[complex] = None,
                epsilon: Optional[float] = None) -> ObstacleScene:
    """Carry the obstacles to the half-plane and enlarge them into crossing disks."""
    obstacles = tuple(obstacles)
    _check_obstacles(obstacles)
    if zeta_star is None:
        zeta_star = default_transport_point(obstacles)
    for h in obstacles:
        if abs(h.tangency - zeta_star) < 1e-9:
            raise GeometryError("an obstacle is tangent at the point sent to infinity")
    M = transport_map(zeta_star)
    tangent = []
    for h in obstacles:
        img = mobius_map_circle(M, h.circle)
        if img.is_line:
            raise GeometryError("obstacle image is unbounded")
        # the image is tangent to the real axis from above
        c = complex(img.center.real, img.radius)
        tangent.append((c, img.radius))
    scene = ObstacleScene(obstacles, M, tuple(tangent), 0.0, ())
    if epsilon is None:
        epsilon = 0.25 * min(scene.min_gap_h(), 1.0)
    return ObstacleScene(obstacles, M, tuple(tangent), epsilon, scene.covering_for(epsilon))


# --------------------------------------------------------------------------
# tangents


@dataclass(frozen=True)
class _Node:
    center: complex
    radius: float = 0.0
    orient: int = 0
    disk: Optional[int] = None

    @property
    def signed(self) -> float:
        return self.orient * self.radius


def _tangent(n1: _Node, n2: _Node):
    """Common tangent leaving n1 and reaching n2 with the nodes' orientations.

    Returns (t1, t2) or None when no such tangent exists.
    """
    d = n2.center - n1.center
    L = abs(d)
    s = n2.signed - n1.signed
    if L == 0 or abs(s) > L:
        return None
    theta = cmath.phase(d) - math.asin(s / L)
    nrm = 1j * cmath.exp(1j * theta)
    return n1.center - n1.signed * nrm, n2.center - n2.signed * nrm


@dataclass(frozen=True)
class TangentSegment:
    start: complex
    end: complex
    kind: str

    def residual(self, center: complex, radius: float) -> float:
        return abs(_segment_line_distance(center, self.start, self.end) - radius)


def _segment_line_distance(c: complex, p: complex, q: complex) -> float:
    u = (q - p) / abs(q - p)
    return abs(cross(u, c - p))


def _as_node(x) -> _Node:
    if isinstance(x, GeneralizedCircle):
        if x.is_line:
            raise GeometryError("tangents to lines are not supported")
        return _Node(x.center, x.radius)
    if isinstance(x, CoveringDisk):
        return _Node(x.center, x.radius)
    return _Node(complex(x))


def tangent_segment(c1, c2, kind: str = "upper") -> TangentSegment:
    """Common tangent segment between a point or circle and a circle.

    ``upper`` is the outer tangent with both shapes below it; ``upper-cross``
    and ``lower-cross`` are the inner tangents starting on the top, resp. the
    bottom, of the first circle.
    """
    a, b = _as_node(c1), _as_node(c2)
    if kind == "upper":
        options = [(o, o) for o in (1, -1)]
    elif kind in ("upper-cross", "lower-cross"):
        if abs(a.center - b.center) <= a.radius + b.radius:
            raise GeometryError("cross tangents need disjoint disks")
        options = [(o, -o) for o in (1, -1)]
    else:
        raise ValueError(f"unknown tangent kind {kind!r}")
    cands = []
    for o1, o2 in options:
        t = _tangent(_Node(a.center, a.radius, o1 if a.radius else 0), _Node(b.center, b.radius, o2))
        if t is not None and abs(t[1] - t[0]) > 0:
            cands.append(t)
    if not cands:
        raise GeometryError(f"no {kind} tangent exists")
    if kind == "upper":
        best = max(cands, key=lambda t: (t[0] + t[1]).imag)
    elif kind == "upper-cross":
        best = max(cands, key=lambda t: t[0].imag)
    else:
        best = min(cands, key=lambda t: t[0].imag)
    return TangentSegment(best[0], best[1], kind)


def _segment_point_distance(c: complex, p: complex, q: complex) -> float:
    d = q - p
    t = min(max(dot(c - p, d) / abs(d) ** 2, 0.0), 1.0)
    return abs(c - (p + t * d))


# --------------------------------------------------------------------------
# planning in the half-plane


@dataclass(frozen=True)
class TangentEvent:
    kind: str  # upper-tangent | cross-tangent | boundary-arc
    indices: tuple
    level: int
    group: int
    direction: float  # tangent angle for segments, sweep for arcs


@dataclass(frozen=True)
class PlanResult:
    path: AdmissiblePath
    levels_used: int
    tangent_events: tuple
    path_halfplane: Optional[AdmissiblePath] = None
    covering: tuple = ()
    transport: Optional[MoebiusMap] = None
    epsilon: float = 0.0


@dataclass(frozen=True)
class PlanQuery:
    a: complex
    b: complex
    epsilon: Optional[float] = None


class _Planner:
    def __init__(self, disks: Sequence[CoveringDisk], margin: float, max_levels: int):
        self.disks = list(disks)
        self.margin = margin
        self.max_levels = max_levels
        self.levels_used = 0
        self.groups = []  # (level, [nodes]) as wrapped
        self.used = set()

    def blocks(self, i: int, p: complex, q: complex) -> bool:
        D = self.disks[i]
        return _segment_point_distance(D.center, p, q) < D.radius + self.margin

    def blockers(self, p: complex, q: complex, exclude=()) -> list:
        return [i for i in range(len(self.disks)) if i not in exclude and self.blocks(i, p, q)]

    def orientation(self, i: int, p: complex, q: complex) -> int:
        D = self.disks[i]
        low = D.center - 1j * D.radius
        side = cross(q - p, low - p)
        if abs(side) <= 1e-14 * abs(q - p):
            side = cross(q - p, D.center - p)
        # bulk of the disk on the right: pass it on the left, i.e. clockwise
        return -1 if side < 0 else 1

    def node(self, i: int, orient: int) -> _Node:
        D = self.disks[i]
        return _Node(D.center, D.radius, orient, i)

    def pick(self, cur: _Node, v: _Node, p: complex, q: complex, cands: list) -> _Node:
        ref = cmath.phase(q - p)
        # keep the orientation of the blocker met first along the segment
        d = q - p
        first = min(cands, key=lambda i: (dot(self.disks[i].center - p, d), i))
        o = self.orientation(first, p, q)
        cands = [i for i in cands if self.orientation(i, p, q) == o]
        scored = []
        for i in cands:
            t = _tangent(cur, self.node(i, o))
            if t is None:
                continue
            scored.append((wrap_angle(cmath.phase(t[1] - t[0]) - ref), i))
        if not scored:
            raise DegeneracyError("no tangent to any blocking disk")
        if o < 0:
            best = max(a for a, _ in scored)
            k = max(i for a, i in scored if a >= best - ANGLE_TOL)
        else:
            best = min(a for a, _ in scored)
            k = min(i for a, i in scored if a <= best + ANGLE_TOL)
        return self.node(k, o)

    def segment(self, u: _Node, v: _Node):
        t = _tangent(u, v)
        if t is None or abs(t[1] - t[0]) == 0:
            raise DegeneracyError("missing tangent between consecutive nodes")
        return t

    def wrap(self, u: _Node, v: _Node, blockers: list, level: int) -> list:
        if level > self.max_levels:
            raise DegeneracyError(f"level budget {self.max_levels} exceeded")
        self.levels_used = max(self.levels_used, level)
        chain = [u]
        cur = u
        remaining = [i for i in blockers if i not in self.used]
        while True:
            p, q = self.segment(cur, v)
            hits = [i for i in remaining if self.blocks(i, p, q)]
            if not hits:
                break
            nxt = self.pick(cur, v, p, q, hits)
            remaining.remove(nxt.disk)
            self.used.add(nxt.disk)
            chain.append(nxt)
            cur = nxt
        chain.append(v)
        self.groups.append((level, list(chain)))
        out = [chain[0]]
        for n1, n2 in zip(chain[:-1], chain[1:]):
            p, q = self.segment(n1, n2)
            hits = self.blockers(p, q, exclude={n1.disk, n2.disk})
            if hits:
                if any(i in self.used for i in hits):
                    raise DegeneracyError("a used disk blocks a later segment")
                out.extend(self.wrap(n1, n2, hits, level + 1)[1:])
            else:
                out.append(n2)
        return out


def _free_arc(arc: CurvatureArc, disks, margin: float) -> bool:
    return all(arc.distance_to_point(D.center) >= D.radius + margin for D in disks)


def _horizontal_arc(a: complex, b: complex, disks, margin: float) -> CurvatureArc:
    """Arc of a crossing circle through a and b avoiding the disks."""
    mid = (a + b) / 2
    chord = b - a
    y = min(a.imag, b.imag)
    for k in range(64):
        h = 0.0 if k == 0 else -y * 2.0 ** (k - 1)
        # center on the perpendicular bisector at height h
        nrm = 1j * chord / abs(chord)
        if abs(nrm.imag) < 1e-15:
            break
        center = mid + nrm * ((h - mid.imag) / nrm.imag)
        radius = abs(a - center)
        low = center - 1j * radius
        orient = -1 if cross(chord, low - a) < 0 else 1
        arc = CurvatureArc.circular(center, radius, a, b, orient, HALFPLANE, strict=False)
        if abs(arc.kappa) < 2 - KAPPA_MARGIN and arc.in_model() and _free_arc(arc, disks, margin):
            return arc
    raise DegeneracyError("no free crossing circle through the endpoints")


def _pieces_from_nodes(nodes: list) -> list:
    pieces = []
    segs = [_tangent(n1, n2) for n1, n2 in zip(nodes[:-1], nodes[1:])]
    for k, (p, q) in enumerate(segs):
        if k > 0:
            n = nodes[k]
            prev_end = segs[k - 1][1]
            if abs(p - prev_end) > 1e-13 * max(1.0, n.radius):
                pieces.append(CurvatureArc.circular(n.center, n.radius, prev_end, p, n.orient,
                                                    HALFPLANE, strict=False))
        pieces.append(CurvatureArc.segment(p, q, HALFPLANE, strict=False))
    return pieces


def _events(groups, disks) -> tuple:
    out = []
    for g, (level, chain) in enumerate(groups):
        for n1, n2 in zip(chain[:-1], chain[1:]):
            p, q = _tangent(n1, n2)
            kind = "cross-tangent" if n1.orient * n2.orient < 0 else "upper-tangent"
            idx = tuple(disks[n.disk].index if n.disk is not None else None for n in (n1, n2))
            out.append(TangentEvent(kind, idx, level, g, cmath.phase(q - p)))
        for n in chain[1:-1]:
            out.append(TangentEvent("boundary-arc", (disks[n.disk].index,), level, g, float(n.orient)))
    return tuple(out)


def plan_halfplane(disks: Sequence[CoveringDisk], a: complex, b: complex,
                   margin: float = 1e-9, max_levels: Optional[int] = None) -> PlanResult:
    """Admissible path from a to b in the half-plane avoiding crossing disks."""
    a, b = complex(a), complex(b)
    disks = sorted(disks, key=lambda d: (d.center.real, d.index))
    if a == b:
        raise PlanError("endpoints must differ")
    for i, D in enumerate(disks):
        if not D.crossing:
            raise PlanError("covering disks must cross the real axis")
        for E in disks[i + 1:]:
            if abs(D.center - E.center) <= D.radius + E.radius:
                raise PlanError("covering disks must be disjoint")
    for w in (a, b):
        if w.imag <= 0:
            raise UnreachableError("endpoint outside the half-plane")
        if any(abs(w - D.center) <= D.radius for D in disks):
            raise UnreachableError("endpoint inside a covering disk")
    if max_levels is None:
        max_levels = len(disks) + 2
    pl = _Planner(disks, margin, max_levels)
    ends = (_Node(a), _Node(b))
    if not pl.blockers(a, b):
        u = (b - a) / abs(b - a)
        if 2 * abs(u.real) < 2 - KAPPA_MARGIN:
            pieces = [CurvatureArc.segment(a, b, HALFPLANE)]
        else:
            pieces = [_horizontal_arc(a, b, disks, margin)]
        return PlanResult(AdmissiblePath(pieces, HALFPLANE), 0, (), AdmissiblePath(pieces, HALFPLANE),
                          tuple(disks))
    nodes = pl.wrap(ends[0], ends[1], pl.blockers(a, b), 1)
    pieces = _pieces_from_nodes(nodes)
    for p in pieces:
        if not abs(p.kappa) < 2 - KAPPA_MARGIN:
            raise DegeneracyError("a piece reached |kappa| = 2 (horizontal tangent)")
    path = AdmissiblePath(pieces, HALFPLANE)
    return PlanResult(path, pl.levels_used, _events(pl.groups, disks), path, tuple(disks))


# --------------------------------------------------------------------------
# planning in the disk


@dataclass(frozen=True)
class Certificate:
    ok: bool
    reason: Optional[str] = None
    turning: float = float("nan")

    def __bool__(self):
        return self.ok


def _avoids(path, obstacles, tol: float = 0.0) -> Optional[str]:
    for k, piece in enumerate(path.pieces):
        for j, h in enumerate(obstacles):
            if piece.distance_to_point(h.center) <= h.radius + tol:
                return f"piece {k} meets obstacle {j}"
        pts = piece.sample()
        for j, h in enumerate(obstacles):
            if np.any(np.abs(pts - h.center) <= h.radius):
                return f"sampled point of piece {k} inside obstacle {j}"
    return None


def verify_plan(scene: ObstacleScene, result: PlanResult, q: PlanQuery,
                endpoint_tol: float = 1e-9) -> Certificate:
    """Check that the result is an admissible Jordan arc in the free region from a to b."""
    path = result.path
    if path.model != DISK:
        return Certificate(False, "path is not expressed in the disk model")
    if abs(path.start - q.a) > endpoint_tol or abs(path.end - q.b) > endpoint_tol:
        return Certificate(False, "endpoints do not match the query")
    diag = validate_admissible(path, DISK)
    if not diag.ok:
        return Certificate(False, f"not admissible: {diag.reason} (piece {diag.piece})")
    bad = _avoids(path, scene.obstacles)
    if bad:
        return Certificate(False, bad)
    delta = turning_angle(path)
    if abs(delta) > 8 * math.pi:
        return Certificate(False, f"turning {delta:.6g} exceeds 8 pi", delta)
    return Certificate(True, None, delta)


def _transport_candidates(scene: ObstacleScene):
    yield scene.transport
    if not scene.obstacles:
        for k in range(1, MAX_TRANSPORTS):
            yield transport_map(cmath.exp(2j * math.pi * k / MAX_TRANSPORTS))
        return
    angles = sorted(cmath.phase(h.tangency) % (2 * math.pi) for h in scene.obstacles)
    n = len(angles)
    gaps = sorted((((angles[(k + 1) % n] - angles[k]) % (2 * math.pi) or 2 * math.pi), angles[k])
                  for k in range(n))[::-1]
    fracs = (0.35, 0.65, 0.2, 0.8, 0.5)
    for gap, start in gaps[:2]:
        for f in fracs:
            yield transport_map(cmath.exp(1j * (start + f * gap)))


def plan(scene: ObstacleScene, q: PlanQuery) -> PlanResult:
    """Admissible path in the free region of the scene from q.a to q.b."""
    a, b = complex(q.a), complex(q.b)
    if a == b:
        raise PlanError("endpoints must differ")
    for w in (a, b):
        if not scene.free(w):
            raise UnreachableError(f"endpoint {w} is not in the free region")
    last = None
    for M in _transport_candidates(scene):
        sc = scene if M is scene.transport else _rescene(scene, M)
        if sc is None:
            continue
        wa, wb = M(a), M(b)
        eps = q.epsilon
        if eps is None:
            eps = 0.25 * min(sc.clearance_h(wa), sc.clearance_h(wb), sc.min_gap_h(), 1.0)
        for _ in range(EPS_RETRIES + 1):
            disks = sc.covering_for(eps)
            try:
                res = plan_halfplane(disks, wa, wb, margin=eps / 2)
                path = res.path.transform(M.inverse(), DISK)
                # pin the exact query endpoints against round-off
                out = PlanResult(_pin(path, a, b), res.levels_used, res.tangent_events, res.path,
                                 disks, M, eps)
                cert = verify_plan(scene, out, q)
                if cert.ok:
                    return out
                last = PlanError(f"verification failed: {cert.reason}")
            except UnreachableError:
                raise
            except GeometryError as exc:
                last = exc
            eps /= 2
    raise DegeneracyError(f"planning failed for every transport: {last}")


def _rescene(scene: ObstacleScene, M: MoebiusMap) -> Optional[ObstacleScene]:
    tangent = []
    for h in scene.obstacles:
        img = mobius_map_circle(M, h.circle)
        if img.is_line:
            return None
        tangent.append((complex(img.center.real, img.radius), img.radius))
    tmp = ObstacleScene(scene.obstacles, M, tuple(tangent), 0.0, ())
    eps = 0.25 * min(tmp.min_gap_h(), 1.0)
    return ObstacleScene(scene.obstacles, M, tuple(tangent), eps, tmp.covering_for(eps))


def _pin(path: AdmissiblePath, a: complex, b: complex) -> AdmissiblePath:
    pieces = list(path.pieces)
    if abs(pieces[0].start - a) < 1e-9:
        first = pieces[0]
        pieces[0] = CurvatureArc(first.support, a, first.end, first.orientation, first.model, first.kappa)
    if abs(pieces[-1].end - b) < 1e-9:
        last = pieces[-1]
        pieces[-1] = CurvatureArc(last.support, last.start, b, last.orientation, last.model, last.kappa)
    return AdmissiblePath(pieces, path.model)
