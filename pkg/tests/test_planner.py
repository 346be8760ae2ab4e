import cmath
import math

import numpy as np
import pytest

from horoconvex.arcs import AdmissiblePath, CurvatureArc, validate_admissible
from horoconvex.geometry import DISK, HALFPLANE, GeneralizedCircle, GeometryError, MoebiusMap, classify
from horoconvex.horocycle import Horodisk, horodisk_from_tangency
from horoconvex.planner import (
    CoveringDisk,
    PlanError,
    PlanQuery,
    PlanResult,
    UnreachableError,
    build_scene,
    plan,
    plan_halfplane,
    tangent_segment,
    verify_plan,
)
from horoconvex.sampling import random_free_point, random_scene_obstacles

STACKED = ([CoveringDisk(-3 + 6j, 6.05, 0), CoveringDisk(3 + 1.4j, 1.5, 1)], 0.2j, 8 + 0.7j)


# -- scenes ------------------------------------------------------------------

def test_single_obstacle_scene():
    sc = build_scene([horodisk_from_tangency(1, 0.5)])
    assert len(sc.covering) == 1
    D = sc.covering[0]
    assert classify(D.circle, HALFPLANE) == "crossing"
    # the obstacle image is tangent to the real axis
    c, r = sc.tangent_disks[0]
    assert abs(c.imag - r) < 1e-12


def test_empty_scene():
    sc = build_scene([])
    assert sc.covering == () and sc.mu == 0


def test_two_obstacles_ordered():
    sc = build_scene([horodisk_from_tangency(1, 0.3), horodisk_from_tangency(-1, 0.4)])
    xs = [D.center.real for D in sc.covering]
    assert len(xs) == 2 and xs == sorted(xs)
    assert all(D.crossing for D in sc.covering)


@pytest.mark.parametrize("obs", [
    [Horodisk(1, 0.5), Horodisk(1, 0.3)],           # nested
    [Horodisk(1, 0.5), Horodisk(1j, 0.6)],          # overlapping
])
def test_bad_scenes(obs):
    with pytest.raises(GeometryError):
        build_scene(obs)


# -- tangent segments --------------------------------------------------------

circle = GeneralizedCircle.circle


def line_distance(c, p, q):
    u = (q - p) / abs(q - p)
    return abs(((c - p) * u.conjugate()).imag)


def test_tangent_from_point():
    seg = tangent_segment(2j, circle(3, 1), "upper")
    assert abs(line_distance(3, seg.start, seg.end) - 1) <= 1e-10
    assert seg.start == 2j and abs(abs(seg.end - 3) - 1) < 1e-12


def test_outer_tangent_of_congruent_disks():
    seg = tangent_segment(circle(0, 1), circle(4, 1), "upper")
    assert abs(seg.start - 1j) < 1e-12 and abs(seg.end - (4 + 1j)) < 1e-12


def test_cross_tangent_through_midpoint():
    for kind in ("upper-cross", "lower-cross"):
        seg = tangent_segment(circle(0, 1), circle(4, 1), kind)
        assert line_distance(0, seg.start, seg.end) == pytest.approx(1, abs=1e-10)
        assert line_distance(4, seg.start, seg.end) == pytest.approx(1, abs=1e-10)
        assert line_distance(2, seg.start, seg.end) < 1e-12
    up = tangent_segment(circle(0, 1), circle(4, 1), "upper-cross")
    assert up.start.imag > 0 > up.end.imag


def test_cross_tangent_needs_disjoint_disks():
    with pytest.raises(GeometryError):
        tangent_segment(circle(0, 1), circle(1.5, 1), "upper-cross")


# -- planning in the half-plane ----------------------------------------------

def halfplane_clearance(path, disks):
    return min(p.distance_to_point(D.center) - D.radius for p in path.pieces for D in disks)


def test_no_obstacles_segment():
    r = plan_halfplane([], 1j, 2 + 2j)
    assert len(r.path) == 1 and r.path.pieces[0].is_segment
    assert validate_admissible(r.path).ok


def test_no_obstacles_horizontal():
    r = plan_halfplane([], 1j, 1 + 1j)
    (arc,) = r.path.pieces
    assert not arc.is_segment
    assert abs(arc.support.center - 0.5) < 1e-12
    assert classify(arc.support, HALFPLANE) == "crossing"
    assert validate_admissible(r.path).ok


def test_one_disk_detour():
    disks = [CoveringDisk(1 + 0.5j, 1, 0)]
    r = plan_halfplane(disks, -0.5 + 0.5j, 2.5 + 0.5j)
    kinds = [p.is_segment for p in r.path.pieces]
    assert kinds == [True, False, True]
    assert r.path.pieces[1].orientation == -1
    assert validate_admissible(r.path).ok
    assert halfplane_clearance(r.path, disks) > -1e-12
    assert r.levels_used == 1


def test_stacked_instance_needs_a_correction_level():
    disks, a, b = STACKED
    r = plan_halfplane(disks, a, b)
    assert r.levels_used == 2
    assert validate_admissible(r.path).ok
    assert halfplane_clearance(r.path, disks) > -1e-12
    assert any(e.kind == "cross-tangent" for e in r.tangent_events)


def test_halfplane_rejects_bad_input():
    with pytest.raises(UnreachableError):
        plan_halfplane([CoveringDisk(0, 1, 0)], 0.5j, 3 + 1j)
    with pytest.raises(PlanError):
        plan_halfplane([CoveringDisk(0, 1, 0), CoveringDisk(1.5, 1, 1)], 3j, 5 + 1j)


# -- planning in the disk ----------------------------------------------------

def test_crescent_plan():
    sc = build_scene([horodisk_from_tangency(1, 0.5)])
    q = PlanQuery(-1 / 3, -0.5 + 0.3j)
    r = plan(sc, q)
    assert verify_plan(sc, r, q).ok


def test_zero_obstacles_single_piece(rng):
    sc = build_scene([])
    for _ in range(50):
        q = PlanQuery(random_free_point(rng, []), random_free_point(rng, []))
        r = plan(sc, q)
        assert len(r.path) == 1
        assert verify_plan(sc, r, q).ok


def test_unreachable_endpoint():
    sc = build_scene([horodisk_from_tangency(1, 0.5)])
    with pytest.raises(UnreachableError):
        plan(sc, PlanQuery(0.5, -0.5))
    with pytest.raises(UnreachableError):
        plan(sc, PlanQuery(0.0, -0.5))  # on the closed obstacle


def test_verify_rejects_horizontal_piece():
    sc = build_scene([horodisk_from_tangency(1, 0.5)])
    q = PlanQuery(0.5 + 0.6j, 0.5 - 0.6j)
    r = plan(sc, q)
    assert verify_plan(sc, r, q).ok
    # swap the first half-plane piece for a horizontal segment and carry it back
    M = r.transport
    p0 = r.path_halfplane.pieces[0]
    flat = CurvatureArc.segment(p0.start, p0.start + 0.1, HALFPLANE, strict=False)
    assert abs(flat.kappa) == pytest.approx(2)
    back = flat.transform(M.inverse(), DISK)
    bad = PlanResult(AdmissiblePath((back,) + r.path.pieces[1:], DISK), r.levels_used, r.tangent_events)
    cert = verify_plan(sc, bad, q)
    assert not cert.ok


def test_verify_rejects_nudged_path():
    h = horodisk_from_tangency(1, 0.5)
    sc = build_scene([h])
    q = PlanQuery(0.5 + 0.6j, 0.5 - 0.6j)
    r = plan(sc, q)
    # translate the whole path so that it dips 1e-3 into the obstacle
    pts = np.asarray(r.path.sample())
    near = pts[np.argmin(abs(pts - h.center))]
    gap = abs(near - h.center) - h.radius
    shift = (gap + 1e-3) * (h.center - near) / abs(h.center - near)
    moved = []
    for p in r.path.pieces:
        sup = p.support
        ns = (GeneralizedCircle.line(sup.anchor + shift, sup.direction) if sup.is_line
              else GeneralizedCircle.circle(sup.center + shift, sup.radius))
        moved.append(CurvatureArc.build(ns, p.start + shift, p.end + shift, p.orientation, DISK, strict=False))
    bad = PlanResult(AdmissiblePath(moved, DISK), r.levels_used, r.tangent_events)
    q2 = PlanQuery(moved[0].start, moved[-1].end)
    cert = verify_plan(sc, bad, q2)
    assert not cert.ok


def _scene_instance(seed):
    rng = np.random.default_rng(seed)
    obs = random_scene_obstacles(rng, int(rng.integers(1, 13)))
    return obs, random_free_point(rng, obs), random_free_point(rng, obs)


def test_soundness_and_termination():
    for seed in range(200):
        obs, a, b = _scene_instance(seed)
        sc = build_scene(obs)
        q = PlanQuery(a, b)
        r = plan(sc, q)
        cert = verify_plan(sc, r, q)
        assert cert.ok, (seed, cert.reason)
        assert abs(cert.turning) <= 8 * math.pi
        assert r.levels_used <= sc.mu


def test_monotone_sweep_within_groups():
    # within one wrap the boundary arcs visit disks in a single left-right order
    checked = 0
    for seed in range(300):
        obs, a, b = _scene_instance(seed)
        r = plan(build_scene(obs), PlanQuery(a, b))
        cov = {D.index: D for D in r.covering}
        groups = {}
        for e in r.tangent_events:
            if e.kind == "boundary-arc":
                groups.setdefault(e.group, []).append(cov[e.indices[0]].center.real)
        for xs in groups.values():
            if len(xs) < 2:
                continue
            d = np.diff(xs)
            assert np.all(d > 0) or np.all(d < 0)
            checked += 1
    assert checked >= 10


def test_boundary_arcs_follow_their_orientation():
    for seed in range(100):
        obs, a, b = _scene_instance(seed)
        r = plan(build_scene(obs), PlanQuery(a, b))
        for p in r.path_halfplane.pieces:
            if not p.is_segment:
                assert p.sweep * p.orientation > 0


def test_rotation_equivariance(rng):
    for seed in range(40):
        obs, a, b = _scene_instance(1000 + seed)
        phi = rng.uniform(-math.pi, math.pi)
        rot = cmath.exp(1j * phi)
        obs_r = [Horodisk(h.tangency * rot, h.radius) for h in obs]
        r = plan(build_scene(obs_r), PlanQuery(a * rot, b * rot))
        back = r.path.transform(MoebiusMap.rotation(-phi), DISK)
        res = PlanResult(back, r.levels_used, r.tangent_events)
        assert verify_plan(build_scene(obs), res, PlanQuery(a, b), endpoint_tol=1e-9).ok


def test_plan_is_deterministic():
    obs, a, b = _scene_instance(7)
    r1 = plan(build_scene(obs), PlanQuery(a, b))
    r2 = plan(build_scene(obs), PlanQuery(a, b))
    assert r1.path == r2.path
