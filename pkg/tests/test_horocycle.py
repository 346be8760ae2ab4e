import cmath
import math

import numpy as np
import pytest
from scipy import optimize

from horoconvex.geometry import GeometryError, MoebiusMap, hyp_distance
from horoconvex.horocycle import (
    Horodisk,
    STANDARD_CRESCENT,
    classC_construct,
    classC_midpoint,
    distance_to_horocycle,
    horodisk_from_tangency,
    horodisks_through_pair,
    hyperbolic_arc_length,
    lens,
    supporting_horodisk,
)
from horoconvex.planner import build_scene
from horoconvex.sampling import random_automorphism, random_disk_point, random_horodisk


def test_from_tangency_examples():
    h = horodisk_from_tangency(1, 0.5)
    assert h.center == 0.5 and h.radius == 0.5
    h = horodisk_from_tangency(1j, 1 / 3)
    assert abs(h.center - 2j / 3) < 1e-15
    h = horodisk_from_tangency(-1, 0.999)
    assert abs(abs(h.center) + h.radius - 1) < 1e-12


@pytest.mark.parametrize("r", [0, 1, -0.2, 1.5])
def test_from_tangency_rejects_radius(r):
    with pytest.raises(GeometryError):
        horodisk_from_tangency(1, r)


def test_tangency_must_be_unit():
    with pytest.raises(GeometryError):
        Horodisk(0.9, 0.5)


def test_invariant_random(rng):
    for _ in range(500):
        h = random_horodisk(rng, 1e-3, 0.999)
        assert abs(abs(h.center) + h.radius - 1) < 1e-12


def fit_internal_tangent(a, b, side):
    """Circle through a, b internally tangent to the unit circle, center on the given side."""
    m = (a + b) / 2
    n = 1j * (b - a) / abs(b - a)

    def f(t):
        c = m + side * t * n
        return abs(c) + abs(a - c) - 1
    t = optimize.brentq(f, 0, 10)
    c = m + side * t * n
    return c, abs(a - c)


def test_pair_example():
    hp, hm = horodisks_through_pair(1 / 3, -1 / 3)
    assert abs(hp.center - 4j / 9) < 1e-12 and abs(hm.center + 4j / 9) < 1e-12
    assert hp.radius == pytest.approx(5 / 9) and hm.radius == pytest.approx(5 / 9)
    assert abs(hp.tangency - 1j) < 1e-12 and abs(hm.tangency + 1j) < 1e-12
    for side, h in ((1, hp), (-1, hm)):
        c, r = fit_internal_tangent(1 / 3, -1 / 3, -side)
        assert abs(c - h.center) < 1e-10 and abs(r - h.radius) < 1e-10


def test_pair_is_symmetric_and_ordered(rng):
    for _ in range(300):
        a, b = random_disk_point(rng), random_disk_point(rng)
        p1 = horodisks_through_pair(a, b)
        p2 = horodisks_through_pair(b, a)
        for h1, h2 in zip(p1, p2):
            assert abs(h1.center - h2.center) < 1e-9
        assert cmath.phase(p1[0].tangency) >= cmath.phase(p1[1].tangency)
        for h in p1:
            assert abs(h.boundary_residual(a)) < 1e-10 and abs(h.boundary_residual(b)) < 1e-10


def test_tangencies_separate_endpoints(rng):
    # the geodesic through a and b has its ends between the two tangency
    # points on the unit circle: the cross-ratio of the four is real and negative
    for _ in range(300):
        a, b = random_disk_point(rng), random_disk_point(rng)
        hp, hm = horodisks_through_pair(a, b)
        T = MoebiusMap(1, -a, -a.conjugate(), 1)
        w = T(b)
        Ti = T.inverse()
        x1, x2 = Ti(w / abs(w)), Ti(-w / abs(w))
        zp, zm = hp.tangency, hm.tangency
        cr = ((zp - x1) * (zm - x2)) / ((zp - x2) * (zm - x1))
        assert abs(cr.imag) < 1e-6 * abs(cr)
        assert cr.real < 0


def test_pair_rejects_coincident():
    with pytest.raises(GeometryError):
        horodisks_through_pair(0.2, 0.2)
    with pytest.raises(GeometryError):
        lens(0.1j, 0.1j)


def test_pair_equivariance(rng):
    for _ in range(200):
        m = random_automorphism(rng)
        a, b = random_disk_point(rng, 0.9), random_disk_point(rng, 0.9)
        direct = sorted((h.center for h in horodisks_through_pair(m(a), m(b))), key=lambda c: (c.real, c.imag))
        mapped = []
        for h in horodisks_through_pair(a, b):
            img = m.map_circle(h.circle)
            mapped.append(img.center)
        mapped.sort(key=lambda c: (c.real, c.imag))
        for c1, c2 in zip(direct, mapped):
            assert abs(c1 - c2) < 1e-9


def test_lens_examples():
    E = lens(1 / 3, -1 / 3)
    assert E.contains(0)
    assert not E.contains(0.9)
    assert E.contains(1 / 3, closed=True, tol=1e-12)
    assert not E.contains(1 / 3)


def test_lens_membership_equivariant(rng):
    for _ in range(1000):
        m = random_automorphism(rng, 0.7)
        a, b = random_disk_point(rng, 0.8), random_disk_point(rng, 0.8)
        z = random_disk_point(rng, 0.9)
        E, F = lens(a, b), lens(m(a), m(b))
        inside = E.contains(z)
        # skip points within round-off of the boundary
        margin = min(abs(abs(z - h.center) - h.radius) for h in (E.hplus, E.hminus))
        if margin < 1e-9:
            continue
        assert inside == F.contains(m(z))


def test_lens_contains_geodesic(rng):
    from horoconvex.arcs import arc_through
    for _ in range(100):
        a, b = random_disk_point(rng), random_disk_point(rng)
        g = arc_through(a, b, 0.0)
        E = lens(a, b)
        assert np.all(E.contains_array(g.sample(), 1e-12))


# -- distance to a horocycle -------------------------------------------------

def brute_distance(z, h):
    f = lambda t: hyp_distance(z, h.center + h.radius * cmath.exp(1j * t))
    ts = np.linspace(-math.pi, math.pi, 721)
    k = int(np.argmin([f(t) for t in ts]))
    step = ts[1] - ts[0]
    res = optimize.minimize_scalar(f, bounds=(ts[k] - step, ts[k] + step), method="bounded",
                                   options={"xatol": 1e-12})
    return res.fun


def test_distance_examples():
    h = horodisk_from_tangency(1, 0.5)
    assert distance_to_horocycle(-1 / 3, h) == pytest.approx(0.34657359027997265, abs=1e-14)
    assert distance_to_horocycle(-1 / 2, h) == pytest.approx(0.54930614433405485, abs=1e-14)
    assert distance_to_horocycle(0, h) == 0.0
    assert brute_distance(-1 / 3, h) == pytest.approx(0.5 * math.log(2), abs=1e-8)


def test_distance_rejects_inside():
    with pytest.raises(GeometryError):
        distance_to_horocycle(0.5, horodisk_from_tangency(1, 0.5))


def test_distance_general_horodisks(rng):
    for _ in range(40):
        h = random_horodisk(rng)
        while True:
            z = random_disk_point(rng, 0.9)
            if not h.contains(z, closed=True):
                break
        assert distance_to_horocycle(z, h) == pytest.approx(brute_distance(z, h), abs=1e-7)


def test_distance_invariance(rng):
    for _ in range(300):
        h = random_horodisk(rng)
        z = random_disk_point(rng, 0.9)
        if h.contains(z, closed=True, tol=1e-9):
            continue
        m = random_automorphism(rng, 0.6)
        img = m.map_circle(h.circle)
        h2 = Horodisk(img.center / abs(img.center), img.radius)
        assert distance_to_horocycle(m(z), h2) == pytest.approx(distance_to_horocycle(z, h), abs=1e-9)


def test_distance_inside_flag():
    h = horodisk_from_tangency(1, 0.5)
    assert distance_to_horocycle(0.5, h, inside=True) > 0


# -- supporting horodisks ----------------------------------------------------

def test_supporting_horodisk():
    h0 = horodisk_from_tangency(1, 0.5)
    assert supporting_horodisk(build_scene([h0]), 0) == h0
    h1 = horodisk_from_tangency(-1, 0.3)
    sc = build_scene([h0, h1])
    assert supporting_horodisk(sc, -0.4) == h1
    with pytest.raises(GeometryError):
        supporting_horodisk(sc, 0.1j)


# -- class C -------------------------------------------------------------------

def test_classC_symmetric_instance():
    dom = classC_construct(0.5, 0.4, 0.8)
    c1, r1 = dom.d1.euclid_center, dom.d1.euclid_radius
    c2, r2 = dom.d2.euclid_center, dom.d2.euclid_radius
    assert c1 == 0 and r1 == pytest.approx(math.tanh(0.8))
    assert abs(c2.imag) < 1e-15 and c2.real > 0
    assert abs(abs(c2) ** 2 - r1 ** 2 - r2 ** 2) < 1e-10
    for v in dom.vertices():
        assert abs(v) < 1


@pytest.mark.parametrize("args", [(0.5, 0.0, 0.8), (0.5, 1e-12, 0.8), (0.0, 0.4, 0.8), (0.5, 0.4, -1)])
def test_classC_degenerate(args):
    with pytest.raises(GeometryError):
        classC_construct(*args)


def test_classC_random_residual(rng):
    for _ in range(200):
        dom = classC_construct(cmath.exp(1j * rng.uniform(-3, 3)), rng.uniform(0.05, 2), rng.uniform(0.05, 2.5))
        c1, c2 = dom.d1.euclid_center, dom.d2.euclid_center
        r1, r2 = dom.d1.euclid_radius, dom.d2.euclid_radius
        assert abs(abs(c1 - c2) ** 2 - r1 ** 2 - r2 ** 2) <= 1e-10


def test_classC_midpoint_symmetric():
    dom = classC_construct(0.5, 0.4, 0.8)
    m = classC_midpoint(dom)
    c2, r2 = dom.d2.euclid_center, dom.d2.euclid_radius
    assert abs(m.imag) < 1e-9
    assert m.real == pytest.approx(c2.real - r2, abs=1e-9)


def test_classC_midpoint_rotates():
    dom = classC_construct(0.5, 0.4, 0.8)
    rot = classC_construct(cmath.exp(1.1j), 0.4, 0.8)
    assert abs(classC_midpoint(rot) - cmath.exp(1.1j) * classC_midpoint(dom)) < 1e-8


def test_classC_midpoint_equal_arc_lengths(rng):
    for _ in range(5):
        dom = classC_construct(cmath.exp(1j * rng.uniform(-3, 3)), rng.uniform(0.1, 1.5), rng.uniform(0.3, 2))
        m = classC_midpoint(dom)
        c2, r2 = dom.d2.euclid_center, dom.d2.euclid_radius
        tm = cmath.phase(m - c2)
        ends = [cmath.phase(v - c2) for v in dom.vertices()]
        # lengths along the arc inside D1 from m to each vertex
        lengths = []
        for te in ends:
            d = (te - tm + math.pi) % (2 * math.pi) - math.pi
            lengths.append(hyperbolic_arc_length(c2, r2, tm, tm + d))
        assert lengths[0] == pytest.approx(lengths[1], abs=1e-8)


def test_crescent_membership():
    assert STANDARD_CRESCENT.contains(-1 / 3)
    assert not STANDARD_CRESCENT.contains(0.5)
    assert not STANDARD_CRESCENT.contains(0)
