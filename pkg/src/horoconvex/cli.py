"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 unreachable endpoints,
4 verification failure.
"""
from __future__ import annotations

import argparse
import cmath
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .arcs import turning_angle
from .density import (
    CrescentEvaluator,
    ClassCEvaluator,
    LensEvaluator,
    crescent_ray_samples,
    lens_samples,
    lower_bound,
    scan_constants,
    verify_theorem2,
)
from .geometry import GeometryError, MoebiusMap
from .horocycle import classC_construct, classC_midpoint, lens
from .planner import PlanError, PlanQuery, UnreachableError, build_scene, plan, verify_plan
from .scenefile import SceneFormatError, load_scene
from .svg import render_svg

EXIT_OK, EXIT_USAGE, EXIT_UNREACHABLE, EXIT_VERIFY = 0, 2, 3, 4


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument parsing helpers


def parse_real(s: str) -> float:
    try:
        return float(Fraction(s.strip()))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a real number: {s!r}") from None


def parse_point(s: str) -> complex:
    """'re,im' (fractions allowed) or a complex literal like -0.5+0.3j."""
    s = s.strip()
    if "," in s:
        parts = s.split(",")
        if len(parts) != 2:
            raise UsageError(f"point must be 're,im': {s!r}")
        return complex(parse_real(parts[0]), parse_real(parts[1]))
    try:
        return complex(parse_real(s))
    except UsageError:
        pass
    try:
        return complex(s.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a point: {s!r}") from None


_LENS = re.compile(r"^lens\((.*)\)$")


def parse_domain(s: str):
    s = s.strip()
    if s == "crescent":
        return ("crescent",)
    m = _LENS.match(s)
    if m:
        parts = m.group(1).split(",")
        if len(parts) != 2:
            raise UsageError("lens takes two points: lens(a,b)")
        a, b = parse_point(parts[0]), parse_point(parts[1])
        if a == b or abs(a) >= 1 or abs(b) >= 1:
            raise UsageError("lens vertices must be distinct points of the open disk")
        return ("lens", a, b)
    raise UsageError(f"unknown domain selector {s!r} (use crescent or lens(a,b))")


def _fmt(x: float) -> str:
    return repr(float(x))


def _pt(z: complex) -> str:
    return f"{_fmt(z.real)},{_fmt(z.imag)}"


def describe_path(path, levels: int, verified: bool) -> str:
    lines = ["# horoconvex path v1", f"model {path.model}", f"pieces {len(path)}"]
    for k, p in enumerate(path.pieces):
        if p.is_segment:
            lines.append(f"piece {k} segment start={_pt(p.start)} end={_pt(p.end)} kappa={_fmt(p.kappa)}")
        else:
            lines.append(f"piece {k} arc center={_pt(p.support.center)} radius={_fmt(p.support.radius)} "
                         f"start={_pt(p.start)} end={_pt(p.end)} orientation={p.orientation:+d} "
                         f"kappa={_fmt(p.kappa)}")
    lines.append(f"levels_used {levels}")
    lines.append(f"turning {_fmt(turning_angle(path))}")
    lines.append(f"verified {'yes' if verified else 'no'}")
    return "\n".join(lines) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# commands


def _scene_and_query(args):
    sf = load_scene(args.scene) if args.scene else None
    obstacles = sf.horodisks() if sf else []
    a = parse_point(args.a) if args.a is not None else (sf.a if sf else None)
    b = parse_point(args.b) if args.b is not None else (sf.b if sf else None)
    return sf, obstacles, a, b


def cmd_plan(args) -> int:
    _, obstacles, a, b = _scene_and_query(args)
    if a is None or b is None:
        raise UsageError("plan needs endpoints (--a/--b or a query in the scene)")
    if a == b:
        raise UsageError("endpoints must differ")
    try:
        scene = build_scene(obstacles)
    except GeometryError as exc:
        raise UsageError(f"invalid scene: {exc}") from None
    q = PlanQuery(a, b)
    try:
        res = plan(scene, q)
    except UnreachableError as exc:
        print(f"unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except PlanError as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    cert = verify_plan(scene, res, q)
    text = describe_path(res.path, res.levels_used, cert.ok)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.svg_out:
        _write(args.svg_out, render_svg(obstacles, res.path, res.covering if args.show_covering else (),
                                        res.transport, (a, b)))
    if not cert.ok:
        print(f"verification failed: {cert.reason}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_render(args) -> int:
    sf, obstacles, a, b = _scene_and_query(args)
    if not args.svg_out:
        raise UsageError("render needs --svg-out")
    try:
        scene = build_scene(obstacles)
    except GeometryError as exc:
        raise UsageError(f"invalid scene: {exc}") from None
    path, covering, transport, pts = None, scene.covering, scene.transport, ()
    if a is not None and b is not None:
        pts = (a, b)
        try:
            res = plan(scene, PlanQuery(a, b))
        except UnreachableError as exc:
            print(f"unreachable: {exc}", file=sys.stderr)
            return EXIT_UNREACHABLE
        path, covering, transport = res.path, res.covering, res.transport
    _write(args.svg_out, render_svg(obstacles, path, covering if args.show_covering else (), transport, pts))
    return EXIT_OK


def cmd_verify_bound(args) -> int:
    dom = parse_domain(args.domain)
    sf = load_scene(args.scene) if args.scene else None
    n = args.samples if args.samples is not None else (sf.count if sf and sf.count else 1000)
    seed = args.seed if args.seed is not None else (sf.seed if sf and sf.seed is not None else 0)
    if n <= 0:
        raise UsageError("--samples must be positive")
    if dom[0] == "crescent":
        ev = CrescentEvaluator()
        pts = crescent_ray_samples(n)
    else:
        L = lens(dom[1], dom[2])
        ev = LensEvaluator(L)
        pts = lens_samples(L, n, np.random.default_rng(seed))
    cert = verify_theorem2(ev, pts, workers=args.workers)
    print(f"# domain {args.domain} samples {len(cert.samples)} skipped {len(cert.skipped)}")
    print("# index re im nu d ratio")
    for k, (z, nu, d, ratio) in enumerate(cert.samples):
        print(f"{k} {z.real:.12e} {z.imag:.12e} {nu:.12e} {d:.12e} {ratio:.15f}")
    ok = cert.min_ratio >= 1 - 1e-9
    print(f"min_ratio {cert.min_ratio:.15f} at {cert.argmin.real:.12e},{cert.argmin.imag:.12e} "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_scan_constants(args) -> int:
    s = scan_constants()
    print(f"min_g {s.g_min:.8f} argmin_t {s.t_star:.8f} grid_step {s.grid_step_t:.6g} "
          f"resolution {s.resolution:.0e}")
    print(f"min_s_form {s.s_min:.8f} argmin_s {s.s_star:.8f} grid_step {s.grid_step_s:.6g} "
          f"resolution {s.resolution:.0e}")
    return EXIT_OK


NEAR_DISTANCES = (0.02, 0.05, 0.1, 0.2, 0.4)


def _conjecture_row(params):
    k, rho1, rho2, phi = params
    dom = classC_construct(cmath.exp(1j * phi), rho2, rho1)
    m = classC_midpoint(dom)
    ev = ClassCEvaluator(dom)
    p2 = dom.d2.center
    # walk into the domain from m(Omega) along the geodesic away from D2's center
    best_enu, best_ratio = math.inf, math.inf
    for t in NEAR_DISTANCES:
        z = _geodesic_step(p2, m, t)
        if not ev.contains(z):
            continue
        s = ev.evaluate(z)
        best_enu = min(best_enu, s.e * s.nu)
        best_ratio = min(best_ratio, s.nu / lower_bound(s.d))
    return (f"{k} {rho1:.6f} {rho2:.6f} {math.degrees(phi):.4f} {m.real:.10f} {m.imag:.10f} "
            f"{abs(dom.orthogonality_residual()):.3e} {best_enu:.8f} {best_ratio:.8f}")


def _geodesic_step(p: complex, m: complex, t: float) -> complex:
    """Point at hyperbolic distance t beyond m on the geodesic from p through m."""
    T = MoebiusMap(1, -m, -m.conjugate(), 1)  # m -> 0
    u = T(p)
    direction = -u / abs(u)
    return T.inverse()(math.tanh(t) * direction)


def cmd_conjecture_scan(args) -> int:
    n = args.instances
    if n is None or n < 1:
        raise UsageError("--instances must be at least 1")
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    params = []
    for k in range(n):
        params.append((k, float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.1, 1.5)),
                       float(rng.uniform(-math.pi, math.pi))))
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            rows = list(ex.map(_conjecture_row, params))
    else:
        rows = [_conjecture_row(p) for p in params]
    print(f"# class-C scan instances {n} seed {args.seed if args.seed is not None else 0}")
    print(f"# reference: min over horo-crescents of e*nu = {scan_constants().s_min:.8f}")
    print("# index rho1 rho2 dir_deg m_re m_im ortho_residual min_e_nu min_ratio")
    for r in rows:
        print(r)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horoconvex", description="Horocyclic convexity toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def positive_workers(s):
        v = int(s)
        if v < 1:
            raise argparse.ArgumentTypeError("workers must be >= 1")
        return v

    def seed(s):
        v = int(s)
        if not 0 <= v < 2 ** 64:
            raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
        return v

    pl = sub.add_parser("plan", help="admissible path between two points of a scene")
    pl.add_argument("--scene")
    pl.add_argument("--a")
    pl.add_argument("--b")
    pl.add_argument("--out", help="path description file (default: stdout)")
    pl.add_argument("--svg-out")
    pl.add_argument("--show-covering", action="store_true")
    pl.set_defaults(func=cmd_plan)

    rd = sub.add_parser("render", help="SVG of a scene, with a planned path if endpoints are known")
    rd.add_argument("--scene")
    rd.add_argument("--a")
    rd.add_argument("--b")
    rd.add_argument("--svg-out")
    rd.add_argument("--show-covering", action="store_true")
    rd.set_defaults(func=cmd_render)

    vb = sub.add_parser("verify-bound", help="density lower-bound certificate")
    vb.add_argument("--domain", default="crescent")
    vb.add_argument("--scene", help="optional scene file supplying sampling count/seed")
    vb.add_argument("--samples", type=int)
    vb.add_argument("--seed", type=seed)
    vb.add_argument("--workers", type=positive_workers, default=1)
    vb.set_defaults(func=cmd_verify_bound)

    sc = sub.add_parser("scan-constants", help="minima of g(t) and of the pseudo-distance form")
    sc.set_defaults(func=cmd_scan_constants)

    cj = sub.add_parser("conjecture-scan", help="random class-C domains near their concave midpoint")
    cj.add_argument("--instances", "--samples", dest="instances", type=int, default=10)
    cj.add_argument("--seed", type=seed)
    cj.add_argument("--workers", type=positive_workers, default=1)
    cj.set_defaults(func=cmd_conjecture_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SceneFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
