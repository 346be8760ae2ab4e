import math

import pytest

from horoconvex.cli import main
from horoconvex.scenefile import SceneFile, SceneFormatError, dump_scene, load_scene, parse_scene

CRESCENT = """\
model: disk
obstacles:
  - {angle_deg: 0.0, radius: 0.5}
query:
  a: [-0.3333333333333333, 0.0]
  b: [-0.5, 0.3]
"""


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejections
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def crescent_file(tmp_path):
    p = tmp_path / "crescent.yaml"
    p.write_text(CRESCENT)
    return str(p)


# -- scene files ---------------------------------------------------------------

def test_scene_round_trip():
    sf = SceneFile("disk", ((0.0, 0.5), (137.25, 0.1), (-90.0, 0.3)), -1 / 3 + 0j, -0.5 + 0.3j, 500, 2 ** 64 - 1)
    again = parse_scene(dump_scene(sf))
    assert again == sf
    assert parse_scene(dump_scene(again)) == sf


def test_scene_defaults(crescent_file):
    sf = load_scene(crescent_file)
    assert sf.obstacles == ((0.0, 0.5),)
    assert sf.a == -1 / 3 and sf.count is None and sf.seed is None
    assert parse_scene("") == SceneFile()


@pytest.mark.parametrize("text", [
    "model: klein\n",
    "obstacles: [{angle_deg: 0, radius: 1.5}]\n",
    "obstacles: [{angle_deg: 0}]\n",
    "obstacles: [{angle_deg: x, radius: 0.5}]\n",
    "query: {a: [0, 0]}\n",
    "sampling: {seed: -1}\n",
    "sampling: {count: 1.5}\n",
    "colour: red\n",
    "[1, 2]\n",
    "obstacles: [\n",
])
def test_scene_errors(text):
    with pytest.raises(SceneFormatError):
        parse_scene(text)


# -- plan and render -----------------------------------------------------------

def test_plan_crescent(crescent_file, tmp_path, capsys):
    svg = tmp_path / "p.svg"
    code, out, _ = run(["plan", "--scene", crescent_file, "--svg-out", str(svg)], capsys)
    assert code == 0
    assert out.startswith("# horoconvex path v1\n")
    assert "verified yes" in out
    text = svg.read_text()
    assert text.count('fill="#bbbbbb"') == 1


def test_plan_writes_description(crescent_file, tmp_path, capsys):
    out = tmp_path / "path.txt"
    code, stdout, _ = run(["plan", "--scene", crescent_file, "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    lines = out.read_text().splitlines()
    n = int(lines[2].split()[1])
    assert sum(1 for ln in lines if ln.startswith("piece ")) == n


def test_plan_empty_scene(capsys):
    code, out, _ = run(["plan", "--a", "0.1,0.2", "--b=-0.4,-0.1"], capsys)
    assert code == 0 and "pieces 1\n" in out


def test_plan_unreachable(crescent_file, capsys):
    code, _, err = run(["plan", "--scene", crescent_file, "--a", "0.5,0", "--b=-0.5,0"], capsys)
    assert code == 3 and "unreachable" in err


@pytest.mark.parametrize("argv", [
    ["plan", "--a", "0.1,0.2"],
    ["plan", "--a", "zz", "--b", "0"],
    ["plan", "--a", "0.1", "--b", "0.1"],
    ["plan", "--scene", "/nonexistent/scene.yaml", "--a", "0", "--b", "0.1"],
    ["render", "--a", "0", "--b", "0.1"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_bad_scene_file_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("obstacles: [{angle_deg: 0, radius: 0.5}, {angle_deg: 0, radius: 0.3}]\n")
    assert run(["plan", "--scene", str(p), "--a", "-0.5", "--b", "-0.6"], capsys)[0] == 2


def test_render_is_deterministic(crescent_file, tmp_path, capsys):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.svg"
        assert run(["render", "--scene", crescent_file, "--svg-out", str(p), "--show-covering"], capsys)[0] == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert b"stroke-dasharray" in outs[0] and b"<path" in outs[0]


def test_render_without_query(tmp_path, capsys):
    p = tmp_path / "s.yaml"
    p.write_text("obstacles: [{angle_deg: 45, radius: 0.2}]\n")
    svg = tmp_path / "s.svg"
    assert run(["render", "--scene", str(p), "--svg-out", str(svg)], capsys)[0] == 0
    assert b"<path" not in svg.read_bytes()


# -- verify-bound, scan-constants, conjecture-scan --------------------------------

def min_ratio(out):
    last = out.strip().splitlines()[-1].split()
    return float(last[1]), last[-1]


def test_verify_bound_crescent(capsys):
    code, out, _ = run(["verify-bound", "--domain", "crescent", "--samples", "1000"], capsys)
    r, verdict = min_ratio(out)
    assert code == 0 and verdict == "PASS"
    assert abs(r - 1) <= 1e-9


def test_verify_bound_lens(capsys):
    code, out, _ = run(["verify-bound", "--domain", "lens(1/3,-1/3)", "--samples", "500", "--seed", "3"], capsys)
    assert code == 0 and min_ratio(out)[0] > 1


def test_verify_bound_workers_identical(capsys):
    base = ["verify-bound", "--domain", "lens(1/3,-1/3)", "--samples", "300", "--seed", "11"]
    one = run(base, capsys)[1]
    two = run(base + ["--workers", "2"], capsys)[1]
    assert one == two


def test_verify_bound_scene_sampling(tmp_path, capsys):
    p = tmp_path / "s.yaml"
    p.write_text("sampling: {count: 40, seed: 5}\n")
    code, out, _ = run(["verify-bound", "--domain", "lens(0.2,0.1i)", "--scene", str(p)], capsys)
    assert code == 0 and "samples 40 " in out


@pytest.mark.parametrize("argv", [
    ["verify-bound", "--samples", "0"],
    ["verify-bound", "--domain", "square"],
    ["verify-bound", "--domain", "lens(2,0)"],
    ["verify-bound", "--seed", "-4"],
    ["verify-bound", "--workers", "0"],
])
def test_verify_bound_usage(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_scan_constants(capsys):
    code, out, _ = run(["scan-constants"], capsys)
    assert code == 0
    g_line, s_line = out.splitlines()
    g_min, t = float(g_line.split()[1]), float(g_line.split()[3])
    s_min, s = float(s_line.split()[1]), float(s_line.split()[3])
    assert abs(g_min - 0.48) <= 0.005 and abs(t - 0.11) <= 0.01
    assert abs(s_min - 0.48) <= 0.005 and abs(s - 0.12) <= 0.01


def test_conjecture_scan(capsys):
    code, out, _ = run(["conjecture-scan", "--instances", "10", "--seed", "42"], capsys)
    assert code == 0
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert len(rows) == 10
    for r in rows:
        f = r.split()
        assert 0 <= float(f[6]) <= 1e-10
        assert math.isfinite(float(f[7]))
    again = run(["conjecture-scan", "--instances", "10", "--seed", "42", "--workers", "2"], capsys)[1]
    assert again == out


@pytest.mark.parametrize("argv", [
    ["conjecture-scan", "--instances", "0"],
    ["conjecture-scan", "--instances", "-3"],
    ["conjecture-scan", "--seed", "18446744073709551616"],
])
def test_conjecture_scan_usage(argv, capsys):
    assert run(argv, capsys)[0] == 2
