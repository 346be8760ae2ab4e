"""Scene files: YAML with obstacles given by tangency angle and radius.

    model: disk
    obstacles:
      - {angle_deg: 0.0, radius: 0.5}
    query:            # optional
      a: [-0.3333333333333333, 0.0]
      b: [-0.5, 0.3]
    sampling:         # optional
      count: 1000
      seed: 7
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import yaml

from .geometry import GeometryError
from .horocycle import Horodisk

MODELS = ("disk",)


class SceneFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SceneFile:
    model: str = "disk"
    obstacles: Tuple[Tuple[float, float], ...] = ()
    a: Optional[complex] = None
    b: Optional[complex] = None
    count: Optional[int] = None
    seed: Optional[int] = None

    def horodisks(self) -> list:
        return [Horodisk(cmath.exp(1j * math.radians(ang)), r) for ang, r in self.obstacles]


def _number(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SceneFormatError(f"{what} must be a number")
    x = float(x)
    if not math.isfinite(x):
        raise SceneFormatError(f"{what} must be finite")
    return x


def _point(x, what: str) -> complex:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise SceneFormatError(f"{what} must be a pair [re, im]")
    return complex(_number(x[0], what), _number(x[1], what))


def _integer(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SceneFormatError(f"{what} must be an integer")
    return x


def parse_scene(text: str) -> SceneFile:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SceneFormatError(f"invalid YAML: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SceneFormatError("scene must be a mapping")
    unknown = set(data) - {"model", "obstacles", "query", "sampling"}
    if unknown:
        raise SceneFormatError(f"unknown keys: {sorted(unknown)}")
    model = data.get("model", "disk")
    if model not in MODELS:
        raise SceneFormatError(f"unsupported model {model!r}")
    obstacles = []
    for k, ob in enumerate(data.get("obstacles") or []):
        if not isinstance(ob, dict) or set(ob) != {"angle_deg", "radius"}:
            raise SceneFormatError(f"obstacle {k} needs exactly angle_deg and radius")
        ang = _number(ob["angle_deg"], f"obstacle {k} angle_deg")
        r = _number(ob["radius"], f"obstacle {k} radius")
        if not 0 < r < 1:
            raise SceneFormatError(f"obstacle {k} radius must lie in (0, 1)")
        obstacles.append((ang, r))
    a = b = None
    q = data.get("query")
    if q is not None:
        if not isinstance(q, dict) or set(q) != {"a", "b"}:
            raise SceneFormatError("query needs exactly a and b")
        a, b = _point(q["a"], "query.a"), _point(q["b"], "query.b")
    count = seed = None
    s = data.get("sampling")
    if s is not None:
        if not isinstance(s, dict) or not set(s) <= {"count", "seed"}:
            raise SceneFormatError("sampling accepts count and seed")
        if "count" in s:
            count = _integer(s["count"], "sampling.count")
        if "seed" in s:
            seed = _integer(s["seed"], "sampling.seed")
            if not 0 <= seed < 2 ** 64:
                raise SceneFormatError("seed must be a 64-bit unsigned integer")
    scene = SceneFile(model, tuple(obstacles), a, b, count, seed)
    try:
        scene.horodisks()
    except GeometryError as exc:
        raise SceneFormatError(str(exc)) from None
    return scene


def dump_scene(scene: SceneFile) -> str:
    data = {"model": scene.model,
            "obstacles": [{"angle_deg": ang, "radius": r} for ang, r in scene.obstacles]}
    if scene.a is not None:
        data["query"] = {"a": [scene.a.real, scene.a.imag], "b": [scene.b.real, scene.b.imag]}
    if scene.count is not None or scene.seed is not None:
        data["sampling"] = {k: v for k, v in (("count", scene.count), ("seed", scene.seed)) if v is not None}
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def load_scene(path) -> SceneFile:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scene(fh.read())
    except OSError as exc:
        raise SceneFormatError(f"cannot read scene file: {exc}") from None
