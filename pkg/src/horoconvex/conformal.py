"""Compositions of elementary conformal maps with exact derivatives."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

from .geometry import GeometryError, MoebiusMap


@dataclass(frozen=True)
class MoebiusStep:
    m: MoebiusMap

    def value(self, z: complex) -> complex:
        w = self.m(z)
        if not isinstance(w, complex):
            raise GeometryError("map hits infinity")
        return w

    def derivative(self, z: complex) -> complex:
        return self.m.derivative(z)


@dataclass(frozen=True)
class ScaleStep:
    """z -> k z + shift."""

    k: complex
    shift: complex = 0j

    def value(self, z: complex) -> complex:
        return self.k * z + self.shift

    def derivative(self, z: complex) -> complex:
        return complex(self.k)


@dataclass(frozen=True)
class LogStripStep:
    """z -> (1/pi) log((1+z)/(1-z)) + i/2, the disk onto the strip 0 < Im < 1."""

    def value(self, z: complex) -> complex:
        return cmath.log((1 + z) / (1 - z)) / math.pi + 0.5j

    def derivative(self, z: complex) -> complex:
        return 2 / (math.pi * (1 - z * z))


@dataclass(frozen=True)
class PowerStep:
    """w -> w**p on the principal branch (a sector in the upper half-plane)."""

    p: float

    def value(self, w: complex) -> complex:
        if w == 0:
            raise GeometryError("power map at its branch point")
        return cmath.exp(self.p * cmath.log(w))

    def derivative(self, w: complex) -> complex:
        if w == 0:
            raise GeometryError("power map at its branch point")
        return self.p * cmath.exp((self.p - 1) * cmath.log(w))


@dataclass(frozen=True)
class MapChain:
    """steps[0] is applied first."""

    steps: Tuple = ()

    def then(self, step) -> "MapChain":
        return MapChain(self.steps + (step,))

    def __call__(self, z: complex) -> complex:
        return self.value_and_derivative(z)[0]

    def derivative(self, z: complex) -> complex:
        return self.value_and_derivative(z)[1]

    def value_and_derivative(self, z: complex):
        w, d = complex(z), 1 + 0j
        for s in self.steps:
            d *= s.derivative(w)
            w = s.value(w)
        return w, d


def crescent_map(chart: MoebiusMap = None) -> MapChain:
    """Conformal map of the disk onto a horo-crescent.

    ``chart`` sends the crescent onto the strip 0 < Im < 1 (the Cayley map for
    the standard crescent); the strip map is followed by its inverse.
    """
    chart = chart if chart is not None else MoebiusMap.cayley()
    return MapChain((LogStripStep(), MoebiusStep(chart.inverse())))
