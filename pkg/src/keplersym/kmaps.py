"""Named special maps between orbit families, with dual-side predictors.

Each map is implemented point-wise; next to it sits the predicted law
for the image family on the dual side, so every claim can be tested as
a two-pipeline equality: map samples, fit, compare with the predictor.
"""

from __future__ import annotations

import math

from .minkowski import MinkVec
from .orbit import KeplerOrbit, PlanePoint, from_abc


class MapError(Exception):
    pass


class SingularRadiusError(MapError):
    pass


SINGULAR_TOL = 1e-12


def square(p: PlanePoint) -> PlanePoint:
    """Complex squaring (x, y) -> (x^2 - y^2, 2 x y).

    Takes affine lines missing the origin to parabolas with focus at the
    origin, and center-symmetric conics to focus-at-origin conics.
    """
    return PlanePoint(p.x * p.x - p.y * p.y, 2.0 * p.x * p.y)


def square_line_image(angle: float, distance: float) -> KeplerOrbit:
    """Dual predictor: the squared image of the line at signed distance
    `distance` > 0 whose nearest point to the origin sits at `angle`."""
    if distance <= 0.0:
        raise MapError("line must miss the origin")
    c = 1.0 / (2.0 * distance * distance)
    return from_abc(c * math.cos(2.0 * angle), c * math.sin(2.0 * angle), c)


def flatten_m(p: PlanePoint, m: float) -> PlanePoint:
    """Radial map r -> r / (1 - r / M^2); straightens orbits with |M| = m."""
    if m == 0.0:
        raise MapError("angular momentum must be nonzero")
    denom = 1.0 - p.r / (m * m)
    if abs(denom) <= SINGULAR_TOL:
        raise SingularRadiusError(f"radius {p.r} sits on the singular circle r = M^2")
    return PlanePoint(p.x / denom, p.y / denom)


def flatten_m_dual(v: MinkVec, m: float) -> MinkVec:
    """Dual predictor: vertical translation c -> c - 1/M^2."""
    if m == 0.0:
        raise MapError("angular momentum must be nonzero")
    return MinkVec(v.a, v.b, v.c - 1.0 / (m * m))


def hill_embed(p: PlanePoint, energy: float) -> PlanePoint:
    """Radial map r -> r / (1 + 2 E r) embedding the energy-E Hill region
    (E > 0) into the energy -E one."""
    if energy <= 0.0:
        raise MapError("embedding is defined for positive energy")
    denom = 1.0 + 2.0 * energy * p.r
    return PlanePoint(p.x / denom, p.y / denom)


def hill_dual(o: KeplerOrbit, energy: float) -> KeplerOrbit:
    """Dual predictor in canonical coordinates: (a, b, c) -> (a, b, c + 2E)."""
    if energy <= 0.0:
        raise MapError("embedding is defined for positive energy")
    return KeplerOrbit(o.a, o.b, o.c + 2.0 * energy)


def reflect_dual_signed(v: MinkVec, energy: float) -> MinkVec:
    """The same predictor as a reflection of the signed representative:
    (a, b, c) -> (a, b, 2|E| - c)."""
    return MinkVec(v.a, v.b, 2.0 * abs(energy) - v.c)


def repel_embed(p: PlanePoint, energy: float) -> PlanePoint:
    """Radial map r -> r / (1 - 2 E r) for repelling-branch points."""
    if energy <= 0.0:
        raise MapError("embedding is defined for positive energy")
    denom = 1.0 - 2.0 * energy * p.r
    if abs(denom) <= SINGULAR_TOL:
        raise SingularRadiusError(f"radius {p.r} sits on the singular circle r = 1/(2E)")
    return PlanePoint(p.x / denom, p.y / denom)


def parabola_chart(big_x: float, big_y: float) -> PlanePoint:
    """Chart (X, Y) -> ((X^2 - 1)/Y, 2X/Y) taking vertical parabolas
    Y = A X^2 + B X + C onto Kepler orbits."""
    if big_y == 0.0:
        raise MapError("chart is singular on Y = 0")
    return PlanePoint((big_x * big_x - 1.0) / big_y, 2.0 * big_x / big_y)


def parabola_chart_dual(a2: float, a1: float, a0: float) -> MinkVec:
    """Dual predictor for the image of Y = a2 X^2 + a1 X + a0:
    the triple ((a2 - a0)/2, a1/2, (a2 + a0)/2)."""
    return MinkVec((a2 - a0) / 2.0, a1 / 2.0, (a2 + a0) / 2.0)
