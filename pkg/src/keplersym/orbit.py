"""Kepler orbits as first-class values.

An orbit is stored as the canonical dual triple (a, b, c), c > 0, of the
plane a*x + b*y + c*z = 1 cutting the cone x^2 + y^2 = z^2; the orbit is
the orthogonal projection of that section.  The triple determines the
conserved quantities (eccentricity, energy, |angular momentum|), the
polar radius function of the attractive branch, and the repelling-branch
membership test for hyperbolas.  A fixed-step RK4 integration of the
inverse-square flow serves as the independent dynamics oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

ARC_DELTA = 1e-6  # sampling stays inside rho > delta
CLASS_TOL = 1e-10  # relative band for the parabola classification
LINE_C_TOL = 1e-8  # fit: |c| below this (relative) means a straight line


class OrbitError(Exception):
    pass


class LineDualError(OrbitError):
    """The triple has c = 0: a straight line, not a Kepler orbit."""


class BranchDomainError(OrbitError):
    """Requested angle is outside the attractive branch domain."""


class FitError(OrbitError):
    pass


class IntegrationError(OrbitError):
    pass


class Membership(str, Enum):
    ON_ATTRACTIVE = "on-attractive"
    ON_REPELLING = "on-repelling"
    OFF = "off"


class ConicClass(str, Enum):
    ELLIPSE = "ellipse"
    PARABOLA = "parabola"
    HYPERBOLA = "hyperbola"


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if self.x == 0.0 and self.y == 0.0:
            raise OrbitError("the origin is excluded from the Kepler plane")

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        return math.atan2(self.y, self.x)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class ConePoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        rr = self.x * self.x + self.y * self.y
        zz = self.z * self.z
        if zz == 0.0 or abs(rr - zz) > 1e-12 * (1.0 + rr + zz):
            raise OrbitError("point is not on the punctured cone x^2+y^2=z^2")


@dataclass(frozen=True)
class KeplerOrbit:
    a: float
    b: float
    c: float  # canonical: c > 0

    @property
    def eccentricity(self) -> float:
        return math.hypot(self.a, self.b) / self.c

    @property
    def energy(self) -> float:
        return (self.a * self.a + self.b * self.b - self.c * self.c) / (2.0 * self.c)

    @property
    def ang_momentum(self) -> float:
        """|M|; the sign is not determined by the unparametrized curve."""
        return 1.0 / math.sqrt(self.c)

    @property
    def pericenter_angle(self) -> float:
        return math.atan2(self.b, self.a)

    def conic_class(self, tol: float = CLASS_TOL) -> ConicClass:
        q = self.a * self.a + self.b * self.b - self.c * self.c
        scale = 1.0 + self.a * self.a + self.b * self.b + self.c * self.c
        if abs(q) <= tol * scale:
            return ConicClass.PARABOLA
        return ConicClass.ELLIPSE if q < 0.0 else ConicClass.HYPERBOLA

    def dual(self):
        from .minkowski import MinkVec

        return MinkVec(self.a, self.b, self.c)


@dataclass(frozen=True)
class OrbitGeometry:
    eccentricity: float
    semi_major: float | None  # absent for parabolas
    semi_minor: float | None  # absent for parabolas
    latus_rectum: float
    pericenter_angle: float
    energy: float
    ang_momentum: float


def from_abc(a: float, b: float, c: float) -> KeplerOrbit:
    """Canonicalize a dual triple; (a, b, c) and (a, b, -c) are one orbit."""
    if a == 0.0 and b == 0.0 and c == 0.0:
        raise OrbitError("the zero triple does not define a curve")
    if c == 0.0:
        raise LineDualError(f"({a}, {b}, 0) is a straight line, not a Kepler orbit")
    return KeplerOrbit(a, b, abs(c))


def conserved(o: KeplerOrbit) -> tuple[float, float, float]:
    """(eccentricity, energy, |angular momentum|)."""
    return (o.eccentricity, o.energy, o.ang_momentum)


def rho(o: KeplerOrbit, theta: float) -> float:
    """Inverse radius of the attractive branch: a cos + b sin + c."""
    return o.a * math.cos(theta) + o.b * math.sin(theta) + o.c


def rho_repelling(o: KeplerOrbit, theta: float) -> float:
    return o.a * math.cos(theta) + o.b * math.sin(theta) - o.c


def radius(o: KeplerOrbit, theta: float) -> float:
    p = rho(o, theta)
    if p <= 0.0:
        raise BranchDomainError(
            f"theta={theta} is outside the attractive branch domain (rho={p})"
        )
    return 1.0 / p


def point_at(o: KeplerOrbit, theta: float) -> PlanePoint:
    r = radius(o, theta)
    return PlanePoint(r * math.cos(theta), r * math.sin(theta))


def sample_thetas(
    o: KeplerOrbit, n: int, branch: str = "attractive", delta: float = ARC_DELTA
) -> list[float]:
    """Equally spaced angles over the arc where the branch has rho > delta."""
    if n < 3:
        raise OrbitError("need at least 3 sample points")
    h = math.hypot(o.a, o.b)
    t0 = math.atan2(o.b, o.a)
    if branch == "attractive":
        bound = delta - o.c
    elif branch == "repelling":
        bound = delta + o.c
        if h <= bound:
            raise BranchDomainError("orbit has no repelling branch")
    else:
        raise ValueError(f"unknown branch {branch!r}")
    if h == 0.0 or bound / h <= -1.0:
        return [t0 + 2.0 * math.pi * i / n for i in range(n)]
    w = math.acos(max(-1.0, min(1.0, bound / h)))
    step = 2.0 * w / (n + 1)
    return [t0 - w + (i + 1) * step for i in range(n)]


def sample(
    o: KeplerOrbit, n: int, branch: str = "attractive", delta: float = ARC_DELTA
) -> list[PlanePoint]:
    pts = []
    for t in sample_thetas(o, n, branch, delta):
        if branch == "attractive":
            r = 1.0 / rho(o, t)
        else:
            r = 1.0 / rho_repelling(o, t)
        pts.append(PlanePoint(r * math.cos(t), r * math.sin(t)))
    return pts


def contains(o: KeplerOrbit, p: PlanePoint, tol: float = 1e-9) -> Membership:
    """Branch-aware membership via |a x + b y +/- c r - 1| <= tol."""
    s = o.a * p.x + o.b * p.y
    cr = o.c * p.r
    if abs(s + cr - 1.0) <= tol:
        return Membership.ON_ATTRACTIVE
    if abs(s - cr - 1.0) <= tol:
        return Membership.ON_REPELLING
    return Membership.OFF


def membership_residual(o: KeplerOrbit, x: float, y: float) -> float:
    """Distance of (x, y) from the full conic in the defining residual,
    minimized over the two branch signs."""
    r = math.hypot(x, y)
    s = o.a * x + o.b * y
    return min(abs(s + o.c * r - 1.0), abs(s - o.c * r - 1.0))


def geometry(o: KeplerOrbit) -> OrbitGeometry:
    e = o.eccentricity
    energy = o.energy
    latus = 2.0 / o.c
    kind = o.conic_class()
    if kind is ConicClass.PARABOLA:
        semi_major = semi_minor = None
    else:
        semi_major = 1.0 / (2.0 * abs(energy))
        q = o.c * o.c - o.a * o.a - o.b * o.b
        semi_minor = 1.0 / math.sqrt(abs(q))
    return OrbitGeometry(
        eccentricity=e,
        semi_major=semi_major,
        semi_minor=semi_minor,
        latus_rectum=latus,
        pericenter_angle=o.pericenter_angle,
        energy=energy,
        ang_momentum=o.ang_momentum,
    )


@dataclass(frozen=True)
class FitResult:
    kind: str  # "orbit" or "line"
    coefficients: tuple[float, float, float]  # raw least-squares (a, b, c)
    residual: float  # max |a x + b y + c r - 1| over the input points
    orbit: KeplerOrbit | None = None
    line: tuple[float, float] | None = None  # a x + b y = 1


def fit(points, line_tol: float = LINE_C_TOL) -> FitResult:
    """Least-squares dual triple through plane points.

    Minimizes sum (a x_i + b y_i + c r_i - 1)^2.  A solution with |c|
    negligible against |(a, b)| is classified as a straight line.  The
    raw triple is kept: a negative c means the input points lie on a
    repelling branch of the canonicalized orbit.
    """
    pts = [(p.x, p.y) if isinstance(p, PlanePoint) else (p[0], p[1]) for p in points]
    if len(pts) < 3:
        raise FitError("need at least 3 points")
    arr = np.asarray(pts, dtype=float)
    r = np.hypot(arr[:, 0], arr[:, 1])
    if np.any(r <= 0.0):
        raise FitError("points must avoid the origin")
    design = np.column_stack([arr[:, 0], arr[:, 1], r])
    sol, _, rank, _ = np.linalg.lstsq(design, np.ones(len(pts)), rcond=None)
    if rank < 3:
        raise FitError("degenerate point set (rank-deficient system)")
    a, b, c = (float(v) for v in sol)
    residual = float(np.max(np.abs(design @ sol - 1.0)))
    if abs(c) <= line_tol * math.hypot(a, b):
        return FitResult("line", (a, b, c), residual, line=(a, b))
    return FitResult("orbit", (a, b, c), residual, orbit=from_abc(a, b, c))


def lift(p: PlanePoint, sheet: int = 1) -> ConePoint:
    if sheet not in (1, -1):
        raise OrbitError("sheet must be +1 or -1")
    return ConePoint(p.x, p.y, sheet * p.r)


def project(q: ConePoint) -> PlanePoint:
    return PlanePoint(q.x, q.y)


# --------------------------------------------------------------------------
# Newtonian dynamics oracle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray  # (N,)
    pos: np.ndarray  # (N, 2)
    vel: np.ndarray  # (N, 2)

    def radii(self) -> np.ndarray:
        return np.hypot(self.pos[:, 0], self.pos[:, 1])

    def energies(self) -> np.ndarray:
        v2 = np.sum(self.vel * self.vel, axis=1)
        return 0.5 * v2 - 1.0 / self.radii()

    def ang_momenta(self) -> np.ndarray:
        return self.pos[:, 0] * self.vel[:, 1] - self.pos[:, 1] * self.vel[:, 0]

    def membership_residuals(self, o: KeplerOrbit) -> np.ndarray:
        r = self.radii()
        return np.abs(o.a * self.pos[:, 0] + o.b * self.pos[:, 1] + o.c * r - 1.0)


def period(o: KeplerOrbit) -> float:
    """Orbital period of an ellipse (unit gravitational parameter)."""
    if o.conic_class() is not ConicClass.ELLIPSE:
        raise OrbitError("only ellipses are periodic")
    return 2.0 * math.pi * geometry(o).semi_major ** 1.5


def _pericenter_time_scale(o: KeplerOrbit) -> float:
    # circular-orbit period at the pericenter radius; resolves the fastest
    # part of the motion uniformly across eccentricities
    r0 = 1.0 / (math.hypot(o.a, o.b) + o.c)
    return 2.0 * math.pi * r0 ** 1.5


def newton_flow(o: KeplerOrbit, steps: int | None = None, dt: float | None = None) -> Trajectory:
    """Fixed-step RK4 trajectory of r'' = -r/|r|^3 from the pericenter.

    Starts at pericenter distance 1/(sqrt(a^2+b^2)+c) with speed |M|/r0
    perpendicular to the radius, so the trace must satisfy the orbit's
    defining equation a x + b y + c r = 1.  Defaults integrate one full
    period for ellipses (step count capped) and a fixed arc otherwise.
    """
    if dt is None:
        dt = 1e-4 * _pericenter_time_scale(o)
    if steps is None:
        if o.conic_class() is ConicClass.ELLIPSE:
            steps = min(math.ceil(period(o) / dt), 200_000)
        else:
            steps = 10_000
    t0 = o.pericenter_angle
    r0 = 1.0 / (math.hypot(o.a, o.b) + o.c)
    u = np.array([math.cos(t0), math.sin(t0)])
    v0 = (o.ang_momentum / r0) * np.array([-u[1], u[0]])
    state = np.concatenate([r0 * u, v0])

    def deriv(s: np.ndarray) -> np.ndarray:
        r = math.hypot(s[0], s[1])
        if r < 1e-9:
            raise IntegrationError("trajectory reached the attracting center")
        inv_r3 = 1.0 / (r * r * r)
        return np.array([s[2], s[3], -s[0] * inv_r3, -s[1] * inv_r3])

    out = np.empty((steps + 1, 4))
    out[0] = state
    for i in range(steps):
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * dt * k1)
        k3 = deriv(state + 0.5 * dt * k2)
        k4 = deriv(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = state
    t = dt * np.arange(steps + 1)
    return Trajectory(t=t, pos=out[:, :2], vel=out[:, 2:])


# --------------------------------------------------------------------------
# Wire formats
# --------------------------------------------------------------------------

def orbit_to_dict(o: KeplerOrbit) -> dict:
    return {"a": o.a, "b": o.b, "c": o.c}


def orbit_from_dict(d: dict) -> KeplerOrbit:
    try:
        return from_abc(float(d["a"]), float(d["b"]), float(d["c"]))
    except KeyError as err:
        raise OrbitError(f"orbit record is missing key {err}") from err
