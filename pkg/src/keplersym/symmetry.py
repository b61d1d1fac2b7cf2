"""The 7-parameter orbital symmetry group.

Algebra elements are traceless 4x4 matrices whose projective action on
homogeneous coordinates (X:Y:Z:W) preserves the cone X^2+Y^2=Z^2 up to
scale; group elements are block matrices [[A, 0], [b^T, lam]] with A in
CO(2,1).  The group acts on the punctured Kepler plane through cone
lifts q = (x, y, sheet*r, 1) and, contragradiently, on the dual space
of orbit triples (a, b, c).  Both actions are realized exactly; flows
of the infinitesimal generators provide an independent numeric route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .minkowski import MinkVec
from .orbit import PlanePoint

J3 = np.diag([1.0, 1.0, -1.0])

CHART_TOL = 1e-12
BLOCK_TOL = 1e-10


class SymmetryError(Exception):
    pass


class ChartExitError(SymmetryError):
    """Image left the affine chart W != 0 (denominator vanished)."""


class ConeVertexError(SymmetryError):
    """Image crossed the cone vertex (projected radius vanished)."""


class FlowExitError(SymmetryError):
    def __init__(self, message: str, t_exit: float):
        super().__init__(f"{message} (exit time ~ {t_exit:.6g})")
        self.t_exit = t_exit


@dataclass(frozen=True)
class AlgebraElement:
    """Traceless generator parametrized by (x1, ..., x7)."""

    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0
    x4: float = 0.0
    x5: float = 0.0
    x6: float = 0.0
    x7: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        q = self.x1 / 4.0
        return np.array(
            [
                [q, -self.x2, self.x3, 0.0],
                [self.x2, q, self.x4, 0.0],
                [self.x3, self.x4, q, 0.0],
                [self.x5, self.x6, self.x7, -3.0 * q],
            ]
        )

    def coords(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4, self.x5, self.x6, self.x7])

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(*(self.coords() + other.coords()))

    def __mul__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(*(s * self.coords()))

    __rmul__ = __mul__


def algebra(x1=0.0, x2=0.0, x3=0.0, x4=0.0, x5=0.0, x6=0.0, x7=0.0) -> AlgebraElement:
    return AlgebraElement(x1, x2, x3, x4, x5, x6, x7)


def basis() -> list[AlgebraElement]:
    """The 7 coordinate generators."""
    out = []
    for i in range(7):
        coeffs = [0.0] * 7
        coeffs[i] = 1.0
        out.append(AlgebraElement(*coeffs))
    return out


def algebra_from_matrix(m: np.ndarray, tol: float = BLOCK_TOL) -> AlgebraElement:
    """Re-express a 4x4 matrix in (x1..x7); error if it leaves the space."""
    m = np.asarray(m, dtype=float)
    x1 = 4.0 * m[0, 0]
    cand = AlgebraElement(x1, m[1, 0], m[2, 0], m[2, 1], m[3, 0], m[3, 1], m[3, 2])
    scale = 1.0 + float(np.max(np.abs(m)))
    if float(np.max(np.abs(cand.matrix - m))) > tol * scale:
        raise SymmetryError("matrix leaves the 7-parameter algebra")
    return cand


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Block matrix [[A, 0], [b^T, lam]], A in CO(2,1), lam != 0."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def A(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def b(self) -> np.ndarray:
        return self.matrix[3, :3]

    @property
    def lam(self) -> float:
        return float(self.matrix[3, 3])

    @property
    def kappa(self) -> float:
        """Conformal factor of A: A^T J3 A = kappa * J3."""
        return float((self.A.T @ J3 @ self.A)[0, 0])


def group_element(A: np.ndarray, b: np.ndarray, lam: float) -> GroupElement:
    m = np.zeros((4, 4))
    m[:3, :3] = np.asarray(A, dtype=float)
    m[3, :3] = np.asarray(b, dtype=float)
    m[3, 3] = float(lam)
    return group_from_matrix(m)


def group_from_matrix(m: np.ndarray, tol: float = BLOCK_TOL) -> GroupElement:
    m = np.array(m, dtype=float)
    scale = 1.0 + float(np.max(np.abs(m)))
    if float(np.max(np.abs(m[:3, 3]))) > tol * scale:
        raise SymmetryError("upper-right block must vanish")
    if m[3, 3] == 0.0:
        raise SymmetryError("lam must be nonzero")
    A = m[:3, :3]
    g = A.T @ J3 @ A
    kappa = g[0, 0]
    if kappa == 0.0 or float(np.max(np.abs(g - kappa * J3))) > tol * (1.0 + abs(kappa)):
        raise SymmetryError("A block is not conformal-Lorentz")
    return GroupElement(m)


def identity() -> GroupElement:
    return GroupElement(np.eye(4))


def exp_map(x: AlgebraElement, t: float = 1.0) -> GroupElement:
    """Matrix exponential of t*X, validated as a group element."""
    return group_from_matrix(expm(t * x.matrix))


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    return group_from_matrix(g1.matrix @ g2.matrix)


def inverse(g: GroupElement) -> GroupElement:
    return group_from_matrix(np.linalg.inv(g.matrix))


# --------------------------------------------------------------------------
# Actions
# --------------------------------------------------------------------------

def _lift4(p: PlanePoint, sheet: int) -> np.ndarray:
    if sheet not in (1, -1):
        raise SymmetryError("sheet must be +1 or -1")
    return np.array([p.x, p.y, sheet * p.r, 1.0])


def act_plane(g: GroupElement, p: PlanePoint, sheet: int = 1) -> PlanePoint:
    """Projective action through the cone lift: q -> A q / (lam + b.q)."""
    q = _lift4(p, sheet)
    image = g.matrix @ q
    w = image[3]
    if abs(w) <= CHART_TOL * float(np.linalg.norm(q)):
        raise ChartExitError("image leaves the affine chart")
    x, y = image[0] / w, image[1] / w
    if math.hypot(x, y) <= 1e-12:
        raise ConeVertexError("image crosses the cone vertex")
    return PlanePoint(x, y)


def act_dual(g: GroupElement, v: MinkVec) -> MinkVec:
    """Dual action on orbit triples: p -> (lam * p + b^T) A^{-1}.

    A group element maps planes missing the cone vertex to planes missing
    the vertex, so this action is globally affine on the dual space.
    """
    row = g.lam * np.array([v.a, v.b, v.c]) + g.b
    image = np.linalg.solve(g.A.T, row)
    return MinkVec(float(image[0]), float(image[1]), float(image[2]))


@dataclass(frozen=True)
class PlaneVector:
    point: PlanePoint
    vx: float
    vy: float

    def velocity(self) -> tuple[float, float]:
        return (self.vx, self.vy)


def vf_plane(x: AlgebraElement, p: PlanePoint, sheet: int = 1) -> PlaneVector:
    """Infinitesimal plane action: gamma'(0) for gamma(t) = pi(e^{tX} q)."""
    q = _lift4(p, sheet)
    u = x.matrix @ q
    return PlaneVector(p, float(u[0] - p.x * u[3]), float(u[1] - p.y * u[3]))


def vf_dual(x: AlgebraElement, v: MinkVec) -> MinkVec:
    """Infinitesimal dual action: gamma'(0) for gamma(t) = pi(p e^{-tX})."""
    row = np.array([v.a, v.b, v.c, -1.0])
    w = -(row @ x.matrix)
    return MinkVec(
        float(w[0] + v.a * w[3]),
        float(w[1] + v.b * w[3]),
        float(w[2] + v.c * w[3]),
    )


def bracket(x1: AlgebraElement, x2: AlgebraElement) -> AlgebraElement:
    """Commutator, re-expressed in (x1..x7) coordinates."""
    c = x1.matrix @ x2.matrix - x2.matrix @ x1.matrix
    return algebra_from_matrix(c)


def fixed_energy_algebra(energy: float) -> tuple[AlgebraElement, AlgebraElement, AlgebraElement]:
    """Three generators preserving the family of orbits with this energy.

    Plane fields are evaluated on the sheet opposite in sign to the
    energy; for negative energy they are the rotation field and the two
    fields r(d_x + E x d_r), r(d_y + E y d_r), for positive energy the
    latter two appear with flipped sign.
    """
    if energy == 0.0:
        raise SymmetryError("fixed-energy subalgebra needs a nonzero energy")
    k = abs(energy)
    g2 = algebra(x2=1.0)
    g3 = algebra(x3=1.0, x5=k)
    g4 = algebra(x4=1.0, x6=k)
    return (g2, g3, g4)


def flow(
    x: AlgebraElement,
    p: PlanePoint,
    t: float,
    sheet: int = 1,
    steps: int | None = None,
) -> PlanePoint:
    """RK4 endpoint of the plane flow of X; cross-validates act_plane o exp.

    The last three coordinate fields are incomplete: trajectories can run
    off to infinity or into the puncture in finite time, reported as a
    flow exit with the current time estimate.
    """
    if steps is None:
        steps = max(200, math.ceil(abs(t) * 2000))
    h = t / steps
    cur = np.array([p.x, p.y])

    def rhs(xy: np.ndarray) -> np.ndarray:
        pt = PlanePoint(float(xy[0]), float(xy[1]))
        v = vf_plane(x, pt, sheet)
        return np.array([v.vx, v.vy])

    for i in range(steps):
        r = math.hypot(cur[0], cur[1])
        if r < 1e-12 or r > 1e12:
            raise FlowExitError("flow left the punctured plane", i * h)
        k1 = rhs(cur)
        k2 = rhs(cur + 0.5 * h * k1)
        k3 = rhs(cur + 0.5 * h * k2)
        k4 = rhs(cur + h * k3)
        cur = cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return PlanePoint(float(cur[0]), float(cur[1]))


def flow_dual(x: AlgebraElement, v: MinkVec, t: float, steps: int | None = None) -> MinkVec:
    """RK4 endpoint of the dual flow of X."""
    if steps is None:
        steps = max(200, math.ceil(abs(t) * 2000))
    h = t / steps
    cur = np.array([v.a, v.b, v.c])

    def rhs(w: np.ndarray) -> np.ndarray:
        vel = vf_dual(x, MinkVec(float(w[0]), float(w[1]), float(w[2])))
        return np.array([vel.a, vel.b, vel.c])

    for _ in range(steps):
        k1 = rhs(cur)
        k2 = rhs(cur + 0.5 * h * k1)
        k3 = rhs(cur + 0.5 * h * k2)
        k4 = rhs(cur + h * k3)
        cur = cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return MinkVec(float(cur[0]), float(cur[1]), float(cur[2]))
