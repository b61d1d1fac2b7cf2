"""Deterministic, seeded verification suites.

Each suite is a list of named cases; a case computes a residual with an
independent oracle (closed forms, dense sampling, integration, exact
rational arithmetic) and compares it against a pinned tolerance.  All
randomness flows from a single seed; case order and JSON output are
deterministic, so reports with the same seed are byte-identical apart
from the wall-time field.
"""

from __future__ import annotations

import json
import math
import time
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as ex
from . import invariants as inv
from . import kmaps
from . import theorems as th
from .minkowski import MinkVec, PlaneType, classify_plane, pencil_classify, point_plane
from .orbit import (
    KeplerOrbit,
    from_abc,
    fit,
    geometry,
    newton_flow,
    sample,
)
from .symmetry import (
    AlgebraElement,
    SymmetryError,
    act_dual,
    act_plane,
    algebra,
    basis,
    bracket,
    compose,
    exp_map,
    fixed_energy_algebra,
    flow_dual,
    vf_dual,
    vf_plane,
)

DEFAULT_TOL = 1e-8
SUITES = ("symmetry", "duality", "invariants", "theorems", "maps")


@dataclass(frozen=True)
class CaseResult:
    name: str
    status: str  # pass | fail | error
    residual: float | None
    tol: float
    detail: str = ""


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    seed: int
    cases: list[CaseResult]
    wall_time_s: float

    @property
    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "error": 0}
        for c in self.cases:
            counts[c.status] += 1
        counts["total"] = len(self.cases)
        return counts

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.cases)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": [
                {
                    "name": c.name,
                    "status": c.status,
                    "residual": c.residual,
                    "tol": c.tol,
                    **({"detail": c.detail} if c.detail else {}),
                }
                for c in self.cases
            ],
            "summary": self.summary,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _result(name: str, residual: float, tol: float, detail: str = "") -> CaseResult:
    status = "pass" if residual <= tol else "fail"
    return CaseResult(name, status, float(residual), tol, detail)


def _random_orbit(rng, c_range=(0.5, 2.0), e_range=(0.0, 1.6)) -> KeplerOrbit:
    c = rng.uniform(*c_range)
    ecc = rng.uniform(*e_range)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return KeplerOrbit(ecc * c * math.cos(phi), ecc * c * math.sin(phi), c)


def _random_ellipse(rng, e_max=0.9) -> KeplerOrbit:
    return _random_orbit(rng, e_range=(0.0, e_max))


def _conic_residual(v: MinkVec, x: float, y: float) -> float:
    r = math.hypot(x, y)
    s = v.a * x + v.b * y
    return min(abs(s + v.c * r - 1.0), abs(s - v.c * r - 1.0))


# --------------------------------------------------------------------------
# symmetry suite
# --------------------------------------------------------------------------

_PLANE_FIELDS = [
    lambda x, y, r: (x, y),
    lambda x, y, r: (-y, x),
    lambda x, y, r: (r, 0.0),
    lambda x, y, r: (0.0, r),
    lambda x, y, r: (-x * x, -x * y),
    lambda x, y, r: (-x * y, -y * y),
    lambda x, y, r: (-r * x, -r * y),
]

_DUAL_FIELDS = [
    lambda a, b, c: (-a, -b, -c),
    lambda a, b, c: (-b, a, 0.0),
    lambda a, b, c: (-c, 0.0, -a),
    lambda a, b, c: (0.0, -c, -b),
    lambda a, b, c: (1.0, 0.0, 0.0),
    lambda a, b, c: (0.0, 1.0, 0.0),
    lambda a, b, c: (0.0, 0.0, 1.0),
]


def case_vf_plane_closed_forms(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "vf_plane_closed_forms")
    gens = basis()
    worst = 0.0
    for _ in range(200):
        x, y = rng.uniform(-3.0, 3.0, size=2)
        if math.hypot(x, y) < 1e-3:
            continue
        from .orbit import PlanePoint

        p = PlanePoint(float(x), float(y))
        for gen, field in zip(gens, _PLANE_FIELDS):
            got = vf_plane(gen, p).velocity()
            want = field(x, y, p.r)
            err = math.hypot(got[0] - want[0], got[1] - want[1]) / (1.0 + math.hypot(*want))
            worst = max(worst, err)
    return _result("vf_plane_closed_forms", worst, 1e-12)


def case_vf_dual_closed_forms(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "vf_dual_closed_forms")
    gens = basis()
    worst = 0.0
    for _ in range(200):
        a, b, c = rng.uniform(-3.0, 3.0, size=3)
        v = MinkVec(float(a), float(b), float(c))
        for gen, field in zip(gens, _DUAL_FIELDS):
            got = vf_dual(gen, v).as_tuple()
            want = field(a, b, c)
            err = max(abs(g - w) for g, w in zip(got, want)) / (1.0 + max(map(abs, want)))
            worst = max(worst, err)
    return _result("vf_dual_closed_forms", worst, 1e-12)


def case_commuting_square(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "commuting_square")
    worst = 0.0
    chart_exits = 0
    checked = 0
    while checked < 100:
        x = AlgebraElement(*rng.uniform(-0.3, 0.3, size=7))
        g = exp_map(x, 1.0)
        o = _random_orbit(rng, c_range=(0.6, 1.6), e_range=(0.0, 1.4))
        image = act_dual(g, o.dual())
        for p in sample(o, 20):
            try:
                q = act_plane(g, p, sheet=1)
            except SymmetryError:
                chart_exits += 1
                continue
            worst = max(worst, _conic_residual(image, q.x, q.y))
        checked += 1
    return _result("commuting_square", worst, tol, detail=f"chart_exits={chart_exits}")


def case_bracket_closure(seed: int, tol: float) -> CaseResult:
    gens = basis()
    flat = [g.matrix.ravel() for g in gens]
    worst = 0.0
    for i in range(7):
        for j in range(i + 1, 7):
            br = bracket(gens[i], gens[j])
            stack = np.vstack(flat + [br.matrix.ravel()])
            s = np.linalg.svd(stack, compute_uv=False)
            worst = max(worst, s[7] / s[6])  # singular-value gap >= 1e6
    return _result("bracket_closure", worst, 1e-6)


def case_one_param_subgroup(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "one_param_subgroup")
    worst = 0.0
    for _ in range(20):
        x = AlgebraElement(*rng.uniform(-0.8, 0.8, size=7))
        t1, t2 = rng.uniform(-0.6, 0.6, size=2)
        g = compose(exp_map(x, float(t1)), exp_map(x, float(t2)))
        h = exp_map(x, float(t1 + t2))
        worst = max(worst, float(np.max(np.abs(g.matrix - h.matrix))))
    return _result("one_param_subgroup", worst, 1e-11)


def case_fixed_energy_quadric(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "fixed_energy_quadric")
    worst = 0.0
    for energy in (-1.0, 0.5, 2.0):
        k = abs(energy)
        for gen in fixed_energy_algebra(energy):
            for _ in range(3):
                a, b = rng.uniform(-1.0, 1.0, size=2)
                c = k + math.sqrt(energy * energy + a * a + b * b)
                v = flow_dual(gen, MinkVec(float(a), float(b), float(c)), 0.8)
                q = v.a**2 + v.b**2 - (v.c - k) ** 2
                worst = max(worst, abs(q + energy * energy))
    return _result("fixed_energy_quadric", worst, 1e-9)


# --------------------------------------------------------------------------
# duality suite
# --------------------------------------------------------------------------

def case_dual_curve_agreement(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "dual_curve_agreement")
    worst = 0.0
    for _ in range(20):
        o = _random_orbit(rng)
        circle = th.dual_of_orbit(o)
        curve = th.orbit_curve(o)
        lo, hi = curve.domain
        for t in np.linspace(lo + 1e-3, hi - 1e-3, 20):
            a, b = th.dual_point_of_tangent(curve, float(t))
            worst = max(worst, abs(math.hypot(a - circle.cx, b - circle.cy) - circle.radius))
    return _result("dual_curve_agreement", worst, tol)


def case_parabolic_point_planes(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "parabolic_point_planes")
    failures = 0
    for _ in range(100):
        x, y = rng.uniform(-5.0, 5.0, size=2)
        if x == 0.0 and y == 0.0:
            continue
        if classify_plane(point_plane(float(x), float(y))) is not PlaneType.PARABOLIC:
            failures += 1
    return _result("parabolic_point_planes", float(failures), 0.5)


def case_ellipse_pencil_counts(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "ellipse_pencil_counts")
    failures = 0
    done = 0
    while done < 100:
        o1 = _random_ellipse(rng, e_max=0.85)
        o2 = _random_ellipse(rng, e_max=0.85)
        d = o2.dual() - o1.dual()
        if abs(math.hypot(d.a, d.b) - abs(d.c)) < 1e-4:
            continue  # the grid oracle cannot certify near-tangency
        predicted = pencil_classify(o1.dual(), o2.dual()).common_points
        theta = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        gap = d.a * np.cos(theta) + d.b * np.sin(theta) + d.c
        signs = np.sign(gap)
        crossings = int(np.sum(signs != np.roll(signs, -1))) - int(np.sum(signs == 0))
        observed = crossings if crossings else (1 if np.min(np.abs(gap)) <= 1e-7 else 0)
        if predicted != observed:
            failures += 1
        done += 1
    return _result("ellipse_pencil_counts", float(failures), 0.5)


# --------------------------------------------------------------------------
# invariants suite
# --------------------------------------------------------------------------

def _kepler_fixed_e(energy: float) -> inv.SecondOrderODE:
    box = inv.kepler_fixed_e_boxes(energy)[-1]
    return inv.fixed_e_ode(inv.kepler_force(), inv.kepler_potential(), energy, box=box)


def case_fixed_e_i2_closed_form(seed: int, tol: float) -> CaseResult:
    from .expr import Var

    worst = 0.0
    for energy in (-1, Fraction(1, 2), 2):
        ode = _kepler_fixed_e(float(energy))
        closed = ex.div(
            ex.mul(9, ex.pow_(ex.const(energy), 2)),
            ex.pow_(ex.add(ex.const(energy), Var("rho")), 3),
        )
        gap = ex.sub(inv.i2(ode), closed)
        for box in inv.kepler_fixed_e_boxes(float(energy)):
            worst = max(worst, ex.max_residual(gap, box, seed=seed))
    return _result("fixed_e_i2_closed_form", worst, 1e-10)


def case_fixed_e_i1_zero(seed: int, tol: float) -> CaseResult:
    worst = 0.0
    for energy in (-1.0, 0.5, 2.0):
        ode = _kepler_fixed_e(energy)
        worst = max(worst, ex.max_residual(inv.i1(ode), ode.box, seed=seed))
    return _result("fixed_e_i1_zero", worst, ex.ZERO_TEST_THRESHOLD)


def case_fixed_m_flat(seed: int, tol: float) -> CaseResult:
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        ode = inv.fixed_m_ode(inv.kepler_force(), m)
        worst = max(worst, inv.flatness_residual(ode, seed=seed))
    return _result("fixed_m_flat", worst, ex.ZERO_TEST_THRESHOLD)


def case_fixed_e_elimination_gate(seed: int, tol: float) -> CaseResult:
    worst = 0.0
    for energy, text in [(-1, "(rho^2 + rho1^2)/(2*(rho - 1)) - rho"),
                         (2, "(rho^2 + rho1^2)/(2*(rho + 2)) - rho")]:
        ode = _kepler_fixed_e(float(energy))
        gap = ex.sub(ode.rhs, ex.parse(text))
        for box in inv.kepler_fixed_e_boxes(float(energy)):
            worst = max(worst, ex.max_residual(gap, box, seed=seed))
    return _result("fixed_e_elimination_gate", worst, 1e-12)


def case_type_ii_witness(seed: int, tol: float) -> CaseResult:
    box = {"x": (-1.0, 1.0), "y": (0.5, 2.0), "p": (-1.0, 1.0)}
    ode = inv.SecondOrderODE(ex.parse("(x*p - y)^3"), dict(box))
    r1 = ex.max_residual(inv.i1(ode), box, seed=seed)
    r2 = ex.max_residual(inv.i2(ode), box, seed=seed)
    ok = r1 <= ex.ZERO_TEST_THRESHOLD and r2 > 1e-3
    return CaseResult(
        "type_ii_witness", "pass" if ok else "fail", r1, ex.ZERO_TEST_THRESHOLD,
        detail=f"i2_residual={r2:.3e}",
    )


def case_wunschmann_scan(seed: int, tol: float) -> CaseResult:
    grid = [-3, -2.5, -2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2, 3]
    rows = inv.power_law_scan(grid, "wunschmann", seed=seed)
    passing = {row.alpha for row in rows if row.passed}
    failures = 0 if passing == {-2.0, 1.0} else 1
    return _result("wunschmann_scan", float(failures), 0.5,
                   detail=f"passing={sorted(passing)}")


def case_fixed_m_scan(seed: int, tol: float) -> CaseResult:
    rows = inv.power_law_scan([-3, -2, -1, 1, 2], "fixedM-flat", seed=seed)
    passing = {row.alpha for row in rows if row.passed}
    failures = 0 if passing == {-2.0, -3.0} else 1
    return _result("fixed_m_scan", float(failures), 0.5, detail=f"passing={sorted(passing)}")


def case_zero_energy_scan(seed: int, tol: float) -> CaseResult:
    rows = inv.power_law_scan([-2, -1, 1, 2], "zeroE-flat", seed=seed)
    failing = {row.alpha for row in rows if not row.passed}
    failures = 0 if failing == {-1.0} else 1
    return _result("zero_energy_scan", float(failures), 0.5, detail=f"failing={sorted(failing)}")


def case_zero_energy_kepler_flat(seed: int, tol: float) -> CaseResult:
    ode = inv.fixed_e_ode(inv.kepler_force(), inv.kepler_potential(), 0)
    residual = inv.flatness_residual(ode, seed=seed)
    return _result("zero_energy_kepler_flat", residual, ex.ZERO_TEST_THRESHOLD)


# --------------------------------------------------------------------------
# theorems suite
# --------------------------------------------------------------------------

def case_lambert_random(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "lambert_random")
    worst = 0.0
    for _ in range(100):
        o = _random_ellipse(rng)
        u1, u2 = rng.uniform(-math.pi, math.pi, size=2)
        sides = th.lambert_check(o, float(u1), float(u2))
        b_sq = 4.0 / (o.c**2 - o.a**2 - o.b**2)
        worst = max(worst, abs(sides.lhs - sides.rhs) / (1.0 + b_sq))
    return _result("lambert_random", worst, 1e-10)


def case_lambert_exact_case(seed: int, tol: float) -> CaseResult:
    # worked case (1/2, 0, 1), u = (0, pi), in exact rational arithmetic:
    # sin^2(du/2) = 1, cos u1 = 1, cos u2 = -1
    a, b, c = Fraction(1, 2), Fraction(0), Fraction(1)
    energy = (a * a + b * b - c * c) / (2 * c)
    semi_major = 1 / (2 * abs(energy))
    ecc = Fraction(1, 2)
    b_sq = 4 / (c * c - a * a - b * b)  # (2 * semi-minor)^2
    r1 = semi_major * (1 - ecc)
    r2 = semi_major * (1 + ecc)
    x1 = semi_major * (1 - ecc)
    x2 = semi_major * (-1 - ecc)
    r12_sq = (x1 - x2) ** 2
    lhs = b_sq * 1
    rhs = r12_sq - (r1 - r2) ** 2
    exact = lhs == rhs == Fraction(16, 3)
    return CaseResult(
        "lambert_exact_case", "pass" if exact else "fail", 0.0 if exact else 1.0, 0.5,
        detail=f"lhs={lhs}, rhs={rhs}",
    )


def case_four_vertices_fig12(seed: int, tol: float) -> CaseResult:
    verts = th.kepler_vertices(th.circle_curve(0.6, 0.0, 1.0))
    expected = sorted([0.0, math.acos(-0.6), math.pi, 2 * math.pi - math.acos(-0.6)])
    if len(verts) != 4:
        return CaseResult("four_vertices_fig12", "fail", float(len(verts)), 1e-6,
                          detail=f"expected 4 vertices, got {len(verts)}")
    worst = max(abs(g - w) for g, w in zip(sorted(verts), expected))
    return _result("four_vertices_fig12", worst, 1e-6)


def case_tait_kneser_fig12(seed: int, tol: float) -> CaseResult:
    curve = th.circle_curve(0.6, 0.0, 1.0)
    report = th.tait_kneser(curve, (0.05, math.acos(-0.6) - 0.05), k=12)
    failures = (0 if report.all_nested else 1) + (0 if report.all_chords_timelike else 1)
    return _result("tait_kneser_fig12", float(failures), 0.5,
                   detail=f"pairs={report.pairs}")


def case_envelope_minor_axis(seed: int, tol: float) -> CaseResult:
    env = th.envelope_minor_axis(2.0, 1.0)
    worst = 0.0
    for member in th.minor_axis_family(2.0, 1.0, np.linspace(-1.2, 1.2, 20)):
        report = th.tangency_report(member, env)
        if not report.even_contact:
            return CaseResult("envelope_minor_axis", "fail", report.residual, 1e-7,
                              detail="odd-multiplicity contact")
        worst = max(worst, report.residual)
    return _result("envelope_minor_axis", worst, 1e-7)


def case_envelope_energy(seed: int, tol: float) -> CaseResult:
    env = th.envelope_energy(-0.5, 1.0)
    worst = 0.0
    for member in th.energy_family(-0.5, 1.0, np.linspace(-0.9, 0.9, 20)):
        report = th.tangency_report(member, env)
        if not report.even_contact:
            return CaseResult("envelope_energy", "fail", report.residual, 1e-7,
                              detail="odd-multiplicity contact")
        worst = max(worst, report.residual)
    return _result("envelope_energy", worst, 1e-7)


def case_envelope_energy_focus(seed: int, tol: float) -> CaseResult:
    env = th.envelope_energy(-0.5, 1.0)
    fx, fy = th.second_focus(env)
    worst = math.hypot(fx - 1.0, fy - 0.0)
    return _result("envelope_energy_focus", worst, 1e-9)


def case_envelope_hooke(seed: int, tol: float) -> CaseResult:
    env = th.envelope_hooke(math.pi)
    worst = abs(env.half_gap - 1.0)
    members = th.hooke_family(math.pi, np.linspace(-1.0, 1.0, 20))
    for curve in members:
        ys = [curve.point(t)[1] for t in np.linspace(0, 2 * math.pi, 2001)]
        worst = max(worst, abs(max(ys) - env.half_gap), abs(min(ys) + env.half_gap))
    kepler_env = th.envelope_minor_axis(2.0, 1.0)
    for curve in members[::4]:
        pts = [kmaps.square(_pp(*curve.point(t)))
               for t in np.linspace(0.1, 0.1 + 2 * math.pi, 24, endpoint=False)]
        res = fit(pts)
        report = th.tangency_report(res.orbit, kepler_env)
        worst = max(worst, report.residual)
    return _result("envelope_hooke", worst, 1e-6)


def _pp(x: float, y: float):
    from .orbit import PlanePoint

    return PlanePoint(x, y)


def case_newton_membership(seed: int, tol: float) -> CaseResult:
    worst = 0.0
    for triple in ((0.0, 0.0, 1.0), (0.5, 0.0, 1.0), (2.0, 0.0, 1.0)):
        o = from_abc(*triple)
        traj = newton_flow(o)
        worst = max(worst, float(np.max(traj.membership_residuals(o))))
    return _result("newton_membership", worst, 1e-6)


def case_newton_conservation(seed: int, tol: float) -> CaseResult:
    worst = 0.0
    for triple in ((0.0, 0.0, 1.0), (0.5, 0.0, 1.0), (2.0, 0.0, 1.0)):
        o = from_abc(*triple)
        traj = newton_flow(o)
        worst = max(worst, float(np.max(np.abs(traj.energies() - o.energy))))
        worst = max(worst, float(np.max(np.abs(np.abs(traj.ang_momenta()) - o.ang_momentum))))
    return _result("newton_conservation", worst, 1e-8)


def case_curved_quadric(seed: int, tol: float) -> CaseResult:
    worst = th.curved_quadric_residual(MinkVec(0, 0, 1), -0.5, 0.0)
    worst = max(worst, th.curved_quadric_residual(MinkVec(math.sqrt(3.0), 0, -1), 1.0, 0.0))
    b_axis = 2.0
    for member in th.minor_axis_family(b_axis, 1.0, np.linspace(-1, 1, 9)):
        v = MinkVec(member.a, member.b, member.c)
        worst = max(worst, th.curved_quadric_residual(v, 0.0, 4.0 / b_axis**2))
    return _result("curved_quadric", worst, 1e-9)


# --------------------------------------------------------------------------
# maps suite
# --------------------------------------------------------------------------

def case_square_lines_flat(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "square_lines_flat")
    worst = 0.0
    for _ in range(50):
        phi = rng.uniform(0, 2 * math.pi)
        d = rng.uniform(0.4, 2.0)
        normal = np.array([math.cos(phi), math.sin(phi)])
        tangent = np.array([-normal[1], normal[0]])
        pts = [kmaps.square(_pp(*(d * normal + float(t) * tangent)))
               for t in rng.uniform(-1.5, 1.5, size=20)]
        res = fit(pts)
        if res.kind != "orbit":
            return CaseResult("square_lines_flat", "fail", 1.0, 1e-6, detail="fit degenerated")
        worst = max(worst, abs(res.orbit.eccentricity - 1.0))
    return _result("square_lines_flat", worst, 1e-6)


def case_flatten_m_collinear(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "flatten_m_collinear")
    worst = 0.0
    dual_worst = 0.0
    for m in (0.5, 1.0, 2.0):
        c = 1.0 / (m * m)
        for _ in range(8):
            ecc = rng.uniform(0.3, 1.6)
            phi = rng.uniform(0, 2 * math.pi)
            o = from_abc(ecc * c * math.cos(phi), ecc * c * math.sin(phi), c)
            pts = [kmaps.flatten_m(p, m) for p in sample(o, 24)
                   if abs(1.0 - p.r / (m * m)) > 0.05]
            res = fit(pts)
            if res.kind != "line":
                return CaseResult("flatten_m_collinear", "fail", 1.0, 1e-10,
                                  detail="image not flagged as line")
            worst = max(worst, res.residual)
            want = kmaps.flatten_m_dual(o.dual(), m)
            dual_worst = max(dual_worst, abs(res.line[0] - want.a), abs(res.line[1] - want.b))
    if dual_worst > 1e-9:
        return CaseResult("flatten_m_collinear", "fail", dual_worst, 1e-9,
                          detail="dual prediction mismatch")
    return _result("flatten_m_collinear", worst, 1e-10)


def case_hill_embedding(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "hill_embedding")
    worst = 0.0
    radius_violations = 0
    for _ in range(50):
        c = rng.uniform(0.3, 2.0)
        h = math.sqrt(c * c + 2.0 * c)
        phi = rng.uniform(0, 2 * math.pi)
        o = from_abc(h * math.cos(phi), h * math.sin(phi), c)  # energy exactly +1
        images = []
        for p in sample(o, 20):
            q = kmaps.hill_embed(p, 1.0)
            if q.r >= 0.5:
                radius_violations += 1
            images.append(q)
        res = fit(images)
        if res.kind != "orbit":
            return CaseResult("hill_embedding", "fail", 1.0, 1e-8, detail="fit degenerated")
        want = kmaps.hill_dual(o, 1.0)
        worst = max(worst, abs(res.orbit.energy - (-1.0)))
        worst = max(
            worst,
            abs(res.orbit.a - want.a),
            abs(res.orbit.b - want.b),
            abs(res.orbit.c - want.c),
        )
        for p in sample(o, 10, branch="repelling"):
            q = kmaps.repel_embed(p, 1.0)
            if not (0.5 < q.r < 1.0):
                radius_violations += 1
    if radius_violations:
        return CaseResult("hill_embedding", "fail", float(radius_violations), 1e-8,
                          detail="image radii leave the predicted regions")
    return _result("hill_embedding", worst, 1e-8)


def case_parabola_chart_law(seed: int, tol: float) -> CaseResult:
    rng = _rng(seed, "parabola_chart_law")
    worst = 0.0
    done = 0
    while done < 25:
        a2, a1, a0 = rng.uniform(-2.0, 2.0, size=3)
        if abs(a2 + a0) < 0.2:
            continue
        dual = kmaps.parabola_chart_dual(float(a2), float(a1), float(a0))
        for bx in np.linspace(-1.5, 1.5, 12):
            by = a2 * bx * bx + a1 * bx + a0
            if abs(by) < 1e-3:
                continue
            q = kmaps.parabola_chart(float(bx), float(by))
            worst = max(worst, _conic_residual(dual, q.x, q.y))
        done += 1
    return _result("parabola_chart_law", worst, 1e-10)


def case_square_zero_energy_flat(seed: int, tol: float) -> CaseResult:
    ode = inv.fixed_e_ode(inv.kepler_force(), inv.kepler_potential(), 0)
    residual = inv.flatness_residual(ode, seed=seed)
    return _result("square_zero_energy_flat", residual, ex.ZERO_TEST_THRESHOLD)


_SUITE_CASES = {
    "symmetry": [
        case_vf_plane_closed_forms,
        case_vf_dual_closed_forms,
        case_commuting_square,
        case_bracket_closure,
        case_one_param_subgroup,
        case_fixed_energy_quadric,
    ],
    "duality": [
        case_dual_curve_agreement,
        case_parabolic_point_planes,
        case_ellipse_pencil_counts,
    ],
    "invariants": [
        case_fixed_e_i2_closed_form,
        case_fixed_e_i1_zero,
        case_fixed_m_flat,
        case_fixed_e_elimination_gate,
        case_type_ii_witness,
        case_wunschmann_scan,
        case_fixed_m_scan,
        case_zero_energy_scan,
        case_zero_energy_kepler_flat,
    ],
    "theorems": [
        case_lambert_random,
        case_lambert_exact_case,
        case_four_vertices_fig12,
        case_tait_kneser_fig12,
        case_envelope_minor_axis,
        case_envelope_energy,
        case_envelope_energy_focus,
        case_envelope_hooke,
        case_newton_membership,
        case_newton_conservation,
        case_curved_quadric,
    ],
    "maps": [
        case_square_lines_flat,
        case_square_zero_energy_flat,
        case_flatten_m_collinear,
        case_hill_embedding,
        case_parabola_chart_law,
    ],
}


def run_suite(suite: str, seed: int = 0, tol: float = DEFAULT_TOL) -> VerifyReport:
    """Run one named suite; cases are sorted by name in the report."""
    if suite not in _SUITE_CASES:
        raise ValueError(f"unknown suite {suite!r} (choose from {', '.join(SUITES)})")
    start = time.perf_counter()
    cases = []
    for fn in _SUITE_CASES[suite]:
        try:
            cases.append(fn(seed, tol))
        except Exception as err:  # pragma: no cover - defensive
            name = fn.__name__.removeprefix("case_")
            cases.append(CaseResult(name, "error", None, tol, detail=repr(err)))
    cases.sort(key=lambda c: c.name)
    return VerifyReport(suite, seed, cases, time.perf_counter() - start)


def run_suites(suite: str, seed: int = 0, tol: float = DEFAULT_TOL) -> list[VerifyReport]:
    if suite == "all":
        return [run_suite(s, seed, tol) for s in SUITES]
    return [run_suite(suite, seed, tol)]
