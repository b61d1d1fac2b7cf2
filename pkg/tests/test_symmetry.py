from __future__ import annotations

import math

import numpy as np
import pytest

from keplersym.minkowski import MinkVec, norm2
from keplersym.orbit import PlanePoint, from_abc, membership_residual, sample
from keplersym.symmetry import (
    J3,
    AlgebraElement,
    SymmetryError,
    act_dual,
    act_plane,
    algebra,
    algebra_from_matrix,
    basis,
    bracket,
    compose,
    exp_map,
    fixed_energy_algebra,
    flow,
    flow_dual,
    group_element,
    identity,
    inverse,
    vf_dual,
    vf_plane,
)

# closed forms of the seven plane fields on the sheet z = +r
PLANE_FIELDS = [
    lambda x, y, r: (x, y),  # r d_r
    lambda x, y, r: (-y, x),  # d_theta
    lambda x, y, r: (r, 0.0),  # r d_x
    lambda x, y, r: (0.0, r),  # r d_y
    lambda x, y, r: (-x * x, -x * y),  # -x r d_r
    lambda x, y, r: (-x * y, -y * y),  # -y r d_r
    lambda x, y, r: (-r * x, -r * y),  # -r^2 d_r
]

# closed forms of the seven dual fields
DUAL_FIELDS = [
    lambda a, b, c: (-a, -b, -c),
    lambda a, b, c: (-b, a, 0.0),
    lambda a, b, c: (-c, 0.0, -a),
    lambda a, b, c: (0.0, -c, -b),
    lambda a, b, c: (1.0, 0.0, 0.0),
    lambda a, b, c: (0.0, 1.0, 0.0),
    lambda a, b, c: (0.0, 0.0, 1.0),
]


def test_algebra_matrix_values():
    assert np.all(algebra().matrix == 0.0)
    m = algebra(x1=1).matrix
    assert np.allclose(np.diag(m), [0.25, 0.25, 0.25, -0.75])
    m = algebra(x2=1).matrix
    assert m[0, 1] == -1.0 and m[1, 0] == 1.0


def test_algebra_structure_invariants():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = AlgebraElement(*rng.uniform(-2, 2, size=7))
        m = x.matrix
        assert abs(np.trace(m)) <= 1e-14
        assert np.all(m[:3, 3] == 0.0)
        assert m[3, 3] == -3.0 * m[0, 0]
        skew = m[:3, :3] - m[0, 0] * np.eye(3)
        assert np.max(np.abs(skew.T @ J3 + J3 @ skew)) <= 1e-14


def test_exp_identity_and_rotation():
    g = exp_map(algebra(), 1.0)
    assert np.allclose(g.matrix, np.eye(4), atol=1e-14)
    t = 0.7
    g = exp_map(algebra(x2=1), t)
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    assert np.allclose(g.matrix[:2, :2], rot, atol=1e-13)


def test_exp_translation_acts_on_dual():
    t = 0.43
    g = exp_map(algebra(x5=1), t)
    v = MinkVec(0.2, -0.1, 1.3)
    w = act_dual(g, v)
    assert (w.a, w.b, w.c) == pytest.approx((v.a + t, v.b, v.c), abs=1e-13)


def test_act_plane_identity_and_dilation():
    p = PlanePoint(0.8, -0.6)
    q = act_plane(identity(), p)
    assert (q.x, q.y) == pytest.approx((p.x, p.y), abs=1e-15)
    t = 0.31
    q = act_plane(exp_map(algebra(x1=1), t), PlanePoint(1, 0))
    assert (q.x, q.y) == pytest.approx((math.exp(t), 0.0), abs=1e-12)


def test_act_plane_x7_first_order_motion():
    h = 1e-6
    p = PlanePoint(1.0, 0.0)
    q = act_plane(exp_map(algebra(x7=1), h), p, sheet=1)
    assert (q.x - p.x) / h == pytest.approx(-1.0, abs=1e-5)
    assert (q.y - p.y) / h == pytest.approx(0.0, abs=1e-5)


def test_act_dual_flattens_fixed_momentum_plane():
    m_sq = 1.0
    g = group_element(np.eye(3), [0.0, 0.0, -1.0 / m_sq], 1.0)
    w = act_dual(g, MinkVec(0.5, -0.2, 1.0 / m_sq))
    assert w.c == pytest.approx(0.0, abs=1e-15)
    assert (w.a, w.b) == pytest.approx((0.5, -0.2), abs=1e-15)


def test_act_dual_dilation_scales():
    t = 0.9
    g = exp_map(algebra(x1=1), t)
    v = MinkVec(0.3, 0.4, 1.2)
    w = act_dual(g, v)
    s = math.exp(-t)
    assert (w.a, w.b, w.c) == pytest.approx((s * v.a, s * v.b, s * v.c), rel=1e-12)


def test_vf_plane_example_values():
    assert vf_plane(algebra(x2=1), PlanePoint(1, 0)).velocity() == (0.0, 1.0)
    assert vf_plane(algebra(x7=1), PlanePoint(1, 0)).velocity() == (-1.0, 0.0)
    assert vf_plane(algebra(x3=1), PlanePoint(0, 1)).velocity() == (1.0, 0.0)


def test_vf_dual_example_values():
    v = MinkVec(0.7, -0.3, 1.1)
    assert vf_dual(algebra(x5=1), v).as_tuple() == (1.0, 0.0, 0.0)
    assert vf_dual(algebra(x1=1), v).as_tuple() == pytest.approx((-0.7, 0.3, -1.1))
    assert vf_dual(algebra(x2=1), MinkVec(1, 0, 0)).as_tuple() == (0.0, 1.0, 0.0)


def test_vf_plane_matches_closed_forms():
    rng = np.random.default_rng(2)
    gens = basis()
    for _ in range(200):
        x, y = rng.uniform(-3, 3, size=2)
        if math.hypot(x, y) < 1e-3:
            continue
        p = PlanePoint(x, y)
        r = p.r
        for gen, field in zip(gens, PLANE_FIELDS):
            got = vf_plane(gen, p).velocity()
            want = field(x, y, r)
            err = math.hypot(got[0] - want[0], got[1] - want[1])
            assert err <= 1e-12 * (1.0 + math.hypot(*want))


def test_vf_dual_matches_closed_forms():
    rng = np.random.default_rng(3)
    gens = basis()
    for _ in range(200):
        a, b, c = rng.uniform(-3, 3, size=3)
        v = MinkVec(a, b, c)
        for gen, field in zip(gens, DUAL_FIELDS):
            got = vf_dual(gen, v).as_tuple()
            want = field(a, b, c)
            err = max(abs(g - w) for g, w in zip(got, want))
            assert err <= 1e-12 * (1.0 + max(map(abs, want)))


def test_bracket_basics():
    x = algebra(x2=1, x5=0.3)
    z = bracket(x, x)
    assert np.max(np.abs(z.coords())) == 0.0
    got = bracket(algebra(x2=1), algebra(x3=1))
    assert got.coords() == pytest.approx(algebra(x4=1).coords())


def test_bracket_bilinearity():
    rng = np.random.default_rng(4)
    x = AlgebraElement(*rng.uniform(-1, 1, size=7))
    y = AlgebraElement(*rng.uniform(-1, 1, size=7))
    z = AlgebraElement(*rng.uniform(-1, 1, size=7))
    lhs = bracket(x + 2.0 * y, z).coords()
    rhs = bracket(x, z).coords() + 2.0 * bracket(y, z).coords()
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_bracket_closure_rank_stays_seven():
    gens = basis()
    flat = [g.matrix.ravel() for g in gens]
    for i in range(7):
        for j in range(i + 1, 7):
            br = bracket(gens[i], gens[j])
            stack = np.vstack(flat + [br.matrix.ravel()])
            s = np.linalg.svd(stack, compute_uv=False)
            assert np.sum(s > 1e-10 * s[0]) == 7


def test_algebra_from_matrix_rejects_outside():
    bad = np.eye(4)
    with pytest.raises(SymmetryError):
        algebra_from_matrix(bad)


def test_fixed_energy_fields():
    g2, g3, g4 = fixed_energy_algebra(-1.0)
    # the x3 generator's field vanishes at (1, 0) for E = -1
    assert vf_plane(g3, PlanePoint(1, 0), sheet=1).velocity() == pytest.approx((0.0, 0.0))
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, y = rng.uniform(-2, 2, size=2)
        if math.hypot(x, y) < 1e-2:
            continue
        p = PlanePoint(x, y)
        r = p.r
        assert vf_plane(g2, p, 1).velocity() == pytest.approx((-y, x), abs=1e-13)
        want3 = (r + -1.0 * x * x, -1.0 * x * y)
        assert vf_plane(g3, p, 1).velocity() == pytest.approx(want3, abs=1e-12)
        want4 = (-1.0 * x * y, r + -1.0 * y * y)
        assert vf_plane(g4, p, 1).velocity() == pytest.approx(want4, abs=1e-12)


def test_fixed_energy_positive_sign_flip():
    energy = 1.0
    _, g3, _ = fixed_energy_algebra(energy)
    rng = np.random.default_rng(6)
    for _ in range(20):
        x, y = rng.uniform(-2, 2, size=2)
        if math.hypot(x, y) < 1e-2:
            continue
        p = PlanePoint(x, y)
        r = p.r
        v3 = (r + energy * x * x, energy * x * y)
        got = vf_plane(g3, p, sheet=-1).velocity()
        assert got == pytest.approx((-v3[0], -v3[1]), abs=1e-12)


def test_fixed_energy_dual_flow_preserves_quadric():
    for energy in (-1.0, 0.5, 2.0):
        k = abs(energy)
        gens = fixed_energy_algebra(energy)
        rng = np.random.default_rng(7)
        for gen in gens:
            a, b = rng.uniform(-1.0, 1.0, size=2)
            c = k + math.sqrt(energy * energy + a * a + b * b)
            v = flow_dual(gen, MinkVec(a, b, c), 0.8)
            q = v.a**2 + v.b**2 - (v.c - k) ** 2
            assert abs(q + energy * energy) <= 1e-9


def test_flow_rotation_and_zero_field():
    p = PlanePoint(1.0, 0.5)
    t = 0.6
    q = flow(algebra(x2=1), p, t)
    c, s = math.cos(t), math.sin(t)
    assert (q.x, q.y) == pytest.approx((c * p.x - s * p.y, s * p.x + c * p.y), abs=1e-10)
    q = flow(algebra(), p, 2.0)
    assert (q.x, q.y) == pytest.approx((p.x, p.y), abs=1e-14)


def test_flow_matches_exp_action():
    p = PlanePoint(1.0, 0.0)
    t = 0.1
    via_flow = flow(algebra(x7=1), p, t)
    via_exp = act_plane(exp_map(algebra(x7=1), t), p)
    assert (via_flow.x, via_flow.y) == pytest.approx((via_exp.x, via_exp.y), abs=1e-8)


def test_one_parameter_subgroup():
    rng = np.random.default_rng(8)
    for _ in range(10):
        x = AlgebraElement(*rng.uniform(-0.8, 0.8, size=7))
        g = compose(exp_map(x, 0.4), exp_map(x, 0.35))
        h = exp_map(x, 0.75)
        assert np.max(np.abs(g.matrix - h.matrix)) <= 1e-11


def test_inverse_composes_to_identity():
    rng = np.random.default_rng(9)
    x = AlgebraElement(*rng.uniform(-0.5, 0.5, size=7))
    g = exp_map(x, 1.0)
    assert np.max(np.abs(compose(g, inverse(g)).matrix - np.eye(4))) <= 1e-12


def test_commuting_square_small_sweep():
    rng = np.random.default_rng(10)
    checked = 0
    while checked < 25:
        x = AlgebraElement(*rng.uniform(-0.3, 0.3, size=7))
        g = exp_map(x, 1.0)
        c = rng.uniform(0.6, 1.6)
        ecc = rng.uniform(0.0, 1.4)
        phi = rng.uniform(0, 2 * math.pi)
        o = from_abc(ecc * c * math.cos(phi), ecc * c * math.sin(phi), c)
        image_dual = act_dual(g, o.dual())
        if abs(image_dual.c) < 1e-3:
            continue
        image = from_abc(image_dual.a, image_dual.b, image_dual.c)
        for p in sample(o, 20):
            try:
                q = act_plane(g, p, sheet=1)
            except SymmetryError:
                continue
            assert membership_residual(image, q.x, q.y) <= 1e-8
        checked += 1
