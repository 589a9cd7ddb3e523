"""Full-system dynamics: forces, constraints, conservation, serialization."""
import math

import numpy as np
import pytest

from curved3body import dynamics as dyn
from curved3body import homographic as hom
from curved3body.geometry import (
    Curvature,
    manifold_residual,
    project_position,
    project_velocity,
    signed_cross,
    signed_dot,
)
from curved3body.verification import random_state


def _rotating_triangle(kappa=1.0, r=0.6, c=0.8, m=1.0):
    return hom.embed_lagrangian(hom.ReducedState(r, 0.0, 0.0, c),
                                Curvature(kappa), m)


def test_state_vector_round_trip():
    st = _rotating_triangle()
    y = st.to_vector()
    back = dyn.SystemState.from_vector(st.t, st.curv, st.masses, y)
    assert np.array_equal(back.to_vector(), y)


def test_validate_rejects_off_surface_and_nontangent():
    st = _rotating_triangle()
    st.validate()
    bad = dyn.SystemState(0.0, st.curv, [
        dyn.Body(b.mass, b.q * 1.001, b.v) for b in st.bodies])
    with pytest.raises(ValueError):
        bad.validate()
    bad = dyn.SystemState(0.0, st.curv, [
        dyn.Body(b.mass, b.q, b.v + np.array([0.0, 0.0, 1e-3])) for b in st.bodies])
    with pytest.raises(ValueError):
        bad.validate()


def test_body_requires_positive_mass():
    with pytest.raises(ValueError):
        dyn.Body(0.0, np.array([0.0, 0.0, 1.0]), np.zeros(3))


def test_step_control_rejects_nonpositive_fields():
    with pytest.raises(ValueError):
        dyn.StepControl(rtol=0.0)
    with pytest.raises(ValueError):
        dyn.StepControl(eps_sing=-1.0)


def test_force_gradient_matches_numerical_derivative():
    """Central differences of U along surface curves reproduce the gradient."""
    rng = np.random.default_rng(12)
    for _ in range(25):
        kappa = rng.uniform(0.3, 2.0) * rng.choice((-1.0, 1.0))
        st = random_state(rng, kappa)
        i = int(rng.integers(3))
        grad = dyn.force_gradient(st, i)
        # a tangent perturbation re-projected onto the surface keeps U defined
        w = project_velocity(st.bodies[i].q, rng.normal(size=3), st.curv)
        h = 1e-6

        def shifted(sign):
            bodies = [dyn.Body(b.mass, b.q.copy(), b.v.copy()) for b in st.bodies]
            bodies[i] = dyn.Body(bodies[i].mass,
                                 project_position(bodies[i].q + sign * h * w, st.curv),
                                 bodies[i].v)
            return dyn.force_function(dyn.SystemState(0.0, st.curv, bodies))

        num = (shifted(+1) - shifted(-1)) / (2 * h)
        assert abs(signed_dot(grad, w, st.curv.sigma) - num) < 5e-5 * max(1.0, abs(num))


def test_accelerations_satisfy_constraint_curvature():
    # differentiating kappa q.q = 1 twice forces q.a = -v.v in the signed metric
    rng = np.random.default_rng(13)
    for _ in range(25):
        kappa = rng.uniform(0.3, 2.0) * rng.choice((-1.0, 1.0))
        st = random_state(rng, kappa)
        acc = dyn.accelerations(st)
        for b, a in zip(st.bodies, acc):
            lhs = signed_dot(b.q, a, st.curv.sigma)
            rhs = -signed_dot(b.v, b.v, st.curv.sigma)
            assert abs(lhs - rhs) < 1e-10


def test_equal_mass_equator_triangle_is_stationary():
    # equilateral triangle on the sphere's equator: all forces balance
    curv = Curvature(1.0)
    bodies = []
    for ang in (0.0, 2 * math.pi / 3, 4 * math.pi / 3):
        q = np.array([math.cos(ang), math.sin(ang), 0.0])
        bodies.append(dyn.Body(1.0, q, np.zeros(3)))
    st = dyn.SystemState(0.0, curv, bodies)
    assert np.max(np.abs(dyn.accelerations(st))) < 1e-12


def test_force_function_rejects_near_collision():
    curv = Curvature(1.0)
    q = np.array([0.0, 0.0, 1.0])
    q2 = np.array([1e-9, 0.0, 1.0])
    q2 = q2 / math.sqrt(1.0 + 1e-18)
    st = dyn.SystemState(0.0, curv, [
        dyn.Body(1.0, q, np.zeros(3)),
        dyn.Body(1.0, q2, np.zeros(3)),
        dyn.Body(1.0, np.array([1.0, 0.0, 0.0]), np.zeros(3)),
    ])
    with pytest.raises(dyn.SingularConfiguration):
        dyn.force_function(st)


def test_integrate_conserves_energy_and_momentum():
    st = _rotating_triangle(kappa=-0.5, r=1.0, c=0.9)
    series = dyn.integrate(st, 8.0)
    assert series.reason == dyn.T_END
    e = np.array([led.energy for led in series.ledgers])
    l = np.array([led.angular_momentum for led in series.ledgers])
    assert np.max(np.abs(e - e[0])) < 1e-9 * max(1.0, abs(e[0]))
    assert np.max(np.abs(l - l[0])) < 1e-9
    for s in series.states:
        for b in s.bodies:
            assert abs(manifold_residual(b.q, s.curv)) < 1e-10
            assert abs(signed_dot(b.q, b.v, s.curv.sigma)) < 1e-10


def test_integrate_t_eval_and_time_validation():
    st = _rotating_triangle()
    want = np.array([0.0, 1.0, 2.5])
    series = dyn.integrate(st, 2.5, t_eval=want)
    assert np.array_equal(series.times, want)
    with pytest.raises(ValueError):
        dyn.integrate(_rotating_triangle(), 0.0)


def test_angular_momentum_components():
    # the conserved vector is the mass-weighted sum of signed cross products
    st = _rotating_triangle(kappa=-1.0, r=1.2, c=0.5)
    want = sum(b.mass * signed_cross(b.q, b.v, st.curv.sigma) for b in st.bodies)
    assert np.allclose(dyn.angular_momentum(st), want)


def test_trajectory_series_round_trips(tmp_path):
    st = _rotating_triangle()
    series = dyn.integrate(st, 1.0, t_eval=np.linspace(0.0, 1.0, 5))
    for fmt, writer, reader in (
        ("csv", series.to_csv, dyn.TrajectorySeries.from_csv),
        ("jsonl", series.to_jsonl, dyn.TrajectorySeries.from_jsonl),
    ):
        path = tmp_path / f"traj.{fmt}"
        writer(path)
        back = reader(path)
        assert back.reason == series.reason
        assert np.allclose(back.times, series.times)
        for a, b in zip(back.states, series.states):
            for ba, bb in zip(a.bodies, b.bodies):
                assert np.allclose(ba.q, bb.q, atol=1e-15)
                assert np.allclose(ba.v, bb.v, atol=1e-15)


def test_collision_reason_surfaces_in_series():
    rs = hom.ReducedState(0.5, 0.0, 0.0, 0.0)
    st = hom.embed_lagrangian(rs, Curvature(1.0), 1.0)
    series = dyn.integrate(st, 10.0)
    assert series.reason == dyn.COLLISION_APPROACH
    assert series.times[-1] < 10.0
