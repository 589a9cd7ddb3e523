"""Integration kernels: tableau sanity, backend parity, external cross-check."""
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from curved3body import _backend, _kernels_py
from curved3body import dynamics as dyn
from curved3body import homographic as hom
from curved3body.geometry import Curvature

try:
    from curved3body import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = [_kernels_py] + ([_compiled] if _compiled is not None else [])


def test_tableau_row_sums():
    # each stage's abscissa equals its row sum, and the weights sum to one
    for i, row in enumerate(_kernels_py._A):
        assert abs(sum(row) - _kernels_py._C[i]) < 1e-14
    assert abs(sum(_kernels_py._B8) - 1.0) < 1e-15


def test_selected_backend_is_reported():
    assert _backend.backend_name() in ("compiled", "python")
    assert _backend.kernels.BACKEND == _backend.backend_name()


def _sample_state():
    rs = hom.ReducedState(0.6, 0.05, 0.3, 0.8)
    st = hom.embed_lagrangian(rs, Curvature(1.0), 1.0)
    return st.to_vector(), st.masses


@pytest.mark.skipif(_compiled is None, reason="compiled backend unavailable")
def test_full_backends_agree():
    y0, masses = _sample_state()
    args = (y0, masses, 1.0, 0.0, 4.0, 1e-3, 1e-10, 1e-12, 100000, 1e-8, math.inf)
    out = []
    for mod in (_kernels_py, _compiled):
        status, ts, ys, _ = mod.integrate_full(*args, np.linspace(0.0, 4.0, 17))
        assert status == mod.STATUS_T_END
        out.append(np.asarray(ys))
    assert np.max(np.abs(out[0] - out[1])) < 1e-11


@pytest.mark.skipif(_compiled is None, reason="compiled backend unavailable")
def test_reduced_backends_agree():
    y0 = np.array([0.6, 0.05, 0.0])
    args = (_kernels_py.KIND_LAGRANGIAN, y0, 0.8, 1.0, 1.0, 0.0, 6.0,
            1e-3, 1e-10, 1e-12, 100000, 1e-6, 0.9999999, -1.0, math.inf)
    out = []
    for mod in (_kernels_py, _compiled):
        status, ts, ys, _ = mod.integrate_reduced(*args, np.linspace(0.0, 6.0, 13))
        assert status == mod.STATUS_T_END
        out.append(np.asarray(ys))
    assert np.max(np.abs(out[0] - out[1])) < 1e-11


def test_full_integration_matches_scipy():
    """DOP853 at tight tolerance is an independent oracle for the vector field."""
    y0, masses = _sample_state()
    curv = Curvature(1.0)

    def rhs(t, y):
        st = dyn.SystemState.from_vector(t, curv, masses, y)
        acc = dyn.accelerations(st)
        return np.concatenate([y[9:], acc.reshape(-1)])

    ref = solve_ivp(rhs, (0.0, 3.0), y0, method="DOP853",
                    rtol=1e-12, atol=1e-12, dense_output=True)
    assert ref.success
    for mod in BACKENDS:
        status, ts, ys, _ = mod.integrate_full(
            y0, masses, 1.0, 0.0, 3.0, 1e-3, 1e-11, 1e-13, 100000, 1e-8,
            math.inf, np.array([1.0, 2.0, 3.0]))
        assert status == mod.STATUS_T_END
        for t, y in zip(ts, np.asarray(ys)):
            assert np.max(np.abs(y - ref.sol(t))) < 1e-8


def test_t_eval_times_are_exact():
    y0, masses = _sample_state()
    want = np.array([0.5, 1.25, 2.75])
    for mod in BACKENDS:
        _, ts, _, _ = mod.integrate_full(y0, masses, 1.0, 0.0, 3.0, 1e-3,
                                         1e-10, 1e-12, 100000, 1e-8, math.inf, want)
        assert np.array_equal(np.asarray(ts), want)


def test_collision_status_on_collapse():
    # no angular momentum: the triangle shrinks into the triple collision
    rs = hom.ReducedState(0.5, 0.0, 0.0, 0.0)
    st = hom.embed_lagrangian(rs, Curvature(1.0), 1.0)
    for mod in BACKENDS:
        status, ts, ys, _ = mod.integrate_full(
            st.to_vector(), st.masses, 1.0, 0.0, 10.0, 1e-3, 1e-10, 1e-12,
            100000, 1e-8, math.inf, None)
        assert status == mod.STATUS_COLLISION
        assert ts[-1] < 10.0


def test_reduced_boundary_and_escape_statuses():
    for mod in BACKENDS:
        # r -> 0 under zero angular momentum hits the floor guard
        status, _, _, _ = mod.integrate_reduced(
            mod.KIND_LAGRANGIAN, np.array([0.5, 0.0, 0.0]), 0.0, 1.0, 1.0,
            0.0, 10.0, 1e-3, 1e-10, 1e-12, 100000, 1e-6, 0.9999999, -1.0,
            math.inf, None)
        assert status == mod.STATUS_BOUNDARY
        # an unbound negative-curvature orbit trips the escape radius
        status, _, ys, _ = mod.integrate_reduced(
            mod.KIND_LAGRANGIAN, np.array([1.0, 1.5, 0.0]), 0.3, -1.0, 0.2,
            0.0, 100.0, 1e-3, 1e-10, 1e-12, 100000, 1e-6, math.inf, 8.0,
            math.inf, None)
        assert status == mod.STATUS_ESCAPE
        assert np.asarray(ys)[-1, 0] >= 8.0


def test_step_budget_status():
    y0, masses = _sample_state()
    for mod in BACKENDS:
        status, _, _, _ = mod.integrate_full(
            y0, masses, 1.0, 0.0, 50.0, 1e-3, 1e-10, 1e-12, 10, 1e-8,
            math.inf, None)
        assert status == mod.STATUS_STEP_BUDGET


def test_eighth_order_convergence():
    """Fixed-step error of the propagated solution scales like h^8."""
    y0, masses = _sample_state()
    curv = Curvature(1.0)

    def rhs_vec(y):
        st = dyn.SystemState.from_vector(0.0, curv, masses, y)
        return np.concatenate([y[9:], dyn.accelerations(st).reshape(-1)])

    def step(y, h):
        k = []
        for i in range(13):
            yi = y + h * sum(a * kk for a, kk in zip(_kernels_py._A[i], k))
            k.append(rhs_vec(yi))
        return y + h * sum(b * kk for b, kk in zip(_kernels_py._B8, k))

    def propagate(h, n):
        y = y0.copy()
        for _ in range(n):
            y = step(y, h)
        return y

    ref = propagate(0.4 / 64, 64)
    errs = [np.max(np.abs(propagate(0.4 / n, n) - ref)) for n in (4, 8)]
    order = math.log2(errs[0] / errs[1])
    assert order > 7.0
