"""Trajectory taxonomy, period detection, and portrait sweeps."""
import math

import numpy as np
import pytest

from curved3body import fixedpoints as fp
from curved3body import flowatlas as fa
from curved3body import homographic as hom
from curved3body.geometry import Curvature


def _reduced(kind, r0, nu0, kappa, c, m, t_span, n=801):
    series = hom.integrate_reduced(kind, hom.ReducedState(r0, nu0, 0.0, c),
                                   Curvature(kappa), m, t_span,
                                   t_eval=np.linspace(0.0, t_span, n))
    return series


def test_detect_period_matches_linearization():
    # small oscillation about the geodesic center on the sphere
    curv = Curvature(1.0)
    (rec,) = fp.eulerian_fixed_points(curv, 2.0, 2.0)
    predicted = 2.0 * math.pi / abs(rec.eigenvalues[0].imag)
    series = _reduced(hom.EULERIAN, rec.r + 1e-3, 0.0, 1.0, 2.0, 2.0,
                      2.6 * predicted, n=4001)
    got = fa.detect_period(series, tol=1e-5)
    assert got is not None
    assert abs(got - predicted) / predicted < 0.05


def test_detect_period_none_for_monotone_run():
    series = _reduced(hom.LAGRANGIAN, 1.0, 0.8, -2.0, 1.0 / 3.0, 0.5, 10.0)
    assert fa.detect_period(series, tol=1e-4) is None


def test_classify_equilibrium_at_center():
    curv = Curvature(-0.3)
    recs = fp.lagrangian_fixed_points(curv, 0.23, 0.12)
    series = _reduced(hom.LAGRANGIAN, recs[0].r, 0.0, -0.3, 0.23, 0.12, 20.0)
    assert fa.classify_trajectory(series, recs) == fa.EQUILIBRIUM


def test_classify_homothetic():
    series = _reduced(hom.LAGRANGIAN, 0.5, 0.0, 1.0, 0.0, 1.0, 5.0)
    assert fa.classify_trajectory(series, []) == fa.HOMOTHETIC


def test_classify_periodic_cell():
    curv = Curvature(-0.3)
    recs = fp.lagrangian_fixed_points(curv, 0.23, 0.12)
    series = _reduced(hom.LAGRANGIAN, recs[0].r + 0.05, 0.0, -0.3, 0.23, 0.12,
                      150.0, n=3001)
    assert fa.classify_trajectory(series, recs) == fa.PERIODIC


def test_classify_collision_and_equator_tails():
    curv = Curvature(1.0)
    # with c != 0 the centrifugal barrier blocks r -> 0, so the collision
    # branch of the reason mapping is exercised with a synthetic tail
    t = np.linspace(0.0, 1.0, 50)
    series = hom.ReducedSeries(hom.LAGRANGIAN, 1.0, 0.3, 1.0, t,
                               np.linspace(0.5, 1e-6, 50),
                               np.full(50, -0.5), np.zeros(50),
                               reason="BOUNDARY_APPROACH")
    assert fa.classify_trajectory(series, []) == fa.COLLISION_APPROACH
    series = hom.integrate_reduced(hom.LAGRANGIAN,
                                   hom.ReducedState(0.9, 0.0, 0.0, 1.0),
                                   curv, 0.24, 30.0)
    assert fa.classify_trajectory(
        series, fp.lagrangian_fixed_points(curv, 1.0, 0.24)) == fa.EQUATOR_ASYMPTOTIC


def test_classify_unbounded():
    curv = Curvature(-2.0)
    recs = fp.lagrangian_fixed_points(curv, 1.0 / 3.0, 0.5)
    series = hom.integrate_reduced(hom.LAGRANGIAN,
                                   hom.ReducedState(1.0, 0.8, 0.0, 1.0 / 3.0),
                                   curv, 0.5, 100.0, escape_radius=20.0)
    assert fa.classify_trajectory(series, recs) == fa.UNBOUNDED


def test_classify_homoclinic_candidate_synthetic():
    """Long dwell near a saddle at both ends of an excursion."""
    curv = Curvature(-0.3)
    recs = fp.lagrangian_fixed_points(curv, 0.23, 0.12)
    saddle = next(r for r in recs if r.stability == fp.SADDLE)
    t = np.linspace(0.0, 100.0, 2001)
    bump = np.exp(-((t - 50.0) / 8.0) ** 2)
    r = saddle.r - 0.5 * bump
    nu = 0.5 * 2.0 * (t - 50.0) / 64.0 * bump  # smooth in, smooth out
    series = hom.ReducedSeries(hom.LAGRANGIAN, -0.3, 0.23, 0.12, t, r, nu,
                               np.zeros_like(t))
    assert fa.classify_trajectory(series, recs) == fa.HOMOCLINIC_CANDIDATE


def test_sweep_single_cell_equilibrium():
    curv = Curvature(1.0)
    (rec,) = fp.eulerian_fixed_points(curv, 2.0, 2.0)
    data = fa.sweep(hom.EULERIAN, curv, 2.0, 2.0, (rec.r, rec.r), (0.0, 0.0),
                    (1, 1), 20.0)
    assert data.classes[0][0] == fa.EQUILIBRIUM
    assert data.counts() == {fa.EQUILIBRIUM: 1}


def test_sweep_marks_invalid_cells():
    curv = Curvature(1.0)
    data = fa.sweep(hom.LAGRANGIAN, curv, 1.0, 0.24, (0.5, 1.5), (0.0, 0.0),
                    (3, 1), 5.0)
    assert data.classes[2][0] == fa.INVALID
    assert sum(data.counts().values()) == 3


def test_sweep_no_periodic_in_escape_regime():
    curv = Curvature(-2.0)
    data = fa.sweep(hom.LAGRANGIAN, curv, 1.0 / 3.0, 0.5, (0.5, 2.5),
                    (-0.5, 0.5), (3, 3), 60.0)
    assert fa.PERIODIC not in data.counts()
    assert sum(data.counts().values()) == 9


def test_portrait_round_trips(tmp_path):
    curv = Curvature(1.0)
    data = fa.sweep(hom.EULERIAN, curv, 2.0, 2.0, (0.4, 0.9), (-0.2, 0.2),
                    (3, 3), 25.0)
    path = tmp_path / "portrait.json"
    data.to_json(path, extra={"note": "round-trip"})
    back = fa.PortraitData.from_json(path)
    assert back.kind == data.kind and back.t_span == data.t_span
    assert back.classes == data.classes
    assert np.allclose(back.r_values, data.r_values)
    nan_eq = np.isnan(back.period) == np.isnan(data.period)
    assert nan_eq.all()
    csv_path = tmp_path / "portrait.csv"
    data.to_csv(csv_path)
    text = csv_path.read_text()
    assert text.startswith("# config:")
    assert len(text.strip().splitlines()) == 2 + 9
