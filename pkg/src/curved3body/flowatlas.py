"""Phase-portrait sweeps and trajectory taxonomy for the reduced systems.

A sweep integrates every grid cell forward and backward in time (the
backward arm reuses the forward integrator on the reflected state, since
the flow is symmetric about the nu = 0 axis), classifies the combined
trajectory, and aggregates the result into plottable portrait data.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import BOUNDARY_APPROACH, ESCAPE, StepControl, StepUnderflow, T_END
from .geometry import Curvature
from .homographic import (
    EULERIAN,
    LAGRANGIAN,
    DomainError,
    ReducedSeries,
    ReducedState,
    SingularConfiguration,
    eulerian_rhs,
    integrate_reduced,
    lagrangian_rhs,
)
from . import fixedpoints as fpmod

EQUILIBRIUM = "EQUILIBRIUM"
RELATIVE_EQUILIBRIUM = "RELATIVE_EQUILIBRIUM"
HOMOTHETIC = "HOMOTHETIC"
PERIODIC = "PERIODIC"
HOMOCLINIC_CANDIDATE = "HOMOCLINIC_CANDIDATE"
UNBOUNDED = "UNBOUNDED"
COLLISION_APPROACH = "COLLISION_APPROACH"
EQUATOR_ASYMPTOTIC = "EQUATOR_ASYMPTOTIC"

ORBIT_CLASSES = (EQUILIBRIUM, RELATIVE_EQUILIBRIUM, HOMOTHETIC, PERIODIC,
                 HOMOCLINIC_CANDIDATE, UNBOUNDED, COLLISION_APPROACH,
                 EQUATOR_ASYMPTOTIC)

INVALID = "INVALID"

_HOMOCLINIC_DIST = 1e-4
_HOMOCLINIC_FRACTION = 0.1


def _hermite(p0: float, m0: float, p1: float, m1: float, s: float) -> float:
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0
            + (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1)


def _crossings(series: ReducedSeries):
    """Times and radii of upward nu = 0 crossings, interpolated cubically."""
    t, r, nu = series.t, series.r, series.nu
    curv = Curvature(series.kappa)
    rhs = lagrangian_rhs if series.kind == LAGRANGIAN else eulerian_rhs
    out = []
    for i in range(len(t) - 1):
        if nu[i] == 0.0 and nu[i + 1] > 0.0:
            out.append((t[i], r[i]))
            continue
        # an interval ending exactly on zero is handled at the next index,
        # otherwise the same crossing would be counted twice
        if not (nu[i] < 0.0 < nu[i + 1]):
            continue
        h = t[i + 1] - t[i]
        try:
            d0 = rhs(r[i], nu[i], series.c, curv, series.m)[1] * h
            d1 = rhs(r[i + 1], nu[i + 1], series.c, curv, series.m)[1] * h
        except (DomainError, SingularConfiguration):
            d0 = d1 = nu[i + 1] - nu[i]
        a, b = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (a + b)
            if _hermite(nu[i], d0, nu[i + 1], d1, mid) < 0.0:
                a = mid
            else:
                b = mid
        s = 0.5 * (a + b)
        rc = _hermite(r[i], nu[i] * h, r[i + 1], nu[i + 1] * h, s)
        out.append((t[i] + s * h, rc))
    return out


def detect_period(series: ReducedSeries, tol: float):
    """Time between successive upward nu = 0 crossings whose radii agree
    within tol; None when no such return exists."""
    crossings = _crossings(series)
    for (t0, r0), (t1, r1) in zip(crossings, crossings[1:]):
        if abs(r1 - r0) < tol and t1 > t0:
            return t1 - t0
    return None


def _near_fixed_points_window(series, targets, t_lo, t_hi) -> bool:
    """True when the state stays within the homoclinic distance of some
    target radius throughout [t_lo, t_hi]."""
    mask = (series.t >= t_lo) & (series.t <= t_hi)
    if not mask.any():
        return False
    r, nu = series.r[mask], series.nu[mask]
    for rstar in targets:
        d = np.hypot(r - rstar, nu)
        if d.max() <= _HOMOCLINIC_DIST:
            return True
    return False


def classify_trajectory(series: ReducedSeries, fps, tol: float = 1e-6) -> str:
    """Assign one taxonomy tag to a reduced trajectory.

    The stationarity checks run first, then the termination reason decides
    the singular labels, then the return map and the two-sided saddle
    approach.  Orbits that resolve to none of those fall back to geometric
    heuristics, with HOMOCLINIC_CANDIDATE as the undecided bucket.
    """
    r, nu, t = series.r, series.nu, series.t
    curv = Curvature(series.kappa)
    scale_r = max(1.0, abs(r[0]))
    if len(r) >= 2:
        spread = np.ptp(r)
        if spread <= tol * scale_r:
            if np.abs(nu).max() <= tol:
                return EQUILIBRIUM
            return RELATIVE_EQUILIBRIUM
    if series.c == 0.0:
        return HOMOTHETIC

    if series.reason == ESCAPE:
        return UNBOUNDED
    if series.reason == BOUNDARY_APPROACH:
        if curv.kappa > 0 and r[-1] >= 0.9 * curv.scale:
            return EQUATOR_ASYMPTOTIC
        return COLLISION_APPROACH

    period = detect_period(series, max(tol, 1e-3 * np.ptp(r)))
    if period is not None:
        return PERIODIC

    saddle_radii = [rec.r for rec in fps
                    if rec.stability == fpmod.SADDLE
                    or rec.kind == fpmod.EQUATOR_BOUNDARY]
    if saddle_radii and len(t) >= 2:
        span = t[-1] - t[0]
        win = _HOMOCLINIC_FRACTION * span
        if (_near_fixed_points_window(series, saddle_radii, t[0], t[0] + win)
                and _near_fixed_points_window(series, saddle_radii, t[-1] - win, t[-1])):
            return HOMOCLINIC_CANDIDATE

    if r.min() < 0.02 * min(r[0], curv.scale):
        return COLLISION_APPROACH
    if curv.kappa > 0 and r.max() > 0.95 * curv.scale:
        return EQUATOR_ASYMPTOTIC
    if curv.kappa < 0:
        tail = r[3 * len(r) // 4:]
        if nu[-1] > 0 and len(tail) >= 2 and np.all(np.diff(tail) >= 0) \
                and r[-1] > 2.0 * r.min():
            return UNBOUNDED
    return HOMOCLINIC_CANDIDATE


@dataclass
class PortraitData:
    """Classified sweep over an initial-condition grid."""

    kind: str
    kappa: float
    c: float
    m: float
    r_values: np.ndarray
    nu_values: np.ndarray
    classes: list          # [i_r][i_nu] -> tag or INVALID
    min_r: np.ndarray
    max_r: np.ndarray
    period: np.ndarray     # NaN where absent
    t_span: float

    def counts(self) -> dict:
        out: dict = {}
        for row in self.classes:
            for tag in row:
                out[tag] = out.get(tag, 0) + 1
        return out

    def to_json(self, path, extra: dict | None = None) -> None:
        doc = {
            "config": {**(extra or {}), "kind": self.kind, "kappa": self.kappa,
                       "c": self.c, "m": self.m, "t_span": self.t_span},
            "r_values": list(self.r_values),
            "nu_values": list(self.nu_values),
            "cells": [
                [{"class": self.classes[i][j],
                  "min_r": None if math.isnan(self.min_r[i, j]) else self.min_r[i, j],
                  "max_r": None if math.isnan(self.max_r[i, j]) else self.max_r[i, j],
                  "period": None if math.isnan(self.period[i, j]) else self.period[i, j]}
                 for j in range(len(self.nu_values))]
                for i in range(len(self.r_values))
            ],
        }
        with open(path, "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")

    @classmethod
    def from_json(cls, path) -> "PortraitData":
        with open(path) as f:
            doc = json.load(f)
        cfg = doc["config"]
        nr, nn = len(doc["r_values"]), len(doc["nu_values"])
        classes = [[doc["cells"][i][j]["class"] for j in range(nn)] for i in range(nr)]
        grab = lambda key: np.array([
            [np.nan if doc["cells"][i][j][key] is None else doc["cells"][i][j][key]
             for j in range(nn)] for i in range(nr)
        ])
        return cls(cfg["kind"], cfg["kappa"], cfg["c"], cfg["m"],
                   np.array(doc["r_values"]), np.array(doc["nu_values"]),
                   classes, grab("min_r"), grab("max_r"), grab("period"),
                   cfg["t_span"])

    def to_csv(self, path, extra: dict | None = None) -> None:
        cfg = {**(extra or {}), "kind": self.kind, "kappa": self.kappa,
               "c": self.c, "m": self.m, "t_span": self.t_span}
        with open(path, "w") as f:
            f.write("# config: " + json.dumps(cfg) + "\n")
            f.write("r0,nu0,class,min_r,max_r,period\n")
            for i, r0 in enumerate(self.r_values):
                for j, nu0 in enumerate(self.nu_values):
                    cells = [f"{r0:.17g}", f"{nu0:.17g}", self.classes[i][j]]
                    for arr in (self.min_r, self.max_r, self.period):
                        v = arr[i, j]
                        cells.append("" if math.isnan(v) else f"{v:.17g}")
                    f.write(",".join(cells) + "\n")


def _cell_valid(kind: str, r0: float, nu0: float, curv: Curvature) -> bool:
    if r0 <= 0:
        return False
    if curv.kappa > 0:
        one = 1.0 - curv.kappa * r0 * r0
        if one < -1e-12:
            return False
        if abs(one) <= 1e-12:
            return kind == LAGRANGIAN and nu0 == 0.0
    return True


def _combined_cell_series(kind: str, r0: float, nu0: float, curv: Curvature,
                          c: float, m: float, t_span: float, ctrl: StepControl,
                          escape_radius: float) -> ReducedSeries:
    def arm(nu_sign):
        state = ReducedState(r0, nu_sign * nu0, 0.0, c)
        try:
            return integrate_reduced(kind, state, curv, m, t_span, ctrl=ctrl,
                                     escape_radius=escape_radius)
        except StepUnderflow as err:
            return err.partial

    fwd = arm(+1.0)
    bwd = arm(-1.0)
    # reflect the backward arm through t -> -t, nu -> -nu; omega runs backward
    # from the shared start, so mirror it about omega(0) = 0.
    t = np.concatenate([-bwd.t[::-1], fwd.t[1:]])
    r = np.concatenate([bwd.r[::-1], fwd.r[1:]])
    nu = np.concatenate([-bwd.nu[::-1], fwd.nu[1:]])
    om = np.concatenate([-bwd.omega[::-1], fwd.omega[1:]])
    return ReducedSeries(kind, curv.kappa, c, m, t, r, nu, om, fwd.reason)


def sweep(kind: str, curv: Curvature, c: float, m: float, r_range, nu_range,
          grid, t_span: float, ctrl: StepControl | None = None) -> PortraitData:
    """Classify a (r0, nu0) grid of initial conditions.

    Cells outside the regime's domain are marked INVALID and skipped.  The
    escape radius for the UNBOUNDED label is 50x the largest grid radius.
    """
    nr, nnu = grid
    r_values = np.linspace(r_range[0], r_range[1], nr)
    nu_values = np.linspace(nu_range[0], nu_range[1], nnu)
    if ctrl is None:
        ctrl = StepControl()
    if math.isinf(ctrl.max_step):
        ctrl = StepControl(ctrl.initial_step, ctrl.rtol, ctrl.atol,
                           ctrl.max_steps, ctrl.eps_sing, t_span / 100.0)
    escape_radius = 50.0 * max(abs(r_range[0]), abs(r_range[1]))

    try:
        if c == 0.0:
            fps = []
        elif kind == LAGRANGIAN:
            fps = fpmod.lagrangian_fixed_points(curv, c, m)
        else:
            fps = fpmod.eulerian_fixed_points(curv, c, m)
    except (DomainError, ValueError):
        fps = []

    classes = [[INVALID] * nnu for _ in range(nr)]
    min_r = np.full((nr, nnu), np.nan)
    max_r = np.full((nr, nnu), np.nan)
    period = np.full((nr, nnu), np.nan)

    for i, r0 in enumerate(r_values):
        for j, nu0 in enumerate(nu_values):
            if not _cell_valid(kind, r0, nu0, curv):
                continue
            try:
                series = _combined_cell_series(kind, r0, nu0, curv, c, m,
                                               t_span, ctrl, escape_radius)
            except (DomainError, SingularConfiguration):
                continue
            tag = classify_trajectory(series, fps, tol=1e-6)
            classes[i][j] = tag
            min_r[i, j] = series.r.min()
            max_r[i, j] = series.r.max()
            if tag == PERIODIC:
                p = detect_period(series, max(1e-6, 1e-3 * np.ptp(series.r)))
                if p is not None:
                    period[i, j] = p
    return PortraitData(kind, curv.kappa, c, m, r_values, nu_values,
                        classes, min_r, max_r, period, t_span)