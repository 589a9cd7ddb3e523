"""Homographic ansatz families and their reduced equations.

Three families are covered: the equilateral (Lagrangian) triangle, the
geodesic (Eulerian) line through the pole, and the hyperbolically rotating
geodesic available only on the negatively curved surface.  Each family
embeds a low-dimensional state into a full three-body state, and the first
two reduce to a planar (r, nu) system after eliminating the rotation angle
through w = c/r^2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .dynamics import (
    T_END,
    Body,
    SingularConfiguration,
    StepControl,
    StepUnderflow,
    SystemState,
    _REASONS,
)
from .geometry import Curvature

LAGRANGIAN = "LAGRANGIAN"
EULERIAN = "EULERIAN"
REDUCED_KINDS = (LAGRANGIAN, EULERIAN)

_KIND_CODES = {LAGRANGIAN: kernels.KIND_LAGRANGIAN, EULERIAN: kernels.KIND_EULERIAN}

_BOUNDARY_BAND = 1e-12


class DomainError(ValueError):
    """State outside the valid domain of an ansatz or reduced system."""


@dataclass
class ReducedState:
    """Size r, its rate nu, rotation angle omega, angular constant c."""

    r: float
    nu: float
    omega: float
    c: float

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError(f"size must be positive, got r={self.r}")


@dataclass
class HyperbolicState:
    """Size rho and hyperbolic angle omega with their rates (kappa < 0 only)."""

    rho: float
    rho_dot: float
    omega: float
    omega_dot: float


@dataclass
class ReducedSeries:
    """Sampled reduced trajectory (t, r, nu, omega) with a termination tag."""

    kind: str
    kappa: float
    c: float
    m: float
    t: np.ndarray
    r: np.ndarray
    nu: np.ndarray
    omega: np.ndarray
    reason: str = T_END

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self, path, extra: dict | None = None) -> None:
        cfg = {**(extra or {}), "kind": self.kind, "kappa": self.kappa,
               "c": self.c, "m": self.m, "reason": self.reason}
        with open(path, "w") as f:
            f.write("# config: " + json.dumps(cfg) + "\n")
            f.write("t,r,nu,omega\n")
            for row in zip(self.t, self.r, self.nu, self.omega):
                f.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "ReducedSeries":
        with open(path) as f:
            cfg = json.loads(f.readline().split("# config:", 1)[1])
            f.readline()
            data = np.array([[float(v) for v in line.split(",")] for line in f])
        if data.size == 0:
            data = data.reshape(0, 4)
        return cls(cfg["kind"], cfg["kappa"], cfg["c"], cfg["m"],
                   data[:, 0], data[:, 1], data[:, 2], data[:, 3], cfg["reason"])

    def to_jsonl(self, path, extra: dict | None = None) -> None:
        cfg = {**(extra or {}), "kind": "reduced", "reduced_kind": self.kind,
               "kappa": self.kappa, "c": self.c, "m": self.m, "reason": self.reason}
        with open(path, "w") as f:
            f.write(json.dumps(cfg) + "\n")
            for t, r, nu, om in zip(self.t, self.r, self.nu, self.omega):
                f.write(json.dumps({"t": t, "r": r, "nu": nu, "omega": om}) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "ReducedSeries":
        with open(path) as f:
            cfg = json.loads(f.readline())
            rows = [json.loads(line) for line in f]
        arr = lambda key: np.array([row[key] for row in rows])
        return cls(cfg["reduced_kind"], cfg["kappa"], cfg["c"], cfg["m"],
                   arr("t"), arr("r"), arr("nu"), arr("omega"), cfg["reason"])


def _check_kind(kind: str) -> int:
    if kind not in _KIND_CODES:
        raise ValueError(f"kind must be one of {REDUCED_KINDS}, got {kind!r}")
    return _KIND_CODES[kind]


def _height(r: float, curv: Curvature) -> float:
    """z on the surface at cylindrical radius r, upper branch."""
    z2 = curv.sigma * (1.0 - curv.kappa * r * r) / curv.kappa
    if z2 < 0:
        raise DomainError(
            f"radius {r} exceeds the surface bound for kappa={curv.kappa}"
        )
    return math.sqrt(z2)


def _height_rate(r: float, nu: float, z: float, curv: Curvature) -> float:
    if z > 0:
        return -curv.sigma * r * nu / z
    if nu == 0.0:
        return 0.0
    raise DomainError("cannot move radially while on the equator (z=0)")


def embed_lagrangian(rs: ReducedState, curv: Curvature, m: float) -> SystemState:
    """Equal masses at the vertices of a rotating equilateral triangle."""
    z = _height(rs.r, curv)
    zdot = _height_rate(rs.r, rs.nu, z, curv)
    w = rs.c / rs.r**2
    bodies = []
    for k in range(3):
        th = rs.omega + 2.0 * math.pi * k / 3.0
        ct, st = math.cos(th), math.sin(th)
        q = np.array([rs.r * ct, rs.r * st, z])
        v = np.array([rs.nu * ct - rs.r * w * st, rs.nu * st + rs.r * w * ct, zdot])
        bodies.append(Body(m, q, v))
    return SystemState(0.0, curv, bodies)


def embed_eulerian(rs: ReducedState, curv: Curvature, m: float) -> SystemState:
    """One mass fixed at the pole, two rotating symmetrically about it."""
    z = _height(rs.r, curv)
    zdot = _height_rate(rs.r, rs.nu, z, curv)
    w = rs.c / rs.r**2
    pole = (curv.sigma * curv.kappa) ** -0.5
    ct, st = math.cos(rs.omega), math.sin(rs.omega)
    q2 = np.array([rs.r * ct, rs.r * st, z])
    v2 = np.array([rs.nu * ct - rs.r * w * st, rs.nu * st + rs.r * w * ct, zdot])
    bodies = [
        Body(m, np.array([0.0, 0.0, pole]), np.zeros(3)),
        Body(m, q2, v2),
        Body(m, np.array([-q2[0], -q2[1], z]), np.array([-v2[0], -v2[1], zdot])),
    ]
    return SystemState(0.0, curv, bodies)


def embed_hyperbolic(hs: HyperbolicState, curv: Curvature, m: float) -> SystemState:
    """Geodesic configuration rotating by a hyperbolic angle (kappa < 0)."""
    if curv.kappa >= 0:
        raise DomainError("hyperbolic configurations require negative curvature")
    x2 = hs.rho**2 + 1.0 / curv.kappa
    if x2 < 0:
        raise DomainError(
            f"rho={hs.rho} is below the bound |kappa|**-0.5 = {curv.scale}"
        )
    x = math.sqrt(x2)
    if x > 0:
        xdot = hs.rho * hs.rho_dot / x
    elif hs.rho_dot == 0.0:
        xdot = 0.0
    else:
        raise DomainError("cannot move radially from rho = |kappa|**-0.5")
    sh, ch = math.sinh(hs.omega), math.cosh(hs.omega)
    k12 = curv.scale
    w = hs.omega_dot
    bodies = [
        Body(m, np.array([0.0, k12 * sh, k12 * ch]), np.array([0.0, k12 * w * ch, k12 * w * sh])),
        Body(m, np.array([x, hs.rho * sh, hs.rho * ch]),
             np.array([xdot, hs.rho_dot * sh + hs.rho * w * ch, hs.rho_dot * ch + hs.rho * w * sh])),
        Body(m, np.array([-x, hs.rho * sh, hs.rho * ch]),
             np.array([-xdot, hs.rho_dot * sh + hs.rho * w * ch, hs.rho_dot * ch + hs.rho * w * sh])),
    ]
    return SystemState(0.0, curv, bodies)


def _rhs_domain(r: float, nu: float, curv: Curvature):
    """Common domain handling; returns 1 - kappa r^2 or None at the boundary point."""
    if r <= 0:
        raise DomainError(f"size must be positive, got r={r}")
    one = 1.0 - curv.kappa * r * r
    if curv.kappa > 0:
        if one < -_BOUNDARY_BAND:
            raise DomainError(
                f"r={r} lies beyond the equator radius {curv.scale}"
            )
        if abs(one) <= _BOUNDARY_BAND:
            if nu != 0.0:
                raise DomainError(
                    "the vector field diverges on the equator line for nu != 0"
                )
            return None
    return one


def lagrangian_rhs(r: float, nu: float, c: float, curv: Curvature, m: float):
    """(r_dot, nu_dot) for the reduced equilateral system.

    At the boundary point (kappa**-0.5, 0) the indeterminate middle term
    is taken as zero, making it a genuine fixed point.
    """
    one = _rhs_domain(r, nu, curv)
    s = 12.0 - 9.0 * curv.kappa * r * r
    if s <= 0:
        raise SingularConfiguration(f"12 - 9 kappa r^2 = {s} <= 0 at r={r}")
    if one is None:
        return nu, 0.0
    nudot = (c * c * one / r**3
             - curv.kappa * r * nu * nu / one
             - 24.0 * m * one / (r * r * s ** 1.5))
    return nu, nudot


def eulerian_rhs(r: float, nu: float, c: float, curv: Curvature, m: float):
    """(r_dot, nu_dot) for the reduced geodesic system.

    Unlike the equilateral case the potential itself diverges on the
    equator, so there is no boundary fixed point there.
    """
    one = _rhs_domain(r, nu, curv)
    if one is None or one <= 0:
        raise SingularConfiguration(
            f"the geodesic potential diverges as r -> {curv.scale} (r={r})"
        )
    nudot = (c * c * one / r**3
             - curv.kappa * r * nu * nu / one
             - m * (5.0 - 4.0 * curv.kappa * r * r) / (4.0 * r * r * math.sqrt(one)))
    return nu, nudot


def integrate_reduced(kind: str, rs: ReducedState, curv: Curvature, m: float,
                      t_end: float, ctrl: StepControl | None = None, t_eval=None,
                      escape_radius: float | None = None) -> ReducedSeries:
    """Adaptive integration of (r, nu) with omega carried along.

    Terminates at t_end, near the r=0 or (kappa>0) equator boundaries
    (reason BOUNDARY_APPROACH), on the step budget, or past
    ``escape_radius`` with growing r (reason ESCAPE).
    """
    code = _check_kind(kind)
    if ctrl is None:
        ctrl = StepControl()
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    k = curv.kappa
    r0 = rs.r
    boundary_pin = False
    if k > 0:
        one0 = 1.0 - k * r0 * r0
        if one0 < -_BOUNDARY_BAND:
            raise DomainError(f"r={r0} lies beyond the equator radius {curv.scale}")
        if abs(one0) <= _BOUNDARY_BAND:
            if kind == EULERIAN:
                raise SingularConfiguration(
                    "geodesic configurations are singular on the equator"
                )
            if rs.nu != 0.0:
                raise DomainError(
                    "the vector field diverges on the equator line for nu != 0"
                )
            boundary_pin = True

    r_floor = 1e-6 * min(r0, curv.scale)
    if k > 0 and not boundary_pin:
        r_ceil = curv.scale * (1.0 - 1e-8)
    else:
        r_ceil = np.inf
    esc = -1.0 if escape_radius is None else float(escape_radius)

    y0 = np.array([rs.r, rs.nu, rs.omega], dtype=float)
    status, ts, ys, _ = kernels.integrate_reduced(
        code, y0, float(rs.c), float(k), float(m), 0.0, float(t_end),
        ctrl.initial_step, ctrl.rtol, ctrl.atol, ctrl.max_steps,
        r_floor, r_ceil, esc, ctrl.max_step, t_eval,
    )
    series = ReducedSeries(kind, k, rs.c, m, ts, ys[:, 0], ys[:, 1], ys[:, 2],
                           _REASONS[status] if status != kernels.STATUS_UNDERFLOW
                           else T_END)
    if status == kernels.STATUS_UNDERFLOW:
        err = StepUnderflow(f"step size underflow at t={ts[-1] if len(ts) else 0.0}")
        err.partial = series
        raise err
    return series


def lagrangian_residuals(r: float, r_dot: float, r_ddot: float, omega_dot: float,
                         omega_ddot: float, curv: Curvature, m: float):
    """Residual pair (A, B); the equilateral ansatz solves the equations of
    motion exactly when both vanish."""
    one = _residual_domain(r, curv)
    s = 12.0 - 9.0 * curv.kappa * r * r
    a = (r_ddot - r * one * omega_dot**2 + curv.kappa * r * r_dot**2 / one
         + 24.0 * m * one / (r * r * s ** 1.5))
    b = r * omega_ddot + 2.0 * r_dot * omega_dot
    return a, b


def eulerian_residuals(r: float, r_dot: float, r_ddot: float, omega_dot: float,
                       omega_ddot: float, curv: Curvature, m: float):
    """Residual pair (C, D) for the rotating geodesic ansatz."""
    one = _residual_domain(r, curv)
    if one <= 0:
        raise DomainError(f"r={r} is outside the geodesic potential domain")
    c = (r_ddot - r * one * omega_dot**2 + curv.kappa * r * r_dot**2 / one
         + m * (5.0 - 4.0 * curv.kappa * r * r) / (4.0 * r * r * math.sqrt(one)))
    d = r * omega_ddot + 2.0 * r_dot * omega_dot
    return c, d


def unequal_mass_residuals(r: float, r_dot: float, r_ddot: float, omega_dot: float,
                           omega_ddot: float, curv: Curvature,
                           m1: float, m2: float, m3: float) -> np.ndarray:
    """Six residuals of the equilateral system with distinct masses.

    The first three (pair sums m_i+m_j) share one radial equation shape;
    the last three carry the 4*sqrt(3)(m_i-m_j) obstruction terms whose
    simultaneous vanishing forces all masses equal.
    """
    one = _residual_domain(r, curv)
    s = 12.0 - 9.0 * curv.kappa * r * r
    if s <= 0:
        raise DomainError(f"12 - 9 kappa r^2 = {s} <= 0 at r={r}")
    radial = (r_ddot - r * one * omega_dot**2 + curv.kappa * r * r_dot**2 / one)
    tangential = r * omega_ddot + 2.0 * r_dot * omega_dot
    pot = one / (r * r * s ** 1.5)
    obst = 4.0 * math.sqrt(3.0) / (r * r * s ** 1.5)
    out = np.empty(6)
    for idx, (mi, mj) in enumerate(((m1, m2), (m2, m3), (m3, m1))):
        out[idx] = radial + 12.0 * (mi + mj) * pot
        out[3 + idx] = tangential - obst * (mi - mj)
    return out


def hyperbolic_residuals(rho: float, rho_dot: float, rho_ddot: float,
                         omega_dot: float, omega_ddot: float,
                         curv: Curvature, m: float):
    """Residual pair (E, F) for the hyperbolically rotating geodesic."""
    if curv.kappa >= 0:
        raise DomainError("hyperbolic configurations require negative curvature")
    if rho <= 0:
        raise DomainError(f"size must be positive, got rho={rho}")
    one = 1.0 + curv.kappa * rho * rho
    if abs(one) <= _BOUNDARY_BAND:
        raise DomainError(f"rho={rho} sits on the singular circle |kappa|**-0.5")
    if rho * rho + 1.0 / curv.kappa < 0:
        raise DomainError(
            f"rho={rho} is below the bound |kappa|**-0.5 = {curv.scale}"
        )
    e = (rho_ddot + rho * one * omega_dot**2 - curv.kappa * rho * rho_dot**2 / one
         + m * (1.0 - 4.0 * curv.kappa * rho * rho)
         / (4.0 * rho * rho * math.sqrt(abs(one))))
    f = rho * omega_ddot + 2.0 * rho_dot * omega_dot
    return e, f


def hyperbolic_re_rate(rho: float, curv: Curvature, m: float) -> float:
    """Hyperbolic-rotation rate that balances the geodesic configuration.

    Solves E = 0 with constant rho for omega_dot; the returned rate keeps
    rho fixed while the whole configuration slides along its geodesic.
    """
    if curv.kappa >= 0:
        raise DomainError("hyperbolic configurations require negative curvature")
    one = 1.0 + curv.kappa * rho * rho
    if rho <= 0 or one >= 0:
        raise DomainError(
            f"rho must exceed |kappa|**-0.5 = {curv.scale}, got {rho}"
        )
    num = m * (1.0 - 4.0 * curv.kappa * rho * rho)
    return math.sqrt(num / (4.0 * rho**3 * abs(one) ** 1.5))


def _residual_domain(r: float, curv: Curvature) -> float:
    if r <= 0:
        raise DomainError(f"size must be positive, got r={r}")
    one = 1.0 - curv.kappa * r * r
    if curv.kappa > 0 and one <= _BOUNDARY_BAND:
        raise DomainError(
            f"residuals are undefined on or beyond the equator (r={r})"
        )
    return one
