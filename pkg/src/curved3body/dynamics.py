"""Full three-body equations of motion on a curved surface.

State variables are velocities, not momenta: the second-order form of the
equations already has the constraint force folded in, and masses enter only
through the source terms.  The integrator projects every accepted step back
onto the surface (radial rescale) and back into the tangent space, so the
holonomic constraint never drifts.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .geometry import MANIFOLD_TOL, Curvature, manifold_residual, signed_cross, signed_dot

T_END = "T_END"
COLLISION_APPROACH = "COLLISION_APPROACH"
STEP_BUDGET = "STEP_BUDGET"
BOUNDARY_APPROACH = "BOUNDARY_APPROACH"
ESCAPE = "ESCAPE"

_REASONS = {
    kernels.STATUS_T_END: T_END,
    kernels.STATUS_COLLISION: COLLISION_APPROACH,
    kernels.STATUS_STEP_BUDGET: STEP_BUDGET,
    kernels.STATUS_BOUNDARY: BOUNDARY_APPROACH,
    kernels.STATUS_ESCAPE: ESCAPE,
}


class SingularConfiguration(RuntimeError):
    """A pair of bodies is at (or numerically too close to) a singularity."""


class StepUnderflow(RuntimeError):
    """The step controller fell below the minimum step size.

    The partial trajectory accumulated before the failure is attached as
    the ``partial`` attribute when available.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass
class Body:
    mass: float
    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        self.q = np.asarray(self.q, dtype=float)
        self.v = np.asarray(self.v, dtype=float)


@dataclass
class SystemState:
    t: float
    curv: Curvature
    bodies: list[Body]

    def __post_init__(self):
        if len(self.bodies) != 3:
            raise ValueError(f"expected exactly 3 bodies, got {len(self.bodies)}")

    @property
    def masses(self) -> np.ndarray:
        return np.array([b.mass for b in self.bodies])

    def validate(self, tol: float = MANIFOLD_TOL) -> None:
        """Check the on-surface and tangency constraints for every body."""
        for i, b in enumerate(self.bodies):
            res = manifold_residual(b.q, self.curv)
            if abs(res) > tol:
                raise ValueError(f"body {i} off the surface: residual {res:.3e}")
            qv = signed_dot(b.q, b.v, self.curv.sigma)
            if abs(qv) > tol:
                raise ValueError(f"body {i} velocity not tangent: q.v = {qv:.3e}")
            if self.curv.kappa < 0 and b.q[2] <= 0:
                raise ValueError(f"body {i} not on the upper sheet: z = {b.q[2]}")

    def to_vector(self) -> np.ndarray:
        y = np.empty(18)
        for i, b in enumerate(self.bodies):
            y[3 * i : 3 * i + 3] = b.q
            y[9 + 3 * i : 12 + 3 * i] = b.v
        return y

    @classmethod
    def from_vector(cls, t: float, curv: Curvature, masses, y) -> "SystemState":
        y = np.asarray(y, dtype=float)
        bodies = [
            Body(float(masses[i]), y[3 * i : 3 * i + 3].copy(), y[9 + 3 * i : 12 + 3 * i].copy())
            for i in range(3)
        ]
        return cls(float(t), curv, bodies)


@dataclass
class ConservedLedger:
    energy: float
    angular_momentum: np.ndarray


@dataclass
class StepControl:
    """Adaptive step controller settings.

    ``eps_sing`` guards the pair quantity sigma - sigma*(kappa qi.qj)^2;
    integration stops (COLLISION_APPROACH) once any pair falls below it.
    """

    initial_step: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 1_000_000
    eps_sing: float = 1e-8
    max_step: float = math.inf

    def __post_init__(self):
        for name in ("initial_step", "rtol", "atol", "max_steps", "eps_sing", "max_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class TrajectorySeries:
    states: list[SystemState]
    ledgers: list[ConservedLedger]
    reason: str = T_END

    def __post_init__(self):
        ts = self.times
        if len(ts) > 1 and not np.all(np.diff(ts) > 0):
            raise ValueError("sample times must be strictly increasing")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def __len__(self) -> int:
        return len(self.states)

    def to_csv(self, path, extra: dict | None = None) -> None:
        s0 = self.states[0]
        cfg = {**(extra or {}), "kappa": s0.curv.kappa,
               "masses": list(map(float, s0.masses)), "reason": self.reason}
        cols = ["t"]
        for i in (1, 2, 3):
            cols += [f"x{i}", f"y{i}", f"z{i}", f"vx{i}", f"vy{i}", f"vz{i}"]
        cols += ["energy", "cx", "cy", "cz"]
        with open(path, "w") as f:
            f.write("# config: " + json.dumps(cfg) + "\n")
            f.write(",".join(cols) + "\n")
            for st, led in zip(self.states, self.ledgers):
                row = [st.t]
                for b in st.bodies:
                    row += [*b.q, *b.v]
                row += [led.energy, *led.angular_momentum]
                f.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "TrajectorySeries":
        with open(path) as f:
            header = f.readline()
            cfg = json.loads(header.split("# config:", 1)[1])
            f.readline()  # column names
            curv = Curvature(cfg["kappa"])
            states, ledgers = [], []
            for line in f:
                vals = [float(v) for v in line.split(",")]
                t = vals[0]
                bodies = [
                    Body(cfg["masses"][i], np.array(vals[1 + 6 * i : 4 + 6 * i]), np.array(vals[4 + 6 * i : 7 + 6 * i]))
                    for i in range(3)
                ]
                states.append(SystemState(t, curv, bodies))
                ledgers.append(ConservedLedger(vals[19], np.array(vals[20:23])))
        return cls(states, ledgers, cfg["reason"])

    def to_jsonl(self, path, extra: dict | None = None) -> None:
        s0 = self.states[0]
        cfg = {
            **(extra or {}),
            "kind": "trajectory",
            "kappa": s0.curv.kappa,
            "masses": list(map(float, s0.masses)),
            "reason": self.reason,
        }
        with open(path, "w") as f:
            f.write(json.dumps(cfg) + "\n")
            for st, led in zip(self.states, self.ledgers):
                rec = {
                    "t": st.t,
                    "bodies": [[*map(float, b.q), *map(float, b.v)] for b in st.bodies],
                    "energy": led.energy,
                    "angular_momentum": list(map(float, led.angular_momentum)),
                }
                f.write(json.dumps(rec) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "TrajectorySeries":
        with open(path) as f:
            cfg = json.loads(f.readline())
            curv = Curvature(cfg["kappa"])
            states, ledgers = [], []
            for line in f:
                rec = json.loads(line)
                bodies = [
                    Body(cfg["masses"][i], np.array(rec["bodies"][i][:3]), np.array(rec["bodies"][i][3:]))
                    for i in range(3)
                ]
                states.append(SystemState(rec["t"], curv, bodies))
                ledgers.append(ConservedLedger(rec["energy"], np.array(rec["angular_momentum"])))
        return cls(states, ledgers, cfg["reason"])


def _pair_quantities(state: SystemState):
    curv = state.curv
    k, sg = curv.kappa, curv.sigma
    qs = [b.q for b in state.bodies]
    kqq = [k * signed_dot(q, q, sg) for q in qs]
    kij = {}
    den = {}
    for i in range(3):
        for j in range(i + 1, 3):
            kij[i, j] = k * signed_dot(qs[i], qs[j], sg)
            den[i, j] = sg * kqq[i] * kqq[j] - sg * kij[i, j] ** 2
    return kqq, kij, den


def _check_singular(state: SystemState, eps_sing: float, den) -> None:
    for (i, j), d in den.items():
        if d <= eps_sing:
            raise SingularConfiguration(
                f"pair ({i + 1},{j + 1}) is within {eps_sing} of a singular "
                f"configuration (denominator {d:.3e})"
            )


def force_function(state: SystemState, eps_sing: float = 1e-8) -> float:
    """Cotangent-potential force function U over the three pairs."""
    m = state.masses
    k = state.curv.kappa
    _, kij, den = _pair_quantities(state)
    _check_singular(state, eps_sing, den)
    u = 0.0
    for (i, j), d in den.items():
        u += m[i] * m[j] * abs(k) ** 0.5 * kij[i, j] / math.sqrt(d)
    return u


def force_gradient(state: SystemState, i: int, eps_sing: float = 1e-8) -> np.ndarray:
    """Constrained gradient of the force function with respect to body i."""
    m = state.masses
    k = state.curv.kappa
    qs = [b.q for b in state.bodies]
    kqq, kij, den = _pair_quantities(state)
    _check_singular(state, eps_sing, den)
    grad = np.zeros(3)
    for j in range(3):
        if j == i:
            continue
        a, b = min(i, j), max(i, j)
        d = den[a, b]
        grad += (
            m[i] * m[j] * abs(k) ** 1.5 * kqq[j]
            * (kqq[i] * qs[j] - kij[a, b] * qs[i])
            / d ** 1.5
        )
    return grad


def accelerations(state: SystemState, eps_sing: float = 1e-8) -> np.ndarray:
    """Second-order right-hand side, one row per body (constraint term included)."""
    m = state.masses
    curv = state.curv
    k, sg = curv.kappa, curv.sigma
    qs = [b.q for b in state.bodies]
    vs = [b.v for b in state.bodies]
    _, kij, den = _pair_quantities(state)
    _check_singular(state, eps_sing, den)
    acc = np.empty((3, 3))
    for i in range(3):
        a = -k * signed_dot(vs[i], vs[i], sg) * qs[i]
        for j in range(3):
            if j == i:
                continue
            x, y = min(i, j), max(i, j)
            kk = kij[x, y]
            a = a + m[j] * abs(k) ** 1.5 * (qs[j] - kk * qs[i]) / (sg - sg * kk * kk) ** 1.5
        acc[i] = a
    return acc


def energy(state: SystemState, eps_sing: float = 1e-8) -> float:
    """Total energy T - U expressed in velocities."""
    t = 0.0
    sg = state.curv.sigma
    k = state.curv.kappa
    for b in state.bodies:
        t += 0.5 * b.mass * signed_dot(b.v, b.v, sg) * (k * signed_dot(b.q, b.q, sg))
    return t - force_function(state, eps_sing)


def angular_momentum(state: SystemState) -> np.ndarray:
    """Total angular momentum, the signed cross product of q against m*v."""
    total = np.zeros(3)
    sg = state.curv.sigma
    for b in state.bodies:
        total += signed_cross(b.q, b.mass * b.v, sg)
    return total


def integrate(state: SystemState, t_end: float, ctrl: StepControl | None = None,
              t_eval=None) -> TrajectorySeries:
    """Adaptive integration of the full system up to t_end.

    Every accepted step is projected back onto the surface and tangent
    space.  Samples are the accepted steps, or exactly the ``t_eval``
    times when given.  Raises StepUnderflow if the controller stalls.
    """
    if ctrl is None:
        ctrl = StepControl()
    if t_end <= state.t:
        raise ValueError(f"t_end ({t_end}) must exceed the state time ({state.t})")
    state.validate()
    status, ts, ys, _ = kernels.integrate_full(
        state.to_vector(), state.masses, state.curv.kappa, state.t, t_end,
        ctrl.initial_step, ctrl.rtol, ctrl.atol, ctrl.max_steps, ctrl.eps_sing,
        ctrl.max_step, t_eval,
    )
    series = _build_series(state, ts, ys, status, ctrl.eps_sing)
    if status == kernels.STATUS_UNDERFLOW:
        raise StepUnderflow("step size fell below 1e-14", partial=series)
    return series


def _build_series(state0: SystemState, ts, ys, status, eps_sing) -> TrajectorySeries:
    masses = state0.masses
    curv = state0.curv
    states, ledgers = [], []
    for t, y in zip(ts, ys):
        st = SystemState.from_vector(t, curv, masses, y)
        states.append(st)
        try:
            h = energy(st, eps_sing)
        except SingularConfiguration:
            h = math.nan
        ledgers.append(ConservedLedger(h, angular_momentum(st)))
    return TrajectorySeries(states, ledgers, _REASONS.get(status, T_END))
