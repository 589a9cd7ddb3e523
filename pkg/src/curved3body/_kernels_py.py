"""Pure-Python integration kernels (fallback backend).

Adaptive Fehlberg 7(8) loops for the full three-body system and for the
reduced (r, nu, omega) systems.  Kept in lockstep with ``_kernels.pyx``;
the compiled module is preferred at import time when available.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

# termination status codes shared by both backends
STATUS_T_END = 0
STATUS_COLLISION = 1
STATUS_STEP_BUDGET = 2
STATUS_UNDERFLOW = 3
STATUS_BOUNDARY = 4
STATUS_ESCAPE = 5

KIND_LAGRANGIAN = 0
KIND_EULERIAN = 1

_H_MIN = 1e-14

# Fehlberg 7(8) coefficients; the 8th-order weights propagate the solution
# and the error estimate is (41/840) h (k0 + k10 - k11 - k12).
_C = (0.0, 2 / 27, 1 / 9, 1 / 6, 5 / 12, 1 / 2, 5 / 6, 1 / 6, 2 / 3, 1 / 3, 1.0, 0.0, 1.0)
_A = (
    (),
    (2 / 27,),
    (1 / 36, 1 / 12),
    (1 / 24, 0.0, 1 / 8),
    (5 / 12, 0.0, -25 / 16, 25 / 16),
    (1 / 20, 0.0, 0.0, 1 / 4, 1 / 5),
    (-25 / 108, 0.0, 0.0, 125 / 108, -65 / 27, 125 / 54),
    (31 / 300, 0.0, 0.0, 0.0, 61 / 225, -2 / 9, 13 / 900),
    (2.0, 0.0, 0.0, -53 / 6, 704 / 45, -107 / 9, 67 / 90, 3.0),
    (-91 / 108, 0.0, 0.0, 23 / 108, -976 / 135, 311 / 54, -19 / 60, 17 / 6, -1 / 12),
    (2383 / 4100, 0.0, 0.0, -341 / 164, 4496 / 1025, -301 / 82, 2133 / 4100, 45 / 82, 45 / 164, 18 / 41),
    (3 / 205, 0.0, 0.0, 0.0, 0.0, -6 / 41, -3 / 205, -3 / 41, 3 / 41, 6 / 41, 0.0),
    (-1777 / 4100, 0.0, 0.0, -341 / 164, 4496 / 1025, -289 / 82, 2193 / 4100, 51 / 82, 33 / 164, 12 / 41, 0.0, 1.0),
)
_B8 = (0.0, 0.0, 0.0, 0.0, 0.0, 34 / 105, 9 / 35, 9 / 35, 9 / 280, 9 / 280, 0.0, 41 / 840, 41 / 840)
_ERR_W = 41 / 840


def _rhs_full(y, out, kappa, sigma, sk, m0, m1, m2):
    """Second-order system in first-order form; False when a pair degenerates."""
    masses = (m0, m1, m2)
    q = ((y[0], y[1], y[2]), (y[3], y[4], y[5]), (y[6], y[7], y[8]))
    v = ((y[9], y[10], y[11]), (y[12], y[13], y[14]), (y[15], y[16], y[17]))
    kdot = [[0.0] * 3 for _ in range(3)]
    dpw = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            kij = kappa * (q[i][0] * q[j][0] + q[i][1] * q[j][1] + sigma * q[i][2] * q[j][2])
            dij = sigma - sigma * kij * kij
            if dij <= 1e-300:
                return False
            w = dij * math.sqrt(dij)
            kdot[i][j] = kdot[j][i] = kij
            dpw[i][j] = dpw[j][i] = w
    for i in range(3):
        vi = v[i]
        vv = kappa * (vi[0] * vi[0] + vi[1] * vi[1] + sigma * vi[2] * vi[2])
        ax = -vv * q[i][0]
        ay = -vv * q[i][1]
        az = -vv * q[i][2]
        for j in range(3):
            if j == i:
                continue
            f = masses[j] * sk / dpw[i][j]
            kij = kdot[i][j]
            ax += f * (q[j][0] - kij * q[i][0])
            ay += f * (q[j][1] - kij * q[i][1])
            az += f * (q[j][2] - kij * q[i][2])
        out[9 + 3 * i] = ax
        out[10 + 3 * i] = ay
        out[11 + 3 * i] = az
    for k in range(9):
        out[k] = y[9 + k]
    return True


def _min_pair_gap(y, kappa, sigma):
    """Smallest sigma - sigma*(kappa qi.qj)^2 over the three pairs."""
    q = ((y[0], y[1], y[2]), (y[3], y[4], y[5]), (y[6], y[7], y[8]))
    best = math.inf
    for i in range(3):
        for j in range(i + 1, 3):
            kij = kappa * (q[i][0] * q[j][0] + q[i][1] * q[j][1] + sigma * q[i][2] * q[j][2])
            dij = sigma - sigma * kij * kij
            if dij < best:
                best = dij
    return best


def _project_full(y, kappa, sigma):
    for i in range(3):
        b = 3 * i
        qx, qy, qz = y[b], y[b + 1], y[b + 2]
        s = kappa * (qx * qx + qy * qy + sigma * qz * qz)
        if s <= 0.0:
            return False
        inv = 1.0 / math.sqrt(s)
        qx *= inv
        qy *= inv
        qz *= inv
        y[b], y[b + 1], y[b + 2] = qx, qy, qz
        vb = 9 + 3 * i
        vx, vy, vz = y[vb], y[vb + 1], y[vb + 2]
        qq = qx * qx + qy * qy + sigma * qz * qz
        qv = qx * vx + qy * vy + sigma * qz * vz
        f = qv / qq
        y[vb] = vx - f * qx
        y[vb + 1] = vy - f * qy
        y[vb + 2] = vz - f * qz
    return True


def _attempt_step(rhs, y, h, n, work):
    """One embedded step; returns (ok, y8, err_norm_unscaled k-combination)."""
    k, yi = work
    if not rhs(y, k[0]):
        return False, None, None
    for i in range(1, 13):
        ai = _A[i]
        for c in range(n):
            s = 0.0
            for j in range(i):
                aij = ai[j]
                if aij != 0.0:
                    s += aij * k[j][c]
            yi[c] = y[c] + h * s
        if not rhs(yi, k[i]):
            return False, None, None
    y8 = [0.0] * n
    err = [0.0] * n
    for c in range(n):
        s = 0.0
        for i in range(13):
            bi = _B8[i]
            if bi != 0.0:
                s += bi * k[i][c]
        y8[c] = y[c] + h * s
        err[c] = _ERR_W * h * (k[0][c] + k[10][c] - k[11][c] - k[12][c])
        if not math.isfinite(y8[c]):
            return False, None, None
    return True, y8, err


def _error_norm(y, y8, err, n, rtol, atol):
    s = 0.0
    for c in range(n):
        sc = atol + rtol * max(abs(y[c]), abs(y8[c]))
        e = err[c] / sc
        s += e * e
    return math.sqrt(s / n)


def integrate_full(y0, masses, kappa, t0, t_end, h0, rtol, atol, max_steps,
                   eps_sing, max_step, t_eval=None):
    """Integrate the full system; returns (status, times, states, attempts)."""
    sigma = 1.0 if kappa > 0 else -1.0
    sk = abs(kappa) ** 1.5
    m0, m1, m2 = float(masses[0]), float(masses[1]), float(masses[2])

    def rhs(y, out):
        return _rhs_full(y, out, kappa, sigma, sk, m0, m1, m2)

    def on_accept(y):
        if not _project_full(y, kappa, sigma):
            return STATUS_UNDERFLOW
        if _min_pair_gap(y, kappa, sigma) <= eps_sing:
            return STATUS_COLLISION
        return -1

    y = [float(v) for v in y0]
    if _min_pair_gap(y, kappa, sigma) <= eps_sing:
        return STATUS_COLLISION, np.array([t0]), np.array([y]), 0
    return _drive(rhs, on_accept, y, 18, t0, t_end, h0, rtol, atol,
                  max_steps, max_step, t_eval)


def integrate_reduced(kind, y0, c, kappa, m, t0, t_end, h0, rtol, atol, max_steps,
                      r_floor, r_ceil, escape_radius, max_step, t_eval=None):
    """Integrate (r, nu, omega); returns (status, times, states, attempts)."""

    def rhs(y, out):
        r, nu = y[0], y[1]
        if r <= 0.0:
            return False
        r2 = r * r
        one = 1.0 - kappa * r2
        if kind == KIND_LAGRANGIAN:
            s = 12.0 - 9.0 * kappa * r2
            if s <= 0.0:
                return False
            pot = 24.0 * m * one / (r2 * s * math.sqrt(s))
        else:
            if one <= 0.0:
                return False
            pot = m * (5.0 - 4.0 * kappa * r2) / (4.0 * r2 * math.sqrt(one))
        if one != 0.0:
            mid = kappa * r * nu * nu / one
        elif nu == 0.0:
            mid = 0.0
        else:
            return False
        out[0] = nu
        out[1] = c * c * one / (r * r2) - mid - pot
        out[2] = c / r2
        return True

    def on_accept(y):
        r, nu = y[0], y[1]
        if r <= r_floor or r >= r_ceil:
            return STATUS_BOUNDARY
        if escape_radius > 0.0 and r >= escape_radius and nu > 0.0:
            return STATUS_ESCAPE
        return -1

    y = [float(v) for v in y0]
    return _drive(rhs, on_accept, y, 3, t0, t_end, h0, rtol, atol,
                  max_steps, max_step, t_eval)


def _drive(rhs, on_accept, y, n, t0, t_end, h0, rtol, atol, max_steps, max_step, t_eval):
    work = ([[0.0] * n for _ in range(13)], [0.0] * n)
    span = t_end - t0
    h = min(h0, span, max_step)
    t = t0
    ts, ys = [], []
    if t_eval is None:
        ts.append(t)
        ys.append(list(y))
        ev = None
        ev_idx = 0
    else:
        ev = [float(v) for v in t_eval]
        ev_idx = 0
        while ev_idx < len(ev) and ev[ev_idx] <= t0 + 1e-15 * max(1.0, abs(t0)):
            ts.append(ev[ev_idx])
            ys.append(list(y))
            ev_idx += 1
    status = STATUS_T_END
    attempts = 0
    tiny = 1e-12 * max(1.0, abs(span))
    while t < t_end - tiny:
        if attempts >= max_steps:
            status = STATUS_STEP_BUDGET
            break
        h_try = h
        if ev is not None and ev_idx < len(ev) and t + h_try > ev[ev_idx]:
            h_try = ev[ev_idx] - t
        if t + h_try > t_end:
            h_try = t_end - t
        attempts += 1
        ok, y8, err = _attempt_step(rhs, y, h_try, n, work)
        if not ok:
            h = 0.5 * h_try
            if h < _H_MIN:
                status = STATUS_UNDERFLOW
                break
            continue
        norm = _error_norm(y, y8, err, n, rtol, atol)
        if norm <= 1.0:
            t += h_try
            y = y8
            stop = on_accept(y)
            if stop != STATUS_UNDERFLOW:
                if ev is None:
                    ts.append(t)
                    ys.append(list(y))
                elif ev_idx < len(ev) and abs(t - ev[ev_idx]) <= 1e-12 * max(1.0, abs(t)):
                    ts.append(ev[ev_idx])
                    ys.append(list(y))
                    ev_idx += 1
            if stop >= 0:
                status = stop
                break
            fac = 5.0 if norm == 0.0 else min(5.0, max(0.2, 0.9 * norm ** -0.125))
            h = min(h_try * fac, max_step)
        else:
            fac = max(0.2, 0.9 * norm ** -0.125)
            h = h_try * fac
            if h < _H_MIN:
                status = STATUS_UNDERFLOW
                break
    return status, np.array(ts), np.array(ys), attempts
