# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fehlberg 7(8) integration kernels.

Semantics match ``_kernels_py`` exactly; that module is the readable
reference and this one is the hot path.
"""
from libc.math cimport sqrt, fabs, pow, isfinite

import numpy as np

BACKEND = "compiled"

STATUS_T_END = 0
STATUS_COLLISION = 1
STATUS_STEP_BUDGET = 2
STATUS_UNDERFLOW = 3
STATUS_BOUNDARY = 4
STATUS_ESCAPE = 5

KIND_LAGRANGIAN = 0
KIND_EULERIAN = 1

cdef double H_MIN = 1e-14

cdef double[::1] _C = np.array(
    [0.0, 2.0 / 27, 1.0 / 9, 1.0 / 6, 5.0 / 12, 0.5, 5.0 / 6, 1.0 / 6, 2.0 / 3,
     1.0 / 3, 1.0, 0.0, 1.0])

_A_np = np.zeros((13, 12))
_A_np[1, :1] = [2.0 / 27]
_A_np[2, :2] = [1.0 / 36, 1.0 / 12]
_A_np[3, :3] = [1.0 / 24, 0.0, 1.0 / 8]
_A_np[4, :4] = [5.0 / 12, 0.0, -25.0 / 16, 25.0 / 16]
_A_np[5, :5] = [1.0 / 20, 0.0, 0.0, 1.0 / 4, 1.0 / 5]
_A_np[6, :6] = [-25.0 / 108, 0.0, 0.0, 125.0 / 108, -65.0 / 27, 125.0 / 54]
_A_np[7, :7] = [31.0 / 300, 0.0, 0.0, 0.0, 61.0 / 225, -2.0 / 9, 13.0 / 900]
_A_np[8, :8] = [2.0, 0.0, 0.0, -53.0 / 6, 704.0 / 45, -107.0 / 9, 67.0 / 90, 3.0]
_A_np[9, :9] = [-91.0 / 108, 0.0, 0.0, 23.0 / 108, -976.0 / 135, 311.0 / 54,
                -19.0 / 60, 17.0 / 6, -1.0 / 12]
_A_np[10, :10] = [2383.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -301.0 / 82,
                  2133.0 / 4100, 45.0 / 82, 45.0 / 164, 18.0 / 41]
_A_np[11, :11] = [3.0 / 205, 0.0, 0.0, 0.0, 0.0, -6.0 / 41, -3.0 / 205, -3.0 / 41,
                  3.0 / 41, 6.0 / 41, 0.0]
_A_np[12, :12] = [-1777.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -289.0 / 82,
                  2193.0 / 4100, 51.0 / 82, 33.0 / 164, 12.0 / 41, 0.0, 1.0]
cdef double[:, ::1] _A = _A_np

cdef double[::1] _B8 = np.array(
    [0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105, 9.0 / 35, 9.0 / 35, 9.0 / 280, 9.0 / 280,
     0.0, 41.0 / 840, 41.0 / 840])
cdef double _ERR_W = 41.0 / 840


cdef bint _rhs_full(double* y, double* out, double kappa, double sigma, double sk,
                    double m0, double m1, double m2) nogil:
    cdef double ms[3]
    cdef double kd[3][3]
    cdef double dw[3][3]
    cdef int i, j, b, vb
    cdef double kij, dij, w, vv, f, ax, ay, az
    ms[0] = m0
    ms[1] = m1
    ms[2] = m2
    for i in range(3):
        for j in range(i + 1, 3):
            kij = kappa * (y[3 * i] * y[3 * j] + y[3 * i + 1] * y[3 * j + 1]
                           + sigma * y[3 * i + 2] * y[3 * j + 2])
            dij = sigma - sigma * kij * kij
            if dij <= 1e-300:
                return 0
            w = dij * sqrt(dij)
            kd[i][j] = kij
            kd[j][i] = kij
            dw[i][j] = w
            dw[j][i] = w
    for i in range(3):
        vb = 9 + 3 * i
        vv = kappa * (y[vb] * y[vb] + y[vb + 1] * y[vb + 1]
                      + sigma * y[vb + 2] * y[vb + 2])
        b = 3 * i
        ax = -vv * y[b]
        ay = -vv * y[b + 1]
        az = -vv * y[b + 2]
        for j in range(3):
            if j == i:
                continue
            f = ms[j] * sk / dw[i][j]
            kij = kd[i][j]
            ax += f * (y[3 * j] - kij * y[b])
            ay += f * (y[3 * j + 1] - kij * y[b + 1])
            az += f * (y[3 * j + 2] - kij * y[b + 2])
        out[vb] = ax
        out[vb + 1] = ay
        out[vb + 2] = az
    for i in range(9):
        out[i] = y[9 + i]
    return 1


cdef double _min_pair_gap(double* y, double kappa, double sigma) nogil:
    cdef int i, j
    cdef double kij, dij, best
    best = 1e300
    for i in range(3):
        for j in range(i + 1, 3):
            kij = kappa * (y[3 * i] * y[3 * j] + y[3 * i + 1] * y[3 * j + 1]
                           + sigma * y[3 * i + 2] * y[3 * j + 2])
            dij = sigma - sigma * kij * kij
            if dij < best:
                best = dij
    return best


cdef bint _project_full(double* y, double kappa, double sigma) nogil:
    cdef int i, b, vb
    cdef double qx, qy, qz, vx, vy, vz, s, inv, qq, qv, f
    for i in range(3):
        b = 3 * i
        qx = y[b]
        qy = y[b + 1]
        qz = y[b + 2]
        s = kappa * (qx * qx + qy * qy + sigma * qz * qz)
        if s <= 0.0:
            return 0
        inv = 1.0 / sqrt(s)
        qx *= inv
        qy *= inv
        qz *= inv
        y[b] = qx
        y[b + 1] = qy
        y[b + 2] = qz
        vb = 9 + 3 * i
        vx = y[vb]
        vy = y[vb + 1]
        vz = y[vb + 2]
        qq = qx * qx + qy * qy + sigma * qz * qz
        qv = qx * vx + qy * vy + sigma * qz * vz
        f = qv / qq
        y[vb] = vx - f * qx
        y[vb + 1] = vy - f * qy
        y[vb + 2] = vz - f * qz
    return 1


cdef bint _rhs_reduced(double* y, double* out, int kind, double c, double kappa,
                       double m) nogil:
    cdef double r, nu, r2, one, s, pot, mid
    r = y[0]
    nu = y[1]
    if r <= 0.0:
        return 0
    r2 = r * r
    one = 1.0 - kappa * r2
    if kind == 0:  # KIND_LAGRANGIAN
        s = 12.0 - 9.0 * kappa * r2
        if s <= 0.0:
            return 0
        pot = 24.0 * m * one / (r2 * s * sqrt(s))
    else:
        if one <= 0.0:
            return 0
        pot = m * (5.0 - 4.0 * kappa * r2) / (4.0 * r2 * sqrt(one))
    if one != 0.0:
        mid = kappa * r * nu * nu / one
    elif nu == 0.0:
        mid = 0.0
    else:
        return 0
    out[0] = nu
    out[1] = c * c * one / (r * r2) - mid - pot
    out[2] = c / r2
    return 1


def integrate_full(y0, masses, double kappa, double t0, double t_end, double h0,
                   double rtol, double atol, long max_steps, double eps_sing,
                   double max_step, t_eval=None):
    """Integrate the full system; returns (status, times, states, attempts)."""
    cdef double sigma = 1.0 if kappa > 0 else -1.0
    cdef double sk = fabs(kappa) ** 1.5
    cdef double m0 = masses[0]
    cdef double m1 = masses[1]
    cdef double m2 = masses[2]
    cdef double y[18]
    cdef int i
    arr = np.ascontiguousarray(y0, dtype=np.float64)
    for i in range(18):
        y[i] = arr[i]
    if _min_pair_gap(y, kappa, sigma) <= eps_sing:
        return STATUS_COLLISION, np.array([t0]), arr.reshape(1, 18).copy(), 0
    return _drive(0, y, 18, kappa, sigma, sk, m0, m1, m2, 0, 0.0, 0.0,
                  eps_sing, 0.0, 0.0, -1.0, t0, t_end, h0, rtol, atol,
                  max_steps, max_step, t_eval)


def integrate_reduced(int kind, y0, double c, double kappa, double m, double t0,
                      double t_end, double h0, double rtol, double atol,
                      long max_steps, double r_floor, double r_ceil,
                      double escape_radius, double max_step, t_eval=None):
    """Integrate (r, nu, omega); returns (status, times, states, attempts)."""
    cdef double y[18]
    cdef int i
    arr = np.ascontiguousarray(y0, dtype=np.float64)
    for i in range(3):
        y[i] = arr[i]
    return _drive(1, y, 3, kappa, 0.0, 0.0, 0.0, 0.0, 0.0, kind, c, m,
                  0.0, r_floor, r_ceil, escape_radius, t0, t_end, h0, rtol, atol,
                  max_steps, max_step, t_eval)


cdef _drive(int mode, double* y, int n, double kappa, double sigma, double sk,
            double m0, double m1, double m2, int kind, double c, double m,
            double eps_sing, double r_floor, double r_ceil, double escape_radius,
            double t0, double t_end, double h0, double rtol, double atol,
            long max_steps, double max_step, t_eval):
    cdef double k[13][18]
    cdef double yi[18]
    cdef double y8[18]
    cdef double err[18]
    cdef double span = t_end - t0
    cdef double h = h0
    cdef double t = t0
    cdef double tiny = 1e-12 * max(1.0, fabs(span))
    cdef double h_try, s, aij, norm, e, sc, fac
    cdef int i, j, cc, stop
    cdef long attempts = 0
    cdef int status = STATUS_T_END
    cdef bint ok
    cdef bint have_ev = t_eval is not None
    cdef double[::1] ev
    cdef Py_ssize_t ev_idx = 0, ev_len = 0

    if h > span:
        h = span
    if h > max_step:
        h = max_step

    if have_ev:
        ev_arr = np.ascontiguousarray(t_eval, dtype=np.float64)
        ev = ev_arr
        ev_len = ev.shape[0]
    cap = max(512, ev_len + 8)
    ts_buf = np.empty(cap)
    ys_buf = np.empty((cap, n))
    cdef double[::1] ts_mv = ts_buf
    cdef double[:, ::1] ys_mv = ys_buf
    cdef Py_ssize_t cnt = 0

    if have_ev:
        while ev_idx < ev_len and ev[ev_idx] <= t0 + 1e-15 * max(1.0, fabs(t0)):
            ts_mv[cnt] = ev[ev_idx]
            for i in range(n):
                ys_mv[cnt, i] = y[i]
            cnt += 1
            ev_idx += 1
    else:
        ts_mv[cnt] = t
        for i in range(n):
            ys_mv[cnt, i] = y[i]
        cnt += 1

    while t < t_end - tiny:
        if attempts >= max_steps:
            status = STATUS_STEP_BUDGET
            break
        h_try = h
        if have_ev and ev_idx < ev_len and t + h_try > ev[ev_idx]:
            h_try = ev[ev_idx] - t
        if t + h_try > t_end:
            h_try = t_end - t
        attempts += 1

        if mode == 0:
            ok = _rhs_full(y, k[0], kappa, sigma, sk, m0, m1, m2)
        else:
            ok = _rhs_reduced(y, k[0], kind, c, kappa, m)
        if ok:
            for i in range(1, 13):
                for cc in range(n):
                    s = 0.0
                    for j in range(i):
                        aij = _A[i, j]
                        if aij != 0.0:
                            s += aij * k[j][cc]
                    yi[cc] = y[cc] + h_try * s
                if mode == 0:
                    ok = _rhs_full(yi, k[i], kappa, sigma, sk, m0, m1, m2)
                else:
                    ok = _rhs_reduced(yi, k[i], kind, c, kappa, m)
                if not ok:
                    break
        if ok:
            for cc in range(n):
                s = 0.0
                for i in range(13):
                    if _B8[i] != 0.0:
                        s += _B8[i] * k[i][cc]
                y8[cc] = y[cc] + h_try * s
                err[cc] = _ERR_W * h_try * (k[0][cc] + k[10][cc] - k[11][cc] - k[12][cc])
                if not isfinite(y8[cc]):
                    ok = 0
                    break
        if not ok:
            h = 0.5 * h_try
            if h < H_MIN:
                status = STATUS_UNDERFLOW
                break
            continue

        norm = 0.0
        for cc in range(n):
            sc = atol + rtol * max(fabs(y[cc]), fabs(y8[cc]))
            e = err[cc] / sc
            norm += e * e
        norm = sqrt(norm / n)

        if norm <= 1.0:
            t += h_try
            for cc in range(n):
                y[cc] = y8[cc]
            stop = -1
            if mode == 0:
                if not _project_full(y, kappa, sigma):
                    stop = STATUS_UNDERFLOW
                elif _min_pair_gap(y, kappa, sigma) <= eps_sing:
                    stop = STATUS_COLLISION
            else:
                if y[0] <= r_floor or y[0] >= r_ceil:
                    stop = STATUS_BOUNDARY
                elif escape_radius > 0.0 and y[0] >= escape_radius and y[1] > 0.0:
                    stop = STATUS_ESCAPE
            if stop != STATUS_UNDERFLOW:
                if not have_ev:
                    if cnt == cap:
                        cap *= 2
                        ts_new = np.empty(cap)
                        ys_new = np.empty((cap, n))
                        ts_new[:cnt] = ts_buf[:cnt]
                        ys_new[:cnt] = ys_buf[:cnt]
                        ts_buf = ts_new
                        ys_buf = ys_new
                        ts_mv = ts_buf
                        ys_mv = ys_buf
                    ts_mv[cnt] = t
                    for i in range(n):
                        ys_mv[cnt, i] = y[i]
                    cnt += 1
                elif ev_idx < ev_len and fabs(t - ev[ev_idx]) <= 1e-12 * max(1.0, fabs(t)):
                    ts_mv[cnt] = ev[ev_idx]
                    for i in range(n):
                        ys_mv[cnt, i] = y[i]
                    cnt += 1
                    ev_idx += 1
            if stop >= 0:
                status = stop
                break
            if norm == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(norm, -0.125)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h = h_try * fac
            if h > max_step:
                h = max_step
        else:
            fac = 0.9 * pow(norm, -0.125)
            if fac < 0.2:
                fac = 0.2
            h = h_try * fac
            if h < H_MIN:
                status = STATUS_UNDERFLOW
                break

    return status, ts_buf[:cnt].copy(), ys_buf[:cnt].copy(), attempts
