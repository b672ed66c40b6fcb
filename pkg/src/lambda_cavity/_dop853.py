"""Compiled Dormand-Prince 8(5,3) stepper for the three-amplitude sector ODE.

Mirrors the step control and 7th-degree dense output of
``scipy.integrate.DOP853`` but runs the whole integration inside numba, one
photon sector at a time.  The Butcher tableau is taken from scipy so the two
implementations share coefficients and nothing else.
"""
import math

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _co

N_STAGES = _co.N_STAGES
A = np.ascontiguousarray(_co.A[:N_STAGES, :N_STAGES])
B = np.ascontiguousarray(_co.B)
C = np.ascontiguousarray(_co.C[:N_STAGES])
E3 = np.ascontiguousarray(_co.E3)
E5 = np.ascontiguousarray(_co.E5)
D = np.ascontiguousarray(_co.D)
A_EXTRA = np.ascontiguousarray(_co.A[N_STAGES + 1:])
C_EXTRA = np.ascontiguousarray(_co.C[N_STAGES + 1:])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERROR_EXPONENT = -1.0 / 8.0

OK = 0
STEP_UNDERFLOW = 1


@njit(cache=True)
def _rhs(t, y, f1, f2, d1, d2, w, out):
    g = math.sin(w * t) if w != 0.0 else 1.0
    F1 = g * f1 * complex(math.cos(d1 * t), -math.sin(d1 * t))
    F2 = g * f2 * complex(math.cos(d2 * t), -math.sin(d2 * t))
    out[0] = -1j * (F1 * y[1] + F2 * y[2])
    out[1] = -1j * (F1.conjugate() * y[0])
    out[2] = -1j * (F2.conjugate() * y[0])


@njit(cache=True)
def _norm(x, scale):
    s = 0.0
    for i in range(x.shape[0]):
        v = abs(x[i]) / scale[i]
        s += v * v
    return math.sqrt(s / x.shape[0])


@njit(cache=True)
def integrate_sector_kernel(f1, f2, d1, d2, w, t_grid, rtol, atol, max_steps,
                            A, B, C, E3, E5, D, A_EXTRA, C_EXTRA, out):
    """Integrate one sector from psi(0) = (1, 0, 0) and sample on ``t_grid``.

    ``out`` has shape (len(t_grid), 3).  Returns (status, accepted_steps).
    """
    n = 3
    n_stages = A.shape[0]
    K = np.zeros((n_stages + 4, n), dtype=np.complex128)
    y = np.zeros(n, dtype=np.complex128)
    y[0] = 1.0
    y_new = np.empty(n, dtype=np.complex128)
    y_tmp = np.empty(n, dtype=np.complex128)
    f = np.empty(n, dtype=np.complex128)
    f_new = np.empty(n, dtype=np.complex128)
    scale = np.empty(n)
    err5 = np.empty(n, dtype=np.complex128)
    err3 = np.empty(n, dtype=np.complex128)
    F = np.empty((7, n), dtype=np.complex128)

    n_out = t_grid.shape[0]
    t_end = t_grid[n_out - 1]
    i_out = 0
    while i_out < n_out and t_grid[i_out] <= 0.0:
        out[i_out, :] = y
        i_out += 1
    if i_out == n_out:
        return OK, 0

    t = 0.0
    _rhs(t, y, f1, f2, d1, d2, w, f)

    # Initial step: Hairer's first guess from |y| / |y'|.
    for i in range(n):
        scale[i] = atol + abs(y[i]) * rtol
    d0 = _norm(y, scale)
    dd1 = _norm(f, scale)
    if d0 < 1e-5 or dd1 < 1e-5:
        h_abs = 1e-6
    else:
        h_abs = 0.01 * d0 / dd1
    h_abs = min(h_abs, t_end)

    steps = 0
    while t < t_end:
        if steps >= max_steps:
            return STEP_UNDERFLOW, steps
        min_step = 10.0 * abs(np.nextafter(t, np.inf) - t)
        if h_abs > t_end - t:
            h_abs = t_end - t
        step_rejected = False
        while True:
            if h_abs < min_step:
                return STEP_UNDERFLOW, steps
            h = h_abs
            t_new = t + h
            if t_new > t_end:
                t_new = t_end
            h = t_new - t
            h_abs = h

            for i in range(n):
                K[0, i] = f[i]
            for s in range(1, n_stages):
                for i in range(n):
                    acc = 0j
                    for j in range(s):
                        acc += K[j, i] * A[s, j]
                    y_tmp[i] = y[i] + h * acc
                _rhs(t + C[s] * h, y_tmp, f1, f2, d1, d2, w, K[s])
            for i in range(n):
                acc = 0j
                for j in range(n_stages):
                    acc += K[j, i] * B[j]
                y_new[i] = y[i] + h * acc
            _rhs(t + h, y_new, f1, f2, d1, d2, w, f_new)
            for i in range(n):
                K[n_stages, i] = f_new[i]

            for i in range(n):
                scale[i] = atol + max(abs(y[i]), abs(y_new[i])) * rtol
                a5 = 0j
                a3 = 0j
                for j in range(n_stages + 1):
                    a5 += K[j, i] * E5[j]
                    a3 += K[j, i] * E3[j]
                err5[i] = a5 / scale[i]
                err3[i] = a3 / scale[i]
            e5 = 0.0
            e3 = 0.0
            for i in range(n):
                e5 += abs(err5[i]) ** 2
                e3 += abs(err3[i]) ** 2
            if e5 == 0.0 and e3 == 0.0:
                error_norm = 0.0
            else:
                error_norm = h_abs * e5 / math.sqrt((e5 + 0.01 * e3) * n)

            if error_norm < 1.0:
                if error_norm == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * error_norm ** ERROR_EXPONENT)
                if step_rejected:
                    factor = min(1.0, factor)
                h_next = h_abs * factor
                break
            h_abs *= max(MIN_FACTOR, SAFETY * error_norm ** ERROR_EXPONENT)
            step_rejected = True

        steps += 1

        if i_out < n_out and t_grid[i_out] <= t_new:
            # Dense output needs three extra stages.
            for s in range(n_stages + 1, n_stages + 4):
                a = A_EXTRA[s - n_stages - 1]
                c = C_EXTRA[s - n_stages - 1]
                for i in range(n):
                    acc = 0j
                    for j in range(s):
                        acc += K[j, i] * a[j]
                    y_tmp[i] = y[i] + h * acc
                _rhs(t + c * h, y_tmp, f1, f2, d1, d2, w, K[s])
            for i in range(n):
                dy = y_new[i] - y[i]
                F[0, i] = dy
                F[1, i] = h * K[0, i] - dy
                F[2, i] = 2.0 * dy - h * (f_new[i] + K[0, i])
                for r in range(D.shape[0]):
                    acc = 0j
                    for j in range(D.shape[1]):
                        acc += D[r, j] * K[j, i]
                    F[3 + r, i] = h * acc
            while i_out < n_out and t_grid[i_out] <= t_new:
                x = (t_grid[i_out] - t) / h
                for i in range(n):
                    v = 0j
                    for r in range(7):
                        v += F[6 - r, i]
                        if r % 2 == 0:
                            v *= x
                        else:
                            v *= 1.0 - x
                    out[i_out, i] = v + y[i]
                i_out += 1

        t = t_new
        for i in range(n):
            y[i] = y_new[i]
            f[i] = f_new[i]
        h_abs = h_next

    return OK, steps


def integrate(f1, f2, d1, d2, w, t_grid, rtol=1e-10, atol=1e-12, max_steps=50_000_000):
    t_grid = np.ascontiguousarray(t_grid, dtype=np.float64)
    out = np.empty((t_grid.shape[0], 3), dtype=np.complex128)
    status, steps = integrate_sector_kernel(
        float(f1), float(f2), float(d1), float(d2), float(w), t_grid,
        float(rtol), float(atol), int(max_steps),
        A, B, C, E3, E5, D, A_EXTRA, C_EXTRA, out,
    )
    return out, status, steps
