# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled adaptive RK 5(4) interval stepper.

Same algorithm as _stepper_py.advance_interval; that module is the reference
implementation. Keep the two in sync.
"""

import numpy as np

from .errors import IntegratorFailure

from libc.math cimport pow, fabs

BACKEND_NAME = "compiled"

cdef int _MAX_STEPS = 2000000

cdef double _A[7][7]
cdef double _CC[7]
cdef double _EE[7]
cdef double _BB[6]


def _fill_tables():
    rows = [
        (),
        (0.2,),
        (3.0 / 40.0, 9.0 / 40.0),
        (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
        (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
        (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
         -5103.0 / 18656.0),
        (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
         11.0 / 84.0),
    ]
    cc = (0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
    ee = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
    for i in range(7):
        for j in range(7):
            _A[i][j] = 0.0
        for j, val in enumerate(rows[i]):
            _A[i][j] = val
        _CC[i] = cc[i]
        _EE[i] = ee[i]
    for j in range(6):
        _BB[j] = rows[6][j]


_fill_tables()


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double _cmod(double complex z) nogil:
    return abs(z)


def advance_interval(int mode, double complex k,
                     double complex[:, ::1] p_mat, double complex[:, ::1] s_mat,
                     double x_left, double x_from, double x_to,
                     double complex[:, ::1] y_p, double complex[:, ::1] y_pp,
                     double rtol, double atol, double h_suggest, bint accumulate):
    """Integrate from x_from to x_to (either direction). Returns
    (p, pp, err_accum, h_next, norm_accum, n_steps)."""
    cdef int n = y_p.shape[0]
    cdef int m = y_p.shape[1]
    cdef int nm = n * m
    cdef int L = 2 * nm
    cdef double complex two_ik = 2j * k
    cdef double complex k2 = k * k
    cdef double span = x_to - x_from
    cdef int r, c, s, i, j, idx, n_steps
    cdef double sgn, x, h, q, err_accum, err_norm, factor, sc, e_abs, q0, xv
    cdef double complex acc, ev
    cdef bint hit

    if span == 0.0:
        return (np.array(y_p, dtype=complex), np.array(y_pp, dtype=complex),
                0.0, h_suggest, 0.0, 0)
    sgn = 1.0 if span > 0 else -1.0

    y_arr = np.empty(L, dtype=complex)
    yi_arr = np.empty(L, dtype=complex)
    k_arr = np.empty((7, L), dtype=complex)
    v_arr = np.empty((n, n), dtype=complex)
    cdef double complex[::1] y = y_arr
    cdef double complex[::1] yi = yi_arr
    cdef double complex[:, ::1] K = k_arr
    cdef double complex[:, ::1] v = v_arr
    cdef double qs[7]

    for r in range(n):
        for c in range(m):
            y[r * m + c] = y_p[r, c]
            y[nm + r * m + c] = y_pp[r, c]

    x = x_from
    q = 0.0
    err_accum = 0.0
    h = sgn * min(fabs(h_suggest), fabs(span))
    n_steps = 0

    # stage 0 at (x, y)
    _eval_rhs(mode, two_ik, k2, p_mat, s_mat, x_left, x, y, K, 0, n, m)
    q0 = 0.0
    if accumulate:
        for idx in range(nm):
            q0 += _abs2(y[idx])

    while True:
        if (x + h - x_to) * sgn > 0.0:
            h = x_to - x
        if fabs(h) < 1e-13 * max(1.0, fabs(span)):
            raise IntegratorFailure(
                "step underflow at x = %.6g (h = %.3e)" % (x, h))
        hit = (h == x_to - x)

        qs[0] = q0
        for i in range(1, 7):
            for idx in range(L):
                acc = 0
                for j in range(i):
                    if _A[i][j] != 0.0:
                        acc = acc + _A[i][j] * K[j, idx]
                yi[idx] = y[idx] + h * acc
            xv = x + _CC[i] * h
            _eval_rhs(mode, two_ik, k2, p_mat, s_mat, x_left, xv, yi, K, i, n, m)
            qs[i] = 0.0
            if accumulate:
                for idx in range(nm):
                    qs[i] += _abs2(yi[idx])
        # after stage 6, yi holds the 5th-order solution (FSAL)

        err_norm = 0.0
        e_abs = 0.0
        for idx in range(L):
            ev = 0
            for j in range(7):
                if _EE[j] != 0.0:
                    ev = ev + _EE[j] * K[j, idx]
            ev = h * ev
            sc = atol + rtol * max(_cmod(y[idx]), _cmod(yi[idx]))
            err_norm = max(err_norm, _cmod(ev) / sc)
            e_abs = max(e_abs, _cmod(ev))

        n_steps += 1
        if n_steps > _MAX_STEPS:
            raise IntegratorFailure(
                "step budget exhausted on [%.6g, %.6g]" % (x_from, x_to))

        if err_norm <= 1.0:
            if accumulate:
                for j in range(6):
                    q += h * _BB[j] * qs[j]
            err_accum += e_abs
            x = x_to if hit else x + h
            for idx in range(L):
                y[idx] = yi[idx]
                K[0, idx] = K[6, idx]
            q0 = qs[6]
            if err_norm == 0.0:
                factor = 5.0
            else:
                factor = min(5.0, max(0.2, 0.9 * pow(err_norm, -0.2)))
            h = h * factor
            if hit:
                break
        else:
            h = h * max(0.2, 0.9 * pow(err_norm, -0.2))
            # stage 0 is still valid at (x, y); no recompute needed

    p_out = np.empty((n, m), dtype=complex)
    pp_out = np.empty((n, m), dtype=complex)
    cdef double complex[:, ::1] po = p_out
    cdef double complex[:, ::1] ppo = pp_out
    for r in range(n):
        for c in range(m):
            po[r, c] = y[r * m + c]
            ppo[r, c] = y[nm + r * m + c]
    return p_out, pp_out, err_accum, fabs(h), q, n_steps


cdef void _eval_rhs(int mode, double complex two_ik, double complex k2,
                    double complex[:, ::1] p_mat, double complex[:, ::1] s_mat,
                    double x_left, double x, double complex[::1] yv,
                    double complex[:, ::1] K, int row, int n, int m) nogil:
    cdef int r, c, s
    cdef int nm = n * m
    cdef double complex acc, vw
    cdef double dx = x - x_left
    for r in range(nm):
        K[row, r] = yv[nm + r]
    for r in range(n):
        for c in range(m):
            acc = 0
            for s in range(n):
                vw = p_mat[r, s] + dx * s_mat[r, s]
                acc = acc + vw * yv[s * m + c]
            if mode == 0:
                K[row, nm + r * m + c] = acc - two_ik * yv[nm + r * m + c]
            else:
                K[row, nm + r * m + c] = acc - k2 * yv[r * m + c]
