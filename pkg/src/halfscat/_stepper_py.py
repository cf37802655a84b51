"""Pure-numpy adaptive RK 5(4) stepper, fallback for the compiled extension.

One entry point, advance_interval, integrates a second-order matrix system
across one smooth interval on which V(x) = P + (x - x_left) * S:

    mode 0 (factored):  p'' = V(x) p - 2ik p'
    mode 1 (plain):     p'' = (V(x) - k^2) p

The state is the pair (p, p') of n x m complex matrices. Dormand-Prince
coefficients, elementwise mixed absolute/relative error control with the
maximum norm, FSAL reuse, deterministic step policy. The optional accumulator
integrates sum_ij |p_ij|^2 alongside (used for bound-state normalization
integrals); it rides on the accepted steps and is excluded from error control.

The compiled twin in _stepper.pyx implements the identical algorithm; keep the
two in sync.
"""

import numpy as np

from .errors import IntegratorFailure

_A2 = (0.2,)
_A3 = (3.0 / 40.0, 9.0 / 40.0)
_A4 = (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0)
_A5 = (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0)
_A6 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0)
_C = (0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_E = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
      -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_MAX_STEPS = 2_000_000

BACKEND_NAME = "python"


def advance_interval(mode, k, p_mat, s_mat, x_left, x_from, x_to,
                     y_p, y_pp, rtol, atol, h_suggest, accumulate):
    """Integrate from x_from to x_to (either direction). Returns
    (p, pp, err_accum, h_next, norm_accum, n_steps)."""
    n, m = y_p.shape
    nm = n * m
    two_ik = 2j * k
    k2 = k * k
    span = x_to - x_from
    if span == 0.0:
        return y_p.copy(), y_pp.copy(), 0.0, h_suggest, 0.0, 0
    sgn = 1.0 if span > 0 else -1.0

    y = np.concatenate([np.asarray(y_p, dtype=complex).ravel(),
                        np.asarray(y_pp, dtype=complex).ravel()])

    def rhs(x, yv):
        p = yv[:nm].reshape(n, m)
        out = np.empty_like(yv)
        out[:nm] = yv[nm:]
        v = p_mat + (x - x_left) * s_mat
        if mode == 0:
            out[nm:] = (v @ p - two_ik * yv[nm:].reshape(n, m)).ravel()
        else:
            out[nm:] = (v @ p - k2 * p).ravel()
        return out

    def qdot(yv):
        blk = yv[:nm]
        return float(np.sum(blk.real * blk.real + blk.imag * blk.imag))

    x = x_from
    q = 0.0
    err_accum = 0.0
    h = sgn * min(abs(h_suggest), abs(span))
    stages = [None] * 7
    stages[0] = rhs(x, y)
    q0 = qdot(y) if accumulate else 0.0
    n_steps = 0

    while True:
        if (x + h - x_to) * sgn > 0.0:
            h = x_to - x
        if abs(h) < 1e-13 * max(1.0, abs(span)):
            raise IntegratorFailure(f"step underflow at x = {x:.6g} (h = {h:.3e})")

        qs = [q0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        yi = y + (h * _A2[0]) * stages[0]
        stages[1] = rhs(x + _C[1] * h, yi)
        if accumulate:
            qs[1] = qdot(yi)
        for i, row in ((2, _A3), (3, _A4), (4, _A5), (5, _A6), (6, _B5)):
            yi = y + h * sum(row[j] * stages[j] for j in range(len(row)))
            stages[i] = rhs(x + _C[i] * h, yi)
            if accumulate:
                qs[i] = qdot(yi)
        y5 = yi  # the i = 6 stage state is the 5th-order solution (FSAL)

        err_vec = h * sum(_E[j] * stages[j] for j in range(7))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err_norm = float(np.max(np.abs(err_vec) / scale))

        n_steps += 1
        if n_steps > _MAX_STEPS:
            raise IntegratorFailure(f"step budget exhausted on [{x_from:.6g}, {x_to:.6g}]")

        if err_norm <= 1.0:
            if accumulate:
                q += h * sum(_B5[j] * qs[j] for j in range(6))
            err_accum += float(np.max(np.abs(err_vec)))
            x = x_to if h == x_to - x else x + h
            y = y5
            stages[0] = stages[6]
            q0 = qs[6] if accumulate else 0.0
            factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
            h = h * factor
            if x == x_to:
                break
        else:
            h = h * max(0.2, 0.9 * err_norm ** -0.2)
            # stage 0 is still valid at (x, y); no recompute needed

    return (y[:nm].reshape(n, m).copy(), y[nm:].reshape(n, m).copy(),
            err_accum, abs(h), q, n_steps)
