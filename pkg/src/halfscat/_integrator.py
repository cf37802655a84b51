"""Interval-chaining driver over the stepper backend.

integrate_system advances the second-order matrix system through the
piecewise-smooth potential, stopping exactly at potential breakpoints and at
requested record points. Where the potential vanishes the solution is
propagated in closed form instead of stepped, except when the norm
accumulator is active (the accumulator has no closed form worth carrying, so
those stretches are stepped too).

mode 0 is the factored system p'' = V p - 2ik p' whose free solution with
p' -> 0 is constant; mode 1 is the plain system p'' = (V - k^2) p.
"""

import cmath
from dataclasses import dataclass

import numpy as np

from ._backend import advance_interval

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class IntegrationResult:
    p: np.ndarray
    pp: np.ndarray
    err_accum: float
    records: list
    norm_accum: float
    n_steps: int


def _phi1(z):
    # (e^z - 1)/z, series below the cancellation threshold
    if abs(z) < 1e-6:
        return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    return (cmath.exp(z) - 1.0) / z


def _free_step(mode, k, d, p, pp):
    """Exact propagation over a zero-potential stretch of signed length d."""
    if mode == 0:
        # p'' = -2ik p':  p(x+d) = p + c pp,  p'(x+d) = e^{-2ikd} pp
        z = -2j * k * d
        return p + (d * _phi1(z)) * pp, cmath.exp(z) * pp
    # p'' = -k^2 p
    if k == 0:
        return p + d * pp, pp.copy()
    cd = cmath.cos(k * d)
    sd = cmath.sin(k * d) / k
    return cd * p + sd * pp, (-k * k * sd) * p + cd * pp


def integrate_system(pot, mode, k, x_from, x_to, p0, pp0, *,
                     rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                     record_xs=(), accumulate=False):
    """Advance (p, p') from x_from to x_to, either direction.

    record_xs must lie between the endpoints (inclusive); records is the list
    of (p, pp) pairs in the given order.
    """
    n = pot.n
    p = np.array(p0, dtype=complex)
    pp = np.array(pp0, dtype=complex)
    lo_end, hi_end = min(x_from, x_to), max(x_from, x_to)
    for xr in record_xs:
        if xr < lo_end or xr > hi_end:
            raise ValueError(f"record point {xr} outside [{lo_end}, {hi_end}]")

    pieces = list(pot.intervals())
    lows = np.array([seg[0] for seg in pieces]) if pieces else np.empty(0)
    zero_mat = np.zeros((n, n), dtype=complex)

    nodes = {x_from, x_to}
    nodes.update(float(xr) for xr in record_xs)
    for lo, hi, _, _ in pieces:
        if lo_end < lo < hi_end:
            nodes.add(float(lo))
        if lo_end < hi < hi_end:
            nodes.add(float(hi))
    forward = x_to >= x_from
    path = sorted(nodes, reverse=not forward)

    wanted = {float(xr) for xr in record_xs}
    recorded = {}
    if float(x_from) in wanted:
        recorded[float(x_from)] = (p.copy(), pp.copy())

    err_accum = 0.0
    norm_accum = 0.0
    n_steps = 0
    h = 0.5 / (1.0 + abs(k))

    for xa, xb in zip(path[:-1], path[1:]):
        xm = 0.5 * (xa + xb)
        if xm >= pot.support_end or not pieces:
            if accumulate:
                p, pp, e, h, q, ns = advance_interval(
                    mode, complex(k), zero_mat, zero_mat, xa, xa, xb,
                    p, pp, rtol, atol, h, True)
                err_accum += e
                norm_accum += q
                n_steps += ns
            else:
                p, pp = _free_step(mode, k, xb - xa, p, pp)
        else:
            j = int(np.searchsorted(lows, xm, side="right")) - 1
            x_left, _, pmat, smat = pieces[j]
            p, pp, e, h, q, ns = advance_interval(
                mode, complex(k), np.ascontiguousarray(pmat, dtype=complex),
                np.ascontiguousarray(smat, dtype=complex),
                float(x_left), xa, xb, p, pp, rtol, atol, h, accumulate)
            err_accum += e
            norm_accum += q
            n_steps += ns
        if float(xb) in wanted:
            recorded[float(xb)] = (p.copy(), pp.copy())

    records = [recorded[float(xr)] for xr in record_xs]
    return IntegrationResult(p, pp, err_accum, records, norm_accum, n_steps)
