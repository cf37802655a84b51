"""Jost solution, regular solution, Jost matrix, physical solution.

The Jost solution f(k,x) is the n x n solution of -psi'' + V psi = k^2 psi
behaving like e^{ikx} I at the right edge of the support. It is computed in
the factored form m(k,x) = e^{-ikx} f(k,x), whose equation
m'' = -2ik m' + V m has exact data m = I, m' = 0 at support_end and is
integrated backward; the growing homogeneous mode decays in the decreasing-x
direction, so the run is stable on the positive imaginary axis where the
bound-state searches live.

The Jost matrix pairs the daggered Jost solution at the reflected point -k*
with the boundary data:

    J(k) = f(-k*,0)^dagger B - f'(-k*,0)^dagger A

For real k the reflected point is -k; on the imaginary axis it is k itself,
so one backward run per point always suffices.
"""

from dataclasses import dataclass

import cmath
import numpy as np

from ._integrator import DEFAULT_ATOL, DEFAULT_RTOL, integrate_system
from .errors import BadGrid, SingularJost, ValidationFailure

_IM_SNAP = 1e-14
_ERR_FLOOR = 1e-15


def clean_spectral_point(k):
    """Validate k against the closed upper half plane, snapping tiny negative
    imaginary parts to the real axis."""
    kk = complex(k)
    if kk.imag < -_IM_SNAP:
        raise ValidationFailure(f"spectral point {kk} lies below the real axis")
    if kk.imag < 0:
        kk = complex(kk.real, 0.0)
    return kk


@dataclass(frozen=True)
class JostEvaluation:
    """Jost data at the origin. f0 and fp0 hold f and f' at the point where
    the backward run actually happened: the nominal k for jost_at_origin, the
    reflected point -k* for jost_matrix (those are the factors entering J).
    err_est is the accumulated integrator error estimate, already scaled by
    (1 + |k|) so it bounds both the f and the f' entries."""

    k: complex
    f0: np.ndarray
    fp0: np.ndarray
    J: np.ndarray
    err_est: float


@dataclass(frozen=True)
class RegularSolutionTrace:
    k: complex
    xs: np.ndarray
    phi: np.ndarray
    phip: np.ndarray
    err_est: float


def dagger_wronskian(f, fp, g, gp):
    """[F; G] = F G' - F' G with F the daggered solution: f^dagger gp - fp^dagger g."""
    return f.conj().T @ gp - fp.conj().T @ g


def _err_scale(k, accum, n_steps):
    return (1.0 + abs(k)) * (accum + _ERR_FLOOR * (1.0 + n_steps))


def jost_at_origin(pot, k, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """f(k,0) and f'(k,0) by one backward run of the factored system."""
    kk = clean_spectral_point(k)
    n = pot.n
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    b = pot.support_end
    if b == 0.0:
        return JostEvaluation(kk, eye, 1j * kk * eye, None,
                              _err_scale(kk, 0.0, 0))
    res = integrate_system(pot, 0, kk, b, 0.0, eye, zero, rtol=rtol, atol=atol)
    f0 = res.p
    fp0 = 1j * kk * res.p + res.pp
    return JostEvaluation(kk, f0, fp0, None,
                          _err_scale(kk, res.err_accum, res.n_steps))


def jost_solution_on(pot, k, xs, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """f(k,x) and f'(k,x) at the given ascending points.

    Returns (f, fp, err_est) with f, fp of shape (len(xs), n, n). Points at or
    beyond support_end cost nothing: m = I there exactly."""
    kk = clean_spectral_point(k)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0 or np.any(np.diff(xs) <= 0):
        raise BadGrid("sample points must be a strictly increasing 1-d grid")
    if xs[0] < 0:
        raise BadGrid("sample points must be nonnegative")
    n = pot.n
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    b = pot.support_end

    inside = [float(x) for x in xs if x < b]
    m_at = {}
    err = _err_scale(kk, 0.0, 0)
    if inside:
        res = integrate_system(pot, 0, kk, b, min(inside), eye, zero,
                               rtol=rtol, atol=atol, record_xs=inside)
        m_at = dict(zip(inside, res.records))
        err = _err_scale(kk, res.err_accum, res.n_steps)

    f = np.empty((len(xs), n, n), dtype=complex)
    fp = np.empty((len(xs), n, n), dtype=complex)
    for i, x in enumerate(xs):
        phase = cmath.exp(1j * kk * x)
        if float(x) in m_at:
            mv, mpv = m_at[float(x)]
        else:
            mv, mpv = eye, zero
        f[i] = phase * mv
        fp[i] = phase * (1j * kk * mv + mpv)
    return f, fp, err


def jost_matrix(pot, bp, k, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """J(k) = f(-k*,0)^dagger B - f'(-k*,0)^dagger A."""
    kk = clean_spectral_point(k)
    kr = -kk.conjugate()
    ev = jost_at_origin(pot, kr, rtol=rtol, atol=atol)
    j = ev.f0.conj().T @ bp.B - ev.fp0.conj().T @ bp.A
    return JostEvaluation(kk, ev.f0, ev.fp0, j, ev.err_est)


def regular_solution(pot, bp, k, xs, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """phi(k,x) with phi(0) = A, phi'(0) = B, recorded on xs (xs[0] must be 0)."""
    kk = complex(k)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise BadGrid("xs must be a nonempty 1-d grid")
    if xs[0] != 0.0:
        raise BadGrid("regular-solution grid must start at 0")
    if xs.size > 1 and np.any(np.diff(xs) <= 0):
        raise BadGrid("xs must be strictly increasing")
    n = pot.n
    a0 = np.array(bp.A, dtype=complex)
    b0 = np.array(bp.B, dtype=complex)
    if xs.size == 1:
        phi = a0[None, :, :].copy()
        phip = b0[None, :, :].copy()
        return RegularSolutionTrace(kk, xs, phi, phip, _err_scale(kk, 0.0, 0))
    res = integrate_system(pot, 1, kk, 0.0, float(xs[-1]), a0, b0,
                           rtol=rtol, atol=atol,
                           record_xs=[float(x) for x in xs])
    phi = np.stack([r[0] for r in res.records])
    phip = np.stack([r[1] for r in res.records])
    return RegularSolutionTrace(kk, xs, phi, phip,
                                _err_scale(kk, res.err_accum, res.n_steps))


def regular_column(pot, bp, k, alpha, x_end, *,
                   rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """One column psi = phi(k,.) alpha integrated to x_end with the running
    integral of ||psi||^2 accumulated. Returns (psi, psip, norm_int, err_est)."""
    kk = complex(k)
    alpha = np.asarray(alpha, dtype=complex).reshape(-1, 1)
    p0 = np.array(bp.A, dtype=complex) @ alpha
    pp0 = np.array(bp.B, dtype=complex) @ alpha
    if x_end == 0.0:
        return p0, pp0, 0.0, _err_scale(kk, 0.0, 0)
    res = integrate_system(pot, 1, kk, 0.0, float(x_end), p0, pp0,
                           rtol=rtol, atol=atol, accumulate=True)
    return res.p, res.pp, res.norm_accum, _err_scale(kk, res.err_accum, res.n_steps)


def physical_solution(pot, bp, k, x, *, via="jost",
                      rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Psi(k,x) for real k.

    via="jost" uses Psi = f(-k,x) + f(k,x) S(k), continuous down to k = 0;
    via="regular" uses Psi = -2ik phi(k,x) J(k)^{-1}, which needs k != 0 and a
    nonsingular Jost matrix."""
    kk = clean_spectral_point(k)
    if abs(kk.imag) > 0:
        raise ValidationFailure("physical solution is defined for real k")
    kr = kk.real
    from . import scattering

    if via == "jost":
        if kr == 0.0:
            s = scattering.s_at_zero(pot, bp, rtol=rtol, atol=atol).S
            f, _, _ = jost_solution_on(pot, 0.0, [x] if x > 0 else [0.0],
                                       rtol=rtol, atol=atol)
            return f[0] + f[0] @ s
        s = scattering.s_matrix(pot, bp, kr, rtol=rtol, atol=atol).S
        xs = [x] if x > 0 else [0.0]
        f_plus, _, _ = jost_solution_on(pot, kr, xs, rtol=rtol, atol=atol)
        f_minus, _, _ = jost_solution_on(pot, -kr, xs, rtol=rtol, atol=atol)
        return f_minus[0] + f_plus[0] @ s

    if via == "regular":
        if kr == 0.0:
            raise SingularJost("the regular-solution path needs k != 0")
        ev = jost_matrix(pot, bp, kr, rtol=rtol, atol=atol)
        if np.linalg.cond(ev.J) > 1e12:
            raise SingularJost(f"J({kr}) is numerically singular")
        xs = np.array([0.0, x]) if x > 0 else np.array([0.0])
        tr = regular_solution(pot, bp, kr, xs, rtol=rtol, atol=atol)
        return -2j * kr * np.linalg.solve(ev.J.conj().T, tr.phi[-1].conj().T).conj().T

    raise ValueError(f"unknown path {via!r}")
