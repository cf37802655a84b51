"""Scattering matrix, zero-potential closed forms, high-energy models.

S(k) = -J(-k) J(k)^{-1} for real nonzero k. The zero-potential problem has
closed forms throughout: J0(k) = B - ik A, and in the canonical frame the
scattering matrix is diagonal with entries

    mixed     (-cos t + ik sin t)/(cos t + ik sin t)
    Dirichlet -1
    Neumann   +1

The high-energy model assembles the large-k limit S_inf and the 1/(ik)
correction G(k) from the potential moments; the model functions are the
reference side of the order tests, never used in the S(k) computation itself.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .boundary import canonicalize
from .errors import ExtrapolationDivergence, SingularJ0, SingularJost
from .jost import jost_matrix
from .matkernel import row_sum_norm
from .potential import moments
from ._integrator import DEFAULT_ATOL, DEFAULT_RTOL

COND_LIMIT = 1e12


@dataclass(frozen=True)
class ScatteringSample:
    k: float
    S: np.ndarray
    unitarity_defect: float
    err_est: float


@dataclass(frozen=True)
class AsymptoticModel:
    """Large-k reference data: S approaches S_inf with first correction
    G(k)/(ik); Z0 and Z1 are the canonical-frame diagonal parts."""

    S_inf: np.ndarray
    G: Callable
    Z0: np.ndarray
    Z1: np.ndarray
    moments: object


def s_matrix(pot, bp, k, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """S(k) = -J(-k) J(k)^{-1} for real k != 0."""
    kr = float(k)
    if kr == 0.0:
        raise SingularJost("S(0) must go through s_at_zero, not direct inversion")
    ev_p = jost_matrix(pot, bp, kr, rtol=rtol, atol=atol)
    ev_m = jost_matrix(pot, bp, -kr, rtol=rtol, atol=atol)
    cond = float(np.linalg.cond(ev_p.J))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularJost(f"J({kr}) condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    s = -np.linalg.solve(ev_p.J.T, ev_m.J.T).T
    defect = row_sum_norm(s @ s.conj().T - np.eye(pot.n))
    return ScatteringSample(kr, s, defect,
                            (ev_p.err_est + ev_m.err_est) * cond)


def _theta_from_diagonal(bp, tol=1e-12):
    """theta vector when (A, B) is already a canonical diagonal pair, else None."""
    a, b = bp.A, bp.B
    n = bp.n
    off = np.ones((n, n), dtype=bool)
    np.fill_diagonal(off, False)
    if np.any(np.abs(a[off]) > tol) or np.any(np.abs(b[off]) > tol):
        return None
    ad, bd = np.diag(a), np.diag(b)
    if np.any(np.abs(ad.imag) > tol) or np.any(np.abs(bd.imag) > tol):
        return None
    sin_t, cos_t = -ad.real, bd.real
    if np.any(sin_t < -tol) or np.any(np.abs(sin_t ** 2 + cos_t ** 2 - 1.0) > 100 * tol):
        return None
    theta = np.arctan2(np.maximum(sin_t, 0.0), cos_t)
    if np.any(theta <= 0):
        return None  # theta = 0 lies outside (0, pi]; not a canonical diagonal
    return theta


def _canonical_data(bp, class_tol=1e-9):
    """(theta, M, T1, T2) frame for the zero-potential closed forms."""
    theta = _theta_from_diagonal(bp)
    if theta is not None:
        n = bp.n
        eye = np.eye(n, dtype=complex)
        pre = np.diag(1.0 / (np.cos(theta) - 1j * np.sin(theta)))
        post = np.diag(np.exp(-1j * theta))
        return theta, eye, pre, post
    cb = canonicalize(bp, class_tol=class_tol)
    return cb.theta, cb.basis, cb.pre_factor, cb.post_factor


def s0_reference(bp, k, *, class_tol=1e-9):
    """Zero-potential closed forms at k: (J0, J0_inv, S0).

    J0(k) = B - ik A directly from the pair; the inverse goes through the
    canonical diagonal. S0 is returned for real k only (None otherwise).
    """
    kk = complex(k)
    theta, basis, pre, post = _canonical_data(bp, class_tol)
    a, b = bp.A, bp.B
    j0 = b - 1j * kk * a
    diag = np.cos(theta) + 1j * kk * np.sin(theta)
    if np.any(np.abs(diag) < 1e-13 * (1 + abs(kk))):
        raise SingularJ0(f"B - ikA is singular at k = {kk}")
    j0_inv = pre @ basis @ post @ np.diag(1.0 / diag) @ basis.conj().T
    s0 = None
    if abs(kk.imag) == 0.0:
        s_diag = (-np.cos(theta) + 1j * kk * np.sin(theta)) / diag
        s0 = basis @ np.diag(s_diag) @ basis.conj().T
    return j0, j0_inv, s0


def s_at_zero(pot, bp, *, settle_tol=1e-6, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """S(0) by Richardson extrapolation along k -> 0+.

    S(k) is continuous at 0 with a linear leading correction; R = 2 S(k/2) - S(k)
    cancels it. Halves k from 1e-3 until successive extrapolants settle."""
    k0 = 1e-3
    s_prev = s_matrix(pot, bp, k0, rtol=rtol, atol=atol).S
    r_prev = None
    for _ in range(12):
        k0 *= 0.5
        s_cur = s_matrix(pot, bp, k0, rtol=rtol, atol=atol).S
        r_cur = 2.0 * s_cur - s_prev
        if r_prev is not None and row_sum_norm(r_cur - r_prev) < settle_tol:
            return r_cur
        s_prev, r_prev = s_cur, r_cur
    raise ExtrapolationDivergence(
        "S(k) extrapolants did not settle while halving k from 1e-3")


def _z_matrices(theta, class_tol=1e-9):
    n = len(theta)
    z0 = np.zeros((n, n), dtype=complex)
    z1 = np.zeros((n, n), dtype=complex)
    for j, t in enumerate(theta):
        if abs(t - np.pi) <= class_tol:
            z0[j, j] = -1.0  # Dirichlet
        elif abs(t - np.pi / 2) <= class_tol:
            z0[j, j] = 1.0  # Neumann
        else:
            z0[j, j] = 1.0
            z1[j, j] = np.cos(t) / np.sin(t)
    return z0, z1


def asymptotic_model(pot, bp, *, class_tol=1e-9, force_quadrature=False):
    """S_inf = M Z0 M^dagger and the 1/(ik) correction

    G(k) = -2 M Z1 M^dagger + Q1 S_inf + S_inf Q1 + S_inf Q2(k) S_inf + Q2(-k)

    with Q1 the half-integral of V and Q2 its oscillatory counterpart."""
    theta, basis, _, _ = _canonical_data(bp, class_tol)
    z0, z1 = _z_matrices(theta, class_tol)
    s_inf = basis @ z0 @ basis.conj().T
    ms = moments(pot, force_quadrature=force_quadrature)
    q1 = ms.first
    base = basis @ (-2.0 * z1) @ basis.conj().T + q1 @ s_inf + s_inf @ q1

    def g(k):
        return (base + s_inf @ ms.first_osc(k) @ s_inf + ms.first_osc(-k))

    return AsymptoticModel(s_inf, g, z0, z1, ms)


def model_f_origin(pot, k, *, force_quadrature=False):
    """Truncated large-k expansions of f(-k*,0)^dagger and f'(-k*,0)^dagger."""
    kk = complex(k)
    ms = moments(pot, force_quadrature=force_quadrature)
    q1, q3 = ms.first, ms.second_ordered
    q2 = ms.first_osc(kk)
    q4 = ms.second_osc_outer(kk)
    q5 = ms.second_osc_inner(kk)
    q6 = ms.second_osc_diff(kk)
    eye = np.eye(pot.n, dtype=complex)
    f_dag = (eye + (-q1 + q2) / (1j * kk)
             + (-q3 - q4 + q5 + q6) / (kk * kk))
    fp_dag = (1j * kk * eye - q1 - q2
              + (q3 - q4 + q5 - q6) / (1j * kk))
    return f_dag, fp_dag


def model_J(pot, bp, k, *, force_quadrature=False):
    """J(k) = -ikA + B + [Q1 + Q2(k)]A + P(k)/(ik) with
    P(k) = [-Q1 + Q2(k)]B + [-Q3 + Q4(k) - Q5(k) + Q6(k)]A."""
    kk = complex(k)
    ms = moments(pot, force_quadrature=force_quadrature)
    q1, q3 = ms.first, ms.second_ordered
    q2 = ms.first_osc(kk)
    q4 = ms.second_osc_outer(kk)
    q5 = ms.second_osc_inner(kk)
    q6 = ms.second_osc_diff(kk)
    a, b = bp.A, bp.B
    p_of_k = (-q1 + q2) @ b + (-q3 + q4 - q5 + q6) @ a
    return -1j * kk * a + b + (q1 + q2) @ a + p_of_k / (1j * kk)
