"""Shared helpers: random valid boundary pairs and closed-form oracles.

Everything here is independent of the integrator under test. The square-well
oracle matches exponentials by hand at the support edge, so disagreement
with the library points at the library, not the oracle.
"""

import numpy as np

from halfscat import piecewise_constant, validate_pair


def rand_unitary(rng, n):
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(w)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_valid_pair(rng, n):
    # Every selfadjoint condition arises as B = (I + U)W/2, A = (I - U)W/(2i)
    # with U unitary, W invertible: then A^dagger B = (i/4) W^dagger (U - U^dagger) W
    # is Hermitian and A^dagger A + B^dagger B = W^dagger W > 0.
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u = rand_unitary(rng, n)
    b = (w + u @ w) / 2.0
    a = (w - u @ w) / 2.0j
    return validate_pair(a, b)


def scalar_well(depth, width=np.pi):
    """V = -depth on [0, width], zero beyond (scalar, attractive for depth > 0)."""
    return piecewise_constant([0.0, float(width)],
                              [np.array([[-depth]], dtype=complex)])


def scalar_well_f0(k, depth=4.0, width=np.pi):
    """Jost solution of -f'' - depth f = k^2 f at x = 0, matched to e^{ikx}
    at x = width. Valid for complex k; even in the internal momentum root."""
    kk = complex(k)
    w = float(width)
    q = np.sqrt(kk * kk + depth + 0j)
    ph = np.exp(1j * kk * w)
    c = np.cos(q * w)
    s_over_q = w * np.sinc(q * w / np.pi)
    f0 = ph * (c - 1j * kk * s_over_q)
    fp0 = ph * (1j * kk * c + q * q * s_over_q)
    return complex(f0), complex(fp0)


def scalar_well_detJ_dirichlet(kappa, depth=4.0, width=np.pi):
    """J(i kappa) for the Dirichlet condition: just f(i kappa, 0), real."""
    f0, _ = scalar_well_f0(1j * kappa, depth, width)
    return f0.real


def shooting_well_kappas(depth=4.0, width=np.pi):
    """Independent oracle: bound states of the Dirichlet well solve
    q cot(q w) = -kappa with q = sqrt(depth - kappa^2)."""
    from scipy.optimize import brentq

    def rel(kappa):
        q = np.sqrt(depth - kappa * kappa)
        return q * np.cos(q * width) + kappa * np.sin(q * width)

    roots = []
    grid = np.linspace(1e-6, np.sqrt(depth) - 1e-9, 400)
    vals = [rel(g) for g in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(rel, a, b, xtol=1e-12))
    return roots


def two_channel_mixture(angle=np.pi / 4, depth=4.0, width=np.pi, seed=7):
    """A Robin free channel direct-summed with a Dirichlet well channel,
    hidden behind a fixed unitary conjugation and a right factor.

    Returns (potential, boundary_pair, N_expected): one free-channel bound
    state at kappa = cot(angle) plus the well's Dirichlet levels.
    """
    rng = np.random.default_rng(seed)
    a = np.diag([-np.sin(angle), 0.0]).astype(complex)
    b = np.diag([np.cos(angle), 1.0]).astype(complex)
    vals = np.zeros((1, 2, 2), dtype=complex)
    vals[0, 1, 1] = -depth
    pot = piecewise_constant([0.0, float(width)], vals)

    m = rand_unitary(rng, 2)
    t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    t += 3.0 * np.eye(2)  # keep the right factor well conditioned
    a2 = m.conj().T @ a @ m @ t
    b2 = m.conj().T @ b @ m @ t
    vals2 = np.array([m.conj().T @ vals[0] @ m])
    pot2 = piecewise_constant([0.0, float(width)], vals2)
    return pot2, validate_pair(a2, b2), m
