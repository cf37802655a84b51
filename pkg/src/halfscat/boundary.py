"""Selfadjoint boundary pairs (A, B) and their canonical diagonal form.

A pair (A, B) encodes the vertex condition -B^dagger psi(0) + A^dagger psi'(0)
= 0. It is selfadjoint when A^dagger B is Hermitian and A^dagger A +
B^dagger B is positive. Every such pair is equivalent to a diagonal pair
built from angles theta_j in (0, pi]:

    A_tilde = -diag(sin theta),   B_tilde = diag(cos theta)

with theta = pi a Dirichlet channel, theta = pi/2 a Neumann channel, and
anything else a mixed (Robin) channel. The equivalence is

    A_tilde = basis^dagger (A pre_factor) basis post_factor

(and the same for B), with `basis` unitary and the two right factors
invertible; right factors never change the boundary condition itself.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotUnitary,
    RankDeficient,
    SelfadjointnessViolated,
    SingularTransform,
)
from .matkernel import hermitian_sqrt, row_sum_norm, unitary_eig

COND_LIMIT = 1e12


@dataclass(frozen=True)
class BoundaryPair:
    A: np.ndarray
    B: np.ndarray

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class CanonicalBoundary:
    """Diagonal form of a boundary pair plus the transformation that reaches it.

    theta is ordered mixed channels first (ascending), then Dirichlet
    (theta = pi exactly), then Neumann (theta = pi/2 exactly); `basis` already
    contains the permutation. reconstruction_residual records how well the
    composite transform reproduces the diagonal pair.
    """

    theta: np.ndarray
    basis: np.ndarray
    pre_factor: np.ndarray
    post_factor: np.ndarray
    n_mixed: int
    n_dirichlet: int
    n_neumann: int
    reconstruction_residual: float

    @property
    def n(self):
        return len(self.theta)


def validate_pair(a, b, tol=1e-10):
    """Check the selfadjointness conditions and return the validated pair."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"A must be square, got shape {a.shape}")
    if a.shape != b.shape:
        raise DimensionMismatch(f"A and B shapes differ: {a.shape} vs {b.shape}")

    scale = (row_sum_norm(a) + row_sum_norm(b)) ** 2
    herm_defect = row_sum_norm(a.conj().T @ b - b.conj().T @ a)
    if herm_defect > tol * max(scale, 1e-300):
        raise SelfadjointnessViolated(
            f"A^dagger B is not Hermitian: defect {herm_defect:.3e} "
            f"against scale {scale:.3e}"
        )

    gram = a.conj().T @ a + b.conj().T @ b
    w = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
    if w[-1] <= 0.0 or w[0] < tol * w[-1]:
        raise RankDeficient(
            f"A^dagger A + B^dagger B has eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}]"
        )
    return BoundaryPair(A=a, B=b)


def pair_from_angles(theta):
    """Diagonal boundary pair (-diag(sin theta), diag(cos theta))."""
    theta = np.asarray(theta, dtype=float)
    return validate_pair(np.diag(-np.sin(theta) + 0j), np.diag(np.cos(theta) + 0j))


def dirichlet_pair(n):
    return validate_pair(np.zeros((n, n), dtype=complex), np.eye(n, dtype=complex))


def neumann_pair(n):
    return validate_pair(-np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex))


def compute_E(bp):
    """Positive Hermitian root of A^dagger A + B^dagger B."""
    gram = bp.A.conj().T @ bp.A + bp.B.conj().T @ bp.B
    return hermitian_sqrt((gram + gram.conj().T) / 2.0)


def compute_U(bp):
    """The unitary (B - iA)(B + iA)^{-1} carrying all boundary information."""
    plus = bp.B + 1j * bp.A
    minus = bp.B - 1j * bp.A
    # (B + iA) is invertible for every valid pair; failure here means a bad
    # pair slipped past validation
    return np.linalg.solve(plus.conj().T, minus.conj().T).conj().T


def canonicalize(bp, class_tol=1e-9):
    """Reduce a valid pair to its diagonal angle form.

    Angles within class_tol of pi or pi/2 are snapped exactly, so downstream
    channel-type branches (cot, csc evaluations) never see a nearly-Dirichlet
    angle. post_factor is built from the snapped angles.
    """
    n = bp.n
    zetas, v = unitary_eig(compute_U(bp))

    snapped = zetas.copy()
    kind = np.zeros(n, dtype=int)  # 0 mixed, 1 dirichlet, 2 neumann
    for j in range(n):
        if abs(zetas[j] - np.pi) <= class_tol:
            snapped[j] = np.pi
            kind[j] = 1
        elif abs(zetas[j] - np.pi / 2) <= class_tol:
            snapped[j] = np.pi / 2
            kind[j] = 2

    mixed = sorted(np.flatnonzero(kind == 0), key=lambda j: snapped[j])
    dir_idx = list(np.flatnonzero(kind == 1))
    neu_idx = list(np.flatnonzero(kind == 2))
    perm = [*mixed, *dir_idx, *neu_idx]

    theta = snapped[perm]
    basis = v[:, perm]
    pre = np.linalg.inv(bp.B + 1j * bp.A)
    post = np.diag(np.exp(-1j * theta))

    a_tilde, b_tilde = _canonical_diagonals(theta, len(mixed), len(dir_idx))
    a_got = basis.conj().T @ (bp.A @ pre) @ basis @ post
    b_got = basis.conj().T @ (bp.B @ pre) @ basis @ post
    residual = max(row_sum_norm(a_got - a_tilde), row_sum_norm(b_got - b_tilde))

    return CanonicalBoundary(
        theta=theta,
        basis=basis,
        pre_factor=pre,
        post_factor=post,
        n_mixed=len(mixed),
        n_dirichlet=len(dir_idx),
        n_neumann=len(neu_idx),
        reconstruction_residual=residual,
    )


def _canonical_diagonals(theta, n_mixed, n_dirichlet):
    """Exact diagonal matrices for snapped angles (no sin(pi) residue)."""
    n = len(theta)
    a_diag = np.zeros(n, dtype=complex)
    b_diag = np.zeros(n, dtype=complex)
    for j in range(n):
        if n_mixed <= j < n_mixed + n_dirichlet:
            a_diag[j], b_diag[j] = 0.0, -1.0
        elif j >= n_mixed + n_dirichlet:
            a_diag[j], b_diag[j] = -1.0, 0.0
        else:
            a_diag[j], b_diag[j] = -np.sin(theta[j]), np.cos(theta[j])
    return np.diag(a_diag), np.diag(b_diag)


def canonical_pair(cb):
    """The diagonal BoundaryPair described by a CanonicalBoundary."""
    a_tilde, b_tilde = _canonical_diagonals(cb.theta, cb.n_mixed, cb.n_dirichlet)
    return BoundaryPair(A=a_tilde, B=b_tilde)


def reconstruct_pair(cb):
    """Invert the canonical transform: recover a pair equivalent to the input."""
    a_tilde, b_tilde = _canonical_diagonals(cb.theta, cb.n_mixed, cb.n_dirichlet)
    post_inv = np.diag(np.exp(1j * cb.theta))
    pre_inv = np.linalg.inv(cb.pre_factor)
    a = cb.basis @ a_tilde @ post_inv @ cb.basis.conj().T @ pre_inv
    b = cb.basis @ b_tilde @ post_inv @ cb.basis.conj().T @ pre_inv
    return validate_pair(a, b)


def transform_pair(bp, unitary=None, right=None, tol=1e-10):
    """Equivalence transformations of a boundary pair.

    unitary: conjugate both matrices, (A, B) -> (M^dagger A M, M^dagger B M);
    this is the transform that accompanies V -> M^dagger V M.
    right: right-multiply both matrices by an invertible T; the boundary
    condition (and everything computed from it) is unchanged.
    With both given the conjugation is applied first.
    """
    a, b = bp.A, bp.B
    if unitary is not None:
        m = np.asarray(unitary, dtype=complex)
        if row_sum_norm(m @ m.conj().T - np.eye(m.shape[0])) > tol:
            raise NotUnitary("conjugation matrix is not unitary within tolerance")
        a = m.conj().T @ a @ m
        b = m.conj().T @ b @ m
    if right is not None:
        t = np.asarray(right, dtype=complex)
        if np.linalg.cond(t) > COND_LIMIT:
            raise SingularTransform("right factor is numerically singular")
        a = a @ t
        b = b @ t
    return validate_pair(a, b)
