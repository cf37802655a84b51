"""Dense complex matrix kernels shared by every other module.

All matrices here are small (n <= 32) numpy arrays of complex128. The norm used
throughout the package is the maximum absolute row sum, which is the natural
norm for the potential integrability classes and all error budgets.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite, NotUnitary


def row_sum_norm(m):
    """Maximum absolute row sum of a matrix (vectors: sum of |entries|)."""
    m = np.asarray(m)
    if m.ndim == 1:
        return float(np.sum(np.abs(m)))
    return float(np.max(np.sum(np.abs(m), axis=1)))


def _as_square(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotHermitian(f"{name} has non-finite entries")
    return m


def hermitian_sqrt(p, herm_tol=1e-10, pos_tol=1e-12):
    """Unique positive Hermitian square root of a positive Hermitian matrix.

    Tolerances are relative: `herm_tol` bounds ||P - P^dagger|| against ||P||,
    `pos_tol` is the positivity floor for eigenvalues against the largest one.
    """
    p = _as_square(p, "P")
    scale = row_sum_norm(p)
    if row_sum_norm(p - p.conj().T) > herm_tol * max(scale, 1.0):
        raise NotHermitian("P is not Hermitian within tolerance")
    w, v = np.linalg.eigh((p + p.conj().T) / 2.0)
    if w[0] <= pos_tol * max(w[-1], 0.0) or w[-1] <= 0.0:
        raise NotPositiveDefinite(f"min eigenvalue {w[0]:.3e} is not positive")
    return (v * np.sqrt(w)) @ v.conj().T


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis of a numerical null space: `basis` is n x dim."""

    dim: int
    basis: np.ndarray


def kernel(m, tol=1e-8, scale=None):
    """Numerical kernel via SVD: singular values <= tol * scale count as zero.

    scale defaults to sigma_max, which is the right reference for a healthy
    matrix but collapses when the matrix vanishes as a whole (a scalar Jost
    matrix at its bound state); callers with an external notion of size pass
    it explicitly. The zero matrix has full kernel by convention.
    """
    m = _as_square(m, "M")
    n = m.shape[0]
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if scale is None:
        scale = smax
    if scale == 0.0:
        return KernelBasis(dim=n, basis=np.eye(n, dtype=complex))
    dim = int(np.sum(s <= tol * scale))
    if dim == 0:
        return KernelBasis(dim=0, basis=np.zeros((n, 0), dtype=complex))
    # rows of vh are right-singular vectors; the trailing ones span the kernel
    return KernelBasis(dim=dim, basis=vh[n - dim:].conj().T.copy())


def unitary_eig(u, unitary_tol=1e-10, cluster_tol=1e-8, branch_tol=1e-9):
    """Eigendecomposition of a unitary matrix with a guaranteed unitary basis.

    Returns (zetas, v) with v^dagger u v = diag(exp(2i zeta_j)) and each
    zeta_j in (0, pi]. Eigenvalues on the branch cut (argument within
    branch_tol of 0) land at zeta = pi, so the identity eigenvalue is
    classified as a Dirichlet channel downstream.

    The decomposition goes through the commuting Hermitian pair
    (u + u^dagger)/2 and (u - u^dagger)/2i: eigh gives an orthonormal basis of
    the first, and eigenvalue clusters (gap < cluster_tol) are split by
    diagonalizing the second restricted to the cluster. This keeps v exactly
    orthonormal even for degenerate spectra, where a general eigensolver would
    not.
    """
    u = _as_square(u, "U")
    n = u.shape[0]
    if row_sum_norm(u @ u.conj().T - np.eye(n)) > unitary_tol * max(1.0, row_sum_norm(u) ** 2):
        raise NotUnitary("U U^dagger deviates from the identity beyond tolerance")

    h_re = (u + u.conj().T) / 2.0
    h_im = (u - u.conj().T) / 2j
    w, v = np.linalg.eigh(h_re)

    # split eigh's arbitrary mixtures inside near-degenerate clusters of h_re
    # by the imaginary part, which separates conjugate eigenvalue pairs
    start = 0
    for stop in range(1, n + 1):
        if stop < n and w[stop] - w[stop - 1] < cluster_tol:
            continue
        if stop - start > 1:
            vc = v[:, start:stop]
            block = vc.conj().T @ h_im @ vc
            _, q = np.linalg.eigh((block + block.conj().T) / 2.0)
            v[:, start:stop] = vc @ q
        start = stop

    lam = np.einsum("ij,ij->j", v.conj(), u @ v)
    lam = lam / np.abs(lam)
    ang = np.angle(lam)
    ang = np.where(ang <= branch_tol, ang + 2.0 * np.pi, ang)
    return ang / 2.0, v
