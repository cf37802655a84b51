import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_unitary
from halfscat.errors import NotHermitian, NotPositiveDefinite, NotUnitary
from halfscat.matkernel import hermitian_sqrt, kernel, row_sum_norm, unitary_eig

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=4)


def _cmat(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@given(seeds, dims)
@settings(max_examples=60, deadline=None)
def test_row_sum_norm_is_an_operator_norm(seed, n):
    rng = np.random.default_rng(seed)
    a, b = _cmat(rng, n), _cmat(rng, n)
    na, nb = row_sum_norm(a), row_sum_norm(b)
    assert na >= 0
    assert row_sum_norm(a + b) <= na + nb + 1e-12
    assert row_sum_norm(a @ b) <= na * nb + 1e-12
    assert abs(row_sum_norm(np.eye(n)) - 1.0) < 1e-15
    # consistency with the action on vectors (max absolute row sum)
    x = np.ones(n, dtype=complex)
    assert np.max(np.abs(a @ x)) <= na + 1e-12


@given(seeds, dims)
@settings(max_examples=40, deadline=None)
def test_hermitian_sqrt_squares_back(seed, n):
    rng = np.random.default_rng(seed)
    w = _cmat(rng, n)
    p = w @ w.conj().T + 0.1 * np.eye(n)
    r = hermitian_sqrt(p)
    assert row_sum_norm(r - r.conj().T) < 1e-10 * row_sum_norm(r)
    assert row_sum_norm(r @ r - p) < 1e-10 * row_sum_norm(p)
    assert np.linalg.eigvalsh(r)[0] > 0


def test_hermitian_sqrt_rejects_bad_input():
    with pytest.raises(NotHermitian):
        hermitian_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotPositiveDefinite):
        hermitian_sqrt(np.diag([1.0, -1.0]))


@given(seeds, dims, st.integers(min_value=0, max_value=3))
@settings(max_examples=60, deadline=None)
def test_kernel_dimension_and_annihilation(seed, n, drop):
    drop = min(drop, n)
    rng = np.random.default_rng(seed)
    u = rand_unitary(rng, n)
    v = rand_unitary(rng, n)
    s = np.concatenate([1.0 + rng.random(n - drop), np.zeros(drop)])
    m = (u * s) @ v.conj().T
    kb = kernel(m)
    assert kb.dim == drop
    assert kb.basis.shape == (n, drop)
    if drop:
        assert row_sum_norm(kb.basis.conj().T @ kb.basis - np.eye(drop)) < 1e-10
        assert np.max(np.abs(m @ kb.basis)) < 1e-10


def test_kernel_external_scale():
    # a uniformly tiny matrix has no kernel relative to itself but is all
    # kernel against an external size reference
    m = np.array([[1e-11]])
    assert kernel(m).dim == 0
    assert kernel(m, scale=1.0).dim == 1
    assert kernel(np.zeros((2, 2))).dim == 2


@given(seeds, dims)
@settings(max_examples=40, deadline=None)
def test_unitary_eig_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    u = rand_unitary(rng, n)
    zetas, v = unitary_eig(u)
    assert row_sum_norm(v @ v.conj().T - np.eye(n)) < 1e-9
    d = v.conj().T @ u @ v
    assert row_sum_norm(d - np.diag(np.exp(2j * zetas))) < 1e-8
    assert np.all(zetas > 0) and np.all(zetas <= np.pi + 1e-12)


def test_unitary_eig_degenerate_spectrum_stays_orthonormal():
    # identity: every eigenvalue sits on the branch cut, zeta = pi exactly
    zetas, v = unitary_eig(np.eye(3, dtype=complex))
    assert np.allclose(zetas, np.pi)
    assert row_sum_norm(v @ v.conj().T - np.eye(3)) < 1e-12

    # conjugate pair e^{+-i phi} plus a repeated -1 block
    phi = 0.3
    u = np.diag([np.exp(1j * phi), np.exp(-1j * phi), -1.0, -1.0])
    rng = np.random.default_rng(5)
    m = rand_unitary(rng, 4)
    zetas, v = unitary_eig(m @ u @ m.conj().T)
    assert row_sum_norm(v @ v.conj().T - np.eye(4)) < 1e-9
    got = np.sort(zetas)
    want = np.sort([phi / 2, np.pi - phi / 2, np.pi / 2, np.pi / 2])
    assert np.allclose(got, want, atol=1e-8)


def test_unitary_eig_rejects_nonunitary():
    with pytest.raises(NotUnitary):
        unitary_eig(np.diag([2.0, 1.0]))
