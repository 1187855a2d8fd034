import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncelim import numlin
from strategies import seeds


@given(seeds, st.integers(1, 8))
def test_jacobi_matches_lapack(seed, s):
    M = numlin.random_hermitian(s, np.random.default_rng(seed))
    jac = numlin.jacobi_eigh(M)
    lap = numlin.herm_eig(M)
    assert np.allclose(jac.values, lap.values, atol=1e-9 * (1 + np.abs(lap.values).max()))
    assert np.allclose(jac.vectors.conj().T @ jac.vectors, np.eye(s), atol=1e-9)
    assert np.allclose(jac.reconstruct(), M, atol=1e-9 * (1 + np.linalg.norm(M)))


@given(seeds, st.integers(1, 6))
def test_eigpairs_satisfy_definition(seed, s):
    M = numlin.random_hermitian(s, np.random.default_rng(seed), scale=3.0)
    res = numlin.herm_eig(M)
    for lam, v in zip(res.values, res.vectors.T):
        assert np.linalg.norm(M @ v - lam * v) <= 1e-10 * (1 + numlin.operator_norm(M))
    assert np.all(np.diff(res.values) >= 0)


def test_non_hermitian_rejected():
    with pytest.raises(numlin.NotHermitianError):
        numlin.hermitize(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(2, 5), st.integers(0, 4))
def test_kernel_basis_dimension(seed, s, k):
    rng = np.random.default_rng(seed)
    k = min(k, s - 1)
    U = numlin.random_unitary(s, rng)
    eigs = np.concatenate([np.zeros(k), rng.uniform(0.5, 2.0, s - k)])
    M = (U * eigs) @ U.conj().T
    K = numlin.kernel_basis(M)
    assert K.shape == (s, k)
    assert np.linalg.norm(M @ K) < 1e-8
    assert numlin.numerical_rank(M) == s - k


@given(seeds, st.integers(1, 3), st.integers(1, 3), st.floats(0.01, 3.0))
def test_block_completion_margin(seed, a, c, eps):
    rng = np.random.default_rng(seed)
    U = numlin.random_unitary(a, rng)
    A = (U * (eps + rng.uniform(0, 2, a) * (np.arange(a) > 0))) @ U.conj().T
    B = rng.normal(size=(a, c)) + 1j * rng.normal(size=(a, c))
    C = numlin.random_hermitian(c, rng, scale=3.0)
    lam = numlin.complete_block(A, B, C, eps)
    assert lam == pytest.approx(2 * numlin.operator_norm(B) ** 2 / eps + eps / 2 + numlin.operator_norm(C))
    assert numlin.min_eig(numlin.assemble_block(A, B, C, lam)) >= eps / 2 - 1e-9


@given(seeds, st.integers(1, 5))
def test_herm_coords_roundtrip_and_isometry(seed, s):
    rng = np.random.default_rng(seed)
    X, Y = numlin.random_hermitian(s, rng), numlin.random_hermitian(s, rng)
    assert np.allclose(numlin.herm_from_coords(numlin.herm_coords(X)), X)
    inner = np.trace(X @ Y).real
    assert numlin.herm_coords(X) @ numlin.herm_coords(Y) == pytest.approx(inner, abs=1e-10)


def test_herm_basis_orthonormal():
    B = numlin.herm_basis(3)
    G = np.array([[np.trace(X @ Y).real for Y in B] for X in B])
    assert len(B) == 9
    assert np.allclose(G, np.eye(9))


def test_canonical_phase():
    W = np.array([[-1j], [0.5j]])
    out = numlin.canonical_phase(W)
    assert out[0, 0] == pytest.approx(1.0)
    assert np.allclose(np.abs(out), np.abs(W))
