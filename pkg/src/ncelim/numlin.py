"""Dense Hermitian linear algebra: eigensolvers, PSD queries, kernels, norms.

Two eigensolvers are provided.  ``jacobi_eigh`` is a cyclic complex Jacobi
method; LAPACK (``numpy.linalg.eigh``) is the default backend because it is
two orders of magnitude faster on the small matrices used everywhere else.
The test-suite checks the two against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_TOL


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class EigResult:
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are orthonormal eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    return A


def is_hermitian(M, tol: float = DEFAULT_TOL.herm) -> bool:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= tol * scale)


def hermitize(M, tol: float = DEFAULT_TOL.herm) -> np.ndarray:
    """Validate ``M`` as Hermitian and return the symmetrized copy (M + M*)/2."""
    A = as_matrix(M)
    if not is_hermitian(A, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return 0.5 * (A + A.conj().T)


def jacobi_eigh(M, tol: float = DEFAULT_TOL.eig, max_sweeps: int = 100) -> EigResult:
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.

    Each rotation annihilates one off-diagonal pair; sweeps stop once the
    off-diagonal Frobenius norm drops below ``tol * ||M||_F``.
    """
    A = hermitize(M).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # unitary rotation in the (p, q) plane zeroing A[p, q]
                phase = apq / abs(apq)
                app, aqq = A[p, p].real, A[q, q].real
                theta = 0.5 * np.arctan2(2.0 * abs(apq), aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                R = np.array([[c, s * phase], [-s * np.conj(phase), c]], dtype=complex)
                # columns p, q: A <- A R ; rows: A <- R* A
                cols = A[:, [p, q]] @ R
                A[:, [p, q]] = cols
                rows = R.conj().T @ A[[p, q], :]
                A[[p, q], :] = rows
                A[p, q] = A[q, p] = 0.0
                V[:, [p, q]] = V[:, [p, q]] @ R
    values = np.real(np.diag(A))
    order = np.argsort(values)
    return EigResult(values[order], V[:, order])


def herm_eig(M, method: str = "lapack") -> EigResult:
    A = hermitize(M)
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    w, V = np.linalg.eigh(A)
    return EigResult(w, V)


def eigvalsh(M) -> np.ndarray:
    A = as_matrix(M)
    return np.linalg.eigvalsh(0.5 * (A + A.conj().T))


def min_eig(M) -> float:
    A = as_matrix(M)
    if A.size == 0:
        return float("inf")
    return float(eigvalsh(A)[0])


def min_eigpair(M) -> tuple[float, np.ndarray]:
    A = as_matrix(M)
    w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    return float(w[0]), V[:, 0]


def operator_norm(M) -> float:
    A = as_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def rayleigh(M, v) -> float:
    v = np.asarray(v, dtype=complex)
    return float(np.real(v.conj() @ as_matrix(M) @ v) / np.real(v.conj() @ v))


def kernel_basis(M, tol: float = DEFAULT_TOL.kernel) -> np.ndarray:
    """Orthonormal columns spanning eigenvectors with |lambda| <= tol * ||M||."""
    A = hermitize(M)
    n = A.shape[0]
    w, V = np.linalg.eigh(A)
    norm = float(np.max(np.abs(w), initial=0.0))
    if norm == 0.0:
        return np.eye(n, dtype=complex)
    return V[:, np.abs(w) <= tol * norm]


def range_basis(M, tol: float = DEFAULT_TOL.kernel) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors and eigenvalues for the complement of ``kernel_basis``."""
    A = hermitize(M)
    w, V = np.linalg.eigh(A)
    norm = float(np.max(np.abs(w), initial=0.0))
    keep = np.abs(w) > tol * norm if norm > 0 else np.zeros(len(w), bool)
    return V[:, keep], w[keep]


def numerical_rank(M, tol: float = DEFAULT_TOL.kernel) -> int:
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def psd_sqrt(M) -> np.ndarray:
    e = herm_eig(M)
    return (e.vectors * np.sqrt(np.clip(e.values, 0.0, None))) @ e.vectors.conj().T


def complete_block(A, B, C, eps: float) -> float:
    """Shift that makes [[A, B], [B*, C + shift*I]] at least eps/2 * I.

    Requires A >= eps * I with eps > 0.
    """
    A = hermitize(A)
    C = hermitize(C)
    B = as_matrix(B)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if B.shape != (A.shape[0], C.shape[0]):
        raise ValueError(f"B has shape {B.shape}, expected {(A.shape[0], C.shape[0])}")
    if min_eig(A) < eps * (1.0 - 1e-12):
        raise ValueError("A is not bounded below by eps")
    return 2.0 * operator_norm(B) ** 2 / eps + eps / 2.0 + operator_norm(C)


def assemble_block(A, B, C, lam: float) -> np.ndarray:
    A, B, C = as_matrix(A), as_matrix(B), as_matrix(C)
    k = C.shape[0]
    return np.block([[A, B], [B.conj().T, C + lam * np.eye(k)]])


@lru_cache(maxsize=32)
def _herm_basis(s: int) -> np.ndarray:
    mats = []
    for j in range(s):
        E = np.zeros((s, s), complex)
        E[j, j] = 1.0
        mats.append(E)
    r = 1.0 / np.sqrt(2.0)
    for j in range(s):
        for k in range(j + 1, s):
            E = np.zeros((s, s), complex)
            E[j, k] = E[k, j] = r
            mats.append(E)
    for j in range(s):
        for k in range(j + 1, s):
            E = np.zeros((s, s), complex)
            E[j, k] = 1j * r
            E[k, j] = -1j * r
            mats.append(E)
    out = np.array(mats)
    out.setflags(write=False)
    return out


def herm_basis(s: int) -> np.ndarray:
    """Orthonormal real basis of s x s Hermitian matrices, shape (s*s, s, s).

    Order: E_jj, then (E_jk + E_kj)/sqrt2, then i(E_jk - E_kj)/sqrt2 for j < k.
    """
    return _herm_basis(s)


def herm_coords(M) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in ``herm_basis``."""
    A = as_matrix(M)
    basis = herm_basis(A.shape[0])
    # <H, M> = tr(H* M) = tr(H M) for Hermitian H
    return np.real(np.einsum("kij,ji->k", basis, A))


def herm_from_coords(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = int(round(np.sqrt(x.size)))
    if s * s != x.size:
        raise ValueError("coordinate vector length is not a perfect square")
    return np.tensordot(x, herm_basis(s), axes=1)


def canonical_phase(W) -> np.ndarray:
    """W times a unit scalar making its first largest-modulus entry real positive."""
    W = as_matrix(W)
    flat = W.reshape(-1)
    if flat.size == 0:
        return W
    top = np.max(np.abs(flat))
    if top == 0:
        return W
    k = int(np.argmax(np.abs(flat) > top * (1 - 1e-9)))
    return W * (abs(flat[k]) / flat[k])


def random_hermitian(s: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    G = rng.normal(size=(s, s)) + 1j * rng.normal(size=(s, s))
    return scale * 0.5 * (G + G.conj().T)


def random_unitary(s: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(s, s)) + 1j * rng.normal(size=(s, s))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
