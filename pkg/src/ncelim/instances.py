"""Random instance generators with planted structure, shared by tests and scripts."""

from __future__ import annotations

import numpy as np

from . import numlin
from .elim import ElimInstance, Mode
from .ncpoly import FreeMatrixPoly, HermTuple, compress, evaluate, random_poly, random_tuple


def shift_constant(p: FreeMatrixPoly, c: float) -> FreeMatrixPoly:
    return p + FreeMatrixPoly.constant(c * np.eye(p.d), p.n)


def random_with_spectrum(eigs, rng: np.random.Generator) -> np.ndarray:
    U = numlin.random_unitary(len(eigs), rng)
    return (U * np.asarray(eigs, dtype=float)) @ U.conj().T


def random_indefinite_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    eigs = rng.uniform(0.2, 2.0, size=d) * rng.choice([-1.0, 1.0], size=d)
    eigs[0], eigs[-1] = abs(eigs[0]), -abs(eigs[-1])
    return random_with_spectrum(eigs, rng)


def random_psd_with_kernel(d: int, kernel_dim: int, rng: np.random.Generator) -> np.ndarray:
    eigs = np.concatenate([np.zeros(kernel_dim), rng.uniform(0.3, 2.0, size=d - kernel_dim)])
    return random_with_spectrum(eigs, rng)


def random_elim_instance(
    rng: np.random.Generator,
    d: int = 2,
    m: int = 1,
    s: int = 1,
    n: int = 1,
    degree: int = 1,
    mode: Mode = Mode.NONSTRICT,
    shift: float | None = None,
) -> ElimInstance:
    """Random p with indefinite B's; the constant shift balances both outcomes."""
    p = random_poly(d, n, degree, rng)
    shift = rng.uniform(0.0, 4.0) if shift is None else shift
    p = shift_constant(p, shift)
    Bs = tuple(random_indefinite_matrix(d, rng) for _ in range(m))
    return ElimInstance(p, Bs, random_tuple(n, s, rng), mode)


def random_psd_instance(
    rng: np.random.Generator, d: int = 2, s: int = 1, n: int = 1, degree: int = 1
) -> tuple[FreeMatrixPoly, np.ndarray, HermTuple]:
    """(p, B, T) with B nonzero semidefinite (random sign) and a kernel of random size."""
    k = int(rng.integers(0, d))
    B = random_psd_with_kernel(d, k, rng) * rng.choice([-1.0, 1.0])
    p = shift_constant(random_poly(d, n, degree, rng), rng.uniform(-1.0, 3.0))
    return p, B, random_tuple(n, s, rng)


def random_neither_span(d: int, m: int, rng: np.random.Generator) -> tuple[np.ndarray, ...]:
    """B_1 PSD with a kernel containing v, all B_i with v* B_i v = 0.

    Every element then vanishes on v, so the span has no definite element,
    while B_1 is a nonzero PSD element.
    """
    kdim = int(rng.integers(1, d))
    B1 = random_psd_with_kernel(d, kdim, rng)
    V = numlin.kernel_basis(B1)
    v = V[:, 0]
    out = [B1]
    for _ in range(m - 1):
        H = numlin.random_hermitian(d, rng)
        H = H - np.real(v.conj() @ H @ v) * np.outer(v, v.conj())
        out.append(H)
    # hide the PSD element inside a random basis change of the span
    G = rng.normal(size=(m, m))
    while abs(np.linalg.det(G)) < 0.2:
        G = rng.normal(size=(m, m))
    return tuple(sum(G[i, j] * out[j] for j in range(m)) for i in range(m))


def random_neither_instance(
    rng: np.random.Generator, d: int = 3, m: int = 2, s: int = 1, n: int = 1, degree: int = 1
) -> ElimInstance:
    Bs = random_neither_span(d, m, rng)
    p = shift_constant(random_poly(d, n, degree, rng), rng.uniform(-1.0, 3.0))
    return ElimInstance(p, Bs, random_tuple(n, s, rng), Mode.STRICT)


def random_subspace(d: int, rng: np.random.Generator) -> "HermSubspace":
    """Span of random Hermitian matrices, tilted towards each classification.

    A quarter contain a positive definite element, a quarter lie inside the
    orthogonal complement of a positive definite matrix, a quarter carry a
    semidefinite element with a kernel shared by the whole span, and the
    rest are generic.
    """
    from .subspace import HermSubspace

    n = d * d
    kind = rng.integers(0, 4)
    if kind == 3:
        mats = list(random_neither_span(d, int(rng.integers(1, n - 1)) if n > 2 else 1, rng))
    elif kind == 1:
        # elements orthogonal to a PD matrix P: the span has no nonzero PSD element
        P = random_with_spectrum(rng.uniform(0.3, 2.0, size=d), rng)
        k = int(rng.integers(1, n))
        coords = rng.normal(size=(k, n))
        pc = numlin.herm_coords(P)
        coords -= np.outer(coords @ pc, pc) / (pc @ pc)
        mats = [numlin.herm_from_coords(c) for c in coords]
    else:
        k = int(rng.integers(1, n))
        mats = [numlin.random_hermitian(d, rng) for _ in range(k)]
        if kind == 0:
            mats[0] = random_with_spectrum(rng.uniform(0.3, 2.0, size=d), rng)
    return HermSubspace.spanned_by(mats, d=d)[0]


def planted_violation(
    rng: np.random.Generator, d: int = 2, s: int = 1, n: int = 1, mode: Mode = Mode.NONSTRICT
) -> tuple[ElimInstance, np.ndarray, float]:
    """Instance with a known witness W (one d x s matrix, s < d).

    Nonstrict mode normalizes ||W||_F = 1, strict mode W* W = I_s.

    B is chosen with W* B W = 0 and the constant term of p is pushed down
    along the range of W until p_W(T) has a negative eigenvalue.
    """
    W = rng.normal(size=(d, s)) + 1j * rng.normal(size=(d, s))
    W /= np.linalg.norm(W)
    if mode is Mode.STRICT:
        # orthonormal columns scaled so that W* W = I_s
        Q, _ = np.linalg.qr(W)
        W = Q[:, :s]
    B = random_indefinite_matrix(d, rng)
    # remove the component of B seen by W: B <- B - P B P on range(W)
    P = W @ np.linalg.pinv(W)
    B = B - P @ B @ P
    B = 0.5 * (B + B.conj().T)
    T = random_tuple(n, s, rng)
    p = random_poly(d, n, 1, rng)
    pw = evaluate(compress(p, W), T)
    G = W.conj().T @ W
    # after the shift, p_W(T) <= -(margin) * I
    shift = (numlin.operator_norm(pw) + rng.uniform(0.2, 1.0)) / numlin.min_eig(G)
    p = p - FreeMatrixPoly.constant(shift * np.eye(d), n)
    inst = ElimInstance(p, (B,), T, mode)
    return inst, W, numlin.min_eig(evaluate(compress(p, W), T))


def planted_spectrahedrop(
    rng: np.random.Generator, d: int = 2, n: int = 2, m: int = 1, s: int = 1
) -> tuple[list[np.ndarray], list[np.ndarray], HermTuple, np.ndarray, tuple[np.ndarray, ...]]:
    """Pencil A, coefficients B, tuple T and S with sum A_i T_i + sum B_i S_i >= 0.

    A_1 is solved from sum e_i A_i = I for a random e with e_1 != 0; T is
    shifted along e until the planted S gives a PSD assembly.
    """
    e = rng.uniform(0.5, 1.5, size=n) * rng.choice([-1.0, 1.0], size=n)
    rest = [numlin.random_hermitian(d, rng) for _ in range(n - 1)]
    A1 = (np.eye(d) - sum(ei * A for ei, A in zip(e[1:], rest))) / e[0]
    As = [A1, *rest]
    if rng.random() < 0.5:
        Bs = list(random_neither_span(d, m, rng)) if d > 1 else [np.ones((1, 1))]
    else:
        Bs = [random_indefinite_matrix(d, rng) for _ in range(m)]
    T = random_tuple(n, s, rng)
    S = tuple(numlin.random_hermitian(s, rng) for _ in range(m))
    p = FreeMatrixPoly.linear_pencil(np.zeros((d, d)), As)
    M = evaluate(p, T) + sum(np.kron(B, Si) for B, Si in zip(Bs, S))
    c = -numlin.min_eig(M) + rng.uniform(0.0, 0.1)
    return As, Bs, T.shifted(c * e), e, S


__all__ = [
    "shift_constant",
    "random_with_spectrum",
    "random_indefinite_matrix",
    "random_psd_with_kernel",
    "random_elim_instance",
    "random_psd_instance",
    "random_neither_span",
    "random_neither_instance",
    "random_subspace",
    "planted_violation",
    "planted_spectrahedrop",
]
