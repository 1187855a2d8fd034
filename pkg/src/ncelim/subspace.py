"""Real subspaces of Hermitian d x d matrices and their definiteness.

A subspace is *definite* if it contains a positive (or negative) definite
matrix and *indefinite* if every nonzero element has eigenvalues of both
signs.  Subspaces that contain a nonzero semidefinite matrix but no definite
one are *neither*.

Classification solves two small LMIs over an orthonormal basis Q_1..Q_k:

* definite margin   t_def = max { min_eig(sum c_i Q_i) : ||c|| <= 1 }
* semidefinite gap  t_psd = max { min_eig(Y) : Y in S, tr Y = 1 }

t_def > 0 certifies a definite element, t_psd < 0 rules out any nonzero
PSD element, and t_def = 0 <= t_psd is the "neither" case.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numlin, sdpcore
from .config import DEFAULT_BUDGET, DEFAULT_TOL, SolverBudget, Tolerances
from .ncpoly import FreeMatrixPoly, compress


class Definiteness(enum.Enum):
    DEFINITE = "Definite"
    INDEFINITE = "Indefinite"
    NEITHER = "Neither"
    UNKNOWN = "Unknown"


class NotIndefiniteError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HermSubspace:
    d: int
    basis: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        basis = tuple(numlin.hermitize(B) for B in self.basis)
        for B in basis:
            if B.shape != (self.d, self.d):
                raise ValueError(f"basis element has shape {B.shape}, expected {(self.d, self.d)}")
        object.__setattr__(self, "basis", basis)
        C = self.coords
        if len(basis):
            gram = np.linalg.eigvalsh(C @ C.T)
            if gram[0] <= 1e-20 * max(gram[-1], 1e-300):
                raise ValueError("basis is not linearly independent over R")

    @classmethod
    def spanned_by(cls, mats: Sequence, d: int | None = None, tol: float = 1e-9) -> tuple["HermSubspace", list[int]]:
        """Subspace spanned by ``mats`` and the indices of a maximal independent subset."""
        mats = [numlin.hermitize(M) for M in mats]
        if d is None:
            if not mats:
                raise ValueError("need d for an empty spanning set")
            d = mats[0].shape[0]
        keep: list[int] = []
        rows: list[np.ndarray] = []
        for i, M in enumerate(mats):
            v = numlin.herm_coords(M)
            trial = np.array(rows + [v])
            sv = np.linalg.svd(trial, compute_uv=False)
            if len(sv) == len(trial) and sv[-1] > tol * max(1.0, sv[0]):
                keep.append(i)
                rows.append(v)
        return cls(d, tuple(mats[i] for i in keep)), keep

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def coords(self) -> np.ndarray:
        """k x d^2 matrix of real coordinates of the basis."""
        if not self.basis:
            return np.zeros((0, self.d * self.d))
        return np.array([numlin.herm_coords(B) for B in self.basis])

    def orthonormal(self) -> tuple[np.ndarray, np.ndarray]:
        """(Q, R) with orthonormal coordinate rows Q = R @ coords."""
        C = self.coords
        if C.shape[0] == 0:
            return C, np.zeros((0, 0))
        U, s, Vt = np.linalg.svd(C, full_matrices=False)
        # rows of Vt span the row space of C; Vt = diag(1/s) U^T C
        return Vt, (U / s).T

    def element(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        out = np.zeros((self.d, self.d), complex)
        for c, B in zip(coeffs, self.basis):
            out = out + c * B
        return out

    def contains(self, M, tol: float = 1e-8) -> bool:
        v = numlin.herm_coords(numlin.hermitize(M))
        if self.dim == 0:
            return bool(np.linalg.norm(v) <= tol)
        Q, _ = self.orthonormal()
        r = v - Q.T @ (Q @ v)
        return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(v)))

    def same_span(self, other: "HermSubspace", tol: float = 1e-8) -> bool:
        return self.dim == other.dim and all(self.contains(B, tol) for B in other.basis)

    def conjugated(self, U) -> "HermSubspace":
        U = numlin.as_matrix(U)
        return HermSubspace(self.d, tuple(U.conj().T @ B @ U for B in self.basis))


def complement(S: HermSubspace) -> HermSubspace:
    """Orthogonal complement inside Hermitian d x d matrices under tr(B* A)."""
    n = S.d * S.d
    C = S.coords
    if C.shape[0] == 0:
        null = np.eye(n)
    else:
        _, s, Vt = np.linalg.svd(C, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * s[0]))
        null = Vt[rank:]
    return HermSubspace(S.d, tuple(numlin.herm_from_coords(v) for v in null))


@dataclass(frozen=True, eq=False)
class ElementResult:
    element: np.ndarray
    coefficients: np.ndarray  # with respect to S.basis
    min_eig: float


@dataclass(frozen=True, eq=False)
class Classification:
    status: Definiteness
    element: ElementResult | None = None
    record: dict = field(default_factory=dict)


def _to_basis_coeffs(S: HermSubspace, q: np.ndarray) -> np.ndarray:
    """Coefficients on S.basis of the element with orthonormal coordinates q."""
    Q, R = S.orthonormal()
    # element coords = q @ Q = q @ R @ C  => basis coeffs = q @ R
    return q @ R


def _definite_margin(S: HermSubspace, budget: SolverBudget) -> tuple[float, ElementResult | None]:
    Q, _ = S.orthonormal()
    mats = tuple(numlin.herm_from_coords(v) for v in Q)
    prob = sdpcore.LMIProblem(np.zeros((S.d, S.d)), mats, bound=1.0)
    x, t = sdpcore.max_margin(prob, budget)
    # refine: the conic solver maximizes min_eig over the unit ball directly
    c = _to_basis_coeffs(S, x)
    Y = S.element(c)
    return t, ElementResult(Y, c, numlin.min_eig(Y))


def _psd_gap(S: HermSubspace, budget: SolverBudget) -> tuple[float, ElementResult | None, np.ndarray | None]:
    """max min_eig over trace-one elements; also a PD element of S-perp when negative."""
    Q, _ = S.orthonormal()
    mats = [numlin.herm_from_coords(v) for v in Q]
    traces = np.array([np.trace(M).real for M in mats])
    if np.linalg.norm(traces) <= 1e-12:
        return -np.inf, None, np.eye(S.d)
    c0 = traces / (traces @ traces)
    _, _, Vt = np.linalg.svd(traces[None, :])
    null = Vt[1:]
    Y0 = sum(c * M for c, M in zip(c0, mats))
    gens = tuple(sum(a * M for a, M in zip(row, mats)) for row in null)
    prob = sdpcore.LMIProblem(Y0, gens)
    x, t = sdpcore.max_margin(prob, budget)
    q = c0 + (x @ null if len(null) else 0.0)
    c = _to_basis_coeffs(S, q)
    Y = S.element(c)
    perp = None
    if t < 0:
        Z = sdpcore.dual_certificate(prob, budget)
        if Z is not None:
            v = float(np.trace(Z @ Y0).real)
            perp = Z - v * np.eye(S.d)
    return t, ElementResult(Y, c, numlin.min_eig(Y)), perp


def _sphere_search(S: HermSubspace, restarts: int, iters: int, rng: np.random.Generator) -> float:
    """Best min_eig over the unit sphere of S (and of -S) by local ascent."""
    Q, _ = S.orthonormal()
    mats = [numlin.herm_from_coords(v) for v in Q]
    k = len(mats)
    best = -np.inf
    for _ in range(restarts):
        c = rng.normal(size=k)
        c /= np.linalg.norm(c)
        step = 0.5
        lam, u = numlin.min_eigpair(sum(ci * M for ci, M in zip(c, mats)))
        for _ in range(iters):
            g = np.array([np.real(u.conj() @ M @ u) for M in mats])
            g -= (g @ c) * c
            if np.linalg.norm(g) < 1e-12:
                break
            y = c + step * g / np.linalg.norm(g)
            y /= np.linalg.norm(y)
            lam_y, u_y = numlin.min_eigpair(sum(ci * M for ci, M in zip(y, mats)))
            if lam_y > lam:
                c, lam, u = y, lam_y, u_y
                step *= 1.3
            else:
                step *= 0.5
        best = max(best, lam)
    return float(best)


def classify(
    S: HermSubspace,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
    sphere_restarts: int = 4,
) -> Classification:
    tau = tol.classify
    if S.dim == 0:
        # every nonzero element of {0} is indefinite, vacuously
        return Classification(Definiteness.INDEFINITE, record={"vacuous": True})
    t_def, definite = _definite_margin(S, budget)
    record: dict = {"t_def": t_def}
    if t_def > tau and definite is not None and definite.min_eig > 0:
        return Classification(Definiteness.DEFINITE, _unit_min_eig(definite), record)
    t_psd, psd, perp = _psd_gap(S, budget)
    record["t_psd"] = t_psd
    if t_psd < -tau:
        rng = np.random.default_rng(0) if rng is None else rng
        record["restarts"] = sphere_restarts
        record["sphere_best"] = _sphere_search(S, sphere_restarts, 40, rng) if sphere_restarts else None
        if perp is not None:
            record["perp_pd_min_eig"] = numlin.min_eig(perp)
        return Classification(Definiteness.INDEFINITE, None, record)
    if t_def <= 0.1 * tau and t_psd >= -0.1 * tau and psd is not None:
        return Classification(Definiteness.NEITHER, psd, record)
    return Classification(Definiteness.UNKNOWN, None, record)


def find_definite_element(S: HermSubspace, budget: SolverBudget = DEFAULT_BUDGET, tol: Tolerances = DEFAULT_TOL) -> ElementResult | None:
    """A positive definite element of S (the sign of the coefficients is free)."""
    if S.dim == 0:
        return None
    t, el = _definite_margin(S, budget)
    if el is None or t <= tol.classify or el.min_eig <= 0:
        return None
    return _unit_min_eig(el)


def _unit_min_eig(el: ElementResult) -> ElementResult:
    """Rescale a definite element so that its smallest eigenvalue is 1."""
    c = 1.0 / el.min_eig
    return ElementResult(c * el.element, c * el.coefficients, 1.0)


def find_nonzero_psd_element(S: HermSubspace, budget: SolverBudget = DEFAULT_BUDGET, tol: Tolerances = DEFAULT_TOL) -> ElementResult | None:
    """A nonzero positive semidefinite element of S with trace one."""
    if S.dim == 0:
        return None
    t, el, _ = _psd_gap(S, budget)
    if el is None or t < -0.1 * tol.classify:
        return None
    if el.min_eig < -0.1 * tol.classify * max(1.0, numlin.operator_norm(el.element)):
        return None
    return el


@dataclass(frozen=True, eq=False)
class NormalizedInstance:
    p: FreeMatrixPoly
    Bs: tuple[np.ndarray, ...]
    A: np.ndarray


def normalize_instance(
    p: FreeMatrixPoly,
    Bs: Sequence,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
) -> NormalizedInstance:
    """Congruence-normalize an instance with indefinite span(Bs).

    Finds a Hermitian invertible A with A^2 in span(Bs)-perp, replaces p by
    p_A and B_i by A B_i A (now traceless), orthonormalizes the B's and
    projects every coefficient of p onto the orthogonal complement of their
    span.  Solvability of p(T) + sum B_i (x) S_i >= 0 is unchanged.
    """
    S, _ = HermSubspace.spanned_by(Bs, d=p.d)
    cls = classify(S, budget, tol)
    if cls.status is not Definiteness.INDEFINITE:
        raise NotIndefiniteError(f"span(Bs) is {cls.status.value}, expected Indefinite")
    if S.dim == 0:
        return NormalizedInstance(p, (), np.eye(p.d, dtype=complex))
    X = find_definite_element(complement(S), budget, tol)
    if X is None:
        raise RuntimeError("no positive definite element found in span(Bs)-perp")
    A = numlin.psd_sqrt(X.element)
    congruent = [A @ B @ A for B in S.basis]
    # orthonormalize over R with the trace inner product
    C = np.array([numlin.herm_coords(B) for B in congruent])
    _, sv, Vt = np.linalg.svd(C, full_matrices=False)
    ortho = tuple(numlin.herm_from_coords(v) for v in Vt[: int(np.sum(sv > 1e-12 * sv[0]))])
    pA = compress(p, A)
    terms = {}
    for w, P in pA.terms.items():
        R = P.copy()
        for B in ortho:
            R = R - np.trace(B @ P) * B
        terms[w] = R
    return NormalizedInstance(FreeMatrixPoly(p.d, p.n, terms), ortho, A)
