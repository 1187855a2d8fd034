"""Eliminating linear, separated matrix variables from p(T) + sum B_i (x) S_i >= 0.

The two sides of the equivalence are

(i)  some Hermitian S_1..S_m make p(T) + sum_i B_i (x) S_i positive
     semidefinite (definite in strict mode), and
(ii) every tuple of d x r matrices W_j with sum_j W_j* B_i W_j = 0 for all i
     gives sum_j p_{W_j}(T) >= 0 (in strict mode: sum_j W_j* W_j = I and
     the sum is positive definite).

Side (i) is an LMI, solved by :mod:`sdpcore`.  A violation of side (ii) is
extracted from a Farkas certificate Z of that LMI: writing Z = sum_j z_j z_j*
and reshaping every z_j into a d x s matrix W_j turns the orthogonality
tr(Z (B_i (x) H)) = 0 into sum_j W_j* B_i W_j = 0 and tr(Z p(T)) < 0 into a
negative value of <sum_j p_{W_j}(T) u, u> at the maximally entangled vector.
A penalized local search over raw W_j entries provides an independent
cross-check.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from . import numlin, sdpcore
from .config import DEFAULT_BUDGET, DEFAULT_TOL, SolverBudget, Tolerances
from .ncpoly import EMPTY, FreeMatrixPoly, HermTuple, compress, evaluate, kron_compress
from .subspace import (
    Definiteness,
    HermSubspace,
    classify,
    find_definite_element,
)

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    NONSTRICT = "nonstrict"
    STRICT = "strict"


class ElimStatus(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNKNOWN = "Unknown"


class RecursionDepthError(RuntimeError):
    """The strict recursion did not shrink the problem; classification failed."""


@dataclass(frozen=True, eq=False)
class ElimInstance:
    p: FreeMatrixPoly
    Bs: tuple[np.ndarray, ...]
    T: HermTuple
    mode: Mode = Mode.NONSTRICT

    def __post_init__(self):
        if not self.p.is_hermitian():
            raise ValueError("p must be Hermitian")
        Bs = tuple(numlin.hermitize(B) for B in self.Bs)
        for B in Bs:
            if B.shape != (self.p.d, self.p.d):
                raise ValueError(f"coefficient shape {B.shape} does not match d = {self.p.d}")
        if self.T.n != self.p.n:
            raise ValueError(f"polynomial has {self.p.n} variables, tuple has {self.T.n}")
        object.__setattr__(self, "Bs", Bs)
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def d(self) -> int:
        return self.p.d

    @property
    def m(self) -> int:
        return len(self.Bs)

    @property
    def s(self) -> int:
        return self.T.s

    @property
    def strict(self) -> bool:
        return self.mode is Mode.STRICT

    def evaluated(self) -> np.ndarray:
        return evaluate(self.p, self.T)

    def assemble(self, Ss: Sequence) -> np.ndarray:
        """p(T) + sum_i B_i (x) S_i."""
        M = self.evaluated()
        for B, S in zip(self.Bs, Ss):
            M = M + np.kron(B, S)
        return M

    def lmi(self) -> sdpcore.LMIProblem:
        """Flatten to F0 = p(T) and generators B_i (x) H_a over the Hermitian basis."""
        H = numlin.herm_basis(self.s)
        gens = tuple(np.kron(B, Ha) for B in self.Bs for Ha in H)
        return sdpcore.LMIProblem(self.evaluated(), gens, strict=self.strict)

    def unflatten(self, x) -> tuple[np.ndarray, ...]:
        k = self.s * self.s
        x = np.asarray(x, dtype=float)
        return tuple(numlin.herm_from_coords(x[i * k : (i + 1) * k]) for i in range(self.m))

    def compressed(self, V) -> "ElimInstance":
        V = numlin.as_matrix(V)
        return ElimInstance(compress(self.p, V), tuple(V.conj().T @ B @ V for B in self.Bs), self.T, self.mode)

    def tau_psd(self, tol: Tolerances = DEFAULT_TOL) -> float:
        return tol.psd_for(numlin.operator_norm(self.evaluated()))


# ---------------------------------------------------------------------------
# condition (i)


@dataclass(frozen=True, eq=False)
class ConditionI:
    outcome: sdpcore.LMIOutcome
    S: tuple[np.ndarray, ...] | None
    margin: float  # min eigenvalue of the assembled matrix, recomputed
    holds: bool | None

    @property
    def status(self) -> sdpcore.LMIStatus:
        return self.outcome.status


def check_condition_i(
    inst: ElimInstance,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
) -> ConditionI:
    """Solve the flattened LMI and re-verify any returned S_i by assembly."""
    out = sdpcore.solve(inst.lmi(), budget, tol, rng)
    S = None
    margin = out.margin
    if out.witness is not None and out.feasible:
        S = inst.unflatten(out.witness)
        margin = numlin.min_eig(inst.assemble(S))
    if out.status is sdpcore.LMIStatus.INFEASIBLE:
        holds: bool | None = False
    elif inst.strict:
        holds = True if out.status is sdpcore.LMIStatus.STRICTLY_FEASIBLE else None
    else:
        holds = True if out.feasible else None
    return ConditionI(out, S, margin, holds)


# ---------------------------------------------------------------------------
# condition (ii) witnesses


@dataclass(frozen=True, eq=False)
class ConditionIIWitness:
    mats: tuple[np.ndarray, ...]
    violation: float  # min eigenvalue of sum_j p_{W_j}(T)
    constraint_residual: float  # max_i ||sum_j W_j* B_i W_j||_F
    normalization_residual: float | None = None  # ||sum_j W_j* W_j - I||_F (strict)
    source: str = "certificate"

    @property
    def r(self) -> int:
        return self.mats[0].shape[1]


def witness_sum(inst: ElimInstance, mats: Sequence[np.ndarray], M: np.ndarray | None = None) -> np.ndarray:
    """sum_j p_{W_j}(T) computed through the congruence identity."""
    M = inst.evaluated() if M is None else M
    r = mats[0].shape[1]
    out = np.zeros((r * inst.s, r * inst.s), complex)
    for W in mats:
        out += kron_compress(M, W, inst.s)
    return out


def constraint_residual(Bs: Sequence[np.ndarray], mats: Sequence[np.ndarray]) -> float:
    res = 0.0
    for B in Bs:
        R = sum(W.conj().T @ B @ W for W in mats)
        res = max(res, float(np.linalg.norm(R)))
    return res


def normalization_residual(mats: Sequence[np.ndarray]) -> float:
    G = sum(W.conj().T @ W for W in mats)
    return float(np.linalg.norm(G - np.eye(G.shape[0])))


def make_witness(inst: ElimInstance, mats: Sequence, source: str) -> ConditionIIWitness:
    """Evaluate a candidate tuple directly with ncpoly.compress and numlin."""
    mats = tuple(numlin.as_matrix(W) for W in mats)
    r = mats[0].shape[1]
    total = FreeMatrixPoly.zero(r, inst.p.n)
    for W in mats:
        total = total + compress(inst.p, W)
    violation = numlin.min_eig(evaluate(total, inst.T))
    norm_res = normalization_residual(mats) if inst.strict else None
    return ConditionIIWitness(mats, violation, constraint_residual(inst.Bs, mats), norm_res, source)


def is_genuine(inst: ElimInstance, w: ConditionIIWitness, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Constraints hold to tau_dual and the violation is below -tau_psd."""
    if w is None:
        return False
    scale = 1.0 + max((numlin.operator_norm(B) for B in inst.Bs), default=0.0)
    ok = w.constraint_residual <= tol.dual * scale and w.violation < -inst.tau_psd(tol)
    if inst.strict:
        ok = ok and w.normalization_residual is not None and w.normalization_residual <= tol.dual
    else:
        ok = ok and abs(sum(np.linalg.norm(W) ** 2 for W in w.mats) - 1.0) <= 1e-6
    return bool(ok)


def certificate_to_mats(Z: np.ndarray, d: int, s: int, rel: float = 1e-8) -> list[np.ndarray]:
    """Rank decomposition Z = sum z_j z_j*, each z_j reshaped to a d x s matrix."""
    w, V = np.linalg.eigh(0.5 * (Z + Z.conj().T))
    top = max(float(w[-1]), 0.0)
    mats = []
    for lam, v in zip(w[::-1], V[:, ::-1].T):
        if lam <= rel * top:
            break
        # row index alpha * s + sigma of Z matches kron(B, S)
        mats.append(np.sqrt(lam) * v.reshape(d, s))
    return mats


def normalize_strict(mats: Sequence[np.ndarray], rel: float = 1e-9) -> list[np.ndarray]:
    """Replace W_j by V_j = W_j U with sum V_j* V_j = I_k.

    U maps the range of G = sum W_j* W_j isometrically after rescaling by
    G^{-1/2}; directions in the kernel of G are dropped.
    """
    G = sum(W.conj().T @ W for W in mats)
    g, Q = np.linalg.eigh(0.5 * (G + G.conj().T))
    keep = g > rel * max(float(g[-1]), 0.0)
    U = Q[:, keep] / np.sqrt(g[keep])
    return [W @ U for W in mats]


def _pack(mats: Sequence[np.ndarray]) -> np.ndarray:
    A = np.array(mats)
    return np.concatenate([A.real.ravel(), A.imag.ravel()])


def _unpack(x: np.ndarray, J: int, d: int, r: int) -> np.ndarray:
    n = J * d * r
    return (x[:n] + 1j * x[n:]).reshape(J, d, r)


def _residual_vector(Bs, Ws: np.ndarray, strict: bool) -> np.ndarray:
    parts = []
    for B in Bs:
        R = np.einsum("jar,ab,jbq->rq", Ws.conj(), B, Ws)
        parts.append(numlin.herm_coords(0.5 * (R + R.conj().T)))
    if strict:
        G = np.einsum("jar,jaq->rq", Ws.conj(), Ws)
        parts.append(numlin.herm_coords(0.5 * (G + G.conj().T) - np.eye(G.shape[0])))
    return np.concatenate(parts) if parts else np.zeros(0)


def polish_constraints(
    Bs: Sequence[np.ndarray],
    mats: Sequence[np.ndarray],
    strict: bool = False,
    iterations: int = 30,
) -> list[np.ndarray]:
    """Gauss-Newton projection onto sum W* B_i W = 0 (and sum W* W = I).

    The residual is quadratic in the real parameters, so central differences
    with unit step give the exact Jacobian.
    """
    Ws = np.array(mats)
    J, d, r = Ws.shape
    x = _pack(Ws)
    f = _residual_vector(Bs, Ws, strict)
    if f.size == 0:
        return list(Ws)
    for _ in range(iterations):
        if np.linalg.norm(f) < 1e-15 * (1.0 + np.linalg.norm(x) ** 2):
            break
        jac = np.empty((f.size, x.size))
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = 1.0
            jac[:, k] = 0.5 * (
                _residual_vector(Bs, _unpack(x + e, J, d, r), strict)
                - _residual_vector(Bs, _unpack(x - e, J, d, r), strict)
            )
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        x_new = x + step
        f_new = _residual_vector(Bs, _unpack(x_new, J, d, r), strict)
        if np.linalg.norm(f_new) >= np.linalg.norm(f):
            break
        x, f = x_new, f_new
    return list(_unpack(x, J, d, r))


def penalized_objective(M: np.ndarray, Bs: Sequence[np.ndarray], s: int, J: int, d: int, r: int, mu: float):
    """f(W) = lambda_min(sum p_{W_j}(T)) / n + mu * sum_i ||R_i||^2 / n^2, n = sum ||W_j||^2.

    Returns a callable giving (value, gradient) in the packed real parameters.
    """
    P4 = M.reshape(d, s, d, s)

    def fun(x: np.ndarray):
        Ws = _unpack(x, J, d, r)
        n = float(np.sum(np.abs(Ws) ** 2))
        if n < 1e-300:
            return 0.0, np.zeros_like(x)
        Mw = np.einsum("jar,asbt,jbq->rsqt", Ws.conj(), P4, Ws).reshape(r * s, r * s)
        lam, u = numlin.min_eigpair(Mw)
        U = u.reshape(r, s)
        G = np.zeros((J, d, r), complex)
        for j in range(J):
            y = Ws[j] @ U
            V = (M @ y.reshape(-1)).reshape(d, s)
            G[j] = V.conj() @ U.T
        h = 0.0
        Gh = np.zeros((J, d, r), complex)
        for B in Bs:
            R = np.einsum("jar,ab,jbq->rq", Ws.conj(), B, Ws)
            h += float(np.sum(np.abs(R) ** 2))
            for j in range(J):
                Gh[j] += 2.0 * (R @ Ws[j].conj().T @ B).T
        grad_lam = np.concatenate([2 * G.real.ravel(), -2 * G.imag.ravel()])
        grad_h = np.concatenate([2 * Gh.real.ravel(), -2 * Gh.imag.ravel()])
        grad_n = 2.0 * x
        val = lam / n + mu * h / n**2
        grad = grad_lam / n - lam * grad_n / n**2 + mu * (grad_h / n**2 - 2.0 * h * grad_n / n**3)
        return val, grad

    return fun


def local_witness_search(
    inst: ElimInstance,
    r: int,
    restarts: int,
    rng: np.random.Generator,
    tol: Tolerances = DEFAULT_TOL,
    terms: int | None = None,
) -> tuple[ConditionIIWitness | None, list[str]]:
    """Penalized local search over raw W_j entries (random restarts)."""
    d, s = inst.d, inst.s
    J = terms if terms is not None else max(1, min(d * r, 6))
    M = inst.evaluated()
    notes = []
    best = None
    for k in range(restarts):
        x = rng.normal(size=2 * J * d * r)
        x /= np.linalg.norm(x)
        for mu in (10.0, 1e3):
            fun = penalized_objective(M, inst.Bs, s, J, d, r, mu * (1.0 + numlin.operator_norm(M)))
            res = optimize.minimize(fun, x, jac=True, method="L-BFGS-B", options={"maxiter": 300})
            x = res.x / max(np.linalg.norm(res.x), 1e-300)
        mats = polish_constraints(inst.Bs, list(_unpack(x, J, d, r)))
        n = np.sqrt(sum(np.linalg.norm(W) ** 2 for W in mats))
        mats = [W / n for W in mats]
        if inst.strict:
            mats = polish_constraints(inst.Bs, normalize_strict(mats), strict=True)
        w = make_witness(inst, mats, "search")
        notes.append(f"restart {k}: violation {w.violation:.3e}, residual {w.constraint_residual:.1e}")
        if is_genuine(inst, w, tol):
            return w, notes
        if best is None or w.violation < best.violation:
            best = w
    return None, notes


def search_condition_ii_violation(
    inst: ElimInstance,
    r: int | None = None,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
    stage_b: bool = True,
    restarts: int | None = None,
    log_out: list | None = None,
) -> ConditionIIWitness | None:
    """Find W_j violating condition (ii); every returned witness is re-verified.

    Stage A reshapes a Farkas certificate of the condition (i) LMI (width
    r = s).  Stage B is a penalized local search at width ``r``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    notes = log_out if log_out is not None else []
    r = inst.s if r is None else r
    limit = max(inst.s, inst.d) if inst.strict else inst.s
    if not 1 <= r <= limit:
        raise ValueError(f"width r = {r} outside 1..{limit}")
    if r == inst.s:
        Z = sdpcore.dual_certificate(inst.lmi(), budget, tol)
        if Z is None:
            notes.append("stage A: no certificate")
        else:
            mats = caratheodory_compress(certificate_to_mats(Z, inst.d, inst.s))
            n = np.sqrt(sum(np.linalg.norm(W) ** 2 for W in mats))
            mats = polish_constraints(inst.Bs, [W / n for W in mats])
            n = np.sqrt(sum(np.linalg.norm(W) ** 2 for W in mats))
            mats = [W / n for W in mats]
            if inst.strict:
                mats = polish_constraints(inst.Bs, normalize_strict(mats), strict=True)
            w = make_witness(inst, mats, "certificate")
            notes.append(f"stage A: violation {w.violation:.3e}, residual {w.constraint_residual:.1e}")
            if is_genuine(inst, w, tol):
                return w
    if not stage_b:
        return None
    n_restarts = restarts if restarts is not None else max(1, min(budget.restarts, 5))
    w, more = local_witness_search(inst, r, n_restarts, rng, tol)
    notes.extend("stage B: " + m for m in more)
    return w


# ---------------------------------------------------------------------------
# Caratheodory compression


def caratheodory_compress(Ws: Sequence, rel: float = 1e-10) -> list[np.ndarray]:
    """Positive rescalings of at most d^2 r^2 of the W_i with the same sum W* M W.

    sum_i W_i* M W_i depends on W_i only through vec(W_i) vec(W_i)*, a vector
    in a real space of dimension (dr)^2.  While these vectors are linearly
    dependent, move the weights along a null vector until one vanishes.
    """
    Ws = [numlin.as_matrix(W) for W in Ws]
    if not Ws:
        raise ValueError("need at least one matrix")
    shape = Ws[0].shape
    if any(W.shape != shape for W in Ws):
        raise ValueError("all matrices must share one shape")
    vecs = [W.reshape(-1) for W in Ws]
    cols = np.array([numlin.herm_coords(np.outer(v, v.conj())) for v in vecs]).T
    weights = np.ones(len(Ws))
    active = list(range(len(Ws)))
    while len(active) > 1:
        A = cols[:, active]
        scale = np.linalg.norm(A, axis=0)
        _, sv, Vt = np.linalg.svd(A / np.where(scale > 0, scale, 1.0), full_matrices=True)
        rank = int(np.sum(sv > rel * max(sv[0], 1e-300))) if sv.size else 0
        if rank >= len(active):
            break
        mu = Vt[-1] / np.where(scale > 0, scale, 1.0)
        if np.max(mu) <= 0:
            mu = -mu
        w = weights[active]
        pos = mu > 1e-15 * np.max(np.abs(mu))
        alpha = np.min(w[pos] / mu[pos])
        w = w - alpha * mu
        drop = int(np.flatnonzero(pos)[np.argmin(weights[active][pos] / mu[pos])])
        w[drop] = 0.0
        weights[active] = np.clip(w, 0.0, None)
        active = [i for i in active if weights[i] > 0]
    return [np.sqrt(weights[i]) * Ws[i] for i in active]


def caratheodory_bound(d: int, r: int) -> int:
    return 2 * d * d * r * r


# ---------------------------------------------------------------------------
# one semidefinite coefficient


@dataclass(frozen=True, eq=False)
class SemidefiniteResult:
    feasible: bool | None
    S: np.ndarray | None = None
    lam: float | None = None
    compression_min_eig: float = float("inf")
    kernel: np.ndarray | None = None
    margin: float = float("nan")


def _semidefinite_sign(B: np.ndarray, tol: Tolerances) -> int:
    w = numlin.eigvalsh(B)
    norm = float(np.max(np.abs(w), initial=0.0))
    if norm == 0.0:
        raise ValueError("B is zero")
    thr = tol.kernel * norm
    if w[0] >= -thr:
        return 1
    if w[-1] <= thr:
        return -1
    raise ValueError("B is indefinite")


def eliminate_semidefinite_matrix(M: np.ndarray, B, s: int, tol: Tolerances = DEFAULT_TOL) -> SemidefiniteResult:
    """Decide M + B (x) S > 0 for semidefinite B on an evaluated ds x ds matrix M."""
    B = numlin.hermitize(B)
    sign = _semidefinite_sign(B, tol)
    Bp = sign * B
    d = B.shape[0]
    tau = tol.psd_for(numlin.operator_norm(M))
    W = numlin.kernel_basis(Bp, tol.kernel)
    R, delta = numlin.range_basis(Bp, tol.kernel)
    k = W.shape[1]
    if k == 0:
        lam = (max(0.0, -numlin.min_eig(M)) + 1.0) / float(np.min(delta))
        S = sign * lam * np.eye(s)
        margin = numlin.min_eig(M + np.kron(B, S))
        return SemidefiniteResult(True, S, lam, float("inf"), W, margin)
    comp = kron_compress(M, W, s)
    eps = numlin.min_eig(comp)
    if eps <= tau:
        feasible = False if eps < -tau else None
        return SemidefiniteResult(feasible, None, None, eps, W)
    Q = np.hstack([W, R])
    Mq = kron_compress(M, Q, s)
    ks = k * s
    eps = numlin.min_eig(Mq[:ks, :ks])  # the same compression, read off the rotated matrix
    lam_block = numlin.complete_block(Mq[:ks, :ks], Mq[:ks, ks:], Mq[ks:, ks:], eps)
    lam = lam_block / float(np.min(delta))
    S = sign * lam * np.eye(s)
    margin = numlin.min_eig(M + np.kron(B, S))
    if margin <= 0:
        return SemidefiniteResult(None, S, lam, eps, W, margin)
    return SemidefiniteResult(True, S, lam, eps, W, margin)


def eliminate_semidefinite(p: FreeMatrixPoly, B, T: HermTuple, tol: Tolerances = DEFAULT_TOL) -> SemidefiniteResult:
    """Strict elimination of one semidefinite coefficient via its kernel compression."""
    if numlin.as_matrix(B).shape != (p.d, p.d):
        raise ValueError("B must be d x d")
    return eliminate_semidefinite_matrix(evaluate(p, T), B, T.s, tol)


# ---------------------------------------------------------------------------
# strict recursion


@dataclass(frozen=True, eq=False)
class StrictResult:
    status: ElimStatus
    S: tuple[np.ndarray, ...] | None = None
    witness: ConditionIIWitness | None = None
    margin: float = float("nan")
    trace: tuple[str, ...] = ()


def _full_coeffs(m: int, kept: Sequence[int], coeffs: np.ndarray) -> np.ndarray:
    out = np.zeros(m)
    out[list(kept)] = coeffs
    return out


def _exact_face(Bs: Sequence[np.ndarray], coeffs: np.ndarray, gap: float = 1e-3, iterations: int = 30):
    """Sharpen an approximate PSD element B = sum c_i B_i of the span.

    Interior-point output sits near the boundary of the PSD cone, so the
    coefficients are only accurate to about 1e-5.  The kernel dimension k is
    read off the spectral gap, then Gauss-Newton solves the bilinear system
    B(c) V = 0 with the normalizations c . c0 = |c0|^2 and V0* V = I_k.
    """
    c0 = np.asarray(coeffs, dtype=float)
    m = len(Bs)
    B = sum(ci * Bi for ci, Bi in zip(c0, Bs))
    w, U = np.linalg.eigh(B)
    top = float(np.max(np.abs(w), initial=0.0))
    if top == 0.0:
        return c0, B, U[:, :0]
    order = np.argsort(np.abs(w))
    k = int(np.sum(np.abs(w) <= gap * top))
    if k == 0:
        return c0, B, U[:, :0]
    V0 = U[:, order[:k]]
    d = B.shape[0]
    stack = np.array(Bs)

    def residual(z):
        c = z[:m]
        V = (z[m : m + d * k] + 1j * z[m + d * k :]).reshape(d, k)
        R = np.tensordot(c, stack, axes=1) @ V
        N = V0.conj().T @ V - np.eye(k)
        return np.concatenate([R.real.ravel(), R.imag.ravel(), N.real.ravel(), N.imag.ravel(), [c @ c0 - c0 @ c0]])

    z = np.concatenate([c0, V0.real.ravel(), V0.imag.ravel()])
    f = residual(z)
    for _ in range(iterations):
        if np.linalg.norm(f) < 1e-15 * (1.0 + np.linalg.norm(c0)):
            break
        jac = np.empty((f.size, z.size))
        for j in range(z.size):
            e = np.zeros_like(z)
            e[j] = 1.0
            jac[:, j] = 0.5 * (residual(z + e) - residual(z - e))  # exact: residual is bilinear
        z_new = z + np.linalg.lstsq(jac, -f, rcond=None)[0]
        f_new = residual(z_new)
        if np.linalg.norm(f_new) >= np.linalg.norm(f):
            break
        z, f = z_new, f_new
    c = z[:m]
    B2 = sum(ci * Bi for ci, Bi in zip(c, Bs))
    norm = numlin.operator_norm(B2)
    if norm == 0.0 or numlin.min_eig(B2) < -1e-9 * norm:
        return c0, B, V0
    w2, U2 = np.linalg.eigh(B2)
    return c, B2, U2[:, np.argsort(np.abs(w2))[:k]]


def eliminate_strict(
    inst: ElimInstance,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
    _depth: int = 0,
    _max_depth: int | None = None,
    _scale: float | None = None,
) -> StrictResult:
    """Decide strict feasibility by recursing on the definiteness of span(Bs).

    Definite span: a large multiple of a definite element works.  Indefinite
    span: the flat LMI and certificate reshaping decide.  Neither: compress to
    the kernel of a nonzero PSD element, solve the smaller problem and lift
    the answer back with the one-coefficient elimination.
    """
    if not inst.strict:
        raise ValueError("eliminate_strict needs a strict-mode instance")
    rng = np.random.default_rng(0) if rng is None else rng
    pad = "  " * _depth
    M = inst.evaluated()
    tau = tol.psd_for(numlin.operator_norm(M))
    if _scale is None:
        _scale = max([1.0] + [float(np.linalg.norm(B)) for B in inst.Bs])
    # compressed coefficients inherit ~1e-8 noise from the face computation
    span_tol = 1e-9 if _depth == 0 else 1e-6 * _scale
    space, kept = HermSubspace.spanned_by(inst.Bs, d=inst.d, tol=span_tol) if inst.m else (HermSubspace(inst.d), [])
    if _max_depth is None:
        _max_depth = space.dim
    if _depth > _max_depth:
        raise RecursionDepthError(f"depth {_depth} exceeds dim span(Bs) = {_max_depth}")
    zeros = tuple(np.zeros((inst.s, inst.s), complex) for _ in inst.Bs)

    if space.dim == 0:
        lam = numlin.min_eig(M)
        line = f"{pad}d={inst.d} span=0: min_eig p(T) = {lam:.3e}"
        if lam > tau:
            return StrictResult(ElimStatus.FEASIBLE, zeros, margin=numlin.min_eig(inst.assemble(zeros)), trace=(line,))
        if lam < -tau:
            w = make_witness(inst, [np.eye(inst.d, dtype=complex)], "base")
            return StrictResult(ElimStatus.INFEASIBLE, witness=w, trace=(line,))
        return StrictResult(ElimStatus.UNKNOWN, trace=(line + " (boundary)",))

    cls = classify(space, budget, tol, rng)
    line = f"{pad}d={inst.d} dim span={space.dim}: {cls.status.value}"

    if cls.status is Definiteness.DEFINITE:
        coeffs = _full_coeffs(inst.m, kept, cls.element.coefficients)
        Bplus = sum(c * B for c, B in zip(coeffs, inst.Bs))
        delta = numlin.min_eig(Bplus)
        lam = (max(0.0, -numlin.min_eig(M)) + 1.0) / delta
        S = tuple(lam * c * np.eye(inst.s, dtype=complex) for c in coeffs)
        margin = numlin.min_eig(inst.assemble(S))
        status = ElimStatus.FEASIBLE if margin > 0 else ElimStatus.UNKNOWN
        return StrictResult(status, S, margin=margin, trace=(line + f", lambda={lam:.3g}",))

    if cls.status is Definiteness.INDEFINITE:
        c1 = check_condition_i(inst, budget, tol, rng)
        if c1.holds and c1.S is not None and c1.margin > 0:
            return StrictResult(ElimStatus.FEASIBLE, c1.S, margin=c1.margin, trace=(line + ": flat LMI feasible",))
        if c1.holds is False:
            w = search_condition_ii_violation(inst, budget=budget, tol=tol, rng=rng, stage_b=False)
            if w is not None:
                return StrictResult(ElimStatus.INFEASIBLE, witness=w, trace=(line + ": certificate reshaped",))
        return StrictResult(ElimStatus.UNKNOWN, trace=(line + f": flat LMI {c1.status.value}",))

    if cls.status is Definiteness.NEITHER:
        coeffs = _full_coeffs(inst.m, kept, cls.element.coefficients)
        coeffs, B, V = _exact_face(inst.Bs, coeffs)
        if V.shape[1] == 0 or V.shape[1] == inst.d:
            return StrictResult(ElimStatus.UNKNOWN, trace=(line + ": degenerate PSD element",))
        inner = inst.compressed(V)
        sub = eliminate_strict(inner, budget, tol, rng, _depth + 1, _max_depth, _scale)
        trace = (line + f": compress to kernel of rank-{inst.d - V.shape[1]} PSD element",) + sub.trace
        if sub.status is ElimStatus.INFEASIBLE:
            w = make_witness(inst, [V @ Wj for Wj in sub.witness.mats], sub.witness.source)
            if is_genuine(inst, w, tol):
                return StrictResult(ElimStatus.INFEASIBLE, witness=w, trace=trace)
            return StrictResult(ElimStatus.UNKNOWN, trace=trace + (f"{pad}lifted witness failed re-verification",))
        if sub.status is ElimStatus.FEASIBLE:
            base = inst.assemble(sub.S)
            lifted = eliminate_semidefinite_matrix(base, B, inst.s, tol)
            if lifted.feasible and lifted.S is not None:
                S = tuple(Si + c * lifted.S for Si, c in zip(sub.S, coeffs))
                full = inst.assemble(S)
                margin = numlin.min_eig(full)
                # a margin below the tolerance at the scale of the lifted S is a boundary case
                if margin > tol.psd_for(numlin.operator_norm(full)):
                    return StrictResult(ElimStatus.FEASIBLE, S, margin=margin, trace=trace + (f"{pad}lift: lambda={lifted.lam:.3g}",))
                return StrictResult(
                    ElimStatus.UNKNOWN,
                    trace=trace + (f"{pad}lift: lambda={lifted.lam:.3g}, margin {margin:.2e} below tolerance at this scale",),
                )
            return StrictResult(ElimStatus.UNKNOWN, trace=trace + (f"{pad}lift failed",))
        return StrictResult(ElimStatus.UNKNOWN, trace=trace)

    return StrictResult(ElimStatus.UNKNOWN, trace=(line,))


# ---------------------------------------------------------------------------
# free spectrahedrops


class NoUnitError(ValueError):
    """No e with sum e_i A_i = I exists."""


@dataclass(frozen=True, eq=False)
class SpectrahedropResult:
    S: tuple[np.ndarray, ...] | None
    counterexample: ConditionIIWitness | None
    margin: float
    e: np.ndarray
    trace: tuple[str, ...] = ()


def find_unit_point(As: Sequence, tol: float = 1e-9) -> np.ndarray:
    As = [numlin.as_matrix(A) for A in As]
    d = As[0].shape[0]
    cols = np.array([numlin.herm_coords(A) for A in As]).T
    target = numlin.herm_coords(np.eye(d))
    e, *_ = np.linalg.lstsq(cols, target, rcond=None)
    if np.linalg.norm(cols @ e - target) > tol * np.sqrt(d):
        raise NoUnitError("the identity is not a combination of the A_i")
    return e


def check_spectrahedrop(
    As: Sequence,
    Bs: Sequence,
    T: HermTuple,
    eps: float,
    e: Sequence[float] | None = None,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
) -> SpectrahedropResult:
    """S_i with sum A_i (x) T_i + sum B_i (x) S_i >= -eps, or a violating W-tuple."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    As = [numlin.hermitize(A) for A in As]
    if not As:
        raise NoUnitError("need at least one A_i")
    d = As[0].shape[0]
    e = find_unit_point(As) if e is None else np.asarray(e, dtype=float)
    if np.linalg.norm(sum(ei * A for ei, A in zip(e, As)) - np.eye(d)) > 1e-8:
        raise NoUnitError("supplied e does not satisfy sum e_i A_i = I")
    p = FreeMatrixPoly.linear_pencil(np.zeros((d, d)), As)
    base = ElimInstance(p, tuple(Bs), T, Mode.NONSTRICT)
    w = search_condition_ii_violation(base, budget=budget, tol=tol, rng=rng, stage_b=False)
    if w is not None:
        return SpectrahedropResult(None, w, float("nan"), e, ("hypothesis violated",))
    shifted = ElimInstance(p, tuple(Bs), T.shifted(eps * e), Mode.STRICT)
    res = eliminate_strict(shifted, budget, tol, rng)
    if res.status is not ElimStatus.FEASIBLE:
        return SpectrahedropResult(None, None, float("nan"), e, res.trace + (f"shifted problem {res.status.value}",))
    margin = numlin.min_eig(base.assemble(res.S))
    return SpectrahedropResult(res.S, None, margin, e, res.trace)


# ---------------------------------------------------------------------------
# nonlinear lifting


@dataclass(frozen=True, eq=False)
class Realization:
    """Data B_0..B_r (d x d) and C_0..C_r (k x k, k may be 0).

    Describes the set of values of q as
    { B_0 (x) I + sum B_i (x) R_i : C_0 (x) I + sum C_i (x) R_i >= 0 }.
    """

    B: tuple[np.ndarray, ...]
    C: tuple[np.ndarray, ...]

    def __post_init__(self):
        B = tuple(numlin.hermitize(M) for M in self.B)
        if not B:
            raise ValueError("need at least B_0")
        C = tuple(numlin.hermitize(M) if np.size(M) else np.zeros((0, 0), complex) for M in self.C)
        if len(C) != len(B):
            raise ValueError("B and C lists must have the same length r + 1")
        d, k = B[0].shape[0], C[0].shape[0]
        if any(M.shape != (d, d) for M in B) or any(M.shape != (k, k) for M in C):
            raise ValueError("block size mismatch in realization")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def r(self) -> int:
        return len(self.B) - 1

    @property
    def d(self) -> int:
        return self.B[0].shape[0]

    @property
    def k(self) -> int:
        return self.C[0].shape[0]


def _blockdiag(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    a, b = X.shape[0], Y.shape[0]
    out = np.zeros((a + b, a + b), complex)
    out[:a, :a] = X
    out[a:, a:] = Y
    return out


def lift_nonlinear(
    p: FreeMatrixPoly,
    realization: Realization,
    T: HermTuple,
    mode: Mode | str = Mode.NONSTRICT,
) -> ElimInstance:
    """Linear instance of size d + k equivalent to solvability of p(T) + q(S) >= 0."""
    if realization.d != p.d:
        raise ValueError(f"realization has d = {realization.d}, polynomial has d = {p.d}")
    k = realization.k
    zero_k = np.zeros((k, k), complex)
    terms = {}
    for w, P in p.terms.items():
        terms[w] = _blockdiag(P, zero_k)
    const = terms.get(EMPTY, np.zeros((p.d + k, p.d + k), complex))
    terms[EMPTY] = const + _blockdiag(realization.B[0], realization.C[0])
    lifted = FreeMatrixPoly(p.d + k, p.n, terms)
    Bs = tuple(_blockdiag(Bi, Ci) for Bi, Ci in zip(realization.B[1:], realization.C[1:]))
    return ElimInstance(lifted, Bs, T, mode)


def realization_bounded_below(Bs: Sequence, a: Sequence[float]) -> Realization:
    """q = sum B_i (x) f_i(y_i) with f_i(R) = [a_i, oo): R_i - a_i I >= 0."""
    Bs = [numlin.hermitize(B) for B in Bs]
    m = len(Bs)
    d = Bs[0].shape[0]
    C0 = -np.diag(np.asarray(a, dtype=float)).astype(complex)
    Cs = []
    for i in range(m):
        E = np.zeros((m, m), complex)
        E[i, i] = 1.0
        Cs.append(E)
    return Realization((np.zeros((d, d), complex), *Bs), (C0, *Cs))


def realization_single_word(B, odd: bool) -> Realization:
    """q = B (x) w(y) for a word whose image is all Hermitians (odd) or the PSD cone."""
    B = numlin.hermitize(B)
    d = B.shape[0]
    if odd:
        empty = np.zeros((0, 0), complex)
        return Realization((np.zeros((d, d), complex), B), (empty, empty))
    return Realization((np.zeros((d, d), complex), B), (np.zeros((1, 1), complex), np.ones((1, 1), complex)))


def realization_surjective_pair(B) -> Realization:
    """q = B (x) w + B* (x) w* for w ranging over all square matrices."""
    B = numlin.as_matrix(B)
    d = B.shape[0]
    empty = np.zeros((0, 0), complex)
    return Realization(
        (np.zeros((d, d), complex), B + B.conj().T, 1j * (B - B.conj().T)),
        (empty, empty, empty),
    )


# ---------------------------------------------------------------------------
# equivalence checking


@dataclass
class EquivalenceReport:
    condition_i: ConditionI
    witness: ConditionIIWitness | None
    consistent: bool
    unknown: bool
    contradiction: str | None = None
    log: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.contradiction:
            return "CONTRADICTION"
        if self.unknown:
            return "Unknown"
        return "Feasible" if self.condition_i.holds else "Infeasible"


def easy_direction_bound(inst: ElimInstance, S: Sequence[np.ndarray], margin: float, w: ConditionIIWitness) -> float:
    """Lower bound on the violation of any tuple when S achieves ``margin``.

    sum_j p_{W_j}(T) = sum_j (W_j (x) I)* F (W_j (x) I) - sum_i R_i (x) S_i
    with F the assembled matrix and R_i = sum_j W_j* B_i W_j.
    """
    G = sum(W.conj().T @ W for W in w.mats)
    gram = numlin.operator_norm(G)
    first = min(margin, 0.0) * gram if margin < 0 else margin * numlin.min_eig(G)
    correction = 0.0
    for B, Si in zip(inst.Bs, S):
        R = sum(W.conj().T @ B @ W for W in w.mats)
        correction += numlin.operator_norm(R) * numlin.operator_norm(Si)
    return first - correction


def verify_equivalence(
    inst: ElimInstance,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
    stage_b: bool = True,
    restarts: int = 2,
    r: int | None = None,
) -> EquivalenceReport:
    """Run both sides and flag any verified disagreement as a contradiction.

    ``r`` is the tuple width of the local witness search (default s).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    c1 = check_condition_i(inst, budget, tol, rng)
    notes = [f"condition (i): {c1.status.value}, margin {c1.margin:.3e}"]
    notes.extend(c1.outcome.log)
    if c1.holds is False:
        w = search_condition_ii_violation(inst, budget=budget, tol=tol, rng=rng, stage_b=False, log_out=notes)
        if w is None:
            return EquivalenceReport(c1, None, False, False, "certificate did not reshape into a witness", notes)
        return EquivalenceReport(c1, w, True, False, None, notes)
    w = None
    if stage_b:
        w, more = local_witness_search(inst, inst.s if r is None else r, restarts, rng, tol)
        notes.extend("stage B: " + m for m in more)
    if c1.holds and w is not None and c1.S is not None:
        bound = easy_direction_bound(inst, c1.S, c1.margin, w)
        if w.violation < bound - inst.tau_psd(tol):
            msg = f"witness violation {w.violation:.3e} below the bound {bound:.3e} implied by S"
            return EquivalenceReport(c1, w, False, False, msg, notes)
    if c1.holds is None:
        if w is not None:
            notes.append("stage B witness resolves the undecided LMI as infeasible")
            return EquivalenceReport(c1, w, True, False, None, notes)
        return EquivalenceReport(c1, None, True, True, None, notes)
    return EquivalenceReport(c1, w, True, False, None, notes)
