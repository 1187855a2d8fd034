"""Feasibility of linear matrix inequalities F(x) = F0 + sum_k x_k G_k >= 0.

``solve`` maximizes the minimum eigenvalue of F(x) and, when that margin is
not clearly positive, looks for a Farkas-type certificate

    Z >= 0,  tr Z = 1,  tr(Z G_k) = 0 for all k,  tr(Z F0) < 0

that rules out any feasible x.  Whatever the backend returns, every reported
witness and certificate is re-checked here by direct evaluation.

Two backends are available: ``conic`` (Clarabel through cvxpy, the default)
and ``subgradient`` (eigenvector-subgradient ascent on x -> min_eig F(x)
plus projected descent over the certificate slice).
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numlin
from .config import DEFAULT_BUDGET, DEFAULT_TOL, SolverBudget, Tolerances

log = logging.getLogger(__name__)


class LMIStatus(enum.Enum):
    FEASIBLE = "Feasible"
    STRICTLY_FEASIBLE = "StrictlyFeasible"
    INFEASIBLE = "Infeasible"
    UNKNOWN = "Unknown"


class WeakDualityViolation(RuntimeError):
    """A verified witness and a verified certificate for the same instance."""


@dataclass(frozen=True, eq=False)
class LMIProblem:
    F0: np.ndarray
    gens: tuple[np.ndarray, ...] = ()
    strict: bool = False
    bound: float | None = None

    def __post_init__(self):
        F0 = numlin.hermitize(self.F0)
        gens = tuple(numlin.hermitize(G) for G in self.gens)
        for G in gens:
            if G.shape != F0.shape:
                raise ValueError(f"generator shape {G.shape} differs from F0 shape {F0.shape}")
        object.__setattr__(self, "F0", F0)
        object.__setattr__(self, "gens", gens)

    @property
    def N(self) -> int:
        return self.F0.shape[0]

    @property
    def K(self) -> int:
        return len(self.gens)

    def pencil(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.K,):
            raise ValueError(f"x has shape {x.shape}, expected ({self.K},)")
        F = self.F0.copy()
        for xk, G in zip(x, self.gens):
            F = F + xk * G
        return F

    def scaled(self, c: float) -> "LMIProblem":
        return LMIProblem(c * self.F0, tuple(c * G for G in self.gens), self.strict, self.bound)

    def tau_psd(self, tol: Tolerances = DEFAULT_TOL) -> float:
        return tol.psd_for(numlin.operator_norm(self.F0))


@dataclass(frozen=True, eq=False)
class LMIOutcome:
    status: LMIStatus
    witness: np.ndarray | None = None
    certificate: np.ndarray | None = None
    margin: float = float("nan")
    dual_value: float | None = None
    log: tuple[str, ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return self.status in (LMIStatus.FEASIBLE, LMIStatus.STRICTLY_FEASIBLE)


def certificate_residuals(prob: LMIProblem, Z) -> tuple[float, float, float]:
    """(min eigenvalue of Z, max |tr(Z G_k)| / (1 + ||G_k||), tr(Z F0))."""
    Z = numlin.as_matrix(Z)
    lam = numlin.min_eig(Z)
    res = max(
        (abs(np.trace(Z @ G).real) / (1.0 + numlin.operator_norm(G)) for G in prob.gens),
        default=0.0,
    )
    return lam, res, float(np.trace(Z @ prob.F0).real)


def is_valid_certificate(prob: LMIProblem, Z, tol: Tolerances = DEFAULT_TOL) -> bool:
    if Z is None:
        return False
    Z = numlin.as_matrix(Z)
    if Z.shape != prob.F0.shape or not numlin.is_hermitian(Z):
        return False
    lam, res, val = certificate_residuals(prob, Z)
    tr = float(np.trace(Z).real)
    if tr <= 0:
        return False
    # normalised to tr Z = 1
    return lam >= -1e-12 * tr and res <= tol.dual * tr and val <= -tol.dual * tr * (1.0 + numlin.operator_norm(prob.F0))


# ---------------------------------------------------------------------------
# certificate polishing


def _constraint_system(prob: LMIProblem) -> tuple[np.ndarray, np.ndarray]:
    rows = [numlin.herm_coords(G) for G in prob.gens]
    rows.append(numlin.herm_coords(np.eye(prob.N)))
    b = np.zeros(len(rows))
    b[-1] = 1.0
    return np.array(rows), b


def _face_polish(prob: LMIProblem, Z: np.ndarray, rel: float) -> np.ndarray | None:
    """Re-solve the affine constraints for Z = R Y R* on the dominant range R of Z.

    Certificates of LMIs without an interior typically live on a proper face
    of the PSD cone; projecting inside that face keeps them PSD.
    """
    w, V = np.linalg.eigh(0.5 * (Z + Z.conj().T))
    if w[-1] <= 0:
        return None
    R = V[:, w > rel * w[-1]]
    k = R.shape[1]
    rows = [numlin.herm_coords(R.conj().T @ G @ R) for G in prob.gens]
    rows.append(numlin.herm_coords(np.eye(k)))
    A = np.array(rows)
    b = np.zeros(len(rows))
    b[-1] = 1.0
    y = numlin.herm_coords(R.conj().T @ Z @ R)
    y = y - np.linalg.pinv(A) @ (A @ y - b)
    Y = numlin.herm_from_coords(y)
    if numlin.min_eig(Y) < 0:
        return None
    return R @ Y @ R.conj().T


def polish_certificate(prob: LMIProblem, Z, iterations: int = 200) -> np.ndarray:
    """Clean an approximate certificate: face projection first, then
    alternating affine and PSD projections."""
    Z = numlin.as_matrix(Z)
    for rel in (1e-3, 1e-5, 1e-7):
        F = _face_polish(prob, Z, rel)
        if F is not None and is_valid_certificate(prob, F):
            return F
    A, b = _constraint_system(prob)
    pinv = np.linalg.pinv(A)
    z = numlin.herm_coords(0.5 * (Z + Z.conj().T))
    for _ in range(iterations):
        z = z - pinv @ (A @ z - b)
        M = numlin.herm_from_coords(z)
        w, V = np.linalg.eigh(M)
        if w[0] >= 0 and np.max(np.abs(A @ z - b)) < 1e-14:
            break
        M = (V * np.clip(w, 0.0, None)) @ V.conj().T
        z = numlin.herm_coords(M)
        if np.max(np.abs(A @ z - b)) < 1e-13:
            break
    M = numlin.herm_from_coords(z)
    w, V = np.linalg.eigh(M)
    M = (V * np.clip(w, 0.0, None)) @ V.conj().T
    tr = np.trace(M).real
    return M / tr if tr > 0 else M


# ---------------------------------------------------------------------------
# conic backend


_SOLVER_ORDER = ("CLARABEL", "CVXOPT", "SCS")
# Clarabel's default static regularization breaks down on LMIs whose dual
# feasible set has empty interior (certificates living on a proper face)
_SOLVER_OPTS = {"CLARABEL": {"static_regularization_constant": 1e-7}}


def _solver_names() -> list[str]:
    import cvxpy as cp

    installed = set(cp.installed_solvers())
    return [name for name in _SOLVER_ORDER if name in installed]


def _run(problem, variable, solvers: Sequence[str] | None = None) -> bool:
    """Solve with the first installed solver that returns a value."""
    import cvxpy as cp

    for name in _solver_names() if solvers is None else solvers:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                problem.solve(solver=name, **_SOLVER_OPTS.get(name, {}))
        except cp.error.SolverError as exc:
            log.debug("%s failed: %s", name, exc)
            continue
        if variable.value is not None and problem.status in ("optimal", "optimal_inaccurate"):
            return True
        if problem.status in ("infeasible", "unbounded"):
            return False
    return False


def _margin_cap(prob: LMIProblem) -> float:
    norm = numlin.operator_norm(prob.F0)
    return norm if norm > 0 else 1.0


def _conic_primal(prob: LMIProblem, target: float | None = None, duals: list | None = None) -> np.ndarray:
    """Maximize the margin t (capped at ||F0||), or, when ``target`` is given,
    find the minimum-norm x with F(x) >= target * I.

    The multiplier of Y >= 0 in the margin problem is appended to ``duals``;
    once normalized it is a candidate Farkas certificate.  When the supremum
    is not attained (x escaping to infinity) interior-point solvers stall, so
    a failed solve is retried inside a large ball.
    """
    K = prob.K
    if K == 0:
        return np.zeros(0)
    x = _conic_primal_once(prob, target, duals, prob.bound, _solver_names()[:1])
    if x is None and prob.bound is None:
        gmin = min(numlin.operator_norm(G) for G in prob.gens)
        radius = 1e4 * (1.0 + numlin.operator_norm(prob.F0)) / max(gmin, 1e-300)
        x = _conic_primal_once(prob, target, duals, radius, None)
    if x is None:
        # the minimum-norm refinement may sit just past the attainable margin;
        # callers re-check its value, so only a failed margin solve is worth a warning
        (log.debug if target is not None else log.warning)("conic primal failed with every solver")
        return np.zeros(K)
    return x


def _conic_primal_once(prob, target, duals, bound, solvers) -> np.ndarray | None:
    import cvxpy as cp

    N, K = prob.N, prob.K
    x = cp.Variable(K)
    Y = cp.Variable((N, N), hermitian=True)
    expr = prob.F0 + sum(x[k] * prob.gens[k] for k in range(K))
    cons = [Y >> 0]
    if bound is not None:
        cons.append(cp.norm(x, 2) <= bound)
    if target is None:
        t = cp.Variable()
        cons += [t <= _margin_cap(prob), Y == expr - t * np.eye(N)]
        problem = cp.Problem(cp.Maximize(t), cons)
    else:
        cons.append(Y == expr - target * np.eye(N))
        problem = cp.Problem(cp.Minimize(cp.norm(x, 2)), cons)
    if not _run(problem, x, solvers):
        return None
    if duals is not None and cons[0].dual_value is not None:
        duals.append(np.asarray(cons[0].dual_value, dtype=complex))
    return np.asarray(x.value, dtype=float)


def _conic_dual(prob: LMIProblem) -> np.ndarray | None:
    import cvxpy as cp

    N = prob.N
    Z = cp.Variable((N, N), hermitian=True)
    cons = [Z >> 0, cp.real(cp.trace(Z)) == 1]
    cons += [cp.real(cp.trace(Z @ G)) == 0 for G in prob.gens]
    problem = cp.Problem(cp.Minimize(cp.real(cp.trace(Z @ prob.F0))), cons)
    if not _run(problem, Z):
        return None
    return np.asarray(Z.value, dtype=complex)


# ---------------------------------------------------------------------------
# subgradient backend


def maximize_min_eig(
    prob: LMIProblem,
    budget: SolverBudget = DEFAULT_BUDGET,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, float]:
    """Ascend the concave map x -> min_eig(F(x)) with eigenvector subgradients."""
    rng = np.random.default_rng(0) if rng is None else rng
    K = prob.K
    if K == 0:
        return np.zeros(0), numlin.min_eig(prob.F0)
    radius = prob.bound if prob.bound is not None else 1e3 * (1.0 + numlin.operator_norm(prob.F0))
    gnorm = max(numlin.operator_norm(G) for G in prob.gens)
    per_start = max(1, budget.iterations // max(1, budget.restarts))
    best_x, best_val = np.zeros(K), numlin.min_eig(prob.F0)
    for r in range(max(1, budget.restarts)):
        x = np.zeros(K) if r == 0 else rng.normal(size=K) * (1.0 + numlin.operator_norm(prob.F0)) / gnorm
        step = (1.0 + numlin.operator_norm(prob.F0)) / gnorm
        lam, u = numlin.min_eigpair(prob.pencil(x))
        for _ in range(per_start):
            g = np.array([np.real(u.conj() @ G @ u) for G in prob.gens])
            gn = np.linalg.norm(g)
            if gn < 1e-14:
                break
            y = x + step * g / gn
            ny = np.linalg.norm(y)
            if ny > radius:
                y *= radius / ny
            lam_y, u_y = numlin.min_eigpair(prob.pencil(y))
            if lam_y > lam:
                x, lam, u = y, lam_y, u_y
                step *= 1.2
            else:
                step *= 0.5
                if step < 1e-14:
                    break
        if lam > best_val:
            best_x, best_val = x, lam
    return best_x, best_val


def _project_slice(prob: LMIProblem, Z: np.ndarray, iterations: int = 100) -> np.ndarray:
    """Dykstra projection onto {Z >= 0} intersected with the affine constraints."""
    A, b = _constraint_system(prob)
    pinv = np.linalg.pinv(A)
    z = numlin.herm_coords(Z)
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    for _ in range(iterations):
        y = z + p
        y_aff = y - pinv @ (A @ y - b)
        p = y - y_aff
        w = y_aff + q
        M = numlin.herm_from_coords(w)
        ev, V = np.linalg.eigh(M)
        z_new = numlin.herm_coords((V * np.clip(ev, 0.0, None)) @ V.conj().T)
        q = w - z_new
        if np.linalg.norm(z_new - z) < 1e-13:
            z = z_new
            break
        z = z_new
    return numlin.herm_from_coords(z)


def _subgradient_dual(prob: LMIProblem, budget: SolverBudget) -> np.ndarray:
    N = prob.N
    Z = _project_slice(prob, np.eye(N) / N)
    F0 = prob.F0
    step = 1.0 / (1.0 + numlin.operator_norm(F0))
    val = np.trace(Z @ F0).real
    for _ in range(max(1, budget.iterations // 50)):
        Zn = _project_slice(prob, Z - step * F0)
        vn = np.trace(Zn @ F0).real
        if vn < val - 1e-15:
            Z, val = Zn, vn
            step *= 1.5
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return Z


# ---------------------------------------------------------------------------
# public API


def dual_certificate(
    prob: LMIProblem,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    hints: Sequence[np.ndarray] = (),
) -> np.ndarray | None:
    """Return a verified Farkas certificate Z (tr Z = 1) or None.

    ``hints`` (e.g. multipliers from a primal solve) are tried first.
    """
    for H in hints:
        tr = float(np.trace(H).real)
        if tr > 0:
            Z = polish_certificate(prob, H / tr)
            if is_valid_certificate(prob, Z, tol):
                return Z
    if prob.K == 0:
        lam, u = numlin.min_eigpair(prob.F0)
        Z = np.outer(u, u.conj())
        return Z if is_valid_certificate(prob, Z, tol) else None
    if budget.method == "subgradient":
        Z = _subgradient_dual(prob, budget)
    else:
        # the margin problem is strictly feasible, so its multiplier is the
        # most reliable source; the standalone dual often lacks interior points
        duals: list = []
        _conic_primal(prob, duals=duals)
        for H in duals:
            tr = float(np.trace(H).real)
            if tr > 0:
                Zc = polish_certificate(prob, H / tr)
                if is_valid_certificate(prob, Zc, tol):
                    return Zc
        Z = _conic_dual(prob)
    if Z is None:
        return None
    Z = polish_certificate(prob, Z)
    return Z if is_valid_certificate(prob, Z, tol) else None


def max_margin(
    prob: LMIProblem,
    budget: SolverBudget = DEFAULT_BUDGET,
    rng: np.random.Generator | None = None,
    duals: list | None = None,
) -> tuple[np.ndarray, float]:
    """Best x found for max min_eig(F(x)) and its directly evaluated margin.

    The conic backend caps the objective at ||F0|| (or 1 when F0 = 0), so a
    large margin is only reported up to roughly that level.
    """
    if budget.method == "subgradient":
        x, _ = maximize_min_eig(prob, budget, rng)
    else:
        x = _conic_primal(prob, duals=duals)
    return x, numlin.min_eig(prob.pencil(x))


def solve(
    prob: LMIProblem,
    budget: SolverBudget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
) -> LMIOutcome:
    """Decide feasibility of F(x) >= 0 (or > 0 when ``prob.strict``).

    StrictlyFeasible needs a witness with margin >= tau_psd, Infeasible needs
    a verified certificate, Feasible a witness with margin >= -tau_psd.
    Anything else is Unknown.
    """
    notes: list[str] = []
    tau = prob.tau_psd(tol)
    duals: list = []
    x, margin = max_margin(prob, budget, rng, duals)
    notes.append(f"primal margin {margin:.3e} (tau_psd {tau:.1e})")
    if margin >= tau and budget.method != "subgradient" and prob.K:
        # prefer the smallest witness that keeps (most of) the margin
        x2 = _conic_primal(prob, target=min(margin, _margin_cap(prob)) * (1.0 - 1e-6))
        m2 = numlin.min_eig(prob.pencil(x2))
        if m2 >= tau:
            x, margin = x2, m2
    if margin >= tau:
        return LMIOutcome(LMIStatus.STRICTLY_FEASIBLE, witness=x, margin=margin, log=tuple(notes))
    Z = dual_certificate(prob, budget, tol, hints=duals)
    if Z is not None:
        dual_value = float(np.trace(Z @ prob.F0).real)
        notes.append(f"certificate tr(Z F0) = {dual_value:.3e}")
        if margin >= tau:  # pragma: no cover - guarded above
            raise WeakDualityViolation("witness and certificate both verified")
        return LMIOutcome(LMIStatus.INFEASIBLE, certificate=Z, margin=margin, dual_value=dual_value, log=tuple(notes))
    if margin >= -tau:
        notes.append("boundary: no certificate found")
        return LMIOutcome(LMIStatus.FEASIBLE, witness=x, margin=margin, log=tuple(notes))
    notes.append("no witness and no certificate")
    return LMIOutcome(LMIStatus.UNKNOWN, witness=x, margin=margin, log=tuple(notes))
