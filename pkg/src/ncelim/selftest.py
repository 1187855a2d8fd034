"""Property suites that exercise every module against independent oracles.

Each suite draws random instances from a seeded generator, runs the
package on them, compares with a second route that does not share the
computation under test, and returns a :class:`CriterionResult`. The CLI
``selftest`` command and the acceptance tests both run these suites.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from . import numlin, sdpcore
from .elim import (
    ElimInstance,
    ElimStatus,
    Mode,
    caratheodory_compress,
    check_condition_i,
    check_spectrahedrop,
    eliminate_semidefinite,
    eliminate_strict,
    is_genuine,
    lift_nonlinear,
    realization_bounded_below,
    realization_single_word,
    realization_surjective_pair,
    verify_equivalence,
)
from .formula import builtin, check
from .formula.checker import Tri, Verdict, cross_validate
from .instances import (
    planted_spectrahedrop,
    random_elim_instance,
    random_indefinite_matrix,
    random_neither_instance,
    random_psd_instance,
    random_subspace,
    shift_constant,
)
from .ncpoly import FreeMatrixPoly, HermTuple, compress, evaluate, random_poly, random_tuple
from .subspace import Definiteness, HermSubspace, classify, complement


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    count: int
    seconds: float
    contradictions: int = 0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"{status} criterion {self.number} ({self.name}): n={self.count}, {self.seconds:.1f}s; {extra}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _timed(fn: Callable[..., CriterionResult]) -> Callable[..., CriterionResult]:
    def run(*args, **kwargs) -> CriterionResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------------------
# 1. compression as a congruence


@_timed
def congruence_identity(trials: int = 500, seed: int = 0) -> CriterionResult:
    """p_W(T) against (W (x) I)* p(T) (W (x) I) for random p, W, T."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        d, s = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        n, deg = int(rng.integers(1, 3)), int(rng.integers(0, 3))
        k = int(rng.integers(1, 4))
        p = random_poly(d, n, deg, rng)
        W = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
        T = random_tuple(n, s, rng)
        lhs = evaluate(compress(p, W), T)
        Wk = np.kron(W, np.eye(s))
        rhs = Wk.conj().T @ evaluate(p, T) @ Wk
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CriterionResult(1, "congruence identity", worst <= 1e-10, trials, 0.0, details={"max_error": worst})


# ---------------------------------------------------------------------------
# 2. definite subspaces and their complements


@_timed
def ortho_duality(trials: int = 100, seed: int = 0, dims=(2, 3, 4)) -> CriterionResult:
    """S is definite exactly when its complement is indefinite.

    A violation needs both classifications resolved and certificate
    backed: a verified definite element on one side and a resolved
    non-indefinite label on the other, or the reverse.
    """
    rng = np.random.default_rng(seed)
    violations = unknown = total = 0
    counts: dict = {}
    for d in dims:
        for _ in range(trials):
            S = random_subspace(d, rng)
            a = classify(S, rng=rng)
            b = classify(complement(S), rng=rng)
            total += 1
            counts[a.status.value] = counts.get(a.status.value, 0) + 1
            if Definiteness.UNKNOWN in (a.status, b.status):
                unknown += 1
                continue
            if a.status is Definiteness.DEFINITE and numlin.min_eig(a.element.element) <= 0:
                violations += 1
            if (a.status is Definiteness.DEFINITE) != (b.status is Definiteness.INDEFINITE):
                violations += 1
            if (b.status is Definiteness.DEFINITE) != (a.status is Definiteness.INDEFINITE):
                violations += 1
    rate = unknown / max(total, 1)
    details = {"violations": violations, "unknown_rate": rate, **counts}
    return CriterionResult(2, "orthogonal duality", violations == 0 and rate < 0.05, total, 0.0, violations, details)


# ---------------------------------------------------------------------------
# 3. block completion


@_timed
def block_completion(trials: int = 200, seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(trials):
        a, c = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        eps = float(rng.uniform(0.01, 2.0))
        A = random_with_floor(a, eps, rng)
        B = rng.normal(size=(a, c)) + 1j * rng.normal(size=(a, c))
        B *= rng.uniform(0.1, 5.0)
        C = numlin.random_hermitian(c, rng, scale=rng.uniform(0.1, 5.0))
        lam = numlin.complete_block(A, B, C, eps)
        gap = numlin.min_eig(numlin.assemble_block(A, B, C, lam)) - (eps / 2 - 1e-9)
        worst = min(worst, gap)
    return CriterionResult(3, "block completion", worst >= 0, trials, 0.0, details={"min_slack": float(worst)})


def random_with_floor(k: int, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Hermitian k x k with smallest eigenvalue exactly eps."""
    eigs = eps + np.concatenate([[0.0], rng.uniform(0.0, 3.0, size=k - 1)])
    U = numlin.random_unitary(k, rng)
    return (U * eigs) @ U.conj().T


# ---------------------------------------------------------------------------
# 4. Caratheodory compression


def _basis_residual(before, after) -> float:
    d = before[0].shape[0]
    worst = 0.0
    for E in numlin.herm_basis(d):
        lhs = sum(W.conj().T @ E @ W for W in before)
        rhs = sum(W.conj().T @ E @ W for W in after)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


@_timed
def caratheodory(trials: int = 100, seed: int = 0, d: int = 2) -> CriterionResult:
    """Square and rectangular inputs: length bound and preserved quadratic sums."""
    rng = np.random.default_rng(seed)
    worst_len = 0
    worst_res = 0.0
    ok = True
    for shape_r in (d, 1, 3):
        for _ in range(max(1, trials // 10)):
            Ws = [rng.normal(size=(d, shape_r)) + 1j * rng.normal(size=(d, shape_r)) for _ in range(trials)]
            scale = float(np.sqrt(sum(np.linalg.norm(W) ** 2 for W in Ws)))
            Ws = [W / scale for W in Ws]
            out = caratheodory_compress(Ws)
            bound = 2 * d**4 if shape_r == d else 2 * d * d * shape_r * shape_r
            res = _basis_residual(Ws, out)
            worst_len = max(worst_len, len(out))
            worst_res = max(worst_res, res)
            ok &= len(out) <= bound and res <= 1e-8
    return CriterionResult(4, "Caratheodory compression", ok, trials, 0.0, details={"max_len": worst_len, "max_residual": worst_res})


# ---------------------------------------------------------------------------
# 5. the elimination equivalence


def anchor_instance() -> ElimInstance:
    """p = sigma_x (constant), B = diag(1, -1), s = 1: infeasible with W = (1, -1)/sqrt2."""
    p = FreeMatrixPoly.constant(np.array([[0.0, 1.0], [1.0, 0.0]]), 0)
    return ElimInstance(p, (np.diag([1.0, -1.0]),), HermTuple.empty(1), Mode.NONSTRICT)


@_timed
def elimination_equivalence(trials: int = 200, seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    contradictions = unknown = unverified = not_indefinite = 0
    outcomes: dict = {}
    for _ in range(trials):
        s = int(rng.integers(1, 3))
        inst = random_elim_instance(rng, d=2, m=1, s=s, n=1, degree=int(rng.integers(0, 2)))
        span = classify(HermSubspace(2, inst.Bs), rng=rng)
        if span.status is not Definiteness.INDEFINITE:
            not_indefinite += 1
        rep = verify_equivalence(inst, rng=rng)
        outcomes[rep.verdict] = outcomes.get(rep.verdict, 0) + 1
        if rep.contradiction:
            contradictions += 1
        elif rep.unknown:
            unknown += 1
        elif rep.verdict == "Infeasible" and (rep.witness is None or not is_genuine(inst, rep.witness)):
            unverified += 1
    # anchor
    rep = verify_equivalence(anchor_instance())
    W = numlin.canonical_phase(rep.witness.mats[0]) if rep.witness and len(rep.witness.mats) == 1 else None
    expected = np.array([[1.0], [-1.0]]) / np.sqrt(2)
    anchor_ok = rep.verdict == "Infeasible" and W is not None and np.linalg.norm(W - expected) < 1e-6
    passed = contradictions == 0 and unverified == 0 and not_indefinite == 0 and anchor_ok
    details = {**outcomes, "unverified": unverified, "span_not_indefinite": not_indefinite, "anchor": "ok" if anchor_ok else "bad"}
    return CriterionResult(5, "elimination equivalence", passed, trials, 0.0, contradictions, details)


# ---------------------------------------------------------------------------
# 6. one semidefinite coefficient


@_timed
def semidefinite_elimination(trials: int = 100, seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    contradictions = unresolved = unverified = 0
    counts: dict = {}
    for _ in range(trials):
        d, s = int(rng.integers(2, 4)), int(rng.integers(1, 3))
        p, B, T = random_psd_instance(rng, d=d, s=s)
        res = eliminate_semidefinite(p, B, T)
        flat = check_condition_i(ElimInstance(p, (B,), T, Mode.STRICT), rng=rng)
        key = (res.feasible, flat.holds)
        counts[str(key)] = counts.get(str(key), 0) + 1
        if res.feasible is None or flat.holds is None:
            unresolved += 1
            continue
        if res.feasible != flat.holds:
            contradictions += 1
        if res.feasible and numlin.min_eig(evaluate(p, T) + np.kron(B, res.S)) <= 0:
            unverified += 1
    passed = contradictions == 0 and unverified == 0
    details = {**counts, "unresolved": unresolved, "unverified": unverified}
    return CriterionResult(6, "semidefinite coefficient", passed, trials, 0.0, contradictions, details)


# ---------------------------------------------------------------------------
# 7. strict recursion on spans without definite elements


@_timed
def strict_recursion(trials: int = 100, seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    contradictions = unresolved = unverified = 0
    counts: dict = {}
    done = 0
    while done < trials:
        inst = random_neither_instance(rng, d=3, m=2)
        if classify(HermSubspace(3, inst.Bs), rng=rng).status is not Definiteness.NEITHER:
            continue
        done += 1
        res = eliminate_strict(inst, rng=rng)
        flat = check_condition_i(inst, rng=rng)
        key = (res.status.value, flat.holds)
        counts[str(key)] = counts.get(str(key), 0) + 1
        if res.status is ElimStatus.UNKNOWN or flat.holds is None:
            unresolved += 1
            continue
        if (res.status is ElimStatus.FEASIBLE) != flat.holds:
            contradictions += 1
        if res.status is ElimStatus.FEASIBLE and numlin.min_eig(inst.assemble(res.S)) <= 0:
            unverified += 1
        if res.status is ElimStatus.INFEASIBLE and not is_genuine(inst, res.witness):
            unverified += 1
    passed = contradictions == 0 and unverified == 0
    details = {**counts, "unresolved": unresolved, "unverified": unverified}
    return CriterionResult(7, "strict recursion", passed, trials, 0.0, contradictions, details)


# ---------------------------------------------------------------------------
# 8. formulas against oracles


CROSS_CHECKED = ("rank_one", "is_scalar", "trace_zero", "trace_eq", "intscal")


def _factor_witness(res, s: int) -> bool:
    """The refutation instantiates X = s I, Y = a I, Z = b I with a b = s, a, b > 1."""
    A = res.assignment
    try:
        X, Y, Z = (A[k] for k in ("X", "Y", "Z"))
    except KeyError:
        return False
    eye = np.eye(s)
    a, b = np.trace(Y).real / s, np.trace(Z).real / s
    scalar = all(np.linalg.norm(M - np.trace(M) / s * eye) < 1e-9 for M in (X, Y, Z))
    return scalar and abs(np.trace(X).real / s - s) < 1e-9 and abs(a * b - s) < 1e-9 and a > 1.5 and b > 1.5


@_timed
def formula_cross_validation(trials: int = 50, seed: int = 0, sizes=(1, 2, 3)) -> CriterionResult:
    rng = np.random.default_rng(seed)
    contradictions = 0
    details: dict = {}
    for name in CROSS_CHECKED:
        resolved = 0
        for s in sizes:
            rep = cross_validate(name, s, trials, rng)
            contradictions += len(rep.contradictions)
            resolved += rep.resolved
        details[f"{name}_resolved"] = resolved
    intscal_ok = True
    for s in sizes:
        for k in range(-1, s + 3):
            res = check(builtin("intscal", "X"), s, assignment={"X": k * np.eye(s)})
            intscal_ok &= (res.value is Tri.TRUE) == (0 <= k <= s)
        res = check(builtin("intscal", "X"), s, assignment={"X": (s + 0.5) * np.eye(s)})
        intscal_ok &= res.value is not Tri.TRUE
    prime_ok = True
    for s in (4, 6):
        res = check(builtin("prime_size"), s)
        prime_ok &= res.verdict is Verdict.REFUTED and bool(res.reverified) and _factor_witness(res, s)
    for s in (2, 3, 5, 7):
        res = check(builtin("prime_size"), s)
        prime_ok &= res.value is Tri.UNKNOWN and res.verdict is Verdict.HOLDS_BY_ORACLE
    details.update({"intscal_pattern": intscal_ok, "prime_size": prime_ok})
    passed = contradictions == 0 and intscal_ok and prime_ok
    return CriterionResult(8, "formula cross-validation", passed, trials, 0.0, contradictions, details)


# ---------------------------------------------------------------------------
# 9. spectrahedrops


@_timed
def spectrahedrop(trials: int = 50, seed: int = 0, eps: float = 1e-2) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = np.inf
    failures = 0
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        s = int(rng.integers(1, 3))
        As, Bs, T, e, _ = planted_spectrahedrop(rng, d=d, n=2, m=int(rng.integers(1, 3)), s=s)
        res = check_spectrahedrop(As, Bs, T, eps, e=e, rng=rng)
        if res.S is None:
            failures += 1
            continue
        p = FreeMatrixPoly.linear_pencil(np.zeros((d, d)), As)
        M = evaluate(p, T) + sum(np.kron(B, S) for B, S in zip(Bs, res.S))
        worst = min(worst, numlin.min_eig(M) + eps + 1e-7)
    passed = failures == 0 and worst >= 0
    return CriterionResult(9, "spectrahedrop", passed, trials, 0.0, details={"failures": failures, "min_slack": float(worst)})


# ---------------------------------------------------------------------------
# 10. nonlinear elimination variables


def direct_margin(M0: np.ndarray, q: Callable, nvars: int, s: int, rng: np.random.Generator, starts: int = 8) -> float:
    """max over Hermitian S of min_eig(M0 + q(S)) by multi-start Nelder-Mead.

    The value is capped at 1 + ||M0|| so that unbounded directions stay finite.
    """
    k = s * s
    cap = 1.0 + numlin.operator_norm(M0)

    def neg(x):
        Ss = [numlin.herm_from_coords(x[j * k : (j + 1) * k]) for j in range(nvars)]
        M = M0 + q(Ss)
        if not np.all(np.isfinite(M)):
            return 1e6
        return -min(numlin.min_eig(M), cap)

    inits = [np.zeros(nvars * k)]
    for scale in (0.5, 1.0, 2.0, 4.0):
        inits += [scale * rng.normal(size=nvars * k) for _ in range(max(1, starts // 4))]
    best = -np.inf
    for x0 in inits:
        r = optimize.minimize(neg, x0, method="Nelder-Mead", options={"maxiter": 2000, "xatol": 1e-8, "fatol": 1e-10})
        best = max(best, -r.fun)
        if best >= cap:
            break
    return float(best)


def lifting_instance(example: str, rng: np.random.Generator):
    """(p, realization, T, q) for one of the realization families."""
    d = 2
    s = int(rng.integers(1, 3))
    p = shift_constant(random_poly(d, 1, 1, rng), rng.uniform(-1.0, 3.0))
    T = random_tuple(1, s, rng)
    if example == "bounded_below":
        m = int(rng.integers(1, 3))
        Bs = [numlin.random_hermitian(d, rng) for _ in range(m)]
        a = rng.uniform(-1.0, 1.0, size=m)
        real = realization_bounded_below(Bs, a)

        def q(Ss):
            return sum(np.kron(B, S @ S + ai * np.eye(s)) for B, S, ai in zip(Bs, Ss, a))

        return p, real, T, q, m
    if example in ("odd_word", "even_word"):
        B = random_indefinite_matrix(d, rng)
        odd = example == "odd_word"
        real = realization_single_word(B, odd)

        def q(Ss):
            S = Ss[0]
            return np.kron(B, S @ S @ S if odd else S @ S)

        return p, real, T, q, 1
    if example == "surjective_pair":
        B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        real = realization_surjective_pair(B)

        def q(Ss):
            return np.kron(B, Ss[0] + 1j * Ss[1]) + np.kron(B.conj().T, Ss[0] - 1j * Ss[1])

        return p, real, T, q, 2
    raise ValueError(f"unknown example {example!r}")


LIFT_FAMILIES = {
    "bounded_below": ("bounded_below",),
    "single_word": ("odd_word", "even_word"),
    "surjective_pair": ("surjective_pair",),
}


@_timed
def nonlinear_lifting(trials: int = 50, seed: int = 0, gap: float = 0.05) -> CriterionResult:
    """Sign of the lifted LMI margin against direct search in the nonlinear form.

    Only margins with |t| > gap are compared: a positive lifted margin must
    be matched by some S found directly, and a negative one excludes every
    S by the realization identity, so the direct search must stay negative.
    """
    rng = np.random.default_rng(seed)
    contradictions = 0
    details: dict = {}
    for family, variants in LIFT_FAMILIES.items():
        agree = skipped = 0
        for k in range(trials):
            p, real, T, q, nv = lifting_instance(variants[k % len(variants)], rng)
            inst = lift_nonlinear(p, real, T)
            _, t = sdpcore.max_margin(inst.lmi())
            if abs(t) <= gap:
                skipped += 1
                continue
            direct = direct_margin(evaluate(p, T), q, nv, T.s, rng)
            if (t > 0) == (direct > 0):
                agree += 1
            else:
                contradictions += 1
        details[family] = f"{agree} agree, {skipped} near zero"
    return CriterionResult(10, "nonlinear lifting", contradictions == 0, trials, 0.0, contradictions, details)


SUITES: dict[int, Callable[..., CriterionResult]] = {
    1: congruence_identity,
    2: ortho_duality,
    3: block_completion,
    4: caratheodory,
    5: elimination_equivalence,
    6: semidefinite_elimination,
    7: strict_recursion,
    8: formula_cross_validation,
    9: spectrahedrop,
    10: nonlinear_lifting,
}


def run_all(trials: int | None = None, seed: int = 0, only=None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    """Run the suites in order; ``trials`` overrides every suite's default count."""
    out = []
    for number, suite in SUITES.items():
        if only and number not in only:
            continue
        res = suite(trials, seed) if trials is not None else suite(seed=seed)
        out.append(res)
        if echo:
            echo(res.line())
    return out


__all__ = [
    "CriterionResult",
    "SUITES",
    "run_all",
    "anchor_instance",
    "direct_margin",
    "lifting_instance",
    "random_with_floor",
]
