"""Three-valued model checking of quantified formulas at a fixed matrix size.

Quantifiers range over a continuum, so the checker is a semi-decision
procedure. An existential block becomes true once a candidate assignment
satisfies its body. A universal block becomes false once a candidate
violates its body. The opposite outcomes need an exact argument, and the
checker knows three of them:

* an equation affine in the quantified block has a least-squares minimum
  that can be computed, so a positive minimum refutes it;
* the trace of a sum of commutator words does not depend on the
  variables, so a nonzero constant trace refutes the equation;
* congruence ``Z A Z = X`` cannot raise rank or inertia, so ``rank X >
  rank A`` refutes it;
* an equation linear and homogeneous in a universal block holds for every
  value once it holds on a basis.

Anything else stays UNKNOWN. Calls nested inside a formula are resolved
by the oracle of the named predicate; the top-level call is expanded and
searched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .. import numlin
from ..config import DEFAULT_FORMULA_BUDGET, DEFAULT_TOL, FormulaBudget, Tolerances
from .ast import (
    And,
    Call,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    NCPoly,
    Not,
    Or,
    Pd,
    Psd,
    adjoint_factor,
    check_bindings,
    poly_degree_in,
    poly_eval,
)
from .builtins import BUILTINS, expand_call, oracle


class Tri(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def negate(self) -> "Tri":
        return {Tri.TRUE: Tri.FALSE, Tri.FALSE: Tri.TRUE, Tri.UNKNOWN: Tri.UNKNOWN}[self]


class Verdict(str, Enum):
    REFUTED = "Refuted"
    NOT_REFUTED = "NotRefuted"
    WITNESSED = "Witnessed"  # proven true: an explicit witness or an exact basis check
    HOLDS_BY_ORACLE = "HoldsByOracle"


ALL_STRATEGIES = frozenset(
    {"structured", "random", "affine", "split", "congruence", "trace_invariant", "linear_forall"}
)


class UnboundVariableError(ValueError):
    pass


class SizeMismatchError(ValueError):
    pass


@dataclass
class Outcome:
    value: Tri
    assignment: dict = field(default_factory=dict)  # instantiations behind the value
    reason: str = ""


@dataclass
class CheckResult:
    verdict: Verdict
    s: int
    value: Tri
    assignment: dict
    reason: str
    oracle: bool | None
    reverified: bool | None
    stats: dict
    trace: list[str]

    def summary(self) -> str:
        parts = [self.verdict.value]
        if self.oracle is not None:
            parts.append(f"oracle: {str(self.oracle).lower()}")
        if self.verdict is Verdict.NOT_REFUTED:
            parts.append("checker: no witness found")
        if self.reason:
            parts.append(self.reason)
        return "; ".join(parts)


_REFUTE = object()  # sentinel yielded by candidate generators holding a proof of falsity


def ranked_product(lists: Sequence[Sequence], limit: int) -> Iterator[tuple]:
    """Tuples from the product, ordered by total index so that every list advances."""
    if not lists:
        yield ()
        return
    sizes = [len(x) for x in lists]
    if min(sizes) == 0:
        return
    count = 0
    for total in range(sum(sizes) - len(sizes) + 1):
        for idx in _compositions(total, sizes):
            yield tuple(lst[i] for lst, i in zip(lists, idx))
            count += 1
            if count >= limit:
                return


def _compositions(total: int, sizes: Sequence[int]) -> Iterator[tuple]:
    if len(sizes) == 1:
        if total < sizes[0]:
            yield (total,)
        return
    for first in range(min(total, sizes[0] - 1) + 1):
        for rest in _compositions(total - first, sizes[1:]):
            yield (first, *rest)


def zero_diagonal_unitary(X: np.ndarray) -> np.ndarray:
    """Unitary U with U* X U having zero diagonal, for Hermitian X of trace zero.

    Repeatedly picks a unit vector v with v* X v = 0 by mixing an eigenvector
    of a positive and one of a negative eigenvalue, then continues on the
    orthogonal complement, which again carries a traceless compression.
    """
    s = len(X)
    basis = np.eye(s, dtype=complex)
    for k in range(s - 1):
        Q = basis[:, k:]
        C = Q.conj().T @ X @ Q
        C = 0.5 * (C + C.conj().T)
        w, V = np.linalg.eigh(C)
        lam, mu = w[-1], w[0]
        if lam - mu <= 1e-14 * (1.0 + abs(lam)):
            v = V[:, 0]
        else:
            v = np.sqrt(max(lam, 0.0)) * V[:, 0] + np.sqrt(max(-mu, 0.0)) * V[:, -1]
            v = v / np.linalg.norm(v)
        # complete v to an orthonormal basis of the current subspace
        M = np.column_stack([v, np.eye(len(v))])
        Qv, _ = np.linalg.qr(M)
        Qv[:, 0] = v
        basis = np.column_stack([basis[:, :k], Q @ Qv])
    return basis


class _Checker:
    def __init__(
        self,
        s: int,
        budget: FormulaBudget,
        tol: Tolerances,
        rng: np.random.Generator,
        strategies: frozenset,
        pins: dict | None = None,
    ):
        self.s = s
        self.budget = budget
        self.tol = tol
        self.rng = rng
        self.strategies = strategies
        self.pins = pins or {}
        self.trace: list[str] = []
        self.stats = {"atoms": 0, "exists_candidates": 0, "forall_candidates": 0, "oracle_calls": 0}
        self._polys: dict = {}
        self._last_refutation = ""
        self._random_pool = [numlin.random_hermitian(s, rng) for _ in range(budget.random)]

    # -- helpers ---------------------------------------------------------

    def poly(self, expr) -> NCPoly:
        key = id(expr)
        hit = self._polys.get(key)
        if hit is None or hit[0] is not expr:
            hit = (expr, expr.expand())
            self._polys[key] = hit
        return hit[1]

    def value(self, expr, env) -> tuple[np.ndarray, float]:
        p = self.poly(expr)
        missing = {x for w in p for x in w} - env.keys()
        if missing:
            raise UnboundVariableError(f"unbound variable(s): {sorted(missing)}")
        return poly_eval(p, env, self.s)

    def eq_tol(self, mag: float) -> float:
        return self.tol.eq * (1.0 + mag)

    def log(self, depth: int, msg: str) -> None:
        if len(self.trace) < 400:
            self.trace.append("  " * depth + msg)

    # -- evaluation ------------------------------------------------------

    def eval(self, f: Formula, env: dict, depth: int = 0) -> Outcome:
        if isinstance(f, Eq):
            self.stats["atoms"] += 1
            E, mag = self.value(f.expr, env)
            ok = np.linalg.norm(E) <= self.eq_tol(mag)
            return Outcome(Tri.TRUE if ok else Tri.FALSE)
        if isinstance(f, (Psd, Pd)):
            self.stats["atoms"] += 1
            E, mag = self.value(f.expr, env)
            lo = numlin.min_eig(0.5 * (E + E.conj().T))
            skew = np.linalg.norm(E - E.conj().T)
            t = self.tol.psd_for(mag)
            if skew > self.eq_tol(mag):
                return Outcome(Tri.FALSE, reason="not Hermitian")
            ok = lo >= -t if isinstance(f, Psd) else lo > t
            return Outcome(Tri.TRUE if ok else Tri.FALSE)
        if isinstance(f, Not):
            o = self.eval(f.arg, env, depth)
            return Outcome(o.value.negate(), o.assignment, o.reason)
        if isinstance(f, And):
            return self._junction(f.args, env, depth, Tri.FALSE)
        if isinstance(f, Or):
            return self._junction(f.args, env, depth, Tri.TRUE)
        if isinstance(f, Implies):
            return self._junction((Not(f.premise), f.conclusion), env, depth, Tri.TRUE)
        if isinstance(f, Call):
            return self._call(f, env)
        if isinstance(f, Exists):
            return self._exists(f, env, depth)
        if isinstance(f, Forall):
            return self._forall(f, env, depth)
        raise TypeError(f"not a formula node: {type(f).__name__}")

    def _junction(self, args, env, depth, decisive: Tri) -> Outcome:
        unknown = None
        collected: dict = {}
        for a in args:
            o = self.eval(a, env, depth)
            if o.value is decisive:
                return o
            if o.value is Tri.UNKNOWN:
                unknown = o
            else:
                collected.update(o.assignment)
        if unknown is not None:
            return Outcome(Tri.UNKNOWN, unknown.assignment, unknown.reason)
        return Outcome(decisive.negate(), collected)

    def _call(self, f: Call, env: dict) -> Outcome:
        self.stats["oracle_calls"] += 1
        mats = [self.value(a, env)[0] for a in f.args]
        ok = oracle(f.name, *mats, s=self.s)
        return Outcome(Tri.TRUE if ok else Tri.FALSE, reason=f"oracle {f.name}")

    # -- candidates ------------------------------------------------------

    def structured(self, env: dict) -> list[np.ndarray]:
        """Seeds built from bound matrices first, then fixed patterns of size s."""
        s = self.s
        out: list[np.ndarray] = [np.zeros((s, s), complex)]
        for M in env.values():
            H = 0.5 * (M + M.conj().T)
            if np.linalg.norm(H) < 1e-12:
                continue
            w, V = np.linalg.eigh(H)
            out.append(H)
            for j in range(s):
                out.append(np.outer(V[:, j], V[:, j].conj()))
            # spectral projections onto eigenspaces with repeated eigenvalues
            groups = _eigen_groups(w)
            if len(groups) < s:
                for g in groups:
                    out.append(V[:, g] @ V[:, g].conj().T)
            out.append((V * np.arange(1, s + 1)) @ V.conj().T)
            if abs(np.trace(H)) <= 1e-9 * (1.0 + np.linalg.norm(H)) and s > 1:
                U = zero_diagonal_unitary(H)
                out.append((U * np.arange(1, s + 1)) @ U.conj().T)
        eye = np.eye(s, dtype=complex)
        out.append(eye)
        out.extend(k * eye for k in range(2, s + 1))
        out.append(-eye)
        for bits in itertools.product((0.0, 1.0), repeat=s):
            if 0 < sum(bits) < s:
                out.append(np.diag(np.array(bits, dtype=complex)))
        out.extend(np.sqrt(2.0) * B for B in numlin.herm_basis(s)[s:])
        return _dedupe(out)

    def candidates(self, env: dict) -> list[np.ndarray]:
        out = self.structured(env) if "structured" in self.strategies else []
        if "random" in self.strategies:
            out = out + self._random_pool
        return out

    # -- existential blocks ----------------------------------------------

    def _exists(self, f: Exists, env: dict, depth: int) -> Outcome:
        names = tuple(f.vars)
        if not set(names) & f.body.free_vars():
            return self.eval(f.body, {**env, **{n: np.zeros((self.s, self.s), complex) for n in names}}, depth)
        tried = 0
        for cand in self._exists_candidates(names, f.body, env, depth):
            if cand is _REFUTE:
                return Outcome(Tri.FALSE, reason=self._last_refutation)
            tried += 1
            self.stats["exists_candidates"] += 1
            o = self.eval(f.body, {**env, **cand}, depth + 1)
            if o.value is Tri.TRUE:
                self.log(depth, f"exists {','.join(names)}: witness after {tried} candidate(s)")
                return Outcome(Tri.TRUE, {**cand, **o.assignment})
            if tried >= self.budget.exists:
                break
        self.log(depth, f"exists {','.join(names)}: no witness in {tried} candidate(s)")
        return Outcome(Tri.UNKNOWN, reason=f"exists {','.join(names)} unresolved")

    def _exists_candidates(self, names, body, env, depth) -> Iterator:
        conjuncts = body.args if isinstance(body, And) else (body,)
        eqs = [c for c in conjuncts if isinstance(c, Eq) and set(names) & c.free_vars()]
        for atom in eqs:
            q = adjoint_factor(atom.expr) or atom.expr
            p = self.poly(q)
            degrees = poly_degree_in(p, names)
            if "trace_invariant" in self.strategies and self._trace_obstruction(p, names, env):
                yield _REFUTE
                return
            if "affine" in self.strategies and max(degrees) <= 1:
                sol, res, scale = self._affine_solve(p, names, env)
                if res <= self.tol.eq * (1.0 + scale):
                    yield sol
                elif res > 1e3 * self.tol.eq * (1.0 + scale):
                    self._last_refutation = f"least-squares residual {res:.3g} over {','.join(names)}"
                    yield _REFUTE
                    return
            if "congruence" in self.strategies and len(names) == 1:
                got = self._congruence(p, names[0], env)
                if got is _REFUTE:
                    yield _REFUTE
                    return
                if got is not None:
                    yield got
            if "split" in self.strategies and len(names) > 1:
                yield from self._split_solve(p, names, env)
        lists = [self.candidates(env)] * len(names)
        for combo in ranked_product(lists, self.budget.exists):
            yield dict(zip(names, combo))

    def _affine_solve(self, p: NCPoly, names, env) -> tuple[dict, float, float]:
        """Least squares over Hermitian values of ``names`` for a polynomial affine in them."""
        s = self.s
        zero = {n: np.zeros((s, s), complex) for n in names}
        E0, mag0 = poly_eval(p, {**env, **zero}, s)
        basis = numlin.herm_basis(s)
        cols = []
        for n in names:
            for B in basis:
                E, _ = poly_eval(p, {**env, **zero, n: B}, s)
                D = (E - E0).ravel()
                cols.append(np.concatenate([D.real, D.imag]))
        A = np.array(cols).T
        b = -np.concatenate([E0.ravel().real, E0.ravel().imag])
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        k = len(basis)
        sol = {n: np.tensordot(x[j * k : (j + 1) * k], basis, axes=1) for j, n in enumerate(names)}
        E, mag = poly_eval(p, {**env, **sol}, s)
        return sol, float(np.linalg.norm(E)), max(mag, mag0)

    def _split_solve(self, p: NCPoly, names, env) -> Iterator[dict]:
        """Fix a group of variables from the seeds, solve the rest by least squares."""
        budget = self.budget.exists
        for size in range(1, len(names)):
            for group in itertools.combinations(names, size):
                rest = tuple(n for n in names if n not in group)
                seeded = {n for w in p for n in w if n in group}
                if max(poly_degree_in(p, rest)) > 1 or not seeded:
                    continue
                lists = [self.candidates(env)] * len(group)
                for combo in ranked_product(lists, budget):
                    fixed = dict(zip(group, combo))
                    sol, res, scale = self._affine_solve(p, rest, {**env, **fixed})
                    budget -= 1
                    if res <= self.tol.eq * (1.0 + scale):
                        yield {**fixed, **sol}
                    if budget <= 0:
                        return

    def _trace_obstruction(self, p: NCPoly, names, env) -> bool:
        """True when every word with a block variable cancels under cyclic rotation
        and the remaining constant part has nonzero trace, so p never vanishes."""
        cyc: dict = {}
        const: NCPoly = {}
        for w, c in p.items():
            if set(w) & set(names):
                key = min(w[k:] + w[:k] for k in range(len(w)))
                cyc[key] = cyc.get(key, 0j) + c
            else:
                const[w] = c
        if not cyc or any(abs(c) > 1e-12 for c in cyc.values()):
            return False
        C, mag = poly_eval(const, env, self.s)
        t = abs(np.trace(C))
        if t > 1e3 * self.tol.eq * (1.0 + mag) * np.sqrt(self.s):
            self._last_refutation = f"trace of the equation is the constant {t:.3g}"
            return True
        return False

    def _congruence(self, p: NCPoly, name: str, env):
        """Solve Z A Z = X when p = Z A Z - X with A, X free of Z.

        Congruence cannot increase rank or the inertia counts, which refutes
        the equation. For rank-one X the solution is built on the range of A.
        """
        A_poly: NCPoly = {}
        X_poly: NCPoly = {}
        for w, c in p.items():
            count = w.count(name)
            if count == 0:
                X_poly[w] = X_poly.get(w, 0j) - c
            elif count == 2 and w[0] == name and w[-1] == name:
                A_poly[w[1:-1]] = A_poly.get(w[1:-1], 0j) + c
            else:
                return None
        if not A_poly:
            return None
        A, magA = poly_eval(A_poly, env, self.s)
        X, magX = poly_eval(X_poly, env, self.s)
        tolA = 1e-9 * (1.0 + magA)
        tolX = 1e-9 * (1.0 + magX)
        rank = lambda M, t: int(np.sum(np.linalg.svd(M, compute_uv=False) > t))  # noqa: E731
        rA, rX = rank(A, tolA), rank(X, tolX)
        if rX == 0:
            return {name: np.zeros((self.s, self.s), complex)}
        if rX > rA:
            self._last_refutation = f"rank {rX} cannot be reached from rank {rA} by congruence"
            return _REFUTE
        hermitian = np.linalg.norm(A - A.conj().T) <= tolA and np.linalg.norm(X - X.conj().T) <= tolX
        if not hermitian:
            return None
        wA, VA = np.linalg.eigh(A)
        wX, VX = np.linalg.eigh(X)
        pos = lambda w, t: (int(np.sum(w > t)), int(np.sum(w < -t)))  # noqa: E731
        (pA, nA), (pX, nX) = pos(wA, tolA), pos(wX, tolX)
        if pX > pA or nX > nA:
            self._last_refutation = f"inertia ({pX},{nX}) exceeds ({pA},{nA}) under congruence"
            return _REFUTE
        if rX != 1 or rA != 1:
            return None
        # rank one on both sides: X = mu v v*, A = lam y y*, same sign
        jx = int(np.argmax(np.abs(wX)))
        ja = int(np.argmax(np.abs(wA)))
        mu, v = wX[jx], VX[:, jx]
        lam, y = wA[ja], VA[:, ja]
        gamma = np.sqrt(mu / lam)
        overlap = y.conj() @ v
        if abs(overlap) > 1e-12:
            gamma = gamma * np.conj(overlap) / abs(overlap)
        b = gamma * v
        Z = np.outer(b, y.conj()) + np.outer(y, b.conj()) - (y.conj() @ b) * np.outer(y, y.conj())
        return {name: Z}

    # -- universal blocks ------------------------------------------------

    def _forall(self, f: Forall, env: dict, depth: int) -> Outcome:
        names = tuple(f.vars)
        if all(n in self.pins for n in names):
            pinned = {n: self.pins[n] for n in names}
            o = self.eval(f.body, {**env, **pinned}, depth + 1)
            return Outcome(o.value, {**pinned, **o.assignment}, o.reason)
        if not set(names) & f.body.free_vars():
            return self.eval(f.body, {**env, **{n: np.zeros((self.s, self.s), complex) for n in names}}, depth)
        if "linear_forall" in self.strategies and isinstance(f.body, Eq):
            p = self.poly(f.body.expr)
            if p and poly_degree_in(p, names) == {1}:
                return self._forall_basis(names, f.body, env, depth)
        tried = 0
        saw_unknown = False
        lists = [self.candidates(env)] * len(names)
        for combo in ranked_product(lists, self.budget.forall):
            cand = dict(zip(names, combo))
            tried += 1
            self.stats["forall_candidates"] += 1
            o = self.eval(f.body, {**env, **cand}, depth + 1)
            if o.value is Tri.FALSE:
                self.log(depth, f"forall {','.join(names)}: counterexample after {tried} candidate(s)")
                return Outcome(Tri.FALSE, {**cand, **o.assignment}, o.reason)
            saw_unknown |= o.value is Tri.UNKNOWN
        self.log(depth, f"forall {','.join(names)}: no counterexample in {tried} candidate(s)")
        return Outcome(Tri.UNKNOWN, reason=f"forall {','.join(names)} not refuted")

    def _forall_basis(self, names, body: Eq, env, depth) -> Outcome:
        """A real-linear homogeneous equation holds everywhere iff it holds on a basis."""
        s = self.s
        zero = {n: np.zeros((s, s), complex) for n in names}
        for n in names:
            for B in numlin.herm_basis(s):
                cand = {**zero, n: np.array(B)}
                self.stats["forall_candidates"] += 1
                o = self.eval(body, {**env, **cand}, depth + 1)
                if o.value is Tri.FALSE:
                    self.log(depth, f"forall {','.join(names)}: basis element violates the equation")
                    return Outcome(Tri.FALSE, cand)
        self.log(depth, f"forall {','.join(names)}: linear equation holds on a basis")
        return Outcome(Tri.TRUE, reason="linear equation checked on a basis")


def _eigen_groups(w: np.ndarray, rel: float = 1e-8) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    scale = 1.0 + float(np.max(np.abs(w)))
    for j in range(1, len(w)):
        if w[j] - w[groups[-1][-1]] <= rel * scale:
            groups[-1].append(j)
        else:
            groups.append([j])
    return groups


def _dedupe(mats: Iterable[np.ndarray]) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for M in mats:
        if all(np.linalg.norm(M - N) > 1e-9 for N in out):
            out.append(M)
    return out


def _verdict(value: Tri, oracle_value: bool | None) -> Verdict:
    if value is Tri.FALSE:
        return Verdict.REFUTED
    if value is Tri.TRUE:
        return Verdict.WITNESSED
    if oracle_value:
        return Verdict.HOLDS_BY_ORACLE
    return Verdict.NOT_REFUTED


def check(
    phi: Formula,
    s: int,
    budget: FormulaBudget = DEFAULT_FORMULA_BUDGET,
    strategies: Iterable[str] = ALL_STRATEGIES,
    assignment: dict | None = None,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
) -> CheckResult:
    """Check ``phi`` at matrix size ``s``; free variables take values from ``assignment``.

    A top-level call is expanded into its defining formula and searched,
    and its oracle is reported next to the search verdict.
    """
    if s < 1:
        raise SizeMismatchError("matrix size must be positive")
    strategies = frozenset(strategies)
    unknown = strategies - ALL_STRATEGIES
    if unknown:
        raise ValueError(f"unknown strategies: {sorted(unknown)}")
    env = {k: np.asarray(v, dtype=complex) for k, v in (assignment or {}).items()}
    for k, v in env.items():
        if v.shape != (s, s):
            raise SizeMismatchError(f"{k} has shape {v.shape}, expected {(s, s)}")
    missing = phi.free_vars() - env.keys()
    if missing:
        raise UnboundVariableError(f"unbound variable(s): {sorted(missing)}")
    check_bindings(phi, frozenset(env))

    oracle_value = None
    target = phi
    if isinstance(phi, Call):
        mats = [poly_eval(a.expand(), env, s)[0] for a in phi.args]
        oracle_value = oracle(phi.name, *mats, s=s)
        target = expand_call(phi, env.keys())

    rng = np.random.default_rng(seed)
    ck = _Checker(s, budget, tol, rng, strategies)
    out = ck.eval(target, env)
    reverified = None
    if out.value is Tri.FALSE:
        again = _Checker(s, budget, tol, np.random.default_rng(seed), strategies, pins=out.assignment)
        reverified = again.eval(target, env).value is Tri.FALSE
        if not reverified:
            out = Outcome(Tri.UNKNOWN, reason="refutation did not re-verify")
    elif out.value is Tri.TRUE and out.assignment:
        # witnesses of the outermost existential block are re-evaluated directly
        reverified = _reverify_witness(target, env, out.assignment, ck)
        if not reverified:
            out = Outcome(Tri.UNKNOWN, reason="witness did not re-verify")
    return CheckResult(
        verdict=_verdict(out.value, oracle_value),
        s=s,
        value=out.value,
        assignment=out.assignment,
        reason=out.reason,
        oracle=oracle_value,
        reverified=reverified,
        stats=ck.stats,
        trace=ck.trace,
    )


def _reverify_witness(f: Formula, env: dict, assignment: dict, ck: _Checker) -> bool:
    if isinstance(f, Exists) and all(n in assignment for n in f.vars):
        inner = {**env, **{n: assignment[n] for n in f.vars}}
        return _reverify_witness(f.body, inner, assignment, ck)
    return ck.eval(f, env).value is Tri.TRUE


# ---------------------------------------------------------------------------
# cross-validation against oracles


@dataclass
class Disagreement:
    args: tuple
    oracle: bool
    verdict: Verdict


@dataclass
class AgreementReport:
    name: str
    s: int
    samples: int
    resolved: int
    verdicts: dict
    contradictions: list[Disagreement]

    @property
    def agrees(self) -> bool:
        return not self.contradictions


def sample_inputs(name: str, s: int, count: int, rng: np.random.Generator) -> list[tuple]:
    """Structured inputs where the predicate is true and false, padded with random ones."""
    eye = np.eye(s, dtype=complex)

    def unit(k):
        v = np.zeros(s, complex)
        v[k] = 1.0
        return v

    def vec():
        v = rng.normal(size=s) + 1j * rng.normal(size=s)
        return v / np.linalg.norm(v)

    H = lambda: numlin.random_hermitian(s, rng)  # noqa: E731
    fams: list = []
    if name == "rank_one":
        fams = [
            lambda: np.zeros((s, s), complex),
            lambda: np.outer(unit(0), unit(0)),
            lambda: eye,
            lambda: np.diag([(-1.0) ** k for k in range(s)]).astype(complex),
            lambda: rng.uniform(-3, 3) * np.outer(*(lambda v: (v, v.conj()))(vec())),
            lambda: H(),
        ]
    elif name == "is_scalar":
        fams = [
            lambda: rng.uniform(-3, 3) * eye,
            lambda: np.zeros((s, s), complex),
            lambda: H(),
            lambda: np.diag(rng.uniform(-2, 2, size=s)).astype(complex),
            lambda: rng.uniform(-3, 3) * eye + 1e-3 * H(),
        ]
    elif name == "trace_zero":

        def traceless():
            M = H()
            return M - np.trace(M) / s * eye

        fams = [
            traceless,
            lambda: np.diag([1.0, -1.0] + [0.0] * (s - 2)).astype(complex) if s > 1 else np.zeros((1, 1), complex),
            lambda: H(),
            lambda: eye,
            lambda: np.zeros((s, s), complex),
        ]
    elif name == "trace_eq":

        def matched():
            Y = H()
            return (np.trace(Y).real * eye, Y)

        fams = [
            matched,
            lambda: (rng.uniform(-3, 3) * eye, H()),
            lambda: (H(), H()),
            lambda: (np.trace(np.diag(np.arange(s))).real * eye, np.diag(np.arange(s)).astype(complex)),
        ]
    elif name == "intscal":
        fams = [
            lambda: float(rng.integers(0, s + 1)) * eye,
            lambda: float(rng.choice([-1, s + 1, s + 2])) * eye,
            lambda: rng.uniform(-1, s + 1) * eye,
            lambda: np.diag(rng.integers(0, s + 1, size=s)).astype(complex),
            lambda: H(),
        ]
    else:
        raise ValueError(f"no sample families for {name}")
    out = []
    for j in range(count):
        got = fams[j % len(fams)]()
        out.append(got if isinstance(got, tuple) else (got,))
    return out


def cross_validate(
    name: str,
    s: int,
    samples: int = 50,
    rng: np.random.Generator | None = None,
    budget: FormulaBudget = DEFAULT_FORMULA_BUDGET,
    inputs: Sequence[tuple] | None = None,
) -> AgreementReport:
    """Compare check(builtin) with the oracle on sampled inputs.

    A Refuted verdict on a true input or a Witnessed verdict on a false
    one is a contradiction; NotRefuted never contradicts.
    """
    from .builtins import builtin

    rng = rng if rng is not None else np.random.default_rng(0)
    arity = BUILTINS[name].arity
    if inputs is None:
        inputs = sample_inputs(name, s, samples, rng)
    argnames = ["X", "Y", "Z"][:arity]
    phi = builtin(name, *argnames)
    verdicts: dict = {}
    contradictions = []
    resolved = 0
    for k, args in enumerate(inputs):
        res = check(phi, s, budget, assignment=dict(zip(argnames, args)), seed=k)
        verdicts[res.verdict.value] = verdicts.get(res.verdict.value, 0) + 1
        if res.value is not Tri.UNKNOWN:
            resolved += 1
            if (res.value is Tri.TRUE) != res.oracle:
                contradictions.append(Disagreement(tuple(args), bool(res.oracle), res.verdict))
    return AgreementReport(name, s, len(inputs), resolved, verdicts, contradictions)


__all__ = [
    "Tri",
    "Verdict",
    "CheckResult",
    "AgreementReport",
    "Disagreement",
    "ALL_STRATEGIES",
    "UnboundVariableError",
    "SizeMismatchError",
    "check",
    "cross_validate",
    "sample_inputs",
    "ranked_product",
    "zero_diagonal_unitary",
]
