"""Free (non-commutative) polynomials with d x d matrix coefficients.

A polynomial p = sum_w P_w (x) w is stored as a sparse map from words to
coefficient matrices.  A word is a tuple of 1-based variable indices; the
empty tuple is the empty word ``e``.  Evaluating at a tuple of s x s
matrices gives the ds x ds matrix sum_w kron(P_w, w(T)).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import numlin
from .config import DEFAULT_LIMITS, DEFAULT_TOL, Limits

Word = tuple[int, ...]
EMPTY: Word = ()


def word_star(w: Sequence[int]) -> Word:
    """Involution on words: reverse the letters (variables are self-adjoint)."""
    return tuple(reversed(tuple(w)))


def word_key(w: Word) -> tuple[int, Word]:
    """Graded-lexicographic sort key."""
    return (len(w), w)


def word_str(w: Word) -> str:
    return "e" if not w else " ".join(f"x{i}" for i in w)


class DimensionError(ValueError):
    pass


def _check_limits(d: int, degree: int, limits: Limits) -> None:
    if not limits.strict:
        return
    if d > limits.max_d or degree > limits.max_degree:
        raise DimensionError(
            f"size d={d}, degree={degree} exceeds limits d<={limits.max_d}, degree<={limits.max_degree}"
        )


@dataclass(frozen=True, eq=False)
class FreeMatrixPoly:
    d: int
    n: int
    terms: Mapping[Word, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[Word, np.ndarray] = {}
        for w, P in self.terms.items():
            w = tuple(int(i) for i in w)
            if any(i < 1 or i > self.n for i in w):
                raise DimensionError(f"word {w} uses a variable outside x1..x{self.n}")
            P = numlin.as_matrix(P)
            if P.shape != (self.d, self.d):
                raise DimensionError(f"coefficient of {word_str(w)} has shape {P.shape}, expected {(self.d, self.d)}")
            if w in clean:
                P = clean[w] + P
            clean[w] = P
        clean = {w: P for w, P in clean.items() if np.any(P != 0)}
        for P in clean.values():
            P.setflags(write=False)
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: word_key(kv[0]))))

    # -- construction ------------------------------------------------------
    @classmethod
    def zero(cls, d: int, n: int) -> "FreeMatrixPoly":
        return cls(d, n, {})

    @classmethod
    def constant(cls, P, n: int) -> "FreeMatrixPoly":
        P = numlin.as_matrix(P)
        return cls(P.shape[0], n, {EMPTY: P})

    @classmethod
    def monomial(cls, P, word: Sequence[int], n: int) -> "FreeMatrixPoly":
        P = numlin.as_matrix(P)
        return cls(P.shape[0], n, {tuple(word): P})

    @classmethod
    def linear_pencil(cls, A0, As: Sequence) -> "FreeMatrixPoly":
        """A0 (x) e + sum_i A_i (x) x_i."""
        A0 = numlin.as_matrix(A0)
        terms = {EMPTY: A0}
        for i, A in enumerate(As, start=1):
            terms[(i,)] = numlin.as_matrix(A)
        return cls(A0.shape[0], len(As), terms)

    # -- basic queries -----------------------------------------------------
    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def coefficient(self, w: Sequence[int]) -> np.ndarray:
        return self.terms.get(tuple(w), np.zeros((self.d, self.d), complex))

    def words(self) -> list[Word]:
        return list(self.terms)

    def is_hermitian(self, tol: float = DEFAULT_TOL.herm) -> bool:
        for w, P in self.terms.items():
            Q = self.coefficient(word_star(w))
            scale = max(1.0, float(np.max(np.abs(P))))
            if np.max(np.abs(Q - P.conj().T)) > tol * scale:
                return False
        return True

    def hermitian_part(self) -> "FreeMatrixPoly":
        return (self + involution(self)) * 0.5

    def allclose(self, other: "FreeMatrixPoly", atol: float = 1e-12) -> bool:
        if (self.d, self.n) != (other.d, other.n):
            return False
        for w in set(self.terms) | set(other.terms):
            if not np.allclose(self.coefficient(w), other.coefficient(w), atol=atol, rtol=0):
                return False
        return True

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "FreeMatrixPoly") -> "FreeMatrixPoly":
        if (self.d, self.n) != (other.d, other.n):
            raise DimensionError("cannot add polynomials of different shapes")
        terms = dict(self.terms)
        for w, P in other.terms.items():
            terms[w] = terms[w] + P if w in terms else P
        return FreeMatrixPoly(self.d, self.n, terms)

    def __neg__(self) -> "FreeMatrixPoly":
        return FreeMatrixPoly(self.d, self.n, {w: -P for w, P in self.terms.items()})

    def __sub__(self, other: "FreeMatrixPoly") -> "FreeMatrixPoly":
        return self + (-other)

    def __mul__(self, c) -> "FreeMatrixPoly":
        if isinstance(c, FreeMatrixPoly):
            return self.matmul(c)
        return FreeMatrixPoly(self.d, self.n, {w: c * P for w, P in self.terms.items()})

    __rmul__ = __mul__

    def matmul(self, other: "FreeMatrixPoly") -> "FreeMatrixPoly":
        """Product in M_d(C<x>): (P (x) u)(Q (x) v) = PQ (x) uv."""
        if (self.d, self.n) != (other.d, other.n):
            raise DimensionError("cannot multiply polynomials of different shapes")
        terms: dict[Word, np.ndarray] = {}
        for u, P in self.terms.items():
            for v, Q in other.terms.items():
                w = u + v
                terms[w] = terms[w] + P @ Q if w in terms else P @ Q
        return FreeMatrixPoly(self.d, self.n, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeMatrixPoly):
            return NotImplemented
        return self.allclose(other, atol=0.0)

    def __repr__(self) -> str:
        body = ", ".join(word_str(w) for w in self.terms) or "0"
        return f"FreeMatrixPoly(d={self.d}, n={self.n}, words=[{body}])"


def involution(p: FreeMatrixPoly) -> FreeMatrixPoly:
    return FreeMatrixPoly(p.d, p.n, {word_star(w): P.conj().T for w, P in p.terms.items()})


@dataclass(frozen=True, eq=False)
class HermTuple:
    mats: tuple[np.ndarray, ...]

    def __init__(self, mats: Iterable, tol: float = DEFAULT_TOL.herm):
        ms = tuple(numlin.hermitize(M, tol) for M in mats)
        sizes = {M.shape[0] for M in ms}
        if len(sizes) > 1:
            raise DimensionError(f"tuple mixes matrix sizes {sorted(sizes)}")
        for M in ms:
            M.setflags(write=False)
        object.__setattr__(self, "mats", ms)
        object.__setattr__(self, "_size", sizes.pop() if sizes else None)

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def s(self) -> int:
        if self._size is None:
            raise DimensionError("empty tuple has no matrix size; use HermTuple.empty(s)")
        return self._size

    @classmethod
    def empty(cls, s: int) -> "HermTuple":
        t = cls(())
        object.__setattr__(t, "_size", s)
        return t

    def shifted(self, shifts: Sequence[float]) -> "HermTuple":
        I = np.eye(self.s)
        return HermTuple([T + c * I for T, c in zip(self.mats, shifts)])

    def conjugated(self, U) -> "HermTuple":
        U = numlin.as_matrix(U)
        return HermTuple([U.conj().T @ T @ U for T in self.mats])

    def __getitem__(self, i: int) -> np.ndarray:
        return self.mats[i]

    def __len__(self) -> int:
        return len(self.mats)


def eval_word(w: Word, T: HermTuple) -> np.ndarray:
    M = np.eye(T.s, dtype=complex)
    for i in w:
        M = M @ T.mats[i - 1]
    return M


def evaluate(p: FreeMatrixPoly, T: HermTuple) -> np.ndarray:
    """sum_w kron(P_w, w(T)); the empty word evaluates to the identity."""
    if T.n != p.n:
        raise DimensionError(f"polynomial has {p.n} variables but tuple has {T.n} matrices")
    s = T.s
    out = np.zeros((p.d * s, p.d * s), complex)
    cache: dict[Word, np.ndarray] = {EMPTY: np.eye(s, dtype=complex)}
    for w, P in p.terms.items():
        # reuse the longest cached prefix
        k = len(w)
        while w[:k] not in cache:
            k -= 1
        M = cache[w[:k]]
        for j in range(k, len(w)):
            M = M @ T.mats[w[j] - 1]
            cache[w[: j + 1]] = M
        out += np.kron(P, M)
    return out


def compress(p: FreeMatrixPoly, W) -> FreeMatrixPoly:
    """p_W = sum_w W* P_w W (x) w for W of shape d x r."""
    W = numlin.as_matrix(W)
    if W.shape[0] != p.d:
        raise DimensionError(f"W has {W.shape[0]} rows, polynomial has d={p.d}")
    Wh = W.conj().T
    return FreeMatrixPoly(W.shape[1], p.n, {w: Wh @ P @ W for w, P in p.terms.items()})


def scalar_compress(p: FreeMatrixPoly, W) -> FreeMatrixPoly:
    """Scalar polynomial with coefficients <P_w, conj(W)> = tr(W^T P_w)."""
    W = numlin.as_matrix(W)
    if W.shape != (p.d, p.d):
        raise DimensionError(f"W has shape {W.shape}, expected {(p.d, p.d)}")
    return FreeMatrixPoly(
        1, p.n, {w: np.array([[np.sum(W * P)]]) for w, P in p.terms.items()}
    )


def kron_compress(M, W, s: int) -> np.ndarray:
    """(W (x) I_s)* M (W (x) I_s) for an already evaluated ds x ds matrix."""
    K = np.kron(numlin.as_matrix(W), np.eye(s))
    return K.conj().T @ M @ K


class Membership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def membership(p: FreeMatrixPoly, T: HermTuple, tol: float = DEFAULT_TOL.psd) -> Membership:
    """Locate T relative to W_s(p) and O_s(p) via the minimum eigenvalue of p(T).

    INSIDE: min eigenvalue > tau, so T is in O_s(p) and W_s(p).
    OUTSIDE: min eigenvalue < -tau, so T is in neither.
    BOUNDARY: within +-tau; numerically undecided.
    Here tau = tol * (1 + ||p(T)||).
    """
    M = evaluate(p, T)
    lam = numlin.min_eig(M)
    tau = tol * (1.0 + numlin.operator_norm(M))
    if lam > tau:
        return Membership.INSIDE
    if lam < -tau:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


def is_member(p: FreeMatrixPoly, T: HermTuple, strict: bool = False, tol: float = DEFAULT_TOL.psd) -> bool | None:
    """Membership in O_s(p) (strict) or W_s(p); None on the numerical boundary."""
    m = membership(p, T, tol)
    if m is Membership.BOUNDARY:
        return None
    return m is Membership.INSIDE


def random_poly(
    d: int,
    n: int,
    degree: int,
    rng: np.random.Generator,
    hermitian: bool = True,
    density: float = 1.0,
    limits: Limits = DEFAULT_LIMITS,
) -> FreeMatrixPoly:
    """Random polynomial with every word of length <= degree (kept with prob. density)."""
    _check_limits(d, degree, limits)
    words: list[Word] = [EMPTY]
    frontier: list[Word] = [EMPTY]
    for _ in range(degree):
        frontier = [w + (i,) for w in frontier for i in range(1, n + 1)]
        words.extend(frontier)
    terms = {}
    for w in words:
        if w and density < 1.0 and rng.random() > density:
            continue
        terms[w] = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    p = FreeMatrixPoly(d, n, terms)
    return p.hermitian_part() if hermitian else p


def random_tuple(n: int, s: int, rng: np.random.Generator, scale: float = 1.0) -> HermTuple:
    if n == 0:
        return HermTuple.empty(s)
    return HermTuple([numlin.random_hermitian(s, rng, scale) for _ in range(n)])
