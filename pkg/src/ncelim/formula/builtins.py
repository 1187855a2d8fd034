"""Named formulas expressing rank, trace and size facts, with direct oracles.

Each constructor returns the formula exactly as built from simpler named
pieces; composite formulas refer to those pieces through ``Call`` nodes.
Every name also has an oracle that decides the same predicate by plain
linear algebra, used to cross-check the model checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..config import DEFAULT_TOL
from .ast import (
    Adj,
    And,
    Call,
    Eq,
    Exists,
    Expr,
    Forall,
    Formula,
    I,
    Implies,
    Not,
    Or,
    Var,
    as_expr,
    i_unit,
)


class _Fresh:
    """Variable names that avoid a given set, deterministic in call order."""

    def __init__(self, avoid):
        self.used = set(avoid)

    def __call__(self, base: str) -> str:
        name, k = base, 1
        while name in self.used:
            k += 1
            name = f"{base}{k}" if not base[-1].isdigit() else f"{base}_{k}"
        self.used.add(name)
        return name


def _build_rank_one(args: Sequence[Expr], fresh: _Fresh) -> Formula:
    (X,) = args
    Y, Z = Var(fresh("Y")), Var(fresh("Z"))
    return And(
        (
            Not(Eq(X)),
            Forall((Y.name,), Or((Eq(Y * X * Y), Exists((Z.name,), Eq(Z * Y * X * Y * Z - X))))),
        )
    )


def _build_trace_zero(args: Sequence[Expr], fresh: _Fresh) -> Formula:
    (X,) = args
    y1, y2, z1, z2 = (Var(fresh(b)) for b in ("Y1", "Y2", "Z1", "Z2"))
    Y = y1 + i_unit * y2
    Z = z1 + i_unit * z2
    q = X - (Y * Z - Z * Y)
    return Exists((y1.name, y2.name, z1.name, z2.name), Eq(Adj(q) * q))


def _build_is_scalar(args: Sequence[Expr], fresh: _Fresh) -> Formula:
    (X,) = args
    Y = Var(fresh("Y"))
    return Forall((Y.name,), Eq(i_unit * (X * Y - Y * X)))


def _build_trace_eq(args: Sequence[Expr], fresh: _Fresh) -> Formula:
    X, Y = args
    P = Var(fresh("P"))
    return And(
        (
            Call("is_scalar", (X,)),
            Exists(
                (P.name,),
                And((Eq(P * P - P), Call("rank_one", (P,)), Call("trace_zero", (P * X * P - Y,)))),
            ),
        )
    )


def _build_intscal(args: Sequence[Expr], fresh: _Fresh) -> Formula:
    (X,) = args
    Y = Var(fresh("Y"))
    return Exists((Y.name,), And((Eq(Y * Y - Y), Call("trace_eq", (X, Y)))))


def _build_prime_size(args: Sequence[Expr], fresh: _Fresh) -> Formula:
    X, Y, Z = (Var(fresh(b)) for b in ("X", "Y", "Z"))
    gap = X - Y * Z
    premise = And(
        (
            Call("trace_eq", (X, I)),
            Call("intscal", (Y,)),
            Call("intscal", (Z,)),
            Eq(gap * Adj(gap)),
        )
    )
    return Forall((X.name, Y.name, Z.name), Implies(premise, Or((Eq(Y - I), Eq(Z - I)))))


# ---------------------------------------------------------------------------
# oracles


def _tol(*mats) -> float:
    return DEFAULT_TOL.eq * (1.0 + max((np.linalg.norm(M) for M in mats), default=0.0))


def _numerical_rank(X: np.ndarray) -> int:
    sv = np.linalg.svd(X, compute_uv=False)
    return int(np.sum(sv > _tol(X)))


def oracle_rank_one(X: np.ndarray) -> bool:
    return _numerical_rank(X) == 1


def oracle_trace_zero(X: np.ndarray) -> bool:
    return abs(np.trace(X)) <= _tol(X) * np.sqrt(len(X))


def oracle_is_scalar(X: np.ndarray) -> bool:
    s = len(X)
    return np.linalg.norm(X - np.trace(X) / s * np.eye(s)) <= _tol(X)


def oracle_trace_eq(X: np.ndarray, Y: np.ndarray) -> bool:
    return np.linalg.norm(X - np.trace(Y) * np.eye(len(X))) <= _tol(X, Y)


def oracle_intscal(X: np.ndarray) -> bool:
    """X = k I for an integer 0 <= k <= size(X), read off the eigenvalues."""
    s = len(X)
    if not oracle_is_scalar(X):
        return False
    eigs = np.linalg.eigvalsh(0.5 * (X + X.conj().T))
    k = round(float(np.mean(eigs)))
    return 0 <= k <= s and np.max(np.abs(eigs - k)) <= _tol(X)


def is_prime_or_one(s: int) -> bool:
    if s < 1:
        return False
    if s < 4:
        return True
    if s % 2 == 0:
        return False
    f = 3
    while f * f <= s:
        if s % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Builtin:
    name: str
    arity: int
    build: Callable[[Sequence[Expr], _Fresh], Formula]
    oracle: Callable[..., bool]  # matrices, then the size s as keyword
    description: str


def _size_only(oracle):
    def run(*mats, s: int):
        return oracle(*mats)

    return run


BUILTINS: dict[str, Builtin] = {
    b.name: b
    for b in (
        Builtin("rank_one", 1, _build_rank_one, _size_only(oracle_rank_one), "rank of X is one"),
        Builtin("trace_zero", 1, _build_trace_zero, _size_only(oracle_trace_zero), "trace of X vanishes"),
        Builtin("is_scalar", 1, _build_is_scalar, _size_only(oracle_is_scalar), "X is a multiple of I"),
        Builtin("trace_eq", 2, _build_trace_eq, _size_only(oracle_trace_eq), "X = tr(Y) I"),
        Builtin("intscal", 1, _build_intscal, _size_only(oracle_intscal), "X = k I, k in {0..s}"),
        Builtin(
            "prime_size", 0, _build_prime_size, lambda s: is_prime_or_one(s), "size is prime or one"
        ),
    )
}


class UnknownBuiltinError(KeyError):
    pass


def _lookup(name: str) -> Builtin:
    try:
        return BUILTINS[name]
    except KeyError:
        raise UnknownBuiltinError(name) from None


def builtin(name: str, *args) -> Call:
    """A call node for a named formula; expressions or variable names as arguments."""
    b = _lookup(name)
    if len(args) != b.arity:
        raise TypeError(f"{name} takes {b.arity} argument(s), got {len(args)}")
    return Call(name, tuple(as_expr(a) for a in args))


def expand_call(call: Call, avoid=()) -> Formula:
    """The defining formula of a call; fresh names avoid ``avoid`` and the arguments."""
    b = _lookup(call.name)
    used = set(avoid) | call.free_vars()
    return b.build(call.args, _Fresh(used))


def oracle(name: str, *mats: np.ndarray, s: int | None = None) -> bool:
    b = _lookup(name)
    if len(mats) != b.arity:
        raise TypeError(f"{name} takes {b.arity} argument(s), got {len(mats)}")
    if s is None:
        if not mats:
            raise TypeError("the size s is needed for a closed builtin")
        s = len(mats[0])
    return bool(b.oracle(*mats, s=s))


def expand_all(f: Formula, bound=frozenset()) -> Formula:
    """Inline every call recursively, keeping bound names distinct along paths."""
    if isinstance(f, Call):
        return expand_all(expand_call(f, bound), bound)
    if isinstance(f, Not):
        return Not(expand_all(f.arg, bound))
    if isinstance(f, And):
        return And(tuple(expand_all(a, bound) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(expand_all(a, bound) for a in f.args))
    if isinstance(f, Implies):
        return Implies(expand_all(f.premise, bound), expand_all(f.conclusion, bound))
    if isinstance(f, Forall):
        return Forall(f.vars, expand_all(f.body, bound | set(f.vars)))
    if isinstance(f, Exists):
        return Exists(f.vars, expand_all(f.body, bound | set(f.vars)))
    return f


__all__ = [
    "BUILTINS",
    "Builtin",
    "UnknownBuiltinError",
    "builtin",
    "expand_call",
    "expand_all",
    "oracle",
    "oracle_rank_one",
    "oracle_trace_zero",
    "oracle_is_scalar",
    "oracle_trace_eq",
    "oracle_intscal",
    "is_prime_or_one",
]
