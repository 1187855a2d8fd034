"""Syntax trees for free formulas over Hermitian matrices of one size.

Expressions are non-commutative polynomials in Hermitian matrix variables
with complex scalars; ``I`` is the identity and ``i`` the imaginary unit.
Because every variable is Hermitian, ``adj`` acts on an expanded polynomial
by reversing each word and conjugating its coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

Word = tuple[str, ...]
NCPoly = dict  # Word -> complex


# ---------------------------------------------------------------------------
# expressions


class Expr:
    def __add__(self, other) -> "Expr":
        return Add((self, as_expr(other)))

    def __radd__(self, other) -> "Expr":
        return Add((as_expr(other), self))

    def __sub__(self, other) -> "Expr":
        return Add((self, Mul((Scalar(-1.0), as_expr(other)))))

    def __rsub__(self, other) -> "Expr":
        return Add((as_expr(other), Mul((Scalar(-1.0), self))))

    def __mul__(self, other) -> "Expr":
        return Mul((self, as_expr(other)))

    def __rmul__(self, other) -> "Expr":
        return Mul((as_expr(other), self))

    def __neg__(self) -> "Expr":
        return Mul((Scalar(-1.0), self))

    def expand(self) -> NCPoly:
        raise NotImplementedError

    def variables(self) -> set[str]:
        out: set[str] = set()
        for w in self.expand():
            out.update(w)
        return out


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def expand(self) -> NCPoly:
        return {(self.name,): 1.0 + 0j}


@dataclass(frozen=True)
class Ident(Expr):
    def expand(self) -> NCPoly:
        return {(): 1.0 + 0j}


@dataclass(frozen=True)
class Scalar(Expr):
    value: complex

    def expand(self) -> NCPoly:
        return {(): complex(self.value)} if self.value != 0 else {}


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple[Expr, ...]

    def expand(self) -> NCPoly:
        out: NCPoly = {}
        for t in self.terms:
            for w, c in t.expand().items():
                out[w] = out.get(w, 0j) + c
        return _clean(out)


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple[Expr, ...]

    def expand(self) -> NCPoly:
        out: NCPoly = {(): 1.0 + 0j}
        for f in self.factors:
            fe = f.expand()
            nxt: NCPoly = {}
            for w1, c1 in out.items():
                for w2, c2 in fe.items():
                    w = w1 + w2
                    nxt[w] = nxt.get(w, 0j) + c1 * c2
            out = _clean(nxt)
        return out


@dataclass(frozen=True)
class Adj(Expr):
    arg: Expr

    def expand(self) -> NCPoly:
        return {tuple(reversed(w)): np.conj(c) for w, c in self.arg.expand().items()}


def _clean(p: NCPoly) -> NCPoly:
    return {w: c for w, c in p.items() if c != 0}


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return Scalar(complex(x))
    if isinstance(x, str):
        return Var(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


I = Ident()
i_unit = Scalar(1j)


def poly_eval(p: NCPoly, env: dict, s: int) -> tuple[np.ndarray, float]:
    """Value of an expanded polynomial and its magnitude sum |c| prod ||value||_F."""
    out = np.zeros((s, s), complex)
    mag = 0.0
    eye = np.eye(s)
    for w, c in p.items():
        M = eye
        size = 1.0
        for name in w:
            V = env[name]
            M = M @ V
            size *= float(np.linalg.norm(V))
        out = out + c * M
        mag += abs(c) * size
    return out, mag


def poly_degree_in(p: NCPoly, names) -> set[int]:
    names = set(names)
    return {sum(1 for x in w if x in names) for w in p}


def adjoint_factor(e: Expr) -> Expr | None:
    """q when e is syntactically adj(q) * q or q * adj(q), else None."""
    if isinstance(e, Mul) and len(e.factors) == 2:
        a, b = e.factors
        if isinstance(a, Adj) and a.arg == b:
            return b
        if isinstance(b, Adj) and b.arg == a:
            return a
    return None


# ---------------------------------------------------------------------------
# formulas


class Formula:
    def free_vars(self) -> set[str]:
        raise NotImplementedError

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Eq(Formula):
    expr: Expr

    def free_vars(self) -> set[str]:
        return self.expr.variables()


@dataclass(frozen=True)
class Psd(Formula):
    expr: Expr

    def free_vars(self) -> set[str]:
        return self.expr.variables()


@dataclass(frozen=True)
class Pd(Formula):
    expr: Expr

    def free_vars(self) -> set[str]:
        return self.expr.variables()


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def free_vars(self) -> set[str]:
        return self.arg.free_vars()


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def free_vars(self) -> set[str]:
        return set().union(*(a.free_vars() for a in self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def free_vars(self) -> set[str]:
        return set().union(*(a.free_vars() for a in self.args))


@dataclass(frozen=True)
class Implies(Formula):
    premise: Formula
    conclusion: Formula

    def free_vars(self) -> set[str]:
        return self.premise.free_vars() | self.conclusion.free_vars()


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple[str, ...]
    body: Formula

    def free_vars(self) -> set[str]:
        return self.body.free_vars() - set(self.vars)


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple[str, ...]
    body: Formula

    def free_vars(self) -> set[str]:
        return self.body.free_vars() - set(self.vars)


@dataclass(frozen=True)
class Call(Formula):
    """A named construction applied to expressions; see ``builtins``."""

    name: str
    args: tuple[Expr, ...]

    def free_vars(self) -> set[str]:
        return set().union(*(a.variables() for a in self.args)) if self.args else set()


FormulaLike = Union[Formula]


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from walk(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from walk(a)
    elif isinstance(f, Implies):
        yield from walk(f.premise)
        yield from walk(f.conclusion)
    elif isinstance(f, (Forall, Exists)):
        yield from walk(f.body)


class BindingError(ValueError):
    pass


def check_bindings(f: Formula, bound: frozenset = frozenset()) -> None:
    """Every variable is bound at most once along any path."""
    if isinstance(f, (Forall, Exists)):
        if len(set(f.vars)) != len(f.vars):
            raise BindingError(f"variable repeated in one quantifier: {f.vars}")
        again = bound & set(f.vars)
        if again:
            raise BindingError(f"variable bound twice on one path: {sorted(again)}")
        check_bindings(f.body, bound | set(f.vars))
    elif isinstance(f, Not):
        check_bindings(f.arg, bound)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            check_bindings(a, bound)
    elif isinstance(f, Implies):
        check_bindings(f.premise, bound)
        check_bindings(f.conclusion, bound)
