"""Text syntax for formulas.

    forall Y: eq(i*(X*Y - Y*X))
    exists Y: eq(Y*Y - Y) and trace_eq(X, Y)
    not eq(X) => rank_one(X)

Connectives by increasing binding strength: ``=>`` (right associative),
``or``, ``and``, ``not``. A quantifier extends as far right as possible.
Expressions use ``+``, ``-``, ``*``, ``adj(...)``, decimal numbers, the
imaginary unit ``i`` and the identity ``I``. Named formulas from
``builtins`` are written as calls, e.g. ``prime_size()``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Add,
    Adj,
    And,
    Call,
    Eq,
    Exists,
    Expr,
    Forall,
    Formula,
    Ident,
    Implies,
    Mul,
    Not,
    Or,
    Pd,
    Psd,
    Scalar,
    Var,
)
from .builtins import BUILTINS

KEYWORDS = {"forall", "exists", "and", "or", "not", "eq", "psd", "pd", "adj", "i", "I"}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>=>|[-+*(),:]))"
)


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.column = col


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.k]

    def error(self, msg: str):
        raise FormulaSyntaxError(msg, self.cur.pos, self.text)

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.cur
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            self.error(f"expected {text or kind!r}, found {t.text or 'end of input'!r}")
        self.k += 1
        return t

    def at(self, text: str) -> bool:
        return self.cur.text == text and self.cur.kind != "end"

    # formulas

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.at("=>"):
            self.take("=>")
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        args = [self.conjunction()]
        while self.at("or"):
            self.take("or")
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.at("and"):
            self.take("and")
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        t = self.cur
        if t.text == "not":
            self.take()
            return Not(self.unary())
        if t.text in ("forall", "exists"):
            self.take()
            names = [self.variable_name()]
            while self.at(","):
                self.take(",")
                names.append(self.variable_name())
            self.take(":")
            body = self.formula()
            cls = Forall if t.text == "forall" else Exists
            return cls(tuple(names), body)
        if t.text == "(":
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        if t.text in ("eq", "psd", "pd"):
            self.take()
            self.take("(")
            e = self.expr()
            self.take(")")
            return {"eq": Eq, "psd": Psd, "pd": Pd}[t.text](e)
        if t.kind == "name" and t.text in BUILTINS:
            self.take()
            self.take("(")
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.take(",")
                    args.append(self.expr())
            self.take(")")
            if len(args) != BUILTINS[t.text].arity:
                raise FormulaSyntaxError(
                    f"{t.text} takes {BUILTINS[t.text].arity} argument(s)", t.pos, self.text
                )
            return Call(t.text, tuple(args))
        self.error(f"expected a formula, found {t.text or 'end of input'!r}")

    def variable_name(self) -> str:
        t = self.take(kind="name")
        if t.text in KEYWORDS or t.text in BUILTINS:
            raise FormulaSyntaxError(f"{t.text!r} cannot be a variable", t.pos, self.text)
        return t.text

    # expressions

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.at("+") or self.at("-"):
            op = self.take().text
            t = self.term()
            terms.append(t if op == "+" else _fold_mul((Scalar(-1.0), t)))
        if len(terms) > 1 and all(isinstance(t, Scalar) for t in terms):
            return Scalar(sum(complex(t.value) for t in terms))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.at("*"):
            self.take("*")
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else _fold_mul(tuple(factors))

    def factor(self) -> Expr:
        t = self.cur
        if t.text == "-":
            self.take()
            if self.cur.kind == "num":
                return Scalar(-float(self.take().text))
            return _fold_mul((Scalar(-1.0), self.factor()))
        if t.kind == "num":
            self.take()
            return Scalar(float(t.text))
        if t.text == "i":
            self.take()
            return Scalar(1j)
        if t.text == "I":
            self.take()
            return Ident()
        if t.text == "adj":
            self.take()
            self.take("(")
            e = self.expr()
            self.take(")")
            return Adj(e)
        if t.text == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if t.kind == "name" and t.text not in KEYWORDS and t.text not in BUILTINS:
            self.take()
            return Var(t.text)
        self.error(f"expected an expression, found {t.text or 'end of input'!r}")


def _fold_mul(factors: tuple) -> Expr:
    """Products of numbers become one number, so printed scalars parse back unchanged."""
    if all(isinstance(f, Scalar) for f in factors):
        c = 1.0 + 0j
        for f in factors:
            c *= complex(f.value)
        return Scalar(c.real if c.imag == 0 else c)
    return Mul(factors)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.cur.kind != "end":
        p.error(f"unexpected {p.cur.text!r}")
    return f


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.cur.kind != "end":
        p.error(f"unexpected {p.cur.text!r}")
    return e


def _num(x: float) -> str:
    x = 0.0 if x == 0 else float(x)
    r = repr(x)
    return r[:-2] if r.endswith(".0") else r


def expr_to_text(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Ident):
        return "I"
    if isinstance(e, Scalar):
        c = complex(e.value)
        if c.imag == 0:
            return _num(c.real)
        if c == 1j:
            return "i"
        if c.real == 0:
            return f"({_num(c.imag)}*i)"
        return f"({_num(c.real)} + {_num(c.imag)}*i)"
    if isinstance(e, Add):
        return "(" + " + ".join(expr_to_text(t) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(" + "*".join(expr_to_text(f) for f in e.factors) + ")"
    if isinstance(e, Adj):
        return f"adj({expr_to_text(e.arg)})"
    raise TypeError(f"not an expression: {type(e).__name__}")


def to_text(f: Formula) -> str:
    if isinstance(f, (Eq, Psd, Pd)):
        name = {Eq: "eq", Psd: "psd", Pd: "pd"}[type(f)]
        return f"{name}({expr_to_text(f.expr)})"
    if isinstance(f, Not):
        return f"not {to_text(f.arg)}"
    if isinstance(f, And):
        return "(" + " and ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(" + " or ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Implies):
        return f"({to_text(f.premise)} => {to_text(f.conclusion)})"
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"({q} {', '.join(f.vars)}: {to_text(f.body)})"
    if isinstance(f, Call):
        return f"{f.name}({', '.join(expr_to_text(a) for a in f.args)})"
    raise TypeError(f"not a formula: {type(f).__name__}")


__all__ = ["FormulaSyntaxError", "parse_formula", "parse_expr", "to_text", "expr_to_text"]
