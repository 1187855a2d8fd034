"""Quantified formulas over Hermitian matrices and a semi-decision checker."""

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
    Pd,
    Psd,
    Var,
    i_unit,
)
from .builtins import BUILTINS, builtin, expand_all, expand_call, oracle
from .checker import (
    AgreementReport,
    CheckResult,
    Tri,
    Verdict,
    check,
    cross_validate,
)

__all__ = [
    "Adj", "And", "Call", "Eq", "Exists", "Expr", "Forall", "Formula", "I", "Implies",
    "Not", "Or", "Pd", "Psd", "Var", "i_unit", "BUILTINS", "builtin", "expand_all",
    "expand_call", "oracle", "AgreementReport", "CheckResult", "Tri", "Verdict",
    "check", "cross_validate",
]
