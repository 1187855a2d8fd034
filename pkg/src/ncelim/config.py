"""Numerical tolerances and search budgets shared across the package."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9  # relative to the largest entry magnitude
    eig: float = 1e-11  # Jacobi off-diagonal stopping threshold
    kernel: float = 1e-8  # relative to the operator norm
    psd: float = 1e-7  # scaled by (1 + ||F0||) in sdpcore
    dual: float = 1e-6
    eq: float = 1e-7  # scaled by (1 + operand norm) in formula atoms
    classify: float = 1e-6

    def psd_for(self, norm: float) -> float:
        return self.psd * (1.0 + norm)


@dataclass(frozen=True)
class Limits:
    """Soft size limits; exceeded limits raise unless ``strict`` is off."""

    max_d: int = 8
    max_s: int = 8
    max_degree: int = 4
    strict: bool = False


@dataclass(frozen=True)
class SolverBudget:
    iterations: int = 5000
    restarts: int = 20
    method: str = "conic"  # "conic" (Clarabel via cvxpy) or "subgradient"

    def with_method(self, method: str) -> "SolverBudget":
        return replace(self, method=method)


@dataclass(frozen=True)
class FormulaBudget:
    exists: int = 500  # candidate cap per existential block
    forall: int = 2000  # candidate cap per universal block
    random: int = 24  # random Hermitian samples appended to the structured ones


DEFAULT_TOL = Tolerances()
DEFAULT_LIMITS = Limits()
DEFAULT_BUDGET = SolverBudget()
DEFAULT_FORMULA_BUDGET = FormulaBudget()

__all__ = [
    "Tolerances",
    "Limits",
    "SolverBudget",
    "FormulaBudget",
    "DEFAULT_TOL",
    "DEFAULT_LIMITS",
    "DEFAULT_BUDGET",
    "DEFAULT_FORMULA_BUDGET",
]
