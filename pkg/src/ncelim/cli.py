"""Command-line front end.

    ncelim eliminate problem.txt [--mode strict] [--json]
    ncelim classify span.txt
    ncelim formula intscal.txt --size 2
    ncelim spectrahedrop drop.txt --eps 1e-2
    ncelim lift lift.txt
    ncelim selftest --trials 50

Exit codes: 0 resolved and consistent, 1 input error (with line and
column for parse errors), 2 undecided, 3 contradiction between two
routes that should agree.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Any

import numpy as np

from . import numlin, selftest
from .config import DEFAULT_BUDGET, DEFAULT_FORMULA_BUDGET, DEFAULT_TOL, FormulaBudget, SolverBudget, Tolerances
from .elim import (
    ElimInstance,
    ElimStatus,
    Mode,
    NoUnitError,
    Realization,
    check_condition_i,
    check_spectrahedrop,
    eliminate_strict,
    is_genuine,
    lift_nonlinear,
    search_condition_ii_violation,
    verify_equivalence,
)
from .formula import check
from .formula.checker import Tri, Verdict
from .formula.parser import FormulaSyntaxError, parse_formula
from .ncpoly import FreeMatrixPoly, HermTuple
from .problemfile import ParseError, Problem, format_matrix, load
from .sdpcore import LMIStatus
from .subspace import Definiteness, HermSubspace, classify

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_CONTRADICTION = 0, 1, 2, 3


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# reports


class Report:
    """Ordered fields rendered either as text or as JSON with the same keys."""

    def __init__(self, command: str):
        self.fields: list[tuple[str, Any]] = [("command", command)]
        self.exit_code = EXIT_OK
        self.seed = 0

    def add(self, key: str, value) -> None:
        self.fields.append((key, _plain(value)))

    def text(self) -> str:
        out = []
        for key, value in self.fields:
            if isinstance(value, list):
                out.append(f"{key}:")
                out.extend(f"  - {v}" for v in value)
            elif isinstance(value, dict):
                out.append(f"{key}:")
                out.extend(f"  {k}: {v}" for k, v in value.items())
            else:
                out.append(f"{key}: {value}")
        return "\n".join(out) + "\n"

    def json(self) -> str:
        return json.dumps(dict(self.fields), indent=2) + "\n"


def _clean(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    return np.round(M.real, 10) + 0.0 + 1j * (np.round(M.imag, 10) + 0.0)


def _plain(value):
    if isinstance(value, np.ndarray):
        return format_matrix(_clean(value))
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.6g}")
    if isinstance(value, np.integer):
        return int(value)
    return value


# ---------------------------------------------------------------------------
# building objects from a problem file


def _tolerances(args, prob: Problem) -> Tolerances:
    tol = DEFAULT_TOL
    psd = args.tol_psd if args.tol_psd is not None else prob.get("tol_psd")
    dual = args.tol_dual if args.tol_dual is not None else prob.get("tol_dual")
    if psd is not None:
        tol = replace(tol, psd=float(psd))
    if dual is not None:
        tol = replace(tol, dual=float(dual))
    return tol


def _seed(args, prob: Problem) -> int:
    return int(args.seed if args.seed is not None else prob.get("seed", 0))


def _solver_budget(args) -> SolverBudget:
    return DEFAULT_BUDGET if args.budget is None else replace(DEFAULT_BUDGET, restarts=args.budget)


def _poly(prob: Problem, d: int, n: int) -> FreeMatrixPoly:
    terms: dict = {}
    for w, P in prob.poly:
        terms[w] = terms.get(w, 0) + P
    if not terms:
        return FreeMatrixPoly.zero(d, n)
    return FreeMatrixPoly(d, n, terms)


def _tuple(prob: Problem) -> HermTuple:
    if prob.T:
        return HermTuple(list(prob.T))
    s = prob.get("s")
    if s is None:
        raise InputError("header needs s when [T] is empty")
    return HermTuple.empty(int(s))


def _mode(args, prob: Problem) -> Mode:
    text = args.mode or prob.get("mode", "nonstrict")
    try:
        return Mode(text)
    except ValueError:
        raise InputError(f"mode must be strict or nonstrict, got {text!r}") from None


def _instance(prob: Problem, args) -> ElimInstance:
    T = _tuple(prob)
    d = int(prob.get("d"))
    n = int(prob.get("n", T.n))
    return ElimInstance(_poly(prob, d, n), tuple(prob.B), T, _mode(args, prob))


# ---------------------------------------------------------------------------
# elimination


def _witness_fields(report: Report, w, prefix: str = "witness") -> None:
    report.add(f"{prefix}_source", w.source)
    report.add(f"{prefix}_violation", w.violation)
    report.add(f"{prefix}_constraint_residual", w.constraint_residual)
    report.add(prefix, [numlin.canonical_phase(W) for W in w.mats])


def _eliminate(inst: ElimInstance, args, report: Report, tol: Tolerances, rng) -> None:
    budget = _solver_budget(args)
    report.add("mode", inst.mode.value)
    report.add("d", inst.d)
    report.add("m", inst.m)
    report.add("s", inst.s)
    if not inst.strict:
        rep = verify_equivalence(inst, budget, tol, rng, r=args.r)
        verdict = rep.verdict
        c1 = rep.condition_i
        if verdict == "Feasible" and c1.status is LMIStatus.STRICTLY_FEASIBLE:
            verdict = "StrictlyFeasible"
        report.add("verdict", verdict)
        report.add("condition_i", c1.status.value)
        report.add("margin", c1.margin)
        if c1.holds and c1.S is not None:
            report.add("S", list(c1.S))
        if rep.witness is not None:
            _witness_fields(report, rep.witness)
        if rep.contradiction:
            report.add("contradiction", rep.contradiction)
            report.exit_code = EXIT_CONTRADICTION
        elif rep.unknown:
            report.exit_code = EXIT_UNKNOWN
        report.add("log", rep.log)
        return

    res = eliminate_strict(inst, budget, tol, rng)
    flat = check_condition_i(inst, budget, tol, rng)
    status = res.status
    S, witness, source = res.S, res.witness, "recursion"
    if status is ElimStatus.UNKNOWN and flat.holds is not None:
        source = "flat LMI"
        if flat.holds and flat.S is not None and flat.margin > 0:
            status, S = ElimStatus.FEASIBLE, flat.S
        elif flat.holds is False:
            witness = search_condition_ii_violation(inst, budget=budget, tol=tol, rng=rng, stage_b=False)
            if witness is not None and is_genuine(inst, witness, tol):
                status = ElimStatus.INFEASIBLE
    verdict = {ElimStatus.FEASIBLE: "StrictlyFeasible", ElimStatus.INFEASIBLE: "Infeasible"}.get(status, "Unknown")
    report.add("verdict", verdict)
    report.add("decided_by", source if status is not ElimStatus.UNKNOWN else "none")
    report.add("flat_lmi", flat.status.value)
    if S is not None and status is ElimStatus.FEASIBLE:
        report.add("margin", numlin.min_eig(inst.assemble(S)))
        report.add("S", list(S))
    if witness is not None and status is ElimStatus.INFEASIBLE:
        _witness_fields(report, witness)
    report.add("trace", list(res.trace))
    resolved = res.status is not ElimStatus.UNKNOWN and flat.holds is not None
    if resolved and (res.status is ElimStatus.FEASIBLE) != flat.holds:
        report.add("contradiction", f"recursion {res.status.value}, flat LMI {flat.status.value}")
        report.exit_code = EXIT_CONTRADICTION
    elif status is ElimStatus.UNKNOWN:
        report.exit_code = EXIT_UNKNOWN


def cmd_eliminate(args, prob: Problem, report: Report, tol, rng) -> None:
    _require_kind(prob, "elim")
    _eliminate(_instance(prob, args), args, report, tol, rng)


def cmd_lift(args, prob: Problem, report: Report, tol, rng) -> None:
    _require_kind(prob, "lift")
    inst = _instance(prob, args)
    real = Realization(tuple(prob.Bq), tuple(prob.Cq))
    lifted = lift_nonlinear(inst.p, real, inst.T, inst.mode)
    report.add("realization_terms", real.r)
    report.add("constraint_size", real.k)
    _eliminate(lifted, args, report, tol, rng)


# ---------------------------------------------------------------------------
# subspaces


def cmd_classify(args, prob: Problem, report: Report, tol, rng) -> None:
    _require_kind(prob, "subspace")
    d = int(prob.get("d"))
    space, kept = HermSubspace.spanned_by(prob.B, d=d)
    res = classify(space, _solver_budget(args), tol, rng)
    report.add("d", d)
    report.add("dim", space.dim)
    report.add("status", res.status.value)
    if res.element is not None:
        coeffs = np.zeros(len(prob.B))
        coeffs[kept] = res.element.coefficients
        report.add("coefficients", "(" + ", ".join(f"{float(f'{c:.10g}'):g}" for c in coeffs) + ")")
        report.add("element", res.element.element)
        report.add("element_min_eig", res.element.min_eig)
    if res.status is Definiteness.UNKNOWN:
        report.exit_code = EXIT_UNKNOWN


# ---------------------------------------------------------------------------
# formulas


def cmd_formula(args, prob: Problem, report: Report, tol, rng) -> None:
    _require_kind(prob, "formula")
    s = args.size if args.size is not None else prob.get("s")
    if s is None:
        raise InputError("give the matrix size with --size or an s header")
    phi = parse_formula(prob.formula)
    budget = DEFAULT_FORMULA_BUDGET
    if args.budget is not None:
        budget = FormulaBudget(exists=args.budget, forall=4 * args.budget, random=budget.random)
    res = check(phi, int(s), budget, assignment=dict(prob.assign), tol=tol, seed=report.seed)
    report.add("s", int(s))
    report.add("verdict", res.verdict.value)
    report.add("value", res.value.value)
    report.add("oracle", "none" if res.oracle is None else str(res.oracle).lower())
    report.add("summary", res.summary())
    if res.reason:
        report.add("reason", res.reason)
    if res.reverified is not None:
        report.add("reverified", str(bool(res.reverified)).lower())
    if res.assignment:
        report.add("assignment", {k: res.assignment[k] for k in sorted(res.assignment)})
    contradicts = res.oracle is not None and res.value is not Tri.UNKNOWN and (res.value is Tri.TRUE) != res.oracle
    if contradicts:
        report.add("contradiction", "checker value disagrees with the oracle")
        report.exit_code = EXIT_CONTRADICTION
    elif res.verdict is Verdict.NOT_REFUTED:
        report.exit_code = EXIT_UNKNOWN


# ---------------------------------------------------------------------------
# spectrahedrops


def cmd_spectrahedrop(args, prob: Problem, report: Report, tol, rng) -> None:
    _require_kind(prob, "spectrahedrop")
    eps = args.eps if args.eps is not None else prob.get("eps", 1e-2)
    T = _tuple(prob)
    try:
        res = check_spectrahedrop(prob.A, prob.B, T, float(eps), budget=_solver_budget(args), tol=tol, rng=rng)
    except NoUnitError as exc:
        raise InputError(str(exc)) from None
    report.add("eps", float(eps))
    report.add("e", "(" + ", ".join(f"{x:.6g}" for x in res.e) + ")")
    if res.S is not None:
        report.add("verdict", "Feasible")
        report.add("margin", res.margin)
        report.add("S", list(res.S))
    elif res.counterexample is not None:
        report.add("verdict", "HypothesisViolated")
        _witness_fields(report, res.counterexample)
    else:
        report.add("verdict", "Unknown")
        report.exit_code = EXIT_UNKNOWN
    report.add("trace", list(res.trace))


# ---------------------------------------------------------------------------
# selftest


def cmd_selftest(args, report: Report) -> None:
    only = None
    if args.criteria:
        only = {int(x) for x in args.criteria.split(",")}
    results = selftest.run_all(args.trials, report.seed, only, echo=None)
    report.add("criteria", [r.line() for r in results])
    failed = [r.number for r in results if not r.passed]
    report.add("failed", "none" if not failed else ", ".join(map(str, failed)))
    if failed:
        report.exit_code = EXIT_CONTRADICTION


# ---------------------------------------------------------------------------


def _require_kind(prob: Problem, kind: str) -> None:
    if prob.kind != kind:
        raise InputError(f"expected a problem of kind {kind}, file has kind {prob.kind}")


COMMANDS = {
    "eliminate": cmd_eliminate,
    "classify": cmd_classify,
    "formula": cmd_formula,
    "spectrahedrop": cmd_spectrahedrop,
    "lift": cmd_lift,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncelim", description="Elimination of linear matrix variables in free polynomial inequalities.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_file=True):
        if with_file:
            p.add_argument("file", help="problem file")
        p.add_argument("--seed", type=int, default=None, help="random seed (default: header seed, else 0)")
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--budget", type=int, default=None, help="search budget (restarts, or candidates per block)")
        p.add_argument("--tol-psd", type=float, default=None)
        p.add_argument("--tol-dual", type=float, default=None)
        return p

    p = common(sub.add_parser("eliminate", help="decide an elimination instance"))
    p.add_argument("--mode", choices=["strict", "nonstrict"], default=None)
    p.add_argument("--r", type=int, default=None, help="width of the local witness search")
    common(sub.add_parser("classify", help="classify a span of Hermitian matrices"))
    p = common(sub.add_parser("formula", help="model-check a formula"))
    p.add_argument("--size", type=int, default=None)
    p = common(sub.add_parser("spectrahedrop", help="eps-relaxed spectrahedrop membership"))
    p.add_argument("--eps", type=float, default=None)
    p = common(sub.add_parser("lift", help="eliminate a nonlinear variable through its realization"))
    p.add_argument("--mode", choices=["strict", "nonstrict"], default=None)
    p.add_argument("--r", type=int, default=None)
    p = sub.add_parser("selftest", help="run the property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None, help="instances per suite (default: full counts)")
    p.add_argument("--criteria", default=None, help="comma-separated suite numbers")
    p.add_argument("--json", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = Report(args.command)
    if args.command == "selftest":
        report.seed = args.seed
        report.add("seed", args.seed)
        cmd_selftest(args, report)
    else:
        for attr in ("mode", "r", "size", "eps"):
            if not hasattr(args, attr):
                setattr(args, attr, None)
        try:
            prob = load(args.file)
            report.seed = _seed(args, prob)
            report.add("kind", prob.kind)
            report.add("seed", report.seed)
            rng = np.random.default_rng(report.seed)
            COMMANDS[args.command](args, prob, report, _tolerances(args, prob), rng)
        except (ParseError, FormulaSyntaxError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except (InputError, ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    sys.stdout.write(report.json() if args.json else report.text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
