import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncelim import numlin, sdpcore
from ncelim.config import DEFAULT_BUDGET, DEFAULT_TOL
from ncelim.sdpcore import LMIProblem, LMIStatus
from strategies import seeds

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_strictly_feasible_diagonal():
    prob = LMIProblem(np.diag([1.0, -1.0]), (np.diag([0.0, 1.0]),), strict=True)
    out = sdpcore.solve(prob)
    assert out.status is LMIStatus.STRICTLY_FEASIBLE
    assert numlin.min_eig(prob.pencil(out.witness)) >= prob.tau_psd()


def test_infeasible_has_farkas_certificate():
    prob = LMIProblem(-np.eye(2), (SIGMA_X,))
    out = sdpcore.solve(prob)
    assert out.status is LMIStatus.INFEASIBLE
    Z = out.certificate
    assert sdpcore.is_valid_certificate(prob, Z)
    assert numlin.min_eig(Z) >= -1e-12
    assert np.trace(Z @ prob.F0).real < 0


def test_no_generators():
    assert sdpcore.solve(LMIProblem(np.eye(3))).status is LMIStatus.STRICTLY_FEASIBLE
    assert sdpcore.solve(LMIProblem(-np.eye(3))).status is LMIStatus.INFEASIBLE


def test_generator_shape_mismatch():
    with pytest.raises(ValueError):
        LMIProblem(np.eye(2), (np.eye(3),))


def _random_lmi(seed, N=3, K=2):
    rng = np.random.default_rng(seed)
    F0 = numlin.random_hermitian(N, rng) + rng.uniform(-2.0, 1.0) * np.eye(N)
    gens = tuple(numlin.random_hermitian(N, rng) for _ in range(K))
    # keep the generators indefinite so the problem is not trivially feasible
    gens = tuple(G - np.trace(G).real / N * np.eye(N) for G in gens)
    return LMIProblem(F0, gens)


@settings(max_examples=25)
@given(seeds)
def test_outcomes_are_certified(seed):
    prob = _random_lmi(seed)
    out = sdpcore.solve(prob)
    if out.status is LMIStatus.STRICTLY_FEASIBLE:
        assert numlin.min_eig(prob.pencil(out.witness)) >= prob.tau_psd()
    elif out.status is LMIStatus.INFEASIBLE:
        assert sdpcore.is_valid_certificate(prob, out.certificate)
        # the certificate separates every point of a box from the feasible set
        rng = np.random.default_rng(seed)
        for _ in range(20):
            x = rng.normal(size=prob.K) * 5
            assert numlin.min_eig(prob.pencil(x)) < 0


@settings(max_examples=15)
@given(seeds, st.floats(0.1, 10.0))
def test_status_invariant_under_scaling(seed, c):
    prob = _random_lmi(seed)
    a, b = sdpcore.solve(prob), sdpcore.solve(prob.scaled(c))
    if LMIStatus.UNKNOWN not in (a.status, b.status) and LMIStatus.FEASIBLE not in (a.status, b.status):
        assert a.status is b.status


@settings(max_examples=15)
@given(seeds)
def test_subgradient_route_agrees_on_clear_margins(seed):
    prob = _random_lmi(seed)
    _, t_conic = sdpcore.max_margin(prob)
    _, t_sub = sdpcore.max_margin(prob, DEFAULT_BUDGET.with_method("subgradient"), np.random.default_rng(seed))
    assert t_sub <= t_conic + 1e-6 * (1 + abs(t_conic)) or t_conic >= numlin.operator_norm(prob.F0) * 0.99
    if t_conic < -0.1:
        assert t_sub < 0


def test_certificate_residuals_reported():
    prob = LMIProblem(-np.eye(2), (SIGMA_X,))
    lam, res, val = sdpcore.certificate_residuals(prob, np.eye(2) / 2)
    assert lam == pytest.approx(0.5)
    assert res == pytest.approx(0.0)
    assert val == pytest.approx(-1.0)
    assert sdpcore.is_valid_certificate(prob, np.eye(2) / 2, DEFAULT_TOL)
    assert not sdpcore.is_valid_certificate(prob, np.ones((2, 2)) / 2)  # tr(Z G) = 1
