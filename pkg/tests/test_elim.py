import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncelim import numlin
from ncelim.elim import (
    ElimInstance,
    ElimStatus,
    Mode,
    NoUnitError,
    Realization,
    caratheodory_bound,
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
from ncelim.instances import planted_spectrahedrop, planted_violation, random_elim_instance, random_neither_instance
from ncelim.ncpoly import FreeMatrixPoly, HermTuple, evaluate
from ncelim.sdpcore import max_margin
from ncelim.selftest import anchor_instance
from strategies import seeds

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def const(P, n=0):
    return FreeMatrixPoly.constant(np.asarray(P, dtype=float), n)


def test_sigma_x_anchor_witness():
    rep = verify_equivalence(anchor_instance())
    assert rep.verdict == "Infeasible"
    (W,) = rep.witness.mats
    W = numlin.canonical_phase(W)
    assert np.allclose(W, np.array([[1.0], [-1.0]]) / np.sqrt(2), atol=1e-8)
    assert rep.witness.violation == pytest.approx(-1.0, abs=1e-8)


def test_identity_constant_is_feasible():
    inst = ElimInstance(const(np.eye(2)), (np.diag([1.0, -1.0]),), HermTuple.empty(2))
    rep = verify_equivalence(inst)
    assert rep.verdict == "Feasible"
    assert numlin.min_eig(inst.assemble(rep.condition_i.S)) >= -1e-7


@settings(max_examples=10)
@given(seeds, st.integers(1, 2))
def test_planted_violations_are_found(seed, s):
    rng = np.random.default_rng(seed)
    inst, W, violation = planted_violation(rng, d=3, s=s)
    assert violation < 0
    rep = verify_equivalence(inst, rng=rng)
    assert rep.verdict == "Infeasible"
    assert is_genuine(inst, rep.witness)


@settings(max_examples=15)
@given(seeds)
def test_random_instances_never_contradict(seed):
    rng = np.random.default_rng(seed)
    inst = random_elim_instance(rng, d=2, m=1, s=int(rng.integers(1, 3)))
    rep = verify_equivalence(inst, rng=rng)
    assert rep.contradiction is None
    if rep.verdict == "Infeasible":
        assert is_genuine(inst, rep.witness)
        # constraints hold and the compressed sum is not PSD
        assert rep.witness.constraint_residual < 1e-6
        assert rep.witness.violation < 0


@given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(5, 60))
def test_caratheodory_bound_and_residual(seed, d, r, N):
    rng = np.random.default_rng(seed)
    Ws = [rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r)) for _ in range(N)]
    out = caratheodory_compress(Ws)
    assert len(out) <= caratheodory_bound(d, r)
    vec = lambda Ws: sum(np.outer(W.reshape(-1), W.reshape(-1).conj()) for W in Ws)  # noqa: E731
    assert np.allclose(vec(Ws), vec(out), atol=1e-8 * np.linalg.norm(vec(Ws)))


def test_semidefinite_coefficient_kernel_decides():
    p = const(np.diag([1.0, -1.0]))
    T = HermTuple.empty(1)
    assert eliminate_semidefinite(p, np.diag([0.0, 1.0]), T).feasible is True
    # the kernel of B sees the negative entry
    assert eliminate_semidefinite(p, np.diag([1.0, 0.0]), T).feasible is False
    # negative semidefinite works with the opposite sign of S
    res = eliminate_semidefinite(p, -np.diag([0.0, 2.0]), T)
    assert res.feasible and res.margin > 0


def test_semidefinite_rejects_indefinite():
    with pytest.raises(ValueError):
        eliminate_semidefinite(const(np.eye(2)), np.diag([1.0, -1.0]), HermTuple.empty(1))


@settings(max_examples=10)
@given(seeds)
def test_strict_recursion_matches_flat_lmi(seed):
    rng = np.random.default_rng(seed)
    inst = random_neither_instance(rng, d=3, m=2)
    res = eliminate_strict(inst, rng=rng)
    flat = check_condition_i(inst, rng=rng)
    if res.status is ElimStatus.FEASIBLE:
        assert numlin.min_eig(inst.assemble(res.S)) > 0
    if res.status is ElimStatus.INFEASIBLE:
        assert is_genuine(inst, res.witness)
    if res.status is not ElimStatus.UNKNOWN and flat.holds is not None:
        assert (res.status is ElimStatus.FEASIBLE) == flat.holds


def test_strict_recursion_trivial_cases():
    T = HermTuple.empty(2)
    assert eliminate_strict(ElimInstance(const(np.eye(2)), (), T, Mode.STRICT)).status is ElimStatus.FEASIBLE
    assert eliminate_strict(ElimInstance(const(-np.eye(2)), (), T, Mode.STRICT)).status is ElimStatus.INFEASIBLE
    definite = ElimInstance(const(-5 * np.eye(2)), (np.diag([1.0, 2.0]),), T, Mode.STRICT)
    res = eliminate_strict(definite)
    assert res.status is ElimStatus.FEASIBLE and res.margin > 0


def test_strict_recursion_needs_strict_mode():
    with pytest.raises(ValueError):
        eliminate_strict(anchor_instance())


@settings(max_examples=8)
@given(seeds)
def test_spectrahedrop_planted(seed):
    rng = np.random.default_rng(seed)
    As, Bs, T, e, _ = planted_spectrahedrop(rng, d=2, n=2, m=1, s=1)
    res = check_spectrahedrop(As, Bs, T, 1e-2, rng=rng)
    assert res.S is not None
    assert res.margin >= -1e-2 - 1e-7


def test_spectrahedrop_needs_unit():
    A = [np.diag([1.0, 0.0])]
    with pytest.raises(NoUnitError):
        check_spectrahedrop(A, [SIGMA_X], HermTuple([np.eye(1)]), 1e-2)
    with pytest.raises(ValueError):
        check_spectrahedrop([np.eye(2)], [SIGMA_X], HermTuple([np.eye(1)]), 0.0)


def test_lifting_bounded_below_scalar():
    # 1 x 1 case: -1 + b y^2 >= 0 is solvable iff b > 0
    T = HermTuple.empty(1)
    for b, feasible in ((1.0, True), (-1.0, False)):
        inst = lift_nonlinear(const(-np.eye(1)), realization_bounded_below([b * np.eye(1)], [0.0]), T)
        assert inst.d == 2
        rep = verify_equivalence(inst)
        assert rep.verdict == ("Feasible" if feasible else "Infeasible")


@settings(max_examples=10)
@given(seeds)
def test_lifting_odd_word_is_the_linear_problem(seed):
    """y^3 ranges over all Hermitians, so the lift has the margin of the linear instance."""
    rng = np.random.default_rng(seed)
    inst = random_elim_instance(rng, d=2, m=1)
    lifted = lift_nonlinear(inst.p, realization_single_word(inst.Bs[0], odd=True), inst.T)
    _, t1 = max_margin(inst.lmi())
    _, t2 = max_margin(lifted.lmi())
    assert t1 == pytest.approx(t2, abs=1e-5 * (1 + abs(t1)))


def test_surjective_pair_realization_shape():
    B = np.array([[1.0, 2.0], [0.0, 1j]])
    real = realization_surjective_pair(B)
    assert real.r == 2 and real.k == 0
    S1, S2 = np.diag([1.0, 2.0]), SIGMA_X
    direct = np.kron(B, S1 + 1j * S2) + np.kron(B.conj().T, S1 - 1j * S2)
    via = sum(np.kron(Bi, Si) for Bi, Si in zip(real.B[1:], (S1, S2)))
    assert np.allclose(direct, via)


def test_realization_validation():
    with pytest.raises(ValueError):
        Realization((np.eye(2),), ())
    with pytest.raises(ValueError):
        Realization((np.eye(2), np.eye(3)), (np.eye(1), np.eye(1)))


def test_witness_width_parameter():
    inst = anchor_instance()
    rep = verify_equivalence(inst, r=1)
    assert rep.verdict == "Infeasible"


def test_instance_validation():
    with pytest.raises(ValueError):
        ElimInstance(const(np.eye(2)), (np.eye(3),), HermTuple.empty(1))
