import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncelim import numlin
from ncelim.instances import random_elim_instance, random_subspace
from ncelim.ncpoly import evaluate, random_tuple
from ncelim.subspace import (
    Definiteness,
    HermSubspace,
    classify,
    complement,
    find_definite_element,
    find_nonzero_psd_element,
    normalize_instance,
)
from strategies import seeds

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.diag([1.0, -1.0])


def span(*mats):
    return HermSubspace.spanned_by(mats)[0]


def test_identity_span_is_definite_with_unit_coefficient():
    res = classify(span(np.eye(2)))
    assert res.status is Definiteness.DEFINITE
    assert res.element.coefficients == pytest.approx([1.0])
    assert res.element.min_eig == pytest.approx(1.0)


def test_traceless_span_is_indefinite():
    assert classify(span(SIGMA_X, SIGMA_Z)).status is Definiteness.INDEFINITE


def test_rank_one_projection_is_neither():
    res = classify(span(np.diag([1.0, 0.0]), SIGMA_X))
    assert res.status is Definiteness.NEITHER
    assert numlin.min_eig(res.element.element) >= -1e-9


def test_zero_subspace_is_vacuously_indefinite():
    assert classify(HermSubspace(2)).status is Definiteness.INDEFINITE


def test_spanned_by_drops_dependent_matrices():
    S, kept = HermSubspace.spanned_by([SIGMA_X, 2 * SIGMA_X, SIGMA_Z])
    assert S.dim == 2
    assert kept == [0, 2]


@given(seeds, st.integers(2, 4))
def test_complement_is_orthogonal_and_complementary(seed, d):
    S = random_subspace(d, np.random.default_rng(seed))
    P = complement(S)
    assert S.dim + P.dim == d * d
    for A in S.basis:
        for B in P.basis:
            assert abs(np.trace(A @ B)) < 1e-9 * (1 + np.linalg.norm(A) * np.linalg.norm(B))


@settings(max_examples=20)
@given(seeds, st.integers(2, 3))
def test_definite_iff_complement_indefinite(seed, d):
    rng = np.random.default_rng(seed)
    S = random_subspace(d, rng)
    a, b = classify(S, rng=rng), classify(complement(S), rng=rng)
    if Definiteness.UNKNOWN in (a.status, b.status):
        return
    assert (a.status is Definiteness.DEFINITE) == (b.status is Definiteness.INDEFINITE)
    assert (a.status is Definiteness.NEITHER) == (b.status is Definiteness.NEITHER)


@settings(max_examples=20)
@given(seeds, st.integers(2, 3))
def test_classification_invariant_under_unitary_congruence(seed, d):
    rng = np.random.default_rng(seed)
    S = random_subspace(d, rng)
    U = numlin.random_unitary(d, rng)
    a, b = classify(S, rng=rng), classify(S.conjugated(U), rng=rng)
    if Definiteness.UNKNOWN not in (a.status, b.status):
        assert a.status is b.status


def test_elements_found_are_in_span():
    S = span(np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, -1.0]))
    el = find_nonzero_psd_element(S)
    assert el is not None and S.contains(el.element)
    assert np.trace(el.element).real == pytest.approx(1.0)
    assert find_definite_element(S) is None
    el = find_definite_element(span(np.diag([1.0, 2.0]), SIGMA_X))
    assert el is not None and el.min_eig == pytest.approx(1.0)


@settings(max_examples=10)
@given(seeds)
def test_normalization_preserves_solvability_margin(seed):
    """Normalized coefficients are orthonormal and traceless, and evaluation is a congruence."""
    rng = np.random.default_rng(seed)
    inst = random_elim_instance(rng, d=2, m=1)
    norm = normalize_instance(inst.p, inst.Bs)
    for B in norm.Bs:
        assert abs(np.trace(B)) < 1e-8
        assert np.trace(B @ B).real == pytest.approx(1.0)
    T = random_tuple(1, 2, rng)
    K = np.kron(norm.A, np.eye(2))
    proj = evaluate(norm.p, T)
    full = K.conj().T @ evaluate(inst.p, T) @ K
    # the difference lies in span(B) (x) Herm: it can be absorbed by S
    diff = full - proj
    for B in norm.Bs:
        diff = diff - np.kron(B, np.einsum("ij,iajb->ab", B.conj(), diff.reshape(2, 2, 2, 2)))
    assert np.linalg.norm(diff) < 1e-8
