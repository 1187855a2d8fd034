import numpy as np
import pytest
from hypothesis import given

from ncelim import numlin
from ncelim.ncpoly import (
    DimensionError,
    FreeMatrixPoly,
    HermTuple,
    Membership,
    compress,
    evaluate,
    involution,
    membership,
    random_poly,
    random_tuple,
    scalar_compress,
    word_star,
)
from strategies import poly_and_tuple, seeds, small
from hypothesis import strategies as st


@given(poly_and_tuple(), small)
def test_compression_is_congruence(data, k):
    p, T, rng = data
    W = rng.normal(size=(p.d, k)) + 1j * rng.normal(size=(p.d, k))
    K = np.kron(W, np.eye(T.s))
    lhs = evaluate(compress(p, W), T)
    assert np.allclose(lhs, K.conj().T @ evaluate(p, T) @ K, atol=1e-10)


@given(poly_and_tuple())
def test_choi_reassembly(data):
    p, T, _ = data
    total = np.zeros((p.d * T.s, p.d * T.s), complex)
    for j in range(p.d):
        for k in range(p.d):
            E = np.zeros((p.d, p.d))
            E[j, k] = 1.0
            total += np.kron(E, evaluate(scalar_compress(p, E), T))
    assert np.allclose(total, evaluate(p, T), atol=1e-10)


@given(poly_and_tuple())
def test_involution_evaluates_to_adjoint(data):
    p, T, rng = data
    q = random_poly(p.d, p.n, 2, rng, hermitian=False)
    assert np.allclose(evaluate(involution(q), T), evaluate(q, T).conj().T, atol=1e-10)
    assert involution(involution(q)) == q


@given(poly_and_tuple(max_degree=1))
def test_evaluation_is_multiplicative(data):
    p, T, rng = data
    q = random_poly(p.d, p.n, 1, rng, hermitian=False)
    assert np.allclose(evaluate(p * q, T), evaluate(p, T) @ evaluate(q, T), atol=1e-9)


@given(poly_and_tuple())
def test_unitary_equivariance(data):
    p, T, rng = data
    U = numlin.random_unitary(T.s, rng)
    K = np.kron(np.eye(p.d), U)
    # conjugated(U) is U* T U
    assert np.allclose(evaluate(p, T.conjugated(U)), K.conj().T @ evaluate(p, T) @ K, atol=1e-9)


@given(poly_and_tuple())
def test_hermitian_polys_give_hermitian_values(data):
    p, T, _ = data
    assert p.is_hermitian()
    M = evaluate(p, T)
    assert np.allclose(M, M.conj().T, atol=1e-12)


def test_word_star_reverses():
    assert word_star((1, 2, 2)) == (2, 2, 1)
    assert word_star(()) == ()


def test_constant_evaluates_to_kron_identity():
    P = np.array([[1.0, 2.0], [2.0, -1.0]])
    p = FreeMatrixPoly.constant(P, 0)
    assert np.allclose(evaluate(p, HermTuple.empty(3)), np.kron(P, np.eye(3)))


def test_linear_pencil_value():
    A0, A1 = np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])
    p = FreeMatrixPoly.linear_pencil(A0, [A1])
    T = HermTuple([np.diag([1.0, 2.0])])
    assert np.allclose(evaluate(p, T), np.kron(A0, np.eye(2)) + np.kron(A1, np.diag([1.0, 2.0])))


def test_membership_levels():
    p = FreeMatrixPoly.linear_pencil(np.eye(1), [-np.eye(1)])  # 1 - x
    assert membership(p, HermTuple([np.array([[0.5]])])) is Membership.INSIDE
    assert membership(p, HermTuple([np.array([[1.0]])])) is Membership.BOUNDARY
    assert membership(p, HermTuple([np.array([[2.0]])])) is Membership.OUTSIDE


def test_dimension_errors():
    with pytest.raises(DimensionError):
        FreeMatrixPoly(2, 1, {(2,): np.eye(2)})
    with pytest.raises(DimensionError):
        FreeMatrixPoly(2, 1, {(): np.eye(3)})
    p = FreeMatrixPoly.constant(np.eye(2), 1)
    with pytest.raises(DimensionError):
        compress(p, np.ones((3, 1)))


def test_herm_tuple_rejects_non_hermitian():
    with pytest.raises(ValueError):
        HermTuple([np.array([[0.0, 1.0], [0.0, 0.0]])])


@given(seeds)
def test_addition_and_scaling(seed):
    rng = np.random.default_rng(seed)
    p, q = random_poly(2, 2, 2, rng), random_poly(2, 2, 2, rng)
    T = random_tuple(2, 2, rng)
    assert np.allclose(evaluate(p + 2.5 * q, T), evaluate(p, T) + 2.5 * evaluate(q, T), atol=1e-10)
    assert (p - p).terms == {}
