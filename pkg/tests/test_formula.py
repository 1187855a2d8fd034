import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncelim import numlin
from ncelim.formula import (
    BUILTINS,
    Adj,
    And,
    Call,
    Eq,
    Exists,
    Forall,
    I,
    Not,
    Or,
    Psd,
    Tri,
    Var,
    Verdict,
    builtin,
    check,
    cross_validate,
    expand_all,
    expand_call,
    oracle,
)
from ncelim.formula.ast import BindingError, check_bindings, poly_eval
from ncelim.formula.builtins import is_prime_or_one
from ncelim.formula.checker import (
    SizeMismatchError,
    UnboundVariableError,
    ranked_product,
    zero_diagonal_unitary,
)
from ncelim.formula.parser import FormulaSyntaxError, parse_expr, parse_formula, to_text
from strategies import seeds

X, Y, Z = Var("X"), Var("Y"), Var("Z")


# -- expressions ------------------------------------------------------------


def test_expand_collects_words():
    p = ((X + Y) * (X - Y)).expand()
    assert p == {("X", "X"): 1, ("Y", "X"): 1, ("X", "Y"): -1, ("Y", "Y"): -1}


def test_adjoint_reverses_and_conjugates():
    p = Adj(Var("X") * Var("Y") * 2j).expand()
    assert p == {("Y", "X"): -2j}


@given(seeds, st.integers(1, 3))
def test_poly_eval_matches_numpy(seed, s):
    rng = np.random.default_rng(seed)
    A, B = numlin.random_hermitian(s, rng), numlin.random_hermitian(s, rng)
    e = X * Y * X - 2 * Y + Adj(X * Y) + 1j * I
    M, _ = poly_eval(e.expand(), {"X": A, "Y": B}, s)
    assert np.allclose(M, A @ B @ A - 2 * B + B @ A + 1j * np.eye(s))


# -- builtins -----------------------------------------------------------------


def test_builtin_arity_and_names():
    assert set(BUILTINS) == {"rank_one", "trace_zero", "is_scalar", "trace_eq", "intscal", "prime_size"}
    with pytest.raises(TypeError):
        builtin("rank_one")
    with pytest.raises(KeyError):
        builtin("no_such_thing", "X")


def test_expansion_avoids_capture():
    f = expand_call(builtin("is_scalar", "Y"))
    (inner,) = f.vars
    assert inner != "Y"
    assert f.free_vars() == {"Y"}
    full = expand_all(builtin("prime_size"))
    assert full.free_vars() == set()
    check_bindings(full)


def test_binding_errors():
    with pytest.raises(BindingError):
        check_bindings(Forall(("X",), Exists(("X",), Eq(X))))


def test_oracles():
    assert oracle("rank_one", np.diag([1.0, 0.0]))
    assert not oracle("rank_one", np.eye(2))
    assert oracle("trace_zero", np.diag([1.0, -1.0]))
    assert oracle("is_scalar", 3 * np.eye(3))
    assert oracle("trace_eq", 2 * np.eye(2), np.diag([1.0, 1.0]))
    assert oracle("intscal", 2 * np.eye(2)) and not oracle("intscal", 3 * np.eye(2))
    assert [s for s in range(1, 12) if is_prime_or_one(s)] == [1, 2, 3, 5, 7, 11]
    assert oracle("prime_size", s=5) and not oracle("prime_size", s=6)


# -- checker --------------------------------------------------------------------


def test_tri_negation():
    assert Tri.TRUE.negate() is Tri.FALSE
    assert Tri.UNKNOWN.negate() is Tri.UNKNOWN


def test_rank_one_cases():
    e1 = np.diag([1.0, 0.0])
    assert check(builtin("rank_one", "X"), 2, assignment={"X": e1}).verdict is Verdict.HOLDS_BY_ORACLE
    for M in (np.eye(2), np.zeros((2, 2)), np.diag([1.0, -1.0])):
        res = check(builtin("rank_one", "X"), 2, assignment={"X": M})
        assert res.verdict is Verdict.REFUTED and res.reverified


def test_trace_zero_witness_and_refutation():
    res = check(builtin("trace_zero", "X"), 2, assignment={"X": np.diag([1.0, -1.0])})
    assert res.verdict is Verdict.WITNESSED and res.reverified
    assert check(builtin("trace_zero", "X"), 2, assignment={"X": np.eye(2)}).verdict is Verdict.REFUTED


@pytest.mark.parametrize("s", [1, 2, 3])
def test_intscal_pattern(s):
    for k in range(-1, s + 2):
        res = check(builtin("intscal", "X"), s, assignment={"X": k * np.eye(s)})
        assert (res.value is Tri.TRUE) == (0 <= k <= s)
        assert res.verdict is not Verdict.REFUTED or not (0 <= k <= s)


def test_intscal_three_at_size_two_reports_no_witness():
    res = check(builtin("intscal", "X"), 2, assignment={"X": 3 * np.eye(2)})
    assert res.verdict is Verdict.NOT_REFUTED
    assert "oracle: false; checker: no witness found" in res.summary()


@pytest.mark.parametrize("s,a,b", [(4, 2, 2), (6, 2, 3)])
def test_prime_size_refuted_by_factorisation(s, a, b):
    res = check(builtin("prime_size"), s)
    assert res.verdict is Verdict.REFUTED and res.reverified
    Ys, Zs = sorted([np.trace(res.assignment["Y"]).real / s, np.trace(res.assignment["Z"]).real / s])
    assert (Ys, Zs) == pytest.approx((a, b))
    assert np.allclose(res.assignment["X"], s * np.eye(s))


@pytest.mark.parametrize("s", [2, 3, 5])
def test_prime_size_not_refuted_at_primes(s):
    res = check(builtin("prime_size"), s)
    assert res.value is Tri.UNKNOWN
    assert res.verdict is Verdict.HOLDS_BY_ORACLE


def test_square_root_of_minus_identity():
    phi = Exists(("X",), Eq(X * X + I))
    res = check(phi, 2)
    assert res.verdict in (Verdict.REFUTED, Verdict.NOT_REFUTED)
    weak = check(phi, 2, strategies={"structured", "random"})
    assert weak.verdict is Verdict.NOT_REFUTED


def test_linear_universal_decided_exactly():
    assert check(Forall(("X",), Eq(X - X)), 3).verdict is Verdict.WITNESSED
    assert check(Forall(("X",), Eq(X)), 2).verdict is Verdict.REFUTED


def test_existential_witness_is_reported():
    res = check(Exists(("X",), Eq(X * X - X)), 2)
    assert res.verdict is Verdict.WITNESSED
    P = res.assignment["X"]
    assert np.allclose(P @ P, P)


@given(seeds, st.integers(1, 3))
@settings(max_examples=25)
def test_quantifier_free_values_match_direct_evaluation(seed, s):
    rng = np.random.default_rng(seed)
    A, B = numlin.random_hermitian(s, rng), numlin.random_hermitian(s, rng)
    if rng.random() < 0.5:
        B = A @ A  # make psd(B) and eq(B - X*X) true
    env = {"X": A, "Y": B}
    phi = Or((And((Psd(Y), Eq(Y - X * X))), Not(Psd(X + I))))
    res = check(phi, s, assignment=env)
    direct = (numlin.min_eig(B) >= -1e-9 and np.allclose(B, A @ A)) or numlin.min_eig(A + np.eye(s)) < -1e-9
    assert res.value is (Tri.TRUE if direct else Tri.FALSE)


def test_input_errors():
    with pytest.raises(UnboundVariableError):
        check(Eq(X), 2)
    with pytest.raises(SizeMismatchError):
        check(Eq(X), 2, assignment={"X": np.eye(3)})
    with pytest.raises(ValueError):
        check(Eq(X), 2, assignment={"X": np.eye(2)}, strategies={"magic"})


def test_ranked_product_order():
    out = list(ranked_product([[0, 1, 2], ["a", "b"]], limit=4))
    assert out == [(0, "a"), (0, "b"), (1, "a"), (1, "b")]
    assert list(ranked_product([[1], []], 5)) == []


@given(seeds, st.integers(2, 5))
def test_zero_diagonal_unitary(seed, s):
    X = numlin.random_hermitian(s, np.random.default_rng(seed))
    X = X - np.trace(X).real / s * np.eye(s)
    U = zero_diagonal_unitary(X)
    assert np.allclose(U.conj().T @ U, np.eye(s), atol=1e-10)
    assert np.allclose(np.diag(U.conj().T @ X @ U), 0, atol=1e-9)


@pytest.mark.parametrize("name", ["rank_one", "is_scalar", "trace_zero", "trace_eq", "intscal"])
def test_cross_validation_small(name):
    rep = cross_validate(name, 2, samples=12, rng=np.random.default_rng(7))
    assert rep.agrees
    assert rep.samples >= 12


# -- text syntax ---------------------------------------------------------------


def test_parse_examples():
    f = parse_formula("forall Y: eq(i*(X*Y - Y*X))")
    assert isinstance(f, Forall) and f.free_vars() == {"X"}
    g = parse_formula("not eq(X) => rank_one(X) or psd(-2*X + I)")
    assert g.free_vars() == {"X"}
    assert parse_formula("prime_size()") == Call("prime_size", ())


def test_syntax_errors_carry_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("forall X:\n  eq(X +)")
    assert err.value.line == 2
    with pytest.raises(FormulaSyntaxError):
        parse_formula("rank_one(X, Y)")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("exists eq: eq(X)")


names = st.sampled_from(["X", "Y", "Z"])


def exprs():
    leaf = st.one_of(names.map(Var), st.just(I), st.sampled_from([-2.0, 0.5, 3.0, 1j, 1 + 2j]).map(lambda c: c * I))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.tuples(sub, sub).map(lambda t: t[0] + t[1]),
            st.tuples(sub, sub).map(lambda t: t[0] * t[1]),
            st.tuples(sub, sub).map(lambda t: t[0] - t[1]),
            sub.map(Adj),
        ),
        max_leaves=6,
    )


def formulas():
    atom = st.one_of(exprs().map(Eq), exprs().map(Psd), exprs().map(lambda e: builtin("rank_one", e)))
    return st.recursive(
        atom,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(t)),
            st.tuples(sub, sub).map(lambda t: Or(t)),
            st.tuples(names, sub).map(lambda t: Forall((t[0],), t[1])),
            st.tuples(names, sub).map(lambda t: Exists((t[0],), t[1])),
        ),
        max_leaves=5,
    )


@given(formulas())
def test_print_parse_round_trip(f):
    text = to_text(f)
    g = parse_formula(text)
    assert to_text(g) == text


@given(exprs(), seeds)
def test_expression_round_trip_preserves_value(e, seed):
    from ncelim.formula.parser import expr_to_text

    rng = np.random.default_rng(seed)
    env = {k: numlin.random_hermitian(2, rng) for k in "XYZ"}
    a, _ = poly_eval(e.expand(), env, 2)
    b, _ = poly_eval(parse_expr(expr_to_text(e)).expand(), env, 2)
    assert np.allclose(a, b)
