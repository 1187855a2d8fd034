import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncelim.problemfile import (
    ParseError,
    Problem,
    emit,
    format_matrix,
    format_scalar,
    parse,
    parse_matrix,
    parse_scalar,
)

SIGMA = """kind: elim
mode: nonstrict
d: 2
n: 1
s: 1

[p]
word: e | matrix: [[0, 1], [1, 0]]
word: x1 | matrix: [[1, 0], [0, 2]]

[B]
matrix: [[1, 0], [0, -1]]

[T]
matrix: [[0.5]]
"""


@pytest.mark.parametrize(
    "text,value",
    [("2", 2), ("-1.5", -1.5), ("2i", 2j), ("-i", -1j), ("1+2i", 1 + 2j), ("1e-3+2.5e2i", 1e-3 + 250j), (".5-i", 0.5 - 1j)],
)
def test_scalars(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("text", ["", "1+", "i2", "1..2", "2j", "1+2i+3"])
def test_bad_scalars(text):
    with pytest.raises(ValueError):
        parse_scalar(text)


finite = st.floats(-1e6, 1e6, allow_nan=False).map(lambda x: 0.0 if x == 0 else x)


@given(finite, finite)
def test_scalar_round_trip(a, b):
    z = complex(a, b)
    assert parse_scalar(format_scalar(z)) == z


@given(st.integers(1, 4), st.lists(st.tuples(finite, finite), min_size=16, max_size=16))
def test_matrix_round_trip(s, entries):
    M = np.array([complex(a, b) for a, b in entries[: s * s]]).reshape(s, s)
    assert np.array_equal(parse_matrix(format_matrix(M)), M)


def test_file_round_trip_and_idempotence():
    prob = parse(SIGMA)
    assert prob.kind == "elim" and prob.get("d") == 2
    assert [w for w, _ in prob.poly] == [(), (1,)]
    text = emit(prob)
    assert emit(parse(text)) == text
    assert text == SIGMA


def test_two_line_terms_accepted():
    text = SIGMA.replace("word: e | matrix: [[0, 1], [1, 0]]", "word:\nmatrix: [[0, 1], [1, 0]]")
    assert emit(parse(text)) == SIGMA


def test_formula_section_and_assignment():
    prob = parse("kind: formula\ns: 2\n\n[formula]\nintscal(X)\n\n[assign]\nX: [[3, 0], [0, 3]]\n")
    assert prob.formula == "intscal(X)"
    assert np.array_equal(prob.assign["X"], 3 * np.eye(2))
    assert emit(parse(emit(prob))) == emit(prob)


def test_empty_matrix_literal():
    assert parse_matrix("[]").shape == (0, 0)


@pytest.mark.parametrize(
    "text,line",
    [
        (SIGMA.replace("[[1, 0], [0, -1]]", "[[1, 0], [0]]"), 12),
        (SIGMA.replace("[[0.5]]", "[[0.5x]]"), 15),
        (SIGMA.replace("kind: elim", "kind: nonsense"), 1),
        (SIGMA.replace("[B]", "[Q]"), 11),
        (SIGMA.replace("word: x1", "word: y1"), 9),
        (SIGMA.replace("d: 2", "d: two"), 3),
    ],
    ids=["short-row", "bad-scalar", "bad-kind", "bad-section", "bad-letter", "bad-header-int"],
)
def test_parse_errors_have_lines(text, line):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.line == line
    assert err.value.column >= 1


def test_dimension_checks():
    with pytest.raises(ParseError):
        parse(SIGMA.replace("[[0.5]]", "[[0.5, 0], [0, 1]]"))  # s = 1 in the header
    with pytest.raises(ParseError):
        parse(SIGMA.replace("[[1, 0], [0, -1]]", "[[1]]"))
    with pytest.raises(ParseError):
        parse(SIGMA.replace("word: x1", "word: x2"))


def test_problem_defaults():
    prob = Problem(kind="subspace")
    assert prob.get("d", 3) == 3
