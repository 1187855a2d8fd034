"""Plain-text problem files.

A file is a ``key: value`` header followed by bracketed sections::

    kind: elim
    mode: nonstrict
    d: 2
    n: 1
    s: 1
    seed: 0

    [p]
    word: e | matrix: [[1, 0], [0, 1]]
    word: x1 | matrix: [[0, 1], [1, 0]]

    [B]
    matrix: [[1, 0], [0, -1]]

    [T]
    matrix: [[0.5]]

Complex entries are written ``a+bi`` with decimal literals. Sections:
``[p]`` one ``word: ... | matrix: ...`` line per term of the polynomial
(``e`` is the empty word; a ``matrix:`` line right after a bare ``word:``
line is also accepted), ``[B]`` elimination
coefficients (or subspace elements), ``[T]`` the evaluation tuple, ``[A]``
the pencil of a spectrahedrop problem, ``[Bq]`` and ``[Cq]`` the data of a
lifting realization, ``[formula]`` formula text and ``[assign]`` lines
``name: matrix`` fixing the free variables of a formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

KINDS = ("elim", "subspace", "formula", "spectrahedrop", "lift")
SECTIONS = ("p", "B", "T", "A", "Bq", "Cq", "formula", "assign")
_INT_KEYS = ("d", "n", "m", "s", "seed", "r")
_FLOAT_KEYS = ("tol_psd", "tol_dual", "eps")
_HEADER_ORDER = ("kind", "mode", "example", "d", "n", "m", "s", "r", "seed", "eps", "tol_psd", "tol_dual")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


@dataclass
class Problem:
    kind: str
    header: dict = field(default_factory=dict)
    poly: list = field(default_factory=list)  # (word tuple, matrix)
    B: list = field(default_factory=list)
    T: list = field(default_factory=list)
    A: list = field(default_factory=list)
    Bq: list = field(default_factory=list)
    Cq: list = field(default_factory=list)
    formula: str = ""
    assign: dict = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.header.get(key, default)


# ---------------------------------------------------------------------------
# scalars and matrices


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SCALAR = re.compile(rf"^[-+]?(?:{_NUM}(?:[-+](?:{_NUM})?i)?|(?:{_NUM})?i)$")


def parse_scalar(text: str) -> complex:
    """``a``, ``bi``, ``a+bi``, ``a-bi``, ``i``, ``-i``; decimal literals only."""
    compact = text.replace(" ", "").replace("\t", "")
    if not compact or not _SCALAR.match(compact):
        raise ValueError(f"bad complex number {text.strip()!r}")
    try:
        return complex(compact.replace("i", "j"))
    except ValueError:
        raise ValueError(f"bad complex number {text.strip()!r}") from None


def format_scalar(z: complex) -> str:
    z = complex(z)

    def num(x: float) -> str:
        x = 0.0 if x == 0 else float(x)
        r = repr(x)
        return r[:-2] if r.endswith(".0") else r

    if z.imag == 0:
        return num(z.real)
    im = num(abs(z.imag)) + "i"
    if z.real == 0:
        return ("-" if z.imag < 0 else "") + im
    return num(z.real) + ("-" if z.imag < 0 else "+") + im


def parse_matrix(text: str, line: int = 1, column: int = 1) -> np.ndarray:
    """Bracketed row list ``[[a, b], [c, d]]``; ``[]`` is the empty 0 x 0 matrix."""
    s = text.strip()
    offset = column + (len(text) - len(text.lstrip()))
    if s == "[]":
        return np.zeros((0, 0), complex)
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix must be a bracketed list of rows", line, offset)
    rows = []
    pos = 1
    inner_end = len(s) - 1
    while pos < inner_end:
        while pos < inner_end and s[pos] in " ,\t":
            pos += 1
        if pos >= inner_end:
            break
        if s[pos] != "[":
            raise ParseError("expected '[' opening a row", line, offset + pos)
        close = s.find("]", pos)
        if close < 0 or close > inner_end:
            raise ParseError("row is not closed", line, offset + pos)
        cells = s[pos + 1 : close]
        if "[" in cells:
            raise ParseError("nested brackets inside a row", line, offset + pos)
        row = []
        cpos = pos + 1
        for cell in cells.split(","):
            try:
                row.append(parse_scalar(cell))
            except ValueError as exc:
                raise ParseError(str(exc), line, offset + cpos) from None
            cpos += len(cell) + 1
        rows.append(row)
        pos = close + 1
    if not rows:
        raise ParseError("matrix has no rows", line, offset)
    width = len(rows[0])
    for k, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"row {k + 1} has {len(r)} entries, expected {width}", line, offset)
    if len(rows) != width:
        raise ParseError(f"matrix is {len(rows)} x {width}, expected square", line, offset)
    return np.array(rows, dtype=complex)


def format_matrix(M: np.ndarray) -> str:
    M = np.asarray(M)
    if M.size == 0:
        return "[]"
    return "[" + ", ".join("[" + ", ".join(format_scalar(z) for z in row) + "]" for row in M) + "]"


def parse_word(text: str, line: int, column: int) -> tuple[int, ...]:
    out = []
    if text.split() == ["e"]:
        return ()
    for tok in text.split():
        m = re.fullmatch(r"x(\d+)", tok)
        if not m or int(m.group(1)) < 1:
            raise ParseError(f"bad letter {tok!r}; letters are x1, x2, ...", line, column + text.find(tok))
        out.append(int(m.group(1)))
    return tuple(out)


def format_word(w) -> str:
    return " ".join(f"x{i}" for i in w) if len(w) else "e"


# ---------------------------------------------------------------------------
# files


def parse(text: str) -> Problem:
    header: dict = {}
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if current != "formula" and (not stripped or stripped.startswith("#")):
            continue
        m = re.fullmatch(r"\[(\w+)\]", stripped)
        if m:
            current = m.group(1)
            if current not in SECTIONS:
                raise ParseError(f"unknown section [{current}]", lineno, line.find("[") + 1)
            if current in sections:
                raise ParseError(f"section [{current}] appears twice", lineno, 1)
            sections[current] = []
            continue
        if current is None:
            key, sep, value = line.partition(":")
            if not sep:
                raise ParseError("expected 'key: value' in the header", lineno, 1)
            key = key.strip()
            header[key] = _header_value(key, value.strip(), lineno, len(line) - len(line.lstrip()) + len(key) + 3)
        else:
            sections[current].append((lineno, line))
    kind = header.get("kind")
    if kind not in KINDS:
        raise ParseError(f"header needs kind: one of {', '.join(KINDS)}", 1, 1)
    prob = Problem(kind=kind, header=header)
    for name, lines in sections.items():
        if name == "formula":
            prob.formula = "\n".join(l for _, l in lines).strip()
        elif name == "p":
            prob.poly = _parse_terms(lines)
        elif name == "assign":
            for lineno, l in lines:
                key, sep, value = l.partition(":")
                if not sep or not re.fullmatch(r"\s*[A-Za-z_]\w*\s*", key):
                    raise ParseError("expected 'name: matrix'", lineno, 1)
                prob.assign[key.strip()] = parse_matrix(value, lineno, len(key) + 2)
        else:
            setattr(prob, name, _parse_matrices(lines))
    _check_dimensions(prob)
    return prob


def _header_value(key: str, value: str, line: int, column: int):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise ParseError(f"bad value for {key}: {value!r}", line, column) from None
    return value


def _matrix_line(lineno: int, line: str) -> np.ndarray:
    key, sep, value = line.partition(":")
    if key.strip() != "matrix" or not sep:
        raise ParseError("expected 'matrix: [[...]]'", lineno, 1)
    return parse_matrix(value, lineno, len(key) + 2)


def _parse_matrices(lines) -> list[np.ndarray]:
    return [_matrix_line(lineno, l) for lineno, l in lines]


def _parse_terms(lines) -> list:
    out = []
    k = 0
    while k < len(lines):
        lineno, l = lines[k]
        key, sep, value = l.partition(":")
        if key.strip() != "word" or not sep:
            raise ParseError("expected 'word: x1 x2 | matrix: [...]' ('e' for the constant term)", lineno, 1)
        word_text, bar, rest = value.partition("|")
        w = parse_word(word_text, lineno, len(key) + 2)
        if bar:
            mkey, msep, mval = rest.partition(":")
            col = len(key) + 2 + len(word_text) + 1
            if mkey.strip() != "matrix" or not msep:
                raise ParseError("expected 'matrix:' after '|'", lineno, col + 1)
            out.append((w, parse_matrix(mval, lineno, col + len(mkey) + 2)))
            k += 1
            continue
        if k + 1 >= len(lines):
            raise ParseError("word without a matrix line", lineno, 1)
        out.append((w, _matrix_line(*lines[k + 1])))
        k += 2
    return out


def _check_dimensions(prob: Problem) -> None:
    def need(cond, msg):
        if not cond:
            raise ParseError(msg, 1, 1)

    d = prob.get("d")
    s = prob.get("s")
    n = prob.get("n")
    if prob.kind in ("elim", "spectrahedrop", "lift", "subspace"):
        need(d is not None and d >= 1, f"kind {prob.kind} needs a positive d in the header")
    for w, P in prob.poly:
        need(P.shape == (d, d), f"polynomial coefficient of '{format_word(w)}' is not {d} x {d}")
        if n is not None:
            need(all(i <= n for i in w), f"word '{format_word(w)}' uses a letter beyond x{n}")
    if prob.kind != "lift":
        for B in prob.B:
            need(B.shape == (d, d), f"a [B] matrix is not {d} x {d}")
    for A in prob.A:
        need(A.shape == (d, d), f"an [A] matrix is not {d} x {d}")
    if prob.T:
        sizes = {T.shape for T in prob.T}
        need(len(sizes) == 1, "the [T] matrices have different sizes")
        if s is not None:
            need(sizes == {(s, s)}, f"the [T] matrices are not {s} x {s}")
        if n is not None:
            need(len(prob.T) == n, f"[T] has {len(prob.T)} matrices, header says n = {n}")
    if prob.kind == "lift":
        need(len(prob.Bq) == len(prob.Cq) and prob.Bq, "[Bq] and [Cq] need the same positive count")
        need(all(B.shape == (d, d) for B in prob.Bq), f"a [Bq] matrix is not {d} x {d}")
        k = {C.shape for C in prob.Cq}
        need(len(k) == 1, "the [Cq] matrices have different sizes")
    if prob.kind == "formula":
        need(bool(prob.formula), "kind formula needs a [formula] section")
        if s is not None:
            for name, M in prob.assign.items():
                need(M.shape == (s, s), f"assignment {name} is not {s} x {s}")


def emit(prob: Problem) -> str:
    """Canonical text; parse(emit(p)) reproduces p and emit is idempotent."""
    out = []
    keys = [k for k in _HEADER_ORDER if k in prob.header]
    keys += sorted(k for k in prob.header if k not in _HEADER_ORDER)
    for k in keys:
        v = prob.header[k]
        out.append(f"{k}: {repr(float(v)) if k in _FLOAT_KEYS else v}")
    if prob.poly:
        out += ["", "[p]"]
        for w, P in prob.poly:
            out.append(f"word: {format_word(w)} | matrix: {format_matrix(P)}")
    for name in ("B", "T", "A", "Bq", "Cq"):
        mats = getattr(prob, name)
        if mats:
            out += ["", f"[{name}]"] + [f"matrix: {format_matrix(M)}" for M in mats]
    if prob.formula:
        out += ["", "[formula]", prob.formula]
    if prob.assign:
        out += ["", "[assign]"] + [f"{k}: {format_matrix(M)}" for k, M in sorted(prob.assign.items())]
    return "\n".join(out) + "\n"


def load(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


__all__ = [
    "KINDS",
    "ParseError",
    "Problem",
    "parse",
    "emit",
    "load",
    "parse_scalar",
    "format_scalar",
    "parse_matrix",
    "format_matrix",
]
