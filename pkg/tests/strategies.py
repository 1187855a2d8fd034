"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from ncelim import numlin
from ncelim.ncpoly import random_poly, random_tuple

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small = st.integers(min_value=1, max_value=3)


@st.composite
def hermitian(draw, size=None):
    s = draw(small) if size is None else size
    return numlin.random_hermitian(s, np.random.default_rng(draw(seeds)))


@st.composite
def poly_and_tuple(draw, max_degree=2):
    rng = np.random.default_rng(draw(seeds))
    d, s, n = draw(small), draw(small), draw(st.integers(1, 2))
    deg = draw(st.integers(0, max_degree))
    return random_poly(d, n, deg, rng), random_tuple(n, s, rng), rng
