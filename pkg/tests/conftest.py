import math

import numpy as np
import pytest
from hypothesis import strategies as st

from krein.acceptance import random_string, rng
from krein.strings import StieltjesString


@pytest.fixture
def one_atom():
    return StieltjesString([0.0], [2.0], 1.0)


@pytest.fixture
def three_atoms():
    return StieltjesString([-3.0, -1.0, -0.2], [0.5, 1.5, 0.7], 0.5)


@pytest.fixture
def strings():
    r = rng(7)
    return [random_string(r) for _ in range(20)]


@st.composite
def atomic_strings(draw, max_atoms=8, finite_l=True):
    n = draw(st.integers(1, max_atoms))
    gaps = draw(st.lists(st.floats(0.05, 3.0), min_size=n, max_size=n))
    start = draw(st.floats(-10.0, 0.0))
    x = start + np.cumsum(gaps)
    w = draw(st.lists(st.floats(0.05, 5.0), min_size=n, max_size=n))
    l = float(x[-1] + draw(st.floats(0.1, 3.0))) if finite_l else math.inf
    return StieltjesString(x, w, l)
