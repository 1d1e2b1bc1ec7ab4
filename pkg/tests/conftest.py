import numpy as np
import pytest
from hypothesis import strategies as st

from synchrolab.automaton import Automaton


@st.composite
def automata(draw, min_n=1, max_n=5, min_k=1, max_k=3, partial=True):
    n = draw(st.integers(min_n, max_n))
    k = draw(st.integers(min_k, max_k))
    lo = -1 if partial else 0
    cells = draw(st.lists(st.integers(lo, n - 1), min_size=n * k, max_size=n * k))
    return Automaton(n, [chr(ord("a") + i) for i in range(k)], np.array(cells).reshape(k, n))


def random_automaton(rng, n, k, partial=False, p_undef=0.15):
    d = rng.integers(0, n, size=(k, n))
    if partial:
        d = np.where(rng.random((k, n)) < p_undef, -1, d)
    return Automaton(n, [chr(ord("a") + i) for i in range(k)], d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
