from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tsirelson_greedy.finvec import FinVec

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 8))
nonzero_rationals = rationals.filter(lambda q: q != 0)


@st.composite
def rational_vectors(draw, max_index=8, min_size=0, max_size=None):
    idx = draw(st.lists(st.integers(1, max_index), min_size=min_size, max_size=max_size or max_index, unique=True))
    vals = draw(st.lists(nonzero_rationals, min_size=len(idx), max_size=len(idx)))
    return FinVec(dict(zip(idx, vals)))


@st.composite
def float_vectors(draw, max_index=8, min_size=1):
    idx = draw(st.lists(st.integers(1, max_index), min_size=min_size, max_size=max_index, unique=True))
    vals = draw(st.lists(st.floats(-10, 10, allow_nan=False).filter(lambda x: abs(x) > 1e-3),
                         min_size=len(idx), max_size=len(idx)))
    return FinVec(dict(zip(idx, vals)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
