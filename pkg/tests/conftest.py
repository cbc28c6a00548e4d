import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from osc_lab.steps import UNIT, StepFunction  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def step_functions(draw, k_max=6, lo=-3.0, hi=3.0):
    k = draw(st.integers(1, k_max))
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    vals = draw(st.lists(st.floats(lo, hi, allow_nan=False), min_size=k, max_size=k))
    lengths = np.array(raw) / sum(raw)
    lengths[-1] = 1.0 - lengths[:-1].sum()
    return StepFunction(UNIT, lengths, vals)


@pytest.fixture
def chi_half():
    """Indicator of [0, 1/2)."""
    return StepFunction(UNIT, [0.5, 0.5], [1.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_phi(rng, k_max=8, lo=-3.0, hi=3.0):
    k = int(rng.integers(1, k_max + 1))
    lengths = rng.dirichlet(np.ones(k))
    lengths[-1] = 1.0 - lengths[:-1].sum()
    return StepFunction(UNIT, lengths, rng.uniform(lo, hi, k))
