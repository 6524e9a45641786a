"""
Shared pytest fixtures for the Mather Hull test modules
"""
import math

import numpy as np
import pytest

from models import make_shiftset, standard_fk
from schemas import SolveOptions
from solvers import minimize
from utils import make_rng

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(12345)


@pytest.fixture(scope="session")
def golden_89():
    """Golden-mean approximant 55/89"""
    return make_shiftset([GOLDEN], 89)


@pytest.fixture(scope="session")
def pinned_minimizer_89(golden_89):
    """Converged K=2 minimizer on the 55/89 grid"""
    result = minimize(standard_fk(2.0), golden_89, None, SolveOptions(residual_tol=1e-10, max_steps=100000))
    assert result.converged
    return result
