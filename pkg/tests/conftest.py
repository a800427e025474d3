"""
Shared fixtures
"""
import numpy as np
import pytest

from f3dc.services.transform_service import builtin_t3_k4_s2


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def ts():
    return builtin_t3_k4_s2()
