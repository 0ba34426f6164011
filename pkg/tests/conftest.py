import numpy as np
import pytest

import hmcflow as hf


@pytest.fixture(scope="session")
def bump_spec():
    return hf.default_bump_kernel(2.0)


@pytest.fixture(scope="session")
def reduced(bump_spec):
    return hf.reduce_kernels(bump_spec)


@pytest.fixture(scope="session")
def instanton(reduced):
    grid = hf.Phase1DGrid(20.0, 801)
    return hf.compute_instanton(reduced.bar_J, 1.2, grid, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
