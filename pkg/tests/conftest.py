import numpy as np
import pytest

from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.hardy import HardyFunction
from blaschke_cyclicity.core.policy import NumericPolicy


@pytest.fixture
def policy():
    return NumericPolicy()


@pytest.fixture
def small_policy():
    """A coarse grid for tests that only need a handful of coefficients."""
    return NumericPolicy(truncation_degree=64, grid_size=256)


@pytest.fixture
def z2(policy):
    return BlaschkeProduct.monomial(2, policy)


@pytest.fixture
def two_zeros(policy):
    return BlaschkeProduct((0.5, -0.4), policy=policy)


@pytest.fixture
def degree3(policy):
    """Zeros 0 (double) and 0.5."""
    return BlaschkeProduct((0j, 0.5), (2, 1), policy=policy)


@pytest.fixture
def cubic(policy):
    """f = 3 + 2z + z^2 + 4z^3."""
    return HardyFunction.polynomial([3, 2, 1, 4], policy)


@pytest.fixture
def rational(policy):
    """Two poles at radius 2 and 2.5."""
    return HardyFunction.rational([2.0, -2.5j], [1.0, 0.5 + 0.5j], 1.0, policy)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
