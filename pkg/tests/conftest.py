import mpmath as mp
import pytest

from thetalab import kernels
from thetalab.numerics import QuadratureConfig


@pytest.fixture(scope="session")
def cfg30():
    return QuadratureConfig.for_digits(30)


@pytest.fixture(scope="session")
def cfg38():
    return QuadratureConfig.for_digits(38)


@pytest.fixture(scope="session")
def theta_kernel():
    return kernels.theta_kernel()


@pytest.fixture(scope="session")
def gaussian_kernel():
    return kernels.gaussian_poly([1])


@pytest.fixture(scope="session")
def ex312_kernel():
    return kernels.gaussian_poly([15, 0, 1, 0, 1])


@pytest.fixture()
def dps40():
    with mp.mp.workdps(40):
        yield
