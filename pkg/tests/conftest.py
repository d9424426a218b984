import pytest

from spinengine import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # jit compilation happens once here, so individual test timings stay honest
    kernels.warm_up()
