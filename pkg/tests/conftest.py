import pytest

from rollsim import _core


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile (or load the disk cache) before anything is timed
    _core.warmup()
