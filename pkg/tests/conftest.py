import pytest
from hypothesis import settings

from stlab.family import build_family

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def fam_zz():
    """The workhorse family f = Z, g = Z (delta = -64 Z^3 - 432 Z^2, deg 3)."""
    return build_family([0, 1], [0, 1])


@pytest.fixture(scope="session")
def fam_const_f():
    """f = 1, g = Z: constant f, non-constant j."""
    return build_family([1], [0, 1])
