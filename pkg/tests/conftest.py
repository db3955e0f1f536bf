import pytest

from agcrypt.platforms import (
    AffineSpec,
    affine_platform,
    basilica_platform,
    grigorchuk_first,
)


@pytest.fixture(scope="session")
def grig():
    """First Grigorchuk group with depth-2 relators, oracle-verified once."""
    machine, system = grigorchuk_first(2)
    return machine, system


@pytest.fixture(scope="session")
def grig_machine(grig):
    return grig[0]


@pytest.fixture(scope="session")
def basilica2():
    return basilica_platform(2)


@pytest.fixture(scope="session")
def basilica3():
    return basilica_platform(3)


@pytest.fixture(scope="session")
def odometer():
    machine, system = affine_platform(AffineSpec(2, 1, ((1,),)))
    return machine, system


@pytest.fixture(scope="session")
def affine3():
    machine, system = affine_platform(AffineSpec(2, 1, ((3,),)))
    return machine, system
