import pytest

from app.models.counterexample import CounterexampleParams
from app.models.ideals import IdealSpec
from app.models.sets import squares


@pytest.fixture(scope="module")
def z():
    return IdealSpec.z()


@pytest.fixture(scope="module")
def fin():
    return IdealSpec.fin()


@pytest.fixture(scope="module")
def params6():
    """The block construction on the squares with six blocks (rows up to 1743)."""
    return CounterexampleParams(squares(), 6)


@pytest.fixture(scope="module")
def params8():
    return CounterexampleParams(squares(), 8)
