import pytest

from helmcmt.coupling import build_coupling
from helmcmt.model import FictitiousDisk, MediumSpec


@pytest.fixture(scope="session")
def bubble():
    return MediumSpec.air_bubble(1.0)


@pytest.fixture(scope="session")
def bubble_monopole(bubble):
    """Air bubble ``a = 1`` in ``R = 2``, monopole block, truncation constant 1.5."""
    return build_coupling(bubble, FictitiousDisk(2.0), lmax=0, C=1.5)


@pytest.fixture(scope="session")
def homogeneous_full():
    """Homogeneous disk ``R = 1`` with ``C = 1.5`` and orders up to 20."""
    return build_coupling(MediumSpec.homogeneous(), FictitiousDisk(1.0), lmax=20, C=1.5)


@pytest.fixture(scope="session")
def hard_core():
    medium = MediumSpec.sound_hard(1.0)
    return medium, build_coupling(medium, FictitiousDisk(1.5), lmax=14, C=1.5)
