import pytest

from urscode.gf import field
from urscode.urs import construct_urs, subspace_poly


@pytest.fixture(scope="session")
def f16():
    return field(4)


@pytest.fixture(scope="session")
def f256():
    return field(8)


@pytest.fixture(scope="session")
def toy85(f16):
    """URS(16; 8, 5): rows (4,2) x (4,3), the fast-chipkill toy."""
    return construct_urs(f16, subspace_poly(f16, [1]), 4, 2, 1)


@pytest.fixture(scope="session")
def toy84(f16):
    """URS(16; 8, 4): rows (4,2)^2, within-bound toy."""
    return construct_urs(f16, subspace_poly(f16, [1]), 4, 2, 0)


@pytest.fixture(scope="session")
def meta0(f256):
    return construct_urs(f256, subspace_poly(f256, [1, 2, 4]), 10, 8, 0)


@pytest.fixture(scope="session")
def meta8(f256):
    return construct_urs(f256, subspace_poly(f256, [1, 2, 4]), 10, 8, 1)


@pytest.fixture(scope="session")
def meta16(f256):
    return construct_urs(f256, subspace_poly(f256, [1, 2, 4]), 10, 8, 2)
