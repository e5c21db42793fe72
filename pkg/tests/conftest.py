import pathlib

import numpy as np
import pytest

from lorprod.family import ConformalFamily
from lorprod.product import ProductSpacetime
from lorprod.space import BaseSpace, path_space


@pytest.fixture(scope="session")
def DATA_DIR() -> pathlib.Path:
    return pathlib.Path(__file__).parent / "data"


@pytest.fixture
def triangle() -> BaseSpace:
    return BaseSpace(["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 3.0)])


@pytest.fixture
def short_path() -> BaseSpace:
    return path_space(11, length=1.0)


@pytest.fixture
def flat_family(short_path: BaseSpace) -> ConformalFamily:
    return ConformalFamily(short_path, rho=1.0, lapse=1.0)


@pytest.fixture
def flat_spacetime(flat_family: ConformalFamily) -> ProductSpacetime:
    """Flat product over an 11 node path of length 1 with 10 time steps."""
    return ProductSpacetime(flat_family, np.linspace(0.0, 1.0, 11), hop_radius=3)


@pytest.fixture
def wide_flat_spacetime() -> ProductSpacetime:
    """Flat product on a 201 node path with steps of 0.05 in time."""
    fam = ConformalFamily(path_space(201, length=1.0), rho=1.0)
    return ProductSpacetime(fam, np.linspace(0.0, 1.0, 21), hop_radius=10)
