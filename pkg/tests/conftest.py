import pytest

from modxl import ArrayGeometry


@pytest.fixture
def ref_geom():
    return ArrayGeometry.reference()


@pytest.fixture
def small_geom():
    return ArrayGeometry(N=3, M=3, Gamma=5, wavelength=1.0, d=0.5)
