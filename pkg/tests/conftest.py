import numpy as np
import pytest

from hflow.grid import make_grid


@pytest.fixture(scope="session")
def g15():
    return make_grid(15)


@pytest.fixture(scope="session")
def g31():
    return make_grid(31)


@pytest.fixture(scope="session")
def g63():
    return make_grid(63)


@pytest.fixture(scope="session")
def g127():
    return make_grid(127)


def poly_xyxy(X, Y):
    """The reference polynomial field (x, y, xy)."""
    return np.stack([X, Y, X * Y])
