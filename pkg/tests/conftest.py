import numpy as np
import pytest

from eepc.systems import KdVParams, gaussian_profile

BURGERS_DX = np.pi / 40
KDV_DX = 0.0808


def burgers_grid():
    n1 = int(round(2 * np.pi / BURGERS_DX))
    return n1, BURGERS_DX, -np.pi + BURGERS_DX * np.arange(1, n1 + 1)


def kdv_grid():
    n1 = int(round(8.0 / KDV_DX))
    return n1, KDV_DX, -4.0 + KDV_DX * np.arange(1, n1 + 1)


@pytest.fixture
def burgers_setup():
    n1, dx, x = burgers_grid()
    return n1, dx, gaussian_profile(x)


@pytest.fixture
def kdv_setup():
    n1, dx, x = kdv_grid()
    return n1, dx, gaussian_profile(x), KdVParams()
