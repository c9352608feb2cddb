# /thetaflex/tests/conftest.py

import numpy as np
import pytest

from modules.kp import flex_fit
from modules.theta import PeriodMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def omega_i():
    return PeriodMatrix([[1j]])


@pytest.fixture(scope="session")
def genus2():
    # Nierozkładalna macierz z λ_min = 1
    return PeriodMatrix([[1.69j, 0.69j], [0.69j, 1.69j]])


@pytest.fixture(scope="session")
def genus2_decomposable():
    return PeriodMatrix([[1j, 0], [0, 0.2 + 1.3j]])


@pytest.fixture(scope="session")
def fitted_elliptic(omega_i):
    return flex_fit(omega_i, starts=4, seed=0)


@pytest.fixture(scope="session")
def fitted_genus2(genus2):
    return flex_fit(genus2, starts=8, seed=0)
