import numpy as np
import pytest

from analytical.fock_oracle import random_hermitian
from core.model import Reservoir
from core.spectral import frame_from_matrices
from security.logger import setup_logging


@pytest.fixture(scope="session", autouse=True)
def console_only_logging():
    setup_logging("WARNING", enable_file_logging=False)


@pytest.fixture
def reservoir():
    return Reservoir(temperature=0.2, chemical_potential=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def symmetric_frame():
    """e1 = e2 = 0, w = 1, only e1 driven at unit rate"""
    return frame_from_matrices(0.5, [[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]])


@pytest.fixture
def random_frame(rng):
    """Factory: single frame with random Hermitian h and dh/ds"""
    def build(n):
        return frame_from_matrices(0.3, random_hermitian(rng, n), random_hermitian(rng, n))
    return build
