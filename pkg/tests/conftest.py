import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qprecomp.encode import ParameterSet, Problem, ProblemInstance
from qprecomp.pipeline import precompile
from qprecomp.topology import quito

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Independent matrix oracles, written out by hand; qubit 0 is the most significant bit.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


def RZ(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def RX(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


CX01 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CX10 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def RZZ(t):
    return np.diag(np.exp(-0.5j * t * np.array([1, -1, -1, 1])))


FOUR_NODE_EDGES = {(0, 1), (0, 2), (1, 2), (2, 3)}
K4_MISSING = {(0, 3), (1, 3)}


@pytest.fixture(scope="session")
def k4_template():
    return precompile(Problem.MAXCUT, 4, "all", 1, quito())


@pytest.fixture
def k4_sparse_instance():
    all_pairs = {(a, b) for a in range(4) for b in range(a + 1, 4)}
    return ProblemInstance(Problem.MAXCUT, 4, frozenset(all_pairs - K4_MISSING))


@pytest.fixture
def params1():
    return ParameterSet((0.7,), (0.4,))
