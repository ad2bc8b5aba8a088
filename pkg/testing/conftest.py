import os
import sys

import numpy as np
import pytest

# Add the source tree to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from qprim.generators import (amplitude_damping, cyclic_shift_unitary, depolarizing_channel,  # noqa: E402
                              pauli_channel, shift_chord_channel)
from qprim.numerics import DEFAULT_POLICY  # noqa: E402

SAMPLES_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'data', 'samples'))


@pytest.fixture
def pol():
    return DEFAULT_POLICY


@pytest.fixture
def pauli():
    return pauli_channel()


@pytest.fixture
def chord3():
    return shift_chord_channel(3)


@pytest.fixture
def shift3():
    return cyclic_shift_unitary(3)


@pytest.fixture
def depolarizing():
    return depolarizing_channel(2, 1.0)


@pytest.fixture
def damping():
    return amplitude_damping(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def samples_dir():
    return SAMPLES_DIR
