import numpy as np
import pytest

from qprim.errors import InvalidInput
from qprim.exact import (ExactSpans, exact_d2_certificate, exact_kraus_rank_index, exact_rank,
                         exact_s_dims, rationalize)
from qprim.generators import amplitude_damping, shift_chord_channel
from qprim.indices import general_cap


def test_exact_rank():
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[1, 1j], [1j, -1]]) == 1
    assert exact_rank(np.eye(3)) == 3
    assert exact_rank(np.zeros((2, 2))) == 0


def test_rationalize_rescales_by_largest_entry(pauli):
    M = rationalize(pauli.kraus[1])
    entries = {complex(x) for row in M.to_Matrix().tolist() for x in row}
    assert entries <= {0, 1, -1, 1j, -1j}


def test_irrational_entries_are_refused():
    with pytest.raises(InvalidInput):
        exact_s_dims(amplitude_damping(0.5).kraus, 2)


def test_exact_spans(pauli):
    spans = ExactSpans(pauli.kraus)
    first = spans.first()
    assert len(first) == 3
    assert len(spans.step(first)) == 4
    assert len(spans.union(first, first)) == 3
    assert exact_s_dims(pauli.kraus, 3) == [3, 4, 4]


@pytest.mark.parametrize("D", [2, 3, 4])
def test_exact_shift_chord_index(D):
    kraus = shift_chord_channel(D).kraus
    assert exact_kraus_rank_index(kraus, general_cap(D, 2)) == D * D - D


def test_exact_unitary_never_full():
    U = np.roll(np.eye(3), 1, axis=0)
    assert exact_kraus_rank_index([U], general_cap(3, 1)) is None


def test_exact_d2_certificate(pauli):
    assert exact_d2_certificate(pauli.kraus, 1)
    # a single diagonal operator leaves phi = e_0 with a one-dimensional image
    assert not exact_d2_certificate([np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [0.0, 0.0]])], 1)
    with pytest.raises(InvalidInput):
        exact_d2_certificate(shift_chord_channel(3).kraus, 1)
