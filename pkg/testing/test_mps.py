import numpy as np
import pytest

from qprim.channel import KrausChannel
from qprim.errors import GaugeFailure, InvalidInput, ResourceLimit
from qprim.generators import PAULI_X, PAULI_Y, PAULI_Z, aklt_tensor, ghz_tensor
from qprim.mps import (MpsTensor, gamma_coefficients, gamma_rank, injectivity_length,
                       normalize_tensor, parent_kernel_dim)
from qprim.spans import s_dims


def random_tensor(seed, phys_d=2, bond_D=2):
    rng = np.random.default_rng(seed)
    return MpsTensor.from_matrices(
        [rng.standard_normal((bond_D, bond_D)) + 1j * rng.standard_normal((bond_D, bond_D))
         for _ in range(phys_d)])


def test_aklt_normalizes_to_pauli_channel():
    gauged, channel = normalize_tensor(aklt_tensor())
    assert channel.is_tp
    for B, P in zip(gauged.matrices, (PAULI_X, PAULI_Y, PAULI_Z)):
        np.testing.assert_allclose(B, P / np.sqrt(3), atol=1e-12)


def test_aklt_injectivity():
    t = aklt_tensor()
    assert injectivity_length(t) == 2
    assert gamma_rank(t, 1) == 3
    assert gamma_rank(t, 2) == 4
    assert parent_kernel_dim(t, 2) == 5


def test_ghz_is_never_injective():
    t = ghz_tensor()
    gauged, _ = normalize_tensor(t)
    for A, B in zip(t.matrices, gauged.matrices):
        np.testing.assert_allclose(A, B, atol=1e-12)
    assert injectivity_length(t) is None
    assert gamma_rank(t, 3) == 2
    assert parent_kernel_dim(t, 3) == 6


def test_gamma_coefficients_pair_with_trace():
    t = random_tensor(3, phys_d=2, bond_D=2)
    X = np.array([[1.0, 2.0], [0.5j, -1.0]])
    rows = gamma_coefficients(t, 2)
    A = t.matrices
    expected = [np.trace(X @ A[i] @ A[j]) for i in range(2) for j in range(2)]
    np.testing.assert_allclose(rows @ X.reshape(-1), expected, atol=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_gamma_rank_equals_span_dimension(seed):
    t = random_tensor(seed, phys_d=2, bond_D=3)
    dims = s_dims(KrausChannel.from_kraus(t.matrices), 4)
    assert [gamma_rank(t, L) for L in range(1, 5)] == dims


@pytest.mark.parametrize("seed", range(20))
def test_gauge_preserves_gamma_ranks(seed):
    t = random_tensor(100 + seed, phys_d=2, bond_D=2)
    gauged, _ = normalize_tensor(t)
    assert [gamma_rank(gauged, L) for L in range(1, 4)] == [gamma_rank(t, L) for L in range(1, 4)]


def test_first_full_gamma_is_injectivity_length():
    t = random_tensor(7, phys_d=2, bond_D=3)
    length = injectivity_length(t)
    ranks = [gamma_rank(t, L) for L in range(1, length + 1)]
    assert ranks[-1] == 9
    assert all(r < 9 for r in ranks[:-1])


def test_gauge_failure_falls_back_to_raw_tensor():
    t = MpsTensor.from_matrices([np.diag([1.0, 0.5])])
    with pytest.raises(GaugeFailure):
        normalize_tensor(t)
    assert injectivity_length(t) is None


def test_exact_injectivity():
    assert injectivity_length(aklt_tensor(), exact=True) == 2


def test_tensor_validation():
    with pytest.raises(InvalidInput):
        MpsTensor.from_matrices([np.array([[0.0, 1.0], [0.0, 0.0]])])
    with pytest.raises(InvalidInput):
        MpsTensor.from_matrices([np.eye(2), np.eye(3)])
    with pytest.raises(InvalidInput):
        MpsTensor.from_matrices([])
    with pytest.raises(InvalidInput):
        gamma_rank(aklt_tensor(), 0)


def test_gamma_row_limit():
    with pytest.raises(ResourceLimit):
        gamma_coefficients(aklt_tensor(), 13)
