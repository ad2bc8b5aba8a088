"""
Translation-invariant MPS tensors: trace-preserving gauge, injectivity length,
and the rank of X -> sum tr(X A_{i_1} ... A_{i_L}) |i_1 ... i_L>.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from qprim.channel import KrausChannel
from qprim.errors import GaugeFailure, InvalidInput, ResourceLimit
from qprim.indices import kraus_rank_index
from qprim.numerics import (DEFAULT_POLICY, TolerancePolicy, as_matrix, numerical_rank,
                            psd_sqrt_pair)
from qprim.spectral import perron_eigenmatrix

logger = logging.getLogger(__name__)

GAMMA_MAX_ROWS = 10 ** 6


@dataclass(frozen=True)
class MpsTensor:
    phys_d: int
    bond_D: int
    matrices: Tuple[np.ndarray, ...] = field(repr=False)

    @classmethod
    def from_matrices(cls, matrices: Sequence, pol: TolerancePolicy = DEFAULT_POLICY) -> 'MpsTensor':
        if not matrices:
            raise InvalidInput("An MPS tensor needs at least one matrix")
        mats = tuple(as_matrix(A, name=f"MPS matrix {i}") for i, A in enumerate(matrices))
        D = mats[0].shape[0]
        for i, A in enumerate(mats):
            if A.shape != (D, D):
                raise InvalidInput(f"MPS matrix {i} has shape {A.shape}, expected ({D}, {D})")
        tensor = cls(len(mats), D, mats)
        if _spectral_radius(tensor.transfer()) <= pol.rank_rel:
            raise InvalidInput("Transfer map of the tensor is nilpotent")
        return tensor

    def transfer(self) -> np.ndarray:
        return sum(np.kron(A, A.conj()) for A in self.matrices)

    def dual_transfer(self) -> np.ndarray:
        # X -> sum A^dagger X A in row-major vectorization
        return sum(np.kron(A.conj().T, A.T) for A in self.matrices)


def _spectral_radius(T: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(T))))


def normalize_tensor(t: MpsTensor, pol: TolerancePolicy = DEFAULT_POLICY) -> Tuple[MpsTensor, KrausChannel]:
    """
    Gauge the tensor to B_i = M^{1/2} A_i M^{-1/2} / sqrt(lambda) with sum B_i^dagger B_i = 1.

    M is the leading eigenmatrix of the dual transfer map, lambda its spectral radius.
    """
    D = t.bond_D
    T_dual = t.dual_transfer()
    lam = _spectral_radius(T_dual)
    perron = perron_eigenmatrix(T_dual / lam, D, 1.0, pol)
    M = perron.eigenmatrix
    if M is None:
        raise GaugeFailure("Dual transfer map has no Hermitian leading eigenmatrix")
    w = np.linalg.eigvalsh(M)
    if w[0] <= pol.psd_rel * w[-1]:
        raise GaugeFailure(f"Dual fixed point is rank deficient (min eigenvalue {w[0]:.3e})")

    root, inv_root = psd_sqrt_pair(M)
    gauged = [root @ A @ inv_root / np.sqrt(lam) for A in t.matrices]
    channel = KrausChannel.from_kraus(gauged, pol)
    if not channel.is_tp:
        logger.warning(f"Gauged tensor deviates from trace preservation by {channel.tp_deviation:.3e}")
    return MpsTensor(t.phys_d, D, tuple(as_matrix(B) for B in gauged)), channel


def injectivity_length(t: MpsTensor, pol: TolerancePolicy = DEFAULT_POLICY,
                       exact: bool = False) -> Optional[int]:
    """Least L from which Gamma_L is injective (i of the gauged channel); None if never."""
    if exact:
        # spans are gauge invariant, and only the raw entries may be rational
        return kraus_rank_index(KrausChannel.from_kraus(t.matrices, pol), pol, exact=True)
    try:
        _, channel = normalize_tensor(t, pol)
    except GaugeFailure as e:
        logger.warning(f"Gauge normalization failed ({e}); analysing the raw tensor")
        channel = KrausChannel.from_kraus(t.matrices, pol)
    return kraus_rank_index(channel, pol)


def gamma_coefficients(t: MpsTensor, L: int) -> np.ndarray:
    """Rows vec((A_{i_1} ... A_{i_L})^T), so that row . vec(X) = tr(X A_{i_1} ... A_{i_L})."""
    if L < 1:
        raise InvalidInput(f"L must be >= 1, got {L}")
    if t.phys_d ** L > GAMMA_MAX_ROWS:
        raise ResourceLimit(f"phys_d^L = {t.phys_d}^{L} exceeds the limit of {GAMMA_MAX_ROWS} rows")
    D = t.bond_D
    mats = np.array(t.matrices)
    words = mats
    for _ in range(L - 1):
        words = np.einsum('wab,ibc->wiac', words, mats).reshape(-1, D, D)
    return words.transpose(0, 2, 1).reshape(-1, D * D)


def gamma_rank(t: MpsTensor, L: int, pol: TolerancePolicy = DEFAULT_POLICY) -> int:
    return numerical_rank(gamma_coefficients(t, L), pol)


def parent_kernel_dim(t: MpsTensor, L: int, pol: TolerancePolicy = DEFAULT_POLICY) -> int:
    """Dimension of the orthogonal complement of the image of Gamma_L (parent interaction support)."""
    return t.phys_d ** L - gamma_rank(t, L, pol)
