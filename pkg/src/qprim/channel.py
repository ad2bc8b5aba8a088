#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Completely positive maps in Kraus form.

Conventions:
- E(X) = sum_k A_k X A_k^dagger on D x D matrices
- row-major vectorization, so the transfer matrix is sum_k A_k (x) conj(A_k)
- stochastic matrices are column-stochastic (p' = S p)
- trace preservation is a recorded flag, not a requirement
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from qprim.errors import InvalidInput
from qprim.numerics import DEFAULT_POLICY, TolerancePolicy, as_matrix, numerical_rank

logger = logging.getLogger(__name__)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def canonical_kraus(ops: Sequence[np.ndarray], pol: TolerancePolicy = DEFAULT_POLICY) -> List[np.ndarray]:
    """
    Minimal Kraus set from the eigendecomposition of sum_k vec(A_k) vec(A_k)^dagger.

    The returned operators are Hilbert-Schmidt orthogonal, implement the same map,
    and number at most D^2. Eigenvalues below psd_rel * max are discarded.
    """
    D = ops[0].shape[0]
    V = np.array([np.asarray(A).reshape(-1) for A in ops])
    C = V.T @ V.conj()
    w, U = np.linalg.eigh((C + C.conj().T) / 2)
    if w[-1] <= 0:
        return []
    keep = np.flatnonzero(w > pol.psd_rel * w[-1])[::-1]
    return [np.sqrt(w[k]) * U[:, k].reshape(D, D) for k in keep]


@dataclass(frozen=True)
class ValidationReport:
    is_cp: bool
    is_tp: bool
    tp_deviation: float
    d_independent: int

    def to_dict(self) -> dict:
        return {
            'is_cp': self.is_cp,
            'is_tp': self.is_tp,
            'tp_deviation': self.tp_deviation,
            'd_independent': self.d_independent,
        }


@dataclass(frozen=True)
class KrausChannel:
    """CP map on D x D matrices given by linearly independent Kraus operators"""
    dim_D: int
    kraus: Tuple[np.ndarray, ...] = field(repr=False)
    is_tp: bool
    tp_deviation: float

    @property
    def d(self) -> int:
        return len(self.kraus)

    @classmethod
    def from_kraus(cls, kraus: Sequence, pol: TolerancePolicy = DEFAULT_POLICY,
                   tp: Optional[bool] = None) -> 'KrausChannel':
        """
        Build a channel, reducing dependent Kraus lists to a canonical independent set.

        Independent inputs are kept verbatim so that exact-mode analysis sees the
        caller's entries. `tp=True` asserts trace preservation and fails otherwise.
        """
        if kraus is None or len(kraus) == 0:
            raise InvalidInput("A channel needs at least one Kraus operator")
        ops = [as_matrix(A, name=f"Kraus operator {k}") for k, A in enumerate(kraus)]
        D = ops[0].shape[0]
        for k, A in enumerate(ops):
            if A.shape != (D, D):
                raise InvalidInput(f"Kraus operator {k} has shape {A.shape}, expected ({D}, {D})")

        stacked = np.array([A.reshape(-1) for A in ops])
        if numerical_rank(stacked, pol) < len(ops) or not np.any(stacked):
            reduced = canonical_kraus(ops, pol)
            if not reduced:
                raise InvalidInput("All Kraus operators vanish")
            logger.debug(f"Reduced {len(ops)} Kraus operators to {len(reduced)} independent ones")
            ops = reduced

        deviation = tp_deviation(ops)
        is_tp = deviation <= pol.tp_abs
        if tp and not is_tp:
            raise InvalidInput(f"Channel declared trace preserving but deviates by {deviation:.3e}")
        return cls(D, tuple(_freeze(A) for A in ops), is_tp, deviation)


def tp_deviation(ops: Sequence[np.ndarray]) -> float:
    D = ops[0].shape[0]
    S = sum(A.conj().T @ A for A in ops)
    return float(np.linalg.norm(S - np.eye(D), 2))


ChannelLike = Union[KrausChannel, Sequence]


def validate(ch: ChannelLike, pol: TolerancePolicy = DEFAULT_POLICY) -> ValidationReport:
    """Check trace preservation and count independent Kraus operators."""
    if not isinstance(ch, KrausChannel):
        ch = KrausChannel.from_kraus(ch, pol)
    deviation = tp_deviation(ch.kraus)
    return ValidationReport(
        is_cp=True,
        is_tp=deviation <= pol.tp_abs,
        tp_deviation=deviation,
        d_independent=ch.d,
    )


def apply(ch: KrausChannel, X) -> np.ndarray:
    X = as_matrix(X, name='input operator')
    if X.shape != (ch.dim_D, ch.dim_D):
        raise InvalidInput(f"Input has shape {X.shape}, channel acts on {ch.dim_D}x{ch.dim_D}")
    return sum(A @ X @ A.conj().T for A in ch.kraus)


@dataclass(frozen=True)
class ChoiMatrix:
    dim_D: int
    matrix: np.ndarray = field(repr=False)


def choi(ch: KrausChannel) -> ChoiMatrix:
    """(id (x) E)(Omega) with Omega = sum_ij |ii><jj|."""
    D = ch.dim_D
    # (1 (x) A)|Omega> has component (i, a) equal to A[a, i]
    vecs = np.array([A.T.reshape(-1) for A in ch.kraus])
    omega = vecs.T @ vecs.conj()
    return ChoiMatrix(D, _freeze(omega))


def transfer_matrix(ch: KrausChannel) -> np.ndarray:
    """D^2 x D^2 matrix of X -> E(X) on row-major vectorized operators."""
    T = sum(np.kron(A, A.conj()) for A in ch.kraus)
    return _freeze(T)


def compose(outer: KrausChannel, inner_ops: Sequence[np.ndarray],
            pol: TolerancePolicy = DEFAULT_POLICY) -> List[np.ndarray]:
    """Canonical Kraus set of E_outer o E_inner."""
    return canonical_kraus([A @ K for A in outer.kraus for K in inner_ops], pol)


def power_reduced(ch: KrausChannel, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    """E^n with at most D^2 Kraus operators drawn from the Choi eigendecomposition."""
    if n < 1:
        raise InvalidInput(f"Channel power must be >= 1, got {n}")
    if n == 1:
        return ch
    ops = list(ch.kraus)
    for _ in range(n - 1):
        ops = compose(ch, ops, pol)
        if not ops:
            break
    if not ops:
        # nilpotent map: E^n = 0, represented by a single zero Kraus operator
        ops = [np.zeros((ch.dim_D, ch.dim_D), dtype=np.complex128)]
        return KrausChannel(ch.dim_D, (_freeze(ops[0]),), False, tp_deviation(ops))
    deviation = tp_deviation(ops)
    return KrausChannel(ch.dim_D, tuple(_freeze(A) for A in ops), deviation <= pol.tp_abs, deviation)


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic matrix: entries[i, j] is the probability of j -> i"""
    dim_D: int
    entries: np.ndarray = field(repr=False)

    @classmethod
    def from_entries(cls, entries, pol: TolerancePolicy = DEFAULT_POLICY) -> 'StochasticMatrix':
        try:
            arr = np.array(entries, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise InvalidInput("Stochastic matrix entries must be real numbers") from e
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
            raise InvalidInput(f"Stochastic matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("Stochastic matrix has non-finite entries")
        if np.any(arr < 0):
            raise InvalidInput("Stochastic matrix has negative entries")
        sums = arr.sum(axis=0)
        bad = np.flatnonzero(np.abs(sums - 1) > pol.tp_abs)
        if bad.size:
            raise InvalidInput(f"Columns {bad.tolist()} do not sum to 1 (sums {sums[bad].tolist()})")
        arr.setflags(write=False)
        return cls(arr.shape[0], arr)

    def support(self) -> np.ndarray:
        return self.entries > 0


def classical_embed(S: StochasticMatrix, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    """Kraus operators sqrt(S[i, j]) |i><j|, one per positive entry."""
    D = S.dim_D
    ops = []
    for i, j in zip(*np.nonzero(S.entries > 0)):
        A = np.zeros((D, D), dtype=np.complex128)
        A[i, j] = np.sqrt(S.entries[i, j])
        ops.append(A)
    return KrausChannel.from_kraus(ops, pol)


def is_classical_support(ch: KrausChannel, pol: TolerancePolicy = DEFAULT_POLICY) -> Optional[np.ndarray]:
    """
    Boolean adjacency (to, from) when S_1 is spanned by matrix units, else None.

    S_1 lies inside the span of the units on its joint support; equality holds
    exactly when the support size equals d.
    """
    scale = max(float(np.abs(A).max()) for A in ch.kraus)
    support = np.zeros((ch.dim_D, ch.dim_D), dtype=bool)
    for A in ch.kraus:
        support |= np.abs(A) > pol.rank_rel * scale * ch.dim_D
    if int(support.sum()) != ch.d:
        return None
    return support
