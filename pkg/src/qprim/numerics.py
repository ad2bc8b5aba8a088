#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dense complex linear algebra kernel.

Every rank decision in the package goes through this module so that a single
TolerancePolicy governs the whole analysis:
- numerical rank from singular values
- sorted, phase-fixed eigendecompositions
- incremental Gram-Schmidt extension of operator/vector spans
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from qprim.errors import InvalidInput, NumericalFailure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TolerancePolicy:
    """Relative cutoffs used for every rank, positivity and spectrum decision"""
    rank_rel: float = 1e-10
    psd_rel: float = 1e-9
    tp_abs: float = 1e-9
    peripheral_rel: float = 1e-8

    def __post_init__(self):
        for name in ('rank_rel', 'psd_rel', 'tp_abs', 'peripheral_rel'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0 < value < 1):
                raise InvalidInput(f"Tolerance {name} must lie in (0, 1), got {value!r}")

    def with_overrides(self, **kwargs) -> 'TolerancePolicy':
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        return {
            'rank_rel': self.rank_rel,
            'psd_rel': self.psd_rel,
            'tp_abs': self.tp_abs,
            'peripheral_rel': self.peripheral_rel,
        }


DEFAULT_POLICY = TolerancePolicy()


def as_matrix(M, name: str = 'matrix') -> np.ndarray:
    """Coerce to a read-only complex128 2-D array with finite entries."""
    try:
        arr = np.array(M, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"{name} is not a numeric array") from e
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInput(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def numerical_rank(M, pol: TolerancePolicy = DEFAULT_POLICY) -> int:
    """
    Count singular values above rank_rel * sigma_max * max(rows, cols).

    Returns 0 for the zero matrix.
    """
    arr = as_matrix(M)
    try:
        s = linalg.svd(arr, compute_uv=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.error(f"SVD failed on {arr.shape} matrix: {e}")
        raise NumericalFailure("SVD did not converge") from e
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = pol.rank_rel * s[0] * max(arr.shape)
    return int(np.count_nonzero(s > cutoff))


def null_space(M, pol: TolerancePolicy = DEFAULT_POLICY) -> Tuple[np.ndarray, np.ndarray]:
    """Right and left kernels of M (columns orthonormal), using the rank cutoff."""
    arr = as_matrix(M)
    try:
        U, s, Vh = linalg.svd(arr)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailure("SVD did not converge") from e
    rank = numerical_rank(arr, pol)
    right = Vh[rank:].conj().T
    left = U[:, rank:]
    return right, left


def _phase_fix(v: np.ndarray, rel: float) -> np.ndarray:
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return v
    v = v / nrm
    mags = np.abs(v)
    idx = np.flatnonzero(mags > rel * mags.max())[0]
    return v * (np.conj(v[idx]) / mags[idx])


def eigen(M, pol: TolerancePolicy = DEFAULT_POLICY) -> List[Tuple[complex, np.ndarray]]:
    """
    Eigenpairs sorted by descending modulus, then real part, then imaginary part.

    Eigenvectors are unit norm with their first nonzero component real positive.
    """
    arr = as_matrix(M)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"eigen requires a square matrix, got {arr.shape}")
    try:
        w, V = np.linalg.eig(arr)
    except np.linalg.LinAlgError as e:
        logger.error(f"Eigendecomposition failed on {arr.shape} matrix: {e}")
        raise NumericalFailure("eigendecomposition did not converge") from e
    # rounding keeps the order stable for eigenvalues equal up to roundoff
    order = np.lexsort((-np.round(w.imag, 12), -np.round(w.real, 12), -np.round(np.abs(w), 12)))
    return [(complex(w[k]), _phase_fix(V[:, k], pol.rank_rel)) for k in order]


@dataclass(frozen=True)
class SubspaceBasis:
    """
    Orthonormal basis (Hilbert-Schmidt inner product) of a span of equally shaped arrays.

    The basis is stored as the rows of `vectors`, each a flattened element.
    """
    element_shape: Tuple[int, int]
    vectors: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls, element_shape: Tuple[int, int]) -> 'SubspaceBasis':
        rows, cols = element_shape
        vecs = np.zeros((0, rows * cols), dtype=np.complex128)
        vecs.setflags(write=False)
        return cls(tuple(element_shape), vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.element_shape[0] * self.element_shape[1]

    @property
    def basis(self) -> List[np.ndarray]:
        return [v.reshape(self.element_shape) for v in self.vectors]

    def stacked(self) -> np.ndarray:
        """Basis elements as an array of shape (dim, rows, cols)."""
        return self.vectors.reshape((self.dim,) + tuple(self.element_shape))

    def project(self, M) -> np.ndarray:
        vec = np.asarray(M, dtype=np.complex128).reshape(-1)
        return (self.vectors.T @ (self.vectors.conj() @ vec)).reshape(self.element_shape)

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim


def orthonormal_extend(basis: SubspaceBasis, candidates: Iterable,
                       pol: TolerancePolicy = DEFAULT_POLICY,
                       scale: Optional[float] = None) -> SubspaceBasis:
    """
    Extend `basis` by the Gram-Schmidt residuals of `candidates`.

    A candidate contributes a new direction only when its residual norm exceeds
    rank_rel * ref * (rows * cols), where ref is the largest of `scale` and the
    candidate norms in this call. Products that vanish exactly but carry
    roundoff are therefore dropped, as singular values are in numerical_rank.
    Projection is done twice per candidate to keep the basis orthonormal to
    working precision.
    """
    shape = tuple(basis.element_shape)
    n = shape[0] * shape[1]

    flat = []
    for cand in candidates:
        c = np.asarray(cand, dtype=np.complex128)
        if c.shape != shape and not (c.ndim == 1 and c.size == n and shape[1] == 1):
            raise InvalidInput(f"Candidate shape {c.shape} does not match basis shape {shape}")
        c = c.reshape(-1)
        if not np.all(np.isfinite(c)):
            raise InvalidInput("Candidate has non-finite entries")
        flat.append(c)
    if scale is not None and not (np.isfinite(scale) and scale >= 0):
        raise InvalidInput(f"scale must be a finite nonnegative number, got {scale!r}")

    ref = max([np.linalg.norm(c) for c in flat] + [scale or 0.0])
    cutoff = pol.rank_rel * ref * n
    rows = [v for v in basis.vectors]
    Q = basis.vectors
    grew = False

    for c in flat:
        if len(rows) == n or ref == 0.0:
            break
        if grew:
            Q = np.array(rows)
            grew = False
        r = c
        for _ in range(2):
            if Q.shape[0]:
                r = r - Q.T @ (Q.conj() @ r)
        rn = np.linalg.norm(r)
        if rn > cutoff:
            rows.append(r / rn)
            grew = True

    vecs = np.array(rows, dtype=np.complex128).reshape(len(rows), n)
    vecs.setflags(write=False)
    return SubspaceBasis(shape, vecs)


def span_of(elements: Sequence, pol: TolerancePolicy = DEFAULT_POLICY) -> SubspaceBasis:
    """Orthonormal basis of the span of a nonempty list of equally shaped arrays."""
    first = np.asarray(elements[0])
    shape = first.shape if first.ndim == 2 else (first.size, 1)
    return orthonormal_extend(SubspaceBasis.empty(shape), elements, pol)


def psd_sqrt_pair(M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """M^{1/2} and M^{-1/2} of a Hermitian positive definite matrix."""
    w, U = np.linalg.eigh((M + M.conj().T) / 2)
    root = (U * np.sqrt(w)) @ U.conj().T
    inv_root = (U / np.sqrt(w)) @ U.conj().T
    return root, inv_root
