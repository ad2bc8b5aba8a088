#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Growth engine for the operator spans S_n(A), their accumulations T_n(A) and
the vector spans H_n(A, phi), K_n(A, phi).

S_{n+1} is obtained from an orthonormal basis of S_n by multiplying with every
Kraus operator, never by enumerating the d^n words.
"""

import logging
from typing import Iterator, List, Optional

import numpy as np

from qprim.channel import KrausChannel
from qprim.errors import InvalidInput
from qprim.numerics import (DEFAULT_POLICY, SubspaceBasis, TolerancePolicy,
                            orthonormal_extend, span_of)

logger = logging.getLogger(__name__)

__all__ = [
    'SubspaceBasis', 'first_span', 'kraus_scale', 'step_S', 's_bases', 's_dims', 't_dims',
    'h_dim', 'k_dims', 'contains', 'trace_witness',
]


def first_span(ch: KrausChannel, pol: TolerancePolicy = DEFAULT_POLICY) -> SubspaceBasis:
    return span_of(ch.kraus, pol)


def kraus_scale(ch: KrausChannel) -> float:
    """Largest Frobenius norm of a Kraus operator; bounds |A_k B| for every unit B."""
    return max(float(np.linalg.norm(A)) for A in ch.kraus)


def _products(ch: KrausChannel, basis: SubspaceBasis) -> np.ndarray:
    # every A_k @ B_j, shape (d * dim, D, D)
    if basis.dim == 0:
        return np.zeros((0, ch.dim_D, ch.dim_D), dtype=np.complex128)
    kraus = np.array(ch.kraus)
    return np.einsum('kab,jbc->kjac', kraus, basis.stacked()).reshape(-1, ch.dim_D, ch.dim_D)


def step_S(ch: KrausChannel, Sn: SubspaceBasis, pol: TolerancePolicy = DEFAULT_POLICY) -> SubspaceBasis:
    """Orthonormal basis of span{A_k B : B in Sn}."""
    D = ch.dim_D
    if tuple(Sn.element_shape) != (D, D):
        raise InvalidInput(f"Span elements have shape {Sn.element_shape}, channel is {D}x{D}")
    return orthonormal_extend(SubspaceBasis.empty((D, D)), _products(ch, Sn), pol, kraus_scale(ch))


def s_bases(ch: KrausChannel, n_max: int, pol: TolerancePolicy = DEFAULT_POLICY) -> Iterator[SubspaceBasis]:
    """Yield bases of S_1 .. S_{n_max}."""
    basis = first_span(ch, pol)
    for n in range(1, n_max + 1):
        if n > 1:
            basis = step_S(ch, basis, pol)
        yield basis


def s_dims(ch: KrausChannel, n_max: int, pol: TolerancePolicy = DEFAULT_POLICY,
           exact: bool = False) -> List[int]:
    """
    dim S_1 .. dim S_{n_max}.

    Once S_n is the full matrix space every later S_m is too, so the tail is
    filled without further products.
    """
    if n_max < 1:
        raise InvalidInput(f"n_max must be >= 1, got {n_max}")
    if exact:
        from qprim.exact import exact_s_dims
        return exact_s_dims(ch.kraus, n_max)

    full = ch.dim_D ** 2
    dims = []
    for n, basis in enumerate(s_bases(ch, n_max, pol), start=1):
        dims.append(basis.dim)
        if basis.dim == full:
            dims.extend([full] * (n_max - n))
            break
    return dims


def t_dims(ch: KrausChannel, n_max: int, pol: TolerancePolicy = DEFAULT_POLICY) -> List[int]:
    """
    dim T_1 .. dim T_{n_max}, T_n = span of S_m for m <= n.

    T_{n+1} = T_1 + A T_n, so a stall is permanent and ends the computation.
    """
    if n_max < 1:
        raise InvalidInput(f"n_max must be >= 1, got {n_max}")
    s1 = first_span(ch, pol)
    t = s1
    dims = [t.dim]
    while len(dims) < n_max:
        nxt = orthonormal_extend(s1, _products(ch, t), pol, kraus_scale(ch))
        if nxt.dim == t.dim:
            dims.extend([t.dim] * (n_max - len(dims)))
            break
        t = nxt
        dims.append(t.dim)
    return dims


def _normalized_vector(phi, D: int) -> np.ndarray:
    v = np.asarray(phi, dtype=np.complex128).reshape(-1)
    if v.size != D:
        raise InvalidInput(f"Vector has {v.size} entries, expected {D}")
    if not np.all(np.isfinite(v)):
        raise InvalidInput("Vector has non-finite entries")
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise InvalidInput("phi must be a nonzero vector")
    return v / nrm


def _vector_step(ch: KrausChannel, H: SubspaceBasis, pol: TolerancePolicy) -> SubspaceBasis:
    D = ch.dim_D
    images = [A @ h for A in ch.kraus for h in H.vectors]
    return orthonormal_extend(SubspaceBasis.empty((D, 1)), images, pol, kraus_scale(ch))


def h_dim(ch: KrausChannel, phi, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> int:
    """dim S_n(A)|phi>, equal to rank E^n(|phi><phi|)."""
    if n < 0:
        raise InvalidInput(f"n must be >= 0, got {n}")
    D = ch.dim_D
    v = _normalized_vector(phi, D)
    H = orthonormal_extend(SubspaceBasis.empty((D, 1)), [v], pol)
    for _ in range(n):
        H = _vector_step(ch, H, pol)
        if H.dim == 0:
            break
    return H.dim


def k_dims(ch: KrausChannel, phi, n_max: int, pol: TolerancePolicy = DEFAULT_POLICY) -> List[int]:
    """dim K_0 .. dim K_{n_max}, K_n = span of phi and H_m(A, phi) for m <= n."""
    D = ch.dim_D
    v = _normalized_vector(phi, D)
    K = orthonormal_extend(SubspaceBasis.empty((D, 1)), [v], pol)
    dims = [K.dim]
    for _ in range(n_max):
        nxt = orthonormal_extend(K, [A @ h for A in ch.kraus for h in K.vectors], pol, kraus_scale(ch))
        stalled = nxt.dim == K.dim
        K = nxt
        dims.append(K.dim)
        if stalled:
            dims.extend([K.dim] * (n_max + 1 - len(dims)))
            break
    return dims


def contains(basis: SubspaceBasis, M, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    M = np.asarray(M, dtype=np.complex128)
    nrm = np.linalg.norm(M)
    if nrm == 0:
        return True
    residual = np.linalg.norm(M - basis.project(M))
    return residual <= pol.rank_rel * nrm * basis.ambient_dim


def t_basis(ch: KrausChannel, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> SubspaceBasis:
    s1 = first_span(ch, pol)
    t = s1
    for _ in range(n - 1):
        nxt = orthonormal_extend(s1, _products(ch, t), pol, kraus_scale(ch))
        if nxt.dim == t.dim:
            break
        t = nxt
    return t


def trace_witness(ch: KrausChannel, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> Optional[np.ndarray]:
    """
    An element of T_n with nonzero trace, or None when T_n is traceless.

    The projection P of the identity onto T_n satisfies tr(P) = |P|_HS^2, so it
    works whenever any element of T_n has nonzero trace.
    """
    D = ch.dim_D
    P = t_basis(ch, n, pol).project(np.eye(D))
    if abs(np.trace(P)) <= pol.rank_rel * D:
        return None
    return P
