"""
Independent reference computations for the test-suite.

Nothing here touches the span engine: S_n is built by enumerating all d^n
words and the classical exponent by walking reachable sets.
"""

import itertools
from functools import reduce

import numpy as np


def brute_force_s_dim(kraus, n: int, tol: float = 1e-9) -> int:
    """Rank of the d^n products A_{k_1} ... A_{k_n}, flattened."""
    rows = [reduce(np.matmul, word).reshape(-1) for word in itertools.product(kraus, repeat=n)]
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def brute_force_s_dims(kraus, n_max: int):
    return [brute_force_s_dim(kraus, n) for n in range(1, n_max + 1)]


def walk_exponent(adjacency, n_max: int = None):
    """
    Least n such that every state reaches every state in exactly n steps.

    adjacency[i, j] true means an arc j -> i (column convention).
    """
    adj = np.asarray(adjacency, dtype=bool)
    D = adj.shape[0]
    n_max = n_max or D * D
    successors = {j: {i for i in range(D) if adj[i, j]} for j in range(D)}
    reach = {j: {j} for j in range(D)}
    for n in range(1, n_max + 1):
        reach = {j: set().union(*(successors[k] for k in reach[j])) for j in range(D)}
        if all(len(r) == D for r in reach.values()):
            return n
    return None


def rank_of_output(kraus, phi, n: int, tol: float = 1e-9) -> int:
    """rank E^n(|phi><phi|) by repeated application of the map."""
    phi = np.asarray(phi, dtype=np.complex128)
    rho = np.outer(phi, phi.conj())
    for _ in range(n):
        rho = sum(A @ rho @ A.conj().T for A in kraus)
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return int(np.sum(w > tol * max(w[-1], 1e-300)))


def random_unitary(rng, n: int) -> np.ndarray:
    """Haar-distributed n x n unitary from the QR of a complex Gaussian matrix."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def conjugated(kraus, U: np.ndarray):
    """Kraus operators U A_k U^dagger of the map X -> U E(U^dagger X U) U^dagger."""
    return [U @ np.asarray(A) @ U.conj().T for A in kraus]
