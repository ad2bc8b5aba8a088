#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Primitivity indices.

- i(A): first n with S_n(A) the full matrix space, searched up to the
  unconditional cap (D^2 - d + 1) D^2
- q(E): reported as a certified bracket [q_lower, q_upper]
- p(A): classical exponent by boolean matrix powering
- span witnesses selecting the applicable quantum Wielandt bound
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Union

import numpy as np

from qprim.channel import KrausChannel, StochasticMatrix, is_classical_support
from qprim.errors import InvalidInput, NotPrimitiveError
from qprim.numerics import (DEFAULT_POLICY, SubspaceBasis, TolerancePolicy,
                            numerical_rank, orthonormal_extend)
from qprim.spans import first_span, h_dim, s_bases, step_S

logger = logging.getLogger(__name__)

DEFAULT_EFFORT = 64
DEFAULT_SAMPLES = 256
WITNESS_SIGMA = 1e-7
MAX_SWEEPS = 300
NILPOTENT_ROUNDOFF = float(np.finfo(float).eps)


class Thm1Case(str, Enum):
    GENERAL = 'General'
    INVERTIBLE = 'InvertibleInSpan'
    NONZERO_EIG = 'NonInvertibleNonzeroEig'
    NOT_APPLICABLE = 'NotApplicable'


class WitnessKind(str, Enum):
    INVERTIBLE = 'Invertible'
    NONZERO_EIG = 'NonInvertibleNonzeroEig'
    UNKNOWN = 'Unknown'


def general_cap(D: int, d: int) -> int:
    return (D * D - d + 1) * D * D


def thm1_bound(case: Thm1Case, D: int, d: int) -> int:
    if case is Thm1Case.INVERTIBLE:
        return D * D - d + 1
    if case is Thm1Case.NONZERO_EIG:
        return D * D
    return general_cap(D, d)


def kraus_rank_index(ch: KrausChannel, pol: TolerancePolicy = DEFAULT_POLICY,
                     exact: bool = False) -> Optional[int]:
    """
    min{n : dim S_n = D^2}, or None when the channel never reaches full Kraus rank.

    None is certified either by reaching the general cap or by T_n stalling
    below D^2 (S_n lies inside T_n for every n).
    """
    D, d = ch.dim_D, ch.d
    cap = general_cap(D, d)
    if exact:
        from qprim.exact import exact_kraus_rank_index
        return exact_kraus_rank_index(ch.kraus, cap)

    full = D * D
    s = first_span(ch, pol)
    t = s
    for n in range(1, cap + 1):
        if n > 1:
            s = step_S(ch, s, pol)
            if not t.is_full():
                t_next = orthonormal_extend(t, s.basis, pol)
                if t_next.dim == t.dim:
                    logger.info(f"T_n stalled at dimension {t.dim} < {full} (n={n}); never full")
                    return None
                t = t_next
        if s.dim == full:
            logger.info(f"S_n full at n={n}")
            return n
    logger.info(f"Cap {cap} reached without full Kraus rank")
    return None


def classical_exponent(M: Union[StochasticMatrix, np.ndarray, Sequence]) -> Optional[int]:
    """
    Least n with every entry of the boolean n-th power positive, or None past D^2 - 2D + 2.
    """
    if isinstance(M, StochasticMatrix):
        P = M.support()
    else:
        arr = np.asarray(M)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
            raise InvalidInput(f"Expected a square matrix, got shape {arr.shape}")
        if arr.dtype != bool and np.any(arr < 0):
            raise InvalidInput("Adjacency matrix has negative entries")
        P = arr > 0
    D = P.shape[0]
    cap = D * D - 2 * D + 2
    P = P.astype(np.int64)
    power = P.copy()
    for n in range(1, cap + 1):
        if power.all():
            return n
        power = (power @ P > 0).astype(np.int64)
    return None


@dataclass(frozen=True)
class SpanWitness:
    kind: WitnessKind
    witness_coeffs: Optional[List[complex]] = None
    witness_eigenvalue: Optional[complex] = None

    def to_dict(self) -> dict:
        return {
            'kind': self.kind.value,
            'witness_coeffs': self.witness_coeffs,
            'witness_eigenvalue': self.witness_eigenvalue,
        }


def _has_nonzero_eigenvalue(M: np.ndarray, pol: TolerancePolicy) -> Optional[complex]:
    D = M.shape[0]
    scale = np.linalg.norm(M, 2)
    if scale == 0:
        return None
    # nilpotent iff M^D = 0; only a power at roundoff level is rejected here, since
    # eigenvalues of nilpotent matrices carry errors of order eps^(1/D)
    if np.linalg.norm(np.linalg.matrix_power(M / scale, D), 2) <= NILPOTENT_ROUNDOFF * D * D:
        return None
    w = np.linalg.eigvals(M)
    lead = w[np.argmax(np.abs(w))]
    if abs(lead) <= D * pol.rank_rel * scale:
        return None
    return complex(lead)


def span_witness(ch: KrausChannel, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                 pol: TolerancePolicy = DEFAULT_POLICY) -> SpanWitness:
    """
    Look for an invertible element of S_1, else one with a nonzero eigenvalue.

    The Kraus operators themselves are tried first, then `samples` seeded
    Gaussian combinations. Unknown is not a proof of nilpotency.
    """
    if samples < 1:
        raise InvalidInput(f"samples must be >= 1, got {samples}")
    D, d = ch.dim_D, ch.d
    rng = np.random.default_rng(seed)
    kraus = np.array(ch.kraus)

    trials = [np.eye(d)[k].astype(np.complex128) for k in range(d)]
    trials += [rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(samples)]

    eig_witness = None
    for coeffs in trials:
        M = np.tensordot(coeffs, kraus, axes=1)
        if numerical_rank(M, pol) == D:
            return SpanWitness(WitnessKind.INVERTIBLE, [complex(c) for c in coeffs])
        if eig_witness is None:
            mu = _has_nonzero_eigenvalue(M, pol)
            if mu is not None:
                eig_witness = SpanWitness(WitnessKind.NONZERO_EIG, [complex(c) for c in coeffs], mu)
    if eig_witness is not None:
        return eig_witness
    logger.warning(f"No invertible or non-nilpotent element found in {len(trials)} trials")
    return SpanWitness(WitnessKind.UNKNOWN)


@dataclass(frozen=True)
class WielandtCertificate:
    case: Thm1Case
    bound: int
    bound_respected: bool
    witness: SpanWitness


def wielandt_certificates(ch: KrausChannel, i_index: Optional[int] = None,
                          samples: int = DEFAULT_SAMPLES, seed: int = 0,
                          pol: TolerancePolicy = DEFAULT_POLICY,
                          compute_index: bool = True) -> WielandtCertificate:
    """Select the strongest Wielandt bound the span witness supports and check i against it."""
    D, d = ch.dim_D, ch.d
    if i_index is None and compute_index:
        i_index = kraus_rank_index(ch, pol)
    witness = span_witness(ch, samples, seed, pol)
    if i_index is None:
        return WielandtCertificate(Thm1Case.NOT_APPLICABLE, general_cap(D, d), True, witness)
    case = {
        WitnessKind.INVERTIBLE: Thm1Case.INVERTIBLE,
        WitnessKind.NONZERO_EIG: Thm1Case.NONZERO_EIG,
        WitnessKind.UNKNOWN: Thm1Case.GENERAL,
    }[witness.kind]
    bound = thm1_bound(case, D, d)
    respected = i_index <= bound
    if not respected:
        logger.error(f"i = {i_index} exceeds the {case.value} bound {bound}")
    return WielandtCertificate(case, bound, respected, witness)


@dataclass(frozen=True)
class QBracket:
    lower: int
    upper: int
    exact: bool
    certificates: List[str] = field(default_factory=list)


def _minor_forms(mats: np.ndarray) -> np.ndarray:
    """Coefficients (x^2, xy, y^2) of det[B_i phi, B_j phi] for phi = (x, y)."""

    def det(u, v):
        return u[0] * v[1] - u[1] * v[0]

    forms = []
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            a0, a1 = mats[i][:, 0], mats[i][:, 1]
            c0, c1 = mats[j][:, 0], mats[j][:, 1]
            forms.append([det(a0, c0), det(a0, c1) + det(a1, c0), det(a1, c1)])
    return np.array(forms, dtype=np.complex128).reshape(-1, 3)


def d2_certificate(basis: SubspaceBasis, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    """
    True when no nonzero phi in C^2 has dim S phi < 2.

    The binary quadratic minor forms have a common projective root exactly when
    their degree-three multiples fail to span all four cubic monomials.
    """
    forms = _minor_forms(basis.stacked())
    if forms.shape[0] == 0 or not np.any(forms):
        return False
    zero = np.zeros((forms.shape[0], 1), dtype=np.complex128)
    sylvester = np.vstack([np.hstack([forms, zero]), np.hstack([zero, forms])])
    return numerical_rank(sylvester, pol) == 4


def _stacked_map(Bs: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # columns B_k phi, shape (D, m)
    return np.einsum('kij,j->ik', Bs, phi)


def _alternating_min(Bs: np.ndarray, phi: np.ndarray) -> tuple:
    """Block-coordinate descent of sum_k |psi^dagger B_k phi|^2 over unit psi and phi."""
    prev = np.inf
    sigma2 = np.inf
    for _ in range(MAX_SWEEPS):
        M = _stacked_map(Bs, phi)
        w, U = np.linalg.eigh(M @ M.conj().T)
        sigma2 = max(w[0], 0.0)
        if sigma2 < 1e-28 or (np.isfinite(prev) and prev - sigma2 <= 1e-6 * prev):
            break
        prev = sigma2
        psi = U[:, 0]
        R = np.einsum('i,kij->kj', psi.conj(), Bs)
        _, V = np.linalg.eigh(R.conj().T @ R)
        phi = V[:, 0]
    return phi, np.sqrt(sigma2)


def find_deficient_state(ch: KrausChannel, basis: SubspaceBasis, n: int, effort: int,
                         rng: np.random.Generator,
                         pol: TolerancePolicy = DEFAULT_POLICY) -> Optional[np.ndarray]:
    """
    A unit phi with dim H_n(A, phi) < D, or None if the search fails.

    Candidates: coordinate vectors, eigenvectors of the Kraus operators and of
    the S_n basis, then `effort` seeded restarts of a local minimization of the
    smallest singular value of phi -> [B_1 phi, ..., B_m phi].
    """
    D = ch.dim_D
    if basis.dim < D:
        return np.eye(D, dtype=np.complex128)[0]

    candidates = list(np.eye(D, dtype=np.complex128))
    for A in list(ch.kraus) + basis.basis:
        _, V = np.linalg.eig(A)
        candidates.extend(V.T)
    for phi in candidates:
        if h_dim(ch, phi, n, pol) < D:
            return phi / np.linalg.norm(phi)

    Bs = basis.stacked()
    for restart in range(effort):
        phi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        phi /= np.linalg.norm(phi)
        phi, sigma = _alternating_min(Bs, phi)
        if sigma < WITNESS_SIGMA and h_dim(ch, phi, n, pol) < D:
            logger.debug(f"Deficient state at n={n} found on restart {restart} (sigma={sigma:.2e})")
            return phi
    return None


def primitivity_index_q(ch: KrausChannel, effort: int = DEFAULT_EFFORT, seed: int = 0,
                        pol: TolerancePolicy = DEFAULT_POLICY, i_index: Optional[int] = None,
                        exact: bool = False) -> QBracket:
    """
    Certified bracket q_lower <= q(E) <= q_upper.

    Upper certificates: q <= i, and for D = 2 the minor-system check. Lower
    certificates: explicit states phi with rank E^n(|phi><phi|) < D.
    Raises NotPrimitiveError when the channel never reaches full Kraus rank.
    """
    if i_index is None:
        i_index = kraus_rank_index(ch, pol, exact)
    if i_index is None:
        raise NotPrimitiveError("q is only defined for primitive channels")
    D = ch.dim_D
    certificates = [f"q <= i = {i_index}"]
    upper = i_index

    if is_classical_support(ch, pol) is not None:
        certificates.append("S_1 is spanned by matrix units: diagonal inputs follow the "
                            "support digraph, so q = p = i")
        return QBracket(i_index, i_index, True, certificates)

    bases = list(s_bases(ch, max(i_index - 1, 1), pol))[:i_index - 1]

    if D == 2:
        for n, basis in enumerate(bases, start=1):
            if exact:
                from qprim.exact import exact_d2_certificate
                holds = exact_d2_certificate(ch.kraus, n)
            else:
                holds = d2_certificate(basis, pol)
            if holds:
                upper = n
                certificates.append(f"D = 2 minor system has no common root at n = {n}")
                break

    lower = 1
    for n in range(upper - 1, 0, -1):
        rng = np.random.default_rng([seed, n])
        phi = find_deficient_state(ch, bases[n - 1], n, effort, rng, pol)
        if phi is not None:
            lower = n + 1
            certificates.append(f"rank E^{n}(|phi><phi|) < {D} for phi = "
                                f"{np.round(phi, 12).tolist()}")
            break

    if lower == upper:
        logger.info(f"q = {upper} (exact)")
    else:
        logger.info(f"q bracketed in [{lower}, {upper}]")
    return QBracket(lower, upper, lower == upper, certificates)


@dataclass
class PrimitivityReport:
    i_index: Optional[int]
    q_lower: Optional[int]
    q_upper: Optional[int]
    q_exact: bool
    thm1_case: Thm1Case
    thm1_bound: int
    bound_respected: bool
    witness: SpanWitness
    certificates: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'i_index': self.i_index if self.i_index is not None else 'NotEventuallyFull',
            'q_lower': self.q_lower,
            'q_upper': self.q_upper,
            'q_exact': self.q_exact,
            'thm1_case': self.thm1_case.value,
            'thm1_bound': self.thm1_bound,
            'bound_respected': self.bound_respected,
            'witness': self.witness.to_dict(),
            'certificates': list(self.certificates),
        }


def analyze_primitivity(ch: KrausChannel, effort: int = DEFAULT_EFFORT, samples: int = DEFAULT_SAMPLES,
                        seed: int = 0, pol: TolerancePolicy = DEFAULT_POLICY,
                        exact: bool = False) -> PrimitivityReport:
    i_index = kraus_rank_index(ch, pol, exact)
    cert = wielandt_certificates(ch, i_index, samples, seed, pol, compute_index=False)
    if i_index is None:
        return PrimitivityReport(None, None, None, False, cert.case, cert.bound,
                                 cert.bound_respected, cert.witness,
                                 [f"S_n never full within the cap {general_cap(ch.dim_D, ch.d)}"])
    q = primitivity_index_q(ch, effort, seed, pol, i_index, exact)
    certificates = list(q.certificates)
    certificates.append(f"i = {i_index} <= {cert.bound} ({cert.case.value})")
    certificates.append(f"q_upper = {q.upper} <= {cert.bound} ({cert.case.value})")
    if q.upper > cert.bound:
        logger.error(f"q_upper = {q.upper} exceeds the {cert.case.value} bound {cert.bound}")
    return PrimitivityReport(i_index, q.lower, q.upper, q.exact, cert.case, cert.bound,
                             cert.bound_respected and q.upper <= cert.bound, cert.witness, certificates)
