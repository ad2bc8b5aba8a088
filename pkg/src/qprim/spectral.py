#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Spectral characterization of CP maps.

Features:
- transfer-matrix spectrum, peripheral spectrum and period
- fixed point from the spectral projection of the identity
- primitivity classifier (unique peripheral eigenvalue, positive definite fixed point)
- zero-error dichotomy classifier for channels with a full-rank fixed point

Non-trace-preserving maps are analysed after division by their spectral radius.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple

import numpy as np

from qprim.channel import KrausChannel, apply, power_reduced, transfer_matrix
from qprim.errors import NotPrimitiveError, NumericalFailure
from qprim.numerics import DEFAULT_POLICY, TolerancePolicy, eigen, null_space

logger = logging.getLogger(__name__)

# phases closer than this to 1 count as the trivial peripheral phase
PHASE_TOL = 1e-6


@dataclass(frozen=True)
class PerronData:
    radius: float
    eigenmatrix: Optional[np.ndarray]
    multiplicity: int


def perron_eigenmatrix(T: np.ndarray, D: int, radius: float,
                       pol: TolerancePolicy = DEFAULT_POLICY) -> PerronData:
    """
    Hermitian, trace-one eigenmatrix of T at its spectral radius.

    The spectral projection of the identity is used, which for a positive map
    is positive semidefinite and has the largest support among fixed points.
    Multiplicity is the kernel dimension of T - r.
    """
    N = D * D
    if radius <= pol.rank_rel:
        right, _ = null_space(T, pol)
        return PerronData(0.0, None, right.shape[1])

    K = T - radius * np.eye(N)
    right, left = null_space(K, pol)
    m = right.shape[1]
    if m == 0:
        # roundoff put r outside the kernel cutoff; fall back to the nearest eigenvector
        lam, v = min(eigen(T, pol), key=lambda pair: abs(pair[0] - radius))
        right, m = v.reshape(N, 1), 1
        left = None

    vec = None
    identity = np.eye(D, dtype=np.complex128).reshape(-1)
    if left is not None and left.shape[1] == m:
        G = left.conj().T @ right
        if np.linalg.cond(G) < 1.0 / pol.rank_rel:
            vec = right @ np.linalg.solve(G, left.conj().T @ identity)
    if vec is None or abs(vec.reshape(D, D).trace()) <= pol.psd_rel * np.linalg.norm(vec):
        vec = right[:, 0]

    X = vec.reshape(D, D)
    tr = X.trace()
    if abs(tr) > pol.psd_rel * np.linalg.norm(X):
        X = X * (np.conj(tr) / abs(tr))
    X = (X + X.conj().T) / 2
    tr = X.trace().real
    if abs(tr) <= pol.psd_rel * np.linalg.norm(X):
        return PerronData(radius, None, m)
    return PerronData(radius, X / tr, m)


def _period(phases: List[float], D: int, pol: TolerancePolicy) -> Tuple[int, bool]:
    """lcm of the denominators of peripheral phases matched to rationals with denominator <= D^2."""
    period, matched = 1, True
    for theta in phases:
        frac = Fraction(theta).limit_denominator(D * D)
        if abs(float(frac) - theta) > max(pol.peripheral_rel, PHASE_TOL):
            matched = False
            continue
        q = frac.denominator
        period = period * q // gcd(period, q)
    return period, matched


@dataclass
class SpectralReport:
    spectrum: List[complex]
    spectral_radius: float
    peripheral: List[complex]
    fixed_point: Optional[np.ndarray]
    fixed_point_min_eig: float
    fixed_point_multiplicity: int
    period: int
    lambda2_modulus: float
    period_matched: bool = True
    nontrivial_peripheral: int = 0

    def to_dict(self) -> dict:
        return {
            'spectrum': list(self.spectrum),
            'spectral_radius': self.spectral_radius,
            'peripheral': list(self.peripheral),
            'fixed_point': None if self.fixed_point is None else self.fixed_point.tolist(),
            'fixed_point_min_eig': self.fixed_point_min_eig,
            'fixed_point_multiplicity': self.fixed_point_multiplicity,
            'period': self.period,
            'period_matched': self.period_matched,
            'nontrivial_peripheral': self.nontrivial_peripheral,
            'lambda2_modulus': self.lambda2_modulus,
        }


def spectral_report(ch: KrausChannel, pol: TolerancePolicy = DEFAULT_POLICY) -> SpectralReport:
    D = ch.dim_D
    T = np.asarray(transfer_matrix(ch))
    try:
        pairs = eigen(T, pol)
    except NumericalFailure:
        logger.error("Transfer matrix eigendecomposition failed")
        raise
    spectrum = [lam for lam, _ in pairs]
    radius = max(abs(lam) for lam in spectrum)

    if radius <= pol.rank_rel:
        perron = perron_eigenmatrix(T, D, 0.0, pol)
        return SpectralReport(spectrum, float(radius), [], None, 0.0, perron.multiplicity, 1, 0.0)

    window = radius * (1 - pol.peripheral_rel)
    peripheral = [lam for lam in spectrum if abs(lam) >= window]
    rest = [abs(lam) for lam in spectrum if abs(lam) < window]
    lambda2 = max(rest) / radius if rest else 0.0

    phases = [float(np.angle(lam) / (2 * np.pi)) % 1.0 for lam in peripheral]
    period, matched = _period(phases, D, pol)
    if not matched:
        logger.warning("Peripheral phases are not all roots of unity of order <= D^2")
    nontrivial = sum(1 for lam in peripheral if abs(lam / abs(lam) - 1) > PHASE_TOL)

    perron = perron_eigenmatrix(T / radius, D, 1.0, pol)
    if perron.eigenmatrix is not None:
        min_eig = float(np.linalg.eigvalsh(perron.eigenmatrix)[0])
    else:
        min_eig = 0.0

    return SpectralReport(
        spectrum=spectrum,
        spectral_radius=float(radius),
        peripheral=peripheral,
        fixed_point=perron.eigenmatrix,
        fixed_point_min_eig=min_eig,
        fixed_point_multiplicity=perron.multiplicity,
        period=period,
        lambda2_modulus=float(lambda2),
        period_matched=matched,
        nontrivial_peripheral=nontrivial,
    )


class NotPrimitiveReason(str, Enum):
    RANK_DEFICIENT_FIXED_POINT = 'RankDeficientFixedPoint'
    MULTIPLE_FIXED_POINTS = 'MultipleFixedPoints'
    PERIPHERAL_EIGENVALUE = 'PeripheralEigenvalue'


@dataclass(frozen=True)
class PrimitivityVerdict:
    primitive: bool
    reason: Optional[NotPrimitiveReason] = None

    def __str__(self):
        return 'Primitive' if self.primitive else f'NotPrimitive{{{self.reason.value}}}'


def _full_rank_fixed_point(rep: SpectralReport, pol: TolerancePolicy) -> bool:
    if rep.fixed_point is None:
        return False
    scale = np.linalg.norm(rep.fixed_point, 2)
    return rep.fixed_point_min_eig > pol.psd_rel * scale


def classify_primitivity(ch: KrausChannel, pol: TolerancePolicy = DEFAULT_POLICY,
                         report: Optional[SpectralReport] = None) -> PrimitivityVerdict:
    """Primitive iff one peripheral eigenvalue, a one-dimensional eigenspace, and rho > 0."""
    rep = report or spectral_report(ch, pol)
    if not _full_rank_fixed_point(rep, pol):
        return PrimitivityVerdict(False, NotPrimitiveReason.RANK_DEFICIENT_FIXED_POINT)
    if rep.nontrivial_peripheral > 0:
        return PrimitivityVerdict(False, NotPrimitiveReason.PERIPHERAL_EIGENVALUE)
    if rep.fixed_point_multiplicity >= 2 or len(rep.peripheral) > 1:
        return PrimitivityVerdict(False, NotPrimitiveReason.MULTIPLE_FIXED_POINTS)
    return PrimitivityVerdict(True)


class ZeroErrorCase(str, Enum):
    ALWAYS_POSITIVE = 'AlwaysPositive'
    VANISHES_FROM_Q = 'VanishesFromQ'
    PRECONDITION_FAILED = 'PreconditionFailed'


@dataclass(frozen=True)
class ZeroErrorVerdict:
    case: ZeroErrorCase
    reason: str
    n_threshold: Optional[int] = None

    def to_dict(self) -> dict:
        return {'case': self.case.value, 'reason': self.reason, 'n_threshold': self.n_threshold}


def zero_error_classify(ch: KrausChannel, pol: TolerancePolicy = DEFAULT_POLICY,
                        report: Optional[SpectralReport] = None,
                        q_upper: Optional[int] = None, effort: int = 64, seed: int = 0) -> ZeroErrorVerdict:
    """
    Either every power carries a bit with zero error, or E^q has no zero-error capacity.

    Requires a full-rank fixed point. A non-trivial peripheral eigenvalue or a
    second fixed point gives the first case; primitivity gives the second with
    threshold q_upper.
    """
    rep = report or spectral_report(ch, pol)
    if not _full_rank_fixed_point(rep, pol):
        return ZeroErrorVerdict(ZeroErrorCase.PRECONDITION_FAILED, 'no full-rank fixed point')
    if rep.nontrivial_peripheral > 0:
        return ZeroErrorVerdict(ZeroErrorCase.ALWAYS_POSITIVE, 'peripheral eigenvalue')
    if rep.fixed_point_multiplicity >= 2 or len(rep.peripheral) > 1:
        return ZeroErrorVerdict(ZeroErrorCase.ALWAYS_POSITIVE, 'multiple fixed points')

    if q_upper is None:
        from qprim.indices import primitivity_index_q
        try:
            q_upper = primitivity_index_q(ch, effort=effort, seed=seed, pol=pol).upper
        except NotPrimitiveError as e:
            raise NumericalFailure("Spectral classifier says primitive but S_n never fills") from e
    return ZeroErrorVerdict(ZeroErrorCase.VANISHES_FROM_Q, 'primitive', q_upper)


def convergence_error(ch: KrausChannel, X, N: int, pol: TolerancePolicy = DEFAULT_POLICY,
                      report: Optional[SpectralReport] = None) -> float:
    """|| (E/r)^N (X) - rho tr(X) ||_F for a primitive map."""
    rep = report or spectral_report(ch, pol)
    if rep.fixed_point is None:
        raise NotPrimitiveError("No fixed point to converge to")
    X = np.asarray(X, dtype=np.complex128)
    Y = apply(power_reduced(ch, N, pol), X) / rep.spectral_radius ** N
    return float(np.linalg.norm(Y - rep.fixed_point * np.trace(X)))
