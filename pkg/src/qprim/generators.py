#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Named example families and seeded random instances.

Random streams use numpy's PCG64 bit generator seeded with the integer seed;
the fill order is documented in docs/file-formats.md so streams reproduce
across platforms.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Union

import numpy as np

from qprim.channel import KrausChannel, StochasticMatrix
from qprim.errors import InvalidInput
from qprim.mps import MpsTensor
from qprim.numerics import DEFAULT_POLICY, TolerancePolicy

logger = logging.getLogger(__name__)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def cyclic_shift(D: int) -> np.ndarray:
    """sum_i |i+1 mod D><i|"""
    return np.roll(np.eye(D, dtype=np.complex128), 1, axis=0)


def pauli_channel(pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    return KrausChannel.from_kraus([P / np.sqrt(3) for P in (PAULI_X, PAULI_Y, PAULI_Z)], pol)


def shift_chord_channel(D: int, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    """A_0 = cyclic shift, A_1 = |1><D-1|; not trace preserving, i = D^2 - D."""
    if D < 2:
        raise InvalidInput(f"shift_chord requires D >= 2, got {D}")
    chord = np.zeros((D, D), dtype=np.complex128)
    chord[1, D - 1] = 1
    return KrausChannel.from_kraus([cyclic_shift(D), chord], pol)


def wielandt_digraph(D: int, pol: TolerancePolicy = DEFAULT_POLICY) -> StochasticMatrix:
    """Arcs i -> i+1 (i < D-1), D-1 -> 0 and D-1 -> 1, uniform weight per column."""
    if D < 3:
        raise InvalidInput(f"wielandt_digraph requires D >= 3, got {D}")
    S = np.zeros((D, D))
    for i in range(D - 1):
        S[i + 1, i] = 1.0
    S[0, D - 1] = 0.5
    S[1, D - 1] = 0.5
    return StochasticMatrix.from_entries(S, pol)


def weyl_operators(D: int) -> List[np.ndarray]:
    """X^a Z^b for a, b in 0..D-1, (a, b) = (0, 0) first."""
    X = cyclic_shift(D)
    Z = np.diag(np.exp(2j * np.pi * np.arange(D) / D))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            for a in range(D) for b in range(D)]


def depolarizing_channel(D: int, weight: float, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    """E(X) = (1 - w) X + w tr(X) 1/D via the Weyl twirl."""
    if D < 1 or not 0.0 <= weight <= 1.0:
        raise InvalidInput(f"depolarizing requires D >= 1 and 0 <= p <= 1, got D={D}, p={weight}")
    ops = weyl_operators(D)
    coeffs = [np.sqrt(1 - weight + weight / D ** 2)] + [np.sqrt(weight) / D] * (len(ops) - 1)
    return KrausChannel.from_kraus([c * W for c, W in zip(coeffs, ops) if c > 0], pol)


def amplitude_damping(gamma: float, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    if not 0.0 <= gamma <= 1.0:
        raise InvalidInput(f"amplitude_damping requires 0 <= gamma <= 1, got {gamma}")
    K0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    K1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel.from_kraus([K0, K1] if gamma > 0 else [K0], pol)


def cyclic_shift_unitary(D: int, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    if D < 1:
        raise InvalidInput(f"cyclic_shift_unitary requires D >= 1, got {D}")
    return KrausChannel.from_kraus([cyclic_shift(D)], pol)


def ghz_tensor(pol: TolerancePolicy = DEFAULT_POLICY) -> MpsTensor:
    return MpsTensor.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], pol)


def aklt_tensor(pol: TolerancePolicy = DEFAULT_POLICY) -> MpsTensor:
    return MpsTensor.from_matrices([PAULI_X, PAULI_Y, PAULI_Z], pol)


def product_tensor(amplitudes, pol: TolerancePolicy = DEFAULT_POLICY) -> MpsTensor:
    return MpsTensor.from_matrices([[[a]] for a in amplitudes], pol)


def random_channel(D: int, d: int, seed: int, pol: TolerancePolicy = DEFAULT_POLICY) -> KrausChannel:
    """
    Kraus blocks of a seeded isometry.

    Stream order: real parts of the dD x D Gaussian matrix in row-major order,
    then the imaginary parts; the isometry is the reduced QR factor.
    """
    if D < 1 or not 1 <= d <= D * D:
        raise InvalidInput(f"random_channel requires 1 <= d <= D^2, got D={D}, d={d}")
    rng = _rng(seed)
    re = rng.standard_normal((d * D, D))
    im = rng.standard_normal((d * D, D))
    V, R = np.linalg.qr(re + 1j * im)
    # fix the QR sign ambiguity so the isometry is a function of the stream only
    phases = np.diag(R) / np.abs(np.diag(R))
    V = V * phases
    return KrausChannel.from_kraus([V[k * D:(k + 1) * D, :] for k in range(d)], pol)


def random_stochastic(D: int, seed: int, density: float = 0.4,
                      pol: TolerancePolicy = DEFAULT_POLICY) -> StochasticMatrix:
    """
    Seeded primitive column-stochastic matrix.

    The support always contains the cycle 0 -> 1 -> ... -> D-1 -> 0 and the
    loop 0 -> 0 (irreducible and aperiodic), plus random extra arcs.
    """
    if D < 1:
        raise InvalidInput(f"random_stochastic requires D >= 1, got {D}")
    rng = _rng(seed)
    support = rng.random((D, D)) < density
    for i in range(D):
        support[(i + 1) % D, i] = True
    support[0, 0] = True
    weights = np.where(support, rng.random((D, D)) + 0.1, 0.0)
    return StochasticMatrix.from_entries(weights / weights.sum(axis=0), pol)


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> 'GeneratorSpec':
        """Parse 'name:key=val,key=val' (values are int, float or str)."""
        name, _, rest = text.partition(':')
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(','))):
            key, sep, raw = item.partition('=')
            if not sep:
                raise InvalidInput(f"Generator parameter {item!r} is not key=value")
            params[key.strip()] = _parse_value(raw.strip())
        return cls(name.strip(), params)


def _parse_value(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


# name -> (builder, default params); builders take keyword params plus pol
GENERATORS: Dict[str, tuple] = {
    'pauli': (lambda pol: pauli_channel(pol), {}),
    'shift_chord': (lambda pol, D: shift_chord_channel(D, pol), {'D': 3}),
    'wielandt_digraph': (lambda pol, D: wielandt_digraph(D, pol), {'D': 3}),
    'depolarizing': (lambda pol, D, p: depolarizing_channel(D, p, pol), {'D': 2, 'p': 1.0}),
    'amplitude_damping': (lambda pol, gamma: amplitude_damping(gamma, pol), {'gamma': 0.5}),
    'cyclic_shift_unitary': (lambda pol, D: cyclic_shift_unitary(D, pol), {'D': 3}),
    'ghz_tensor': (lambda pol: ghz_tensor(pol), {}),
    'aklt_tensor': (lambda pol: aklt_tensor(pol), {}),
    'random_channel': (lambda pol, D, d, seed: random_channel(D, d, seed, pol),
                       {'D': 2, 'd': 2, 'seed': 0}),
}

PARAM_ALIASES = {'w': 'p', 'weight': 'p', 'γ': 'gamma'}


def named_channel(spec: Union[GeneratorSpec, str],
                  pol: TolerancePolicy = DEFAULT_POLICY) -> Union[KrausChannel, MpsTensor, StochasticMatrix]:
    if isinstance(spec, str):
        spec = GeneratorSpec.parse(spec)
    if spec.name not in GENERATORS:
        raise InvalidInput(f"Unknown generator: {spec.name} (known: {', '.join(sorted(GENERATORS))})")
    builder, defaults = GENERATORS[spec.name]
    params = dict(defaults)
    for key, value in spec.params.items():
        key = PARAM_ALIASES.get(key, key)
        if key not in defaults:
            raise InvalidInput(f"Generator {spec.name} has no parameter {key!r}")
        params[key] = value
    for key in ('D', 'd', 'seed'):
        if key in params and not isinstance(params[key], int):
            raise InvalidInput(f"Parameter {key} of {spec.name} must be an integer")
    logger.info(f"Building generator {spec.name} with {params}")
    return builder(pol, **params)
