"""
Exact Gaussian-rational elimination for span dimensions.

Floating inputs are accepted when every entry is a Gaussian rational with a
small denominator after each Kraus operator is divided by its largest entry
(spans do not depend on the scale of their generators). Elimination runs in
sympy's QQ_I domain, so no tolerance enters any rank decision.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
from sympy import I, Rational
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from qprim.errors import InvalidInput

logger = logging.getLogger(__name__)

MAX_DENOMINATOR = 10 ** 6
MATCH_TOL = 1e-14


def _to_rational(x: float) -> Fraction:
    frac = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(float(frac) - x) > MATCH_TOL * max(1.0, abs(x)):
        raise InvalidInput(f"Entry {x!r} is not a rational with denominator <= {MAX_DENOMINATOR}")
    return frac


def rationalize(M, rescale: bool = True) -> DomainMatrix:
    """Exact QQ_I copy of a complex matrix, optionally divided by its largest entry first."""
    arr = np.asarray(M, dtype=np.complex128)
    if rescale and np.any(arr):
        flat = arr.reshape(-1)
        arr = arr / flat[np.argmax(np.abs(flat))]
    rows = []
    for row in arr:
        out = []
        for z in row:
            re, im = _to_rational(float(z.real)), _to_rational(float(z.imag))
            out.append(QQ_I.from_sympy(Rational(re.numerator, re.denominator)
                                       + I * Rational(im.numerator, im.denominator)))
        rows.append(out)
    return DomainMatrix(rows, arr.shape, QQ_I)


def exact_rank(M) -> int:
    """Rank of a Gaussian-rational matrix by exact elimination."""
    return rationalize(M, rescale=False).rank()


def _flatten(M: DomainMatrix) -> list:
    return [x for row in M.to_list() for x in row]


def _row_basis(rows: List[list], width: int) -> List[list]:
    """Nonzero rows of the reduced echelon form of the stacked rows."""
    if not rows:
        return []
    stacked = DomainMatrix(rows, (len(rows), width), QQ_I)
    reduced, pivots = stacked.rref()
    return reduced.to_list()[:len(pivots)]


class ExactSpans:
    """S_n and T_n growth over QQ_I for a fixed list of Kraus generators"""

    def __init__(self, kraus: Sequence[np.ndarray]):
        self.D = np.asarray(kraus[0]).shape[0]
        self.gens = [rationalize(A) for A in kraus]
        self.width = self.D * self.D

    def _unflatten(self, row: list) -> DomainMatrix:
        D = self.D
        return DomainMatrix([row[i * D:(i + 1) * D] for i in range(D)], (D, D), QQ_I)

    def first(self) -> List[list]:
        return _row_basis([_flatten(A) for A in self.gens], self.width)

    def step(self, basis: List[list]) -> List[list]:
        products = [_flatten(A.matmul(self._unflatten(b))) for A in self.gens for b in basis]
        return _row_basis(products, self.width)

    def union(self, a: List[list], b: List[list]) -> List[list]:
        return _row_basis(a + b, self.width)


def exact_s_dims(kraus: Sequence[np.ndarray], n_max: int) -> List[int]:
    spans = ExactSpans(kraus)
    full = spans.width
    dims = []
    basis = spans.first()
    for n in range(1, n_max + 1):
        if n > 1:
            basis = spans.step(basis)
        dims.append(len(basis))
        if len(basis) == full:
            dims.extend([full] * (n_max - n))
            break
    return dims


def exact_kraus_rank_index(kraus: Sequence[np.ndarray], cap: int) -> Optional[int]:
    """First n with S_n full, or None once T_n stalls short of full or the cap passes."""
    spans = ExactSpans(kraus)
    full = spans.width
    s = spans.first()
    t = s
    for n in range(1, cap + 1):
        if n > 1:
            s = spans.step(s)
            t_next = spans.union(t, s)
            if len(t_next) == len(t) and len(t) < full:
                logger.info(f"Exact T_n stalled at dimension {len(t)} (n={n})")
                return None
            t = t_next
        if len(s) == full:
            return n
    return None


def exact_d2_certificate(kraus: Sequence[np.ndarray], n: int) -> bool:
    """
    Exact version of the D = 2 minor-system check at power n.

    True when no nonzero phi makes all 2x2 minors det[B_i phi, B_j phi] vanish.
    """
    spans = ExactSpans(kraus)
    if spans.D != 2:
        raise InvalidInput("The minor-system certificate is only implemented for D = 2")
    basis = spans.first()
    for _ in range(n - 1):
        basis = spans.step(basis)
    mats = [b for b in basis]
    zero = QQ_I.zero

    def det(u, v):
        return u[0] * v[1] - u[1] * v[0]

    forms = []
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            # row-major flattening: B[r][c] = b[2r + c]; column c is (b[c], b[2 + c])
            a0, a1 = (mats[i][0], mats[i][2]), (mats[i][1], mats[i][3])
            c0, c1 = (mats[j][0], mats[j][2]), (mats[j][1], mats[j][3])
            forms.append([det(a0, c0), det(a0, c1) + det(a1, c0), det(a1, c1)])
    if not forms:
        return False
    rows = []
    for f in forms:
        rows.append([f[0], f[1], f[2], zero])
        rows.append([zero, f[0], f[1], f[2]])
    return DomainMatrix(rows, (len(rows), 4), QQ_I).rank() == 4
