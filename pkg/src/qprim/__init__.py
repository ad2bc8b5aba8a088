"""
qprim: primitivity, Wielandt bounds and injectivity for quantum channels.

Run ``python -m qprim --help`` for the command-line interface.
"""

from qprim.channel import (ChoiMatrix, KrausChannel, StochasticMatrix, ValidationReport,
                           apply, choi, classical_embed, power_reduced, transfer_matrix,
                           validate)
from qprim.config import load_policy
from qprim.errors import (ConfigurationError, GaugeFailure, InvalidInput, NotPrimitiveError,
                          NumericalFailure, QprimError, ReportInconsistency, ResourceLimit)
from qprim.indices import (PrimitivityReport, QBracket, Thm1Case, analyze_primitivity,
                           classical_exponent, kraus_rank_index, primitivity_index_q,
                           span_witness, wielandt_certificates)
from qprim.mps import MpsTensor, gamma_rank, injectivity_length, normalize_tensor
from qprim.numerics import DEFAULT_POLICY, SubspaceBasis, TolerancePolicy
from qprim.spans import h_dim, k_dims, s_dims, t_dims
from qprim.spectral import (PrimitivityVerdict, SpectralReport, ZeroErrorVerdict,
                            classify_primitivity, spectral_report, zero_error_classify)

__version__ = '1.0.0'
