"""Exception hierarchy shared by every qprim module."""


class QprimError(Exception):
    """Base class for qprim exceptions"""
    pass


class InvalidInput(QprimError):
    pass


class ConfigurationError(InvalidInput):
    pass


class NumericalFailure(QprimError):
    pass


class NotPrimitiveError(QprimError):
    pass


class GaugeFailure(QprimError):
    """Tensor has no full-rank dual fixed point; no trace-preserving gauge exists."""
    pass


class ResourceLimit(QprimError):
    pass


class ReportInconsistency(QprimError):
    """Spectral and span verdicts disagree; the report would be contradictory."""
    pass
