"""
ERRORS - Exception hierarchy untuk seluruh SubThermo
"""


class SubThermoError(Exception):
    """Base class for every error raised by the library"""

    exit_code = 1


class ValidationError(SubThermoError):
    """Bad input: malformed config, non-Hermitian matrix, T <= 0, ..."""

    exit_code = 2


class ConfigurationError(ValidationError):
    """Model/protocol/partition definitions that do not fit together"""


class CapacityError(ValidationError):
    """Problem size above a configured cap"""


class NumericalError(SubThermoError):
    """Numerical failure: non-convergence, degeneracy, broken invariant"""

    exit_code = 3


class DegeneracyError(NumericalError):
    """Spectrum too close to degenerate for analytic rates"""

    def __init__(self, message, s=None, min_gap=None):
        super().__init__(message)
        self.s = s
        self.min_gap = min_gap


class ConsistencyError(NumericalError):
    """An identity that must hold to round-off did not"""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class OutputError(ValidationError):
    """Result file could not be written"""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path
