"""
Exceptions raised by mg_secrecy and the exit codes the command line maps them to.
"""

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3


class SecrecyError(Exception):
    """Base class of every error raised by this package"""


class InvalidArgumentError(SecrecyError, ValueError):
    pass


class OutOfDomainError(SecrecyError, ValueError):
    """
    The requested value has no preimage, e.g. inverting I_M at a target >= log2(M)
    """


class UnsupportedFamilyError(SecrecyError):
    """
    The fading family has no known high-SNR expansion
    """
    def __init__(self, family):
        self.family = family
        super().__init__("No asymptotic expansion is known for fading family '{}'".format(family))


class NumericalError(SecrecyError, ArithmeticError):
    pass


class ConfigError(SecrecyError):
    pass


class ValidationFailure(SecrecyError):
    """
    Raised when a quadrature value and its Monte Carlo estimate disagree beyond 3 standard errors
    """
    def __init__(self, report):
        self.report = report
        super().__init__("Validation FAIL: max |z| = {:.3f}".format(report.max_abs_z))
