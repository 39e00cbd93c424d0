"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: usage 2, resource 3, precision 4,
consistency 5.
"""


class SosBiasError(Exception):
    exit_code = 1


class InvalidModulusError(SosBiasError, ValueError):
    exit_code = 2


class DomainError(SosBiasError, ValueError):
    exit_code = 2


class PoleError(DomainError):
    pass


class PrecisionError(SosBiasError, ArithmeticError):
    exit_code = 4


class GRHViolationSignal(SosBiasError, ArithmeticError):
    """L(1/2, chi) * L(1/2, chi chi_-4) came out negative beyond its error bound."""

    exit_code = 5


class ResourceError(SosBiasError, RuntimeError):
    exit_code = 3


class CacheError(ResourceError):
    pass


class CacheVersionError(CacheError):
    pass


class CacheChecksumError(CacheError):
    pass


class CacheTruncatedError(CacheError):
    pass


class ConsistencyError(SosBiasError, RuntimeError):
    exit_code = 5
