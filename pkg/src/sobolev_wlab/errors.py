"""Exception types shared across the package."""


class SobolevLabError(Exception):
    """Base class for all package errors."""


class RangeViolation(SobolevLabError):
    """A parameter fell outside its admissible range.

    ``constraint`` names the violated inequality so callers (and the CLI)
    can report which check failed.
    """

    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


class ParameterOutOfRange(SobolevLabError):
    pass


class UnknownCatalogId(SobolevLabError):
    pass


class NonNormalizableDensity(SobolevLabError):
    pass


class QuadratureFailure(SobolevLabError):
    pass


class OracleUnavailable(SobolevLabError):
    pass


class DegenerateDenominator(SobolevLabError):
    pass


class UsageError(SobolevLabError):
    pass


class IoError(SobolevLabError):
    pass
