"""Exception types shared across the package."""


class CsphereError(Exception):
    """Base class for errors raised by this package."""


class ConstellationFormatError(CsphereError, ValueError):
    """Raised when a constellation file cannot be parsed.

    Carries the 1-based line number of the offending line (0 when the
    problem is not tied to a single line).
    """

    def __init__(self, message, line=0):
        super().__init__(message)
        self.line = line


class RankDeficientError(CsphereError, ValueError):
    """Raised when a matrix is numerically rank deficient."""


class SearchSpaceTooLargeError(CsphereError, ValueError):
    """Raised when a brute-force enumeration would exceed the size guard."""


class ConfigError(CsphereError, ValueError):
    """Raised for invalid experiment or detector configuration."""
