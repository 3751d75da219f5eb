"""Exception types raised by wapeq."""


class WapeError(Exception):
    """Base class for all wapeq errors."""


class ZeroQ(WapeError, ValueError):
    """The Pade coefficient q vanishes (narrow-angle limit is not supported)."""


class NonpositiveDepth(WapeError, ValueError):
    """The bottom profile is not strictly positive on the range interval."""


class SingularSystem(WapeError, ArithmeticError):
    """Banded elimination hit a pivot that is numerically zero.

    ``index`` is the zero-based column where elimination broke down.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SingularOperator(SingularSystem):
    """The discrete elliptic operator could not be inverted."""


class SingularStep(SingularSystem):
    """A range step produced a singular pentadiagonal system.

    ``step`` holds the range-step number when known.
    """

    def __init__(self, message, index=None, step=None):
        super().__init__(message, index)
        self.step = step


class MissingPartial(WapeError, ValueError):
    """A manufactured solution lacks a required partial derivative."""


class EvanescentMode(WapeError, ValueError):
    """A requested starter mode does not propagate at this frequency."""


class OutOfWater(WapeError, ValueError):
    """A receiver depth lies on or below the bottom."""


class ZeroRange(WapeError, ValueError):
    """Transmission loss requested at a non-positive range."""


class ConfigError(WapeError, ValueError):
    """A run configuration is malformed or incomplete."""
