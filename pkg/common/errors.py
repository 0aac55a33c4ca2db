"""
Errors — Exception Hierarchy for the Harmonic Toolkit

Every failure raised by the library derives from HarmonicError and also
from the builtin it refines, so callers that only catch ValueError or
ArithmeticError keep working:
  1. Input errors       — SpaceError, KTypeError, ProfileError, ConfigError
  2. Numerical failures — PoleError, SpecialFunctionError, TruncationError,
                          CalibrationError
  3. Pair consistency   — InconsistentPairError
"""


class HarmonicError(Exception):
    """Root of every error raised by the toolkit."""


# -------------------------------------------------------------------
# 1. Input errors
# -------------------------------------------------------------------

class SpaceError(HarmonicError, ValueError):
    """Invalid root multiplicities or unknown model-space name."""


class KTypeError(HarmonicError, ValueError):
    """A (p, q) pair that does not parametrize a spherical K-type."""


class ProfileError(HarmonicError, ValueError):
    """Malformed profile data or an evaluation outside its tabulated grid."""


class ConfigError(HarmonicError, ValueError):
    """Bad configuration file, override or command-line value."""


# -------------------------------------------------------------------
# 2. Numerical failures
# -------------------------------------------------------------------

class PoleError(HarmonicError, ArithmeticError):
    """log_gamma evaluated at a nonpositive integer."""

    def __init__(self, pole):
        self.pole = pole
        super().__init__(f"log_gamma has a pole at z = {pole}")


class SpecialFunctionError(HarmonicError, ArithmeticError):
    """A hypergeometric series or radial ODE integration failed."""


class TruncationError(HarmonicError, ArithmeticError):
    """A truncated integral did not meet its tolerance."""

    def __init__(self, message: str, tail_estimate: float):
        self.tail_estimate = tail_estimate
        super().__init__(f"{message} (tail estimate {tail_estimate:.3e})")


class CalibrationError(HarmonicError, ArithmeticError):
    """Normalization constants could not be fixed to tolerance."""


# -------------------------------------------------------------------
# 3. Pair consistency
# -------------------------------------------------------------------

class InconsistentPairError(HarmonicError, ValueError):
    """A profile and its claimed spectral transform disagree."""

    def __init__(self, message: str, max_deviation: float):
        self.max_deviation = max_deviation
        super().__init__(f"{message} (max deviation {max_deviation:.3e})")
