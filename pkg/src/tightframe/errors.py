"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for mathematical
failures, 2 for malformed input or usage.
"""


class FrameError(Exception):
    exit_code = 1


class NonSymmetric(FrameError):
    exit_code = 2


class NoConvergence(FrameError):
    pass


class SingularOperator(FrameError):
    pass


class NotAFrame(FrameError):
    pass


class NotTight(FrameError):
    pass


class AllZero(FrameError):
    pass


class DomainError(FrameError, ValueError):
    exit_code = 2


class DimensionMismatch(FrameError, ValueError):
    exit_code = 2


class InvalidIndices(FrameError, ValueError):
    exit_code = 2


class WrongDimension(FrameError, ValueError):
    exit_code = 2


class FormatError(FrameError, ValueError):
    exit_code = 2


class EmptyInput(FormatError):
    pass


class TauTooLarge(UserWarning):
    """Blend coefficients exceed the certified threshold; result is uncertified."""
