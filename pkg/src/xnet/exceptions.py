"""Exception hierarchy shared by every module of the package."""


class XNetError(Exception):
    """Base class for all package errors."""


class ParameterError(XNetError, ValueError):
    """A numeric parameter violates its precondition."""


class InputError(XNetError, ValueError):
    """An input array is malformed (wrong shape, non-finite entries)."""


class HorizonError(XNetError, IndexError):
    """A requested slot range exceeds the generated channel horizon."""


class DegeneracyError(XNetError, ValueError):
    """A channel gain or seed vector entry that must be nonzero is zero."""


class RankFailureError(XNetError, ArithmeticError):
    """A decoding matrix is numerically singular.

    Parameters
    ----------
    receiver : int
        1-based receiver index whose matrix failed the rank test.
    ratio : float
        Smallest over largest singular value of the offending matrix.
    """

    def __init__(self, receiver, ratio, message=None):
        self.receiver = receiver
        self.ratio = ratio
        if message is None:
            message = (f"receiver {receiver}: decoding matrix is rank deficient "
                       f"(singular value ratio {ratio:.3e})")
        super().__init__(message)


class StateError(XNetError, RuntimeError):
    """An object is used before the step it depends on has succeeded."""


class ScheduleError(XNetError, ValueError):
    """A propagation-delay schedule fails its residue conditions."""


class ConfigError(XNetError, ValueError):
    """An experiment configuration field is invalid."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
