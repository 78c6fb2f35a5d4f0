"""Exception hierarchy shared across the package."""


class ResplanError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatchError(ResplanError):
    """Two structures that must agree in size do not."""


class LengthMismatchError(ResplanError):
    """Binary vectors exist but none (or not all) have the expected length."""

    def __init__(self, found_lengths, expected=None):
        self.found_lengths = list(found_lengths)
        self.expected = expected
        detail = f"found lengths {self.found_lengths}"
        if expected is not None:
            detail += f", expected {expected}"
        super().__init__(detail)
