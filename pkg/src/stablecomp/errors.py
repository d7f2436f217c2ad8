"""Exception types raised by the library."""


class StableCompError(Exception):
    """Base class for all library errors."""


class InputError(StableCompError, ValueError):
    """Malformed or inadmissible input data."""


class EmptyInput(InputError):
    pass


class DuplicatePoint(InputError):
    def __init__(self, first: int, second: int):
        self.first = first
        self.second = second
        super().__init__(f"points {first} and {second} coincide")


class NoGap(InputError):
    """A single-point data set has no phase-change gaps."""


class InternalInvariant(StableCompError, AssertionError):
    """A structural identity failed; this indicates a bug, not bad data."""
