"""Exception types shared across the package."""


class CollearnError(Exception):
    """Base class for all package errors."""


class InputError(CollearnError, ValueError):
    """Malformed or out-of-range input."""


class ResourceError(CollearnError):
    """A brute-force computation would exceed its configured cap."""


class InvariantViolation(CollearnError, AssertionError):
    """An internal invariant failed; indicates a bug, not bad input."""


class BoostingError(CollearnError):
    """Boosting could not build a compression candidate."""

    def __init__(self, message, round_index=None):
        super().__init__(message)
        self.round_index = round_index
