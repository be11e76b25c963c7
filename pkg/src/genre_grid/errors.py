"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid input data or configuration (CLI maps this to exit code 1)."""


class DegenerateDataError(DataError):
    """A quantity is undefined for the given data (e.g. zero expected disagreement)."""
