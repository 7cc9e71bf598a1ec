"""Exception types shared across the package."""


class DatasetError(ValueError):
    """A dataset file or its contents violate the CSV contract."""


class ShapeError(ValueError):
    """Array shapes are incompatible with the requested operation."""


class StateError(RuntimeError):
    """An operation was invoked out of sequence (e.g. backward before forward)."""
