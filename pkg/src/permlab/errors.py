class CapacityError(ValueError):
    """Input size exceeds what an exact kernel is allowed to handle."""


class DegenerateInputError(ValueError):
    """Input for which the requested quantity is undefined (e.g. zero normalization)."""
