"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an input violates a documented precondition or invariant."""


class ShapeError(InvalidInputError):
    """Raised when a layer chain cannot be connected; names the offending layer."""


class NumericalError(RuntimeError):
    """Raised on numerical failure, e.g. non-finite loss or gradients during training."""
