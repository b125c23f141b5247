"""Exception types shared across the package."""


class BmoLabError(Exception):
    """Base class for package-specific failures."""


class ConfigurationError(BmoLabError, ValueError):
    """Inputs wired together inconsistently (wrong dim, missing weight, ...)."""


class DegenerateInputError(BmoLabError, ValueError):
    """An input makes the requested quantity meaningless (constant symbol, zero function)."""


class InsufficientDataError(BmoLabError, ValueError):
    """A fit or estimate has too few usable data points."""


class GeometryError(BmoLabError, ValueError):
    """A cube, ball, or companion cube does not fit inside the grid."""


class SharpBoundViolation(BmoLabError, RuntimeError):
    """A pointwise majorant vanished where the majorized side did not."""
