"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Array extents are inconsistent with the requested operation."""


class ModeError(IndexError):
    """A tensor mode index is outside ``[0, ndim)``."""


class BoundsError(IndexError):
    """A patch coordinate falls outside the image."""


class SizeError(ValueError):
    """Image is too small for the configured patch size."""


class NumericalError(ArithmeticError):
    """Non-finite input or a numerical invariant was violated."""


class SymmetryError(NumericalError):
    """Fourier color channels lost their conjugate symmetry."""


class CoverageError(RuntimeError):
    """Some pixel received no aggregation weight."""
