"""Exception types raised by the library."""


class FierzStressError(Exception):
    """Base class for all library errors."""


class DegenerateInvariant(FierzStressError, ValueError):
    """sigma^2 - omega^2 is too close to zero for the inverse factors.

    This is the light-like stratum (for instance Weyl-like states) where the
    bilinear formulas cannot be inverted.
    """


class ZeroCharge(FierzStressError, ValueError):
    """The electric charge is zero where a division by it is required."""


class AsymmetryError(FierzStressError, ValueError):
    """A tensor that must be antisymmetric is not."""


class RadiusMismatch(FierzStressError, ValueError):
    """The spatial point does not lie on the sphere of the given radius."""


class GridTooSmall(FierzStressError, ValueError):
    """A grid axis has fewer points than the finite-difference stencil needs."""


class SchemaError(FierzStressError, ValueError):
    """Input file does not follow the expected schema."""
