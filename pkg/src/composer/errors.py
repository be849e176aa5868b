"""Exception hierarchy shared across the package."""


class ComposerError(Exception):
    """Base class for all package-specific errors."""


class ParseError(ComposerError):
    """Malformed input text (FCIDUMP or JSON artifact)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ComposerError):
    """Input violates a documented precondition."""


class NotPSDError(ComposerError):
    """Two-electron supermatrix is not positive semidefinite."""


class DegenerateGapError(ComposerError):
    """Orbital-energy denominator too small for perturbative amplitudes."""


class NormalizationError(ComposerError):
    """Coefficient vector is not normalized to tolerance."""


class ShapeError(ComposerError):
    """Array dimensions inconsistent with the declared register sizes."""


class CapacityError(ComposerError):
    """Branch count exceeds the selector register capacity."""


class MaskError(ComposerError):
    """Mask indices do not address a valid generator pool."""


class BindError(ComposerError):
    """Dial-stage pool does not fit the compiled skeleton."""

    def __init__(self, message, addresses=()):
        if addresses:
            message = f"{message} (addresses: {sorted(addresses)})"
        super().__init__(message)
        self.addresses = tuple(addresses)


class SectorError(ComposerError):
    """Model-space state lies outside the fixed particle-number sector."""


class RankError(ComposerError):
    """Requested subspace rank exceeds the available numerical rank."""


class ZeroTensorError(ComposerError):
    """Operation undefined on an identically zero tensor."""


class SpectralBoundError(ComposerError):
    """Matrix argument exceeds the unit spectral-norm domain."""


class DegenerateBasisError(ComposerError):
    """All overlap-matrix eigenvalues fall below the regularization cut."""
