from __future__ import annotations


class ValidationError(ValueError):
    """Input violates a documented invariant (CLI exit code 1)."""


class DomainError(RuntimeError):
    """Valid input for which the requested construction does not exist (CLI exit code 2)."""


class NotHermitianError(ValidationError):
    """Matrix differs from its conjugate transpose beyond tolerance."""


class TraceNotOneError(ValidationError):
    """Density matrix trace is not 1."""


class NotPositiveSemidefiniteError(ValidationError):
    """Density matrix has a negative eigenvalue beyond tolerance."""


class InvalidSubsystemError(ValidationError):
    """Subsystem index is not one of 1, 2, 3."""


class OutsideTriangleError(ValidationError):
    """Coordinates lie outside the triangle of GHZ-symmetric states."""


class WitnessSignError(ValidationError):
    """Witness coefficients violate a + (b + c)/8 > 0."""


class DegenerateWitnessError(ValidationError):
    """Witness has no zero-line (b = c = 0)."""


class DegenerateLineError(ValidationError):
    """Line or mixing line is degenerate (zero normal or equal endpoints)."""


class MatrixFileError(ValidationError):
    """Matrix file cannot be read or has the wrong shape."""


class NoConvergenceError(DomainError):
    """Iterative routine exceeded its iteration cap."""


class NoCrossingError(DomainError):
    """Segment does not intersect the GHZ/W boundary curve."""


class AmbiguousCrossingError(DomainError):
    """Segment intersects the GHZ/W boundary curve more than once."""


class LineCrossesUninterestingError(DomainError):
    """Line cuts through the interior of the uninteresting region."""


class TargetNotInClassError(DomainError):
    """Mixing line target is not in the requested class."""


class NoiseNotLowerError(DomainError):
    """Mixing line noise end is not in a lower class than the target."""
