"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live in Heisenberg groups of different dimension."""


class MassMismatchError(ValueError):
    """Transport endpoints carry different total mass."""


class NotInducedByMapError(ValueError):
    """A coupling cannot be read as a transport map (some source atom splits)."""


class AmbiguousMatchingError(RuntimeError):
    """Radon reconstruction could not match projected atoms across lines."""


class OracleInconsistencyError(RuntimeError):
    """A projection oracle returned data inconsistent with a finitely supported source."""


class GenericLineError(RuntimeError):
    """Rejection sampling failed to find a line clear of all identification hyperplanes."""
