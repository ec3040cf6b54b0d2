"""Exception types shared across the package.

Everything raised for bad data derives from InvariantViolation so the CLI can
map the whole family to a single exit code; input parsing problems derive from
InputFormatError and map to the usage exit code instead.
"""


class InvariantViolation(ValueError):
    """A domain invariant failed validation."""


class NotSymmetricError(InvariantViolation):
    pass


class NotPositiveDefiniteError(InvariantViolation):
    pass


class DetNotOneError(InvariantViolation):
    pass


class NotOrthogonalError(InvariantViolation):
    pass


class DimensionMismatchError(InvariantViolation):
    pass


class NotChamberError(InvariantViolation):
    """Vector is not weakly decreasing with zero sum."""


class FaceIndexError(InvariantViolation):
    """Face index set is not a subset of the simple root indices."""


class ModelMismatchError(InvariantViolation):
    """Two ideal points from different boundary models were compared."""


class IdealPointError(InvariantViolation):
    """An ideal point was used where an interior point is required."""


class TooShortError(InvariantViolation):
    """Sequence shorter than the classification window."""


class MaxDepthExceededError(InvariantViolation):
    """Iterated classification exceeded the configured depth cap."""


class SequenceTermError(InvariantViolation):
    """A per-term failure inside a sequence operation, reported with index."""

    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"term {index}: {message}")


class InputFormatError(ValueError):
    """Malformed JSON payload or unknown CLI selector."""
