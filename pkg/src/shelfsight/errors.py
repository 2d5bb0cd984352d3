"""Exception types shared across the engine."""


class ShelfSightError(Exception):
    """Base class for all engine errors."""


class InvalidArgumentError(ShelfSightError):
    """An argument violates a documented precondition or invariant."""


class BehindCameraError(InvalidArgumentError):
    """A world point with z <= 0 cannot be projected."""


class DegenerateMarkerError(InvalidArgumentError):
    """A marker observation with non-positive apparent size has no depth."""


class SchemaError(ShelfSightError):
    """A document failed parsing or validation.

    ``path`` locates the offending field, e.g. ``products[3].price`` or
    ``line 4 column 12`` for syntax errors.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NotFoundError(ShelfSightError):
    """A referenced session or product does not exist."""


class MissingScaleError(ShelfSightError):
    """normalize() was asked for a feature with no covering scale."""

    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"no scale covers feature {feature!r}")


class EmptyComparisonError(ShelfSightError):
    """The comparison view needs at least one favorite."""
