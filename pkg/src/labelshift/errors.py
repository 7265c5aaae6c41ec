"""Exception types shared across the package."""


class LabelShiftError(Exception):
    """Base class for errors raised by this package."""


class EmptyDatasetError(LabelShiftError):
    """A fitting operation received a dataset with no samples."""


class EmptyClassError(LabelShiftError):
    """A per-class fit was requested for a label with no samples."""


class DomainError(LabelShiftError):
    """A query point lies outside the configured feature box."""


class SingularConfusionError(LabelShiftError):
    """The pilot's confusion matrix is numerically singular (|det| below the floor)."""
