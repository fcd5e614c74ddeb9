"""Exception types shared across the package."""


class GladpredError(Exception):
    """Base class for all package errors."""


class ArgumentError(GladpredError):
    """An argument violates an operation's precondition."""


class EncodingError(GladpredError):
    """Record cannot be encoded because it fails validation."""


class IoError(GladpredError):
    """File could not be read or written."""


class HeaderMismatch(GladpredError):
    """CSV header does not match the dictionary contract."""

    def __init__(self, missing, extra):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        parts = []
        if self.missing:
            parts.append(f"missing columns: {', '.join(self.missing)}")
        if self.extra:
            parts.append(f"unexpected columns: {', '.join(self.extra)}")
        super().__init__("; ".join(parts) or "header mismatch")


class EmptyCohort(GladpredError):
    """All records were excluded."""


class CalibrationError(GladpredError):
    """Synthetic signal targets are unattainable."""


class DegenerateTraining(GladpredError):
    """No tree in the forest found a split; importances are undefined."""


class LayoutMismatch(GladpredError):
    """Feature vector does not match the model's feature layout."""


class EmptyTraining(GladpredError):
    """Training set is empty."""


class LengthMismatch(GladpredError):
    """Paired arrays have different lengths."""


class ZeroVariance(GladpredError):
    """Evaluated outcomes are constant; R^2 is undefined."""


class MismatchedRuns(GladpredError):
    """Reports being compared come from different runs."""


class UnknownVariable(GladpredError):
    """A variable id is not present in the dictionary."""


class ValidationError(GladpredError):
    """A bundle violates its invariants."""


class FormatVersionMismatch(GladpredError):
    """Persisted bundle uses an unsupported format version."""


class IntegrityError(GladpredError):
    """Persisted bundle is malformed or inconsistent."""
