"""Exception hierarchy shared across the platform."""


class TwinError(Exception):
    """Base class for all platform errors."""


class UsageError(TwinError):
    """Caller violated an operation precondition or passed bad arguments."""


class ConflictError(TwinError):
    """State change conflicts with existing durable state."""


class IntegrityError(TwinError):
    """Stored data failed a checksum or structural check."""


class RetriableError(TwinError):
    """Transient failure (e.g. adapter transport); safe to retry later."""


class TrainingError(TwinError):
    """Model training diverged or could not proceed."""
