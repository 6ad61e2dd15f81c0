class PreconditionError(ValueError):
    """Input outside the supported domain."""


class ResourceCapError(RuntimeError):
    """A configured size cap would be exceeded."""


class VerificationError(RuntimeError):
    """A computed object failed its defining check."""
