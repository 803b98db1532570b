"""Exception types shared across the toolkit."""


class ResourceLimitError(Exception):
    """Requested size or order exceeds a configured maximum."""


class RefinementError(ResourceLimitError):
    """Mesh refinement exhausted its budget without converging."""


class SchemaError(ValueError):
    """Serialized input is malformed; the message names the offending field."""
