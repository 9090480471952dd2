"""
Exceptions raised by the clustered critic utilities.
"""


class SimplexError(ValueError):
    """Cluster assignments are not a probability vector."""


class EmptyBatchError(ValueError):
    """A trajectory or batch without any steps was supplied."""
