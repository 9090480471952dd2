"""
Exceptions raised by the operator surface.
"""


class ConfigFileError(ValueError):
    """A run config file or --set override cannot be parsed."""


class RunDirectoryError(ValueError):
    """A run directory is missing, already in use, or carries a bad manifest."""
