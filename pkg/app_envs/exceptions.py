"""
Exceptions raised by the multi-scene environments.
"""


class EnvError(RuntimeError):
    """Base class for environment faults."""


class EmptyLevelSetError(EnvError, ValueError):
    """An environment was configured without any level seeds."""


class EpisodeDoneError(EnvError):
    """step() was called after the episode ended and before reset()."""


class InvalidActionError(EnvError, ValueError):
    """The action index is outside the shared action space."""


class NotAnOracleError(EnvError, TypeError):
    """true_value() was requested from an environment without analytic values."""
