"""
Exceptions raised while collecting rollouts, updating and checkpointing.
"""


class RolloutError(RuntimeError):
    """A rollout worker failed; carries the worker id."""

    def __init__(self, worker_id, message):
        super().__init__(f'worker {worker_id}: {message}')
        self.worker_id = worker_id


class MissingBootstrapError(ValueError):
    """Advantage estimation on a segment without its bootstrap value."""


class TrainingError(RuntimeError):
    """An update produced a non-finite loss term; carries the step and term."""

    def __init__(self, step, term):
        super().__init__(f'non-finite {term} at step {step}; update aborted')
        self.step = step
        self.term = term


class CheckpointError(ValueError):
    """A checkpoint is unreadable or does not match the current config."""
