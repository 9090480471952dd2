"""
Storage for one update's worth of rollouts.

Arrays are indexed (worker, t). Recurrent minibatches are built from whole
chunks of `chunk_length` consecutive steps of one worker, together with the
recurrent state recorded before the chunk's first step.
"""

# 1. Standard library
from dataclasses import dataclass, field

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.metrics import ClusterDiagnostics


@dataclass
class EpisodeSummary:
    """A finished episode seen during collection."""
    worker_id: int
    level_id: int
    total_reward: float
    length: int


@dataclass
class Minibatch:
    """
    Attributes:
        obs (np.ndarray): (L, B, obs_dim).
        starts (np.ndarray): (L, B) episode-start flags.
        h0, c0 (np.ndarray): (B, hidden) state before the chunks.
        actions, old_logp, advantages, returns (np.ndarray): (L * B,) t-major.
    """
    obs: np.ndarray
    starts: np.ndarray
    h0: np.ndarray
    c0: np.ndarray
    actions: np.ndarray
    old_logp: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray


@dataclass
class RolloutBuffer:
    obs: np.ndarray
    actions: np.ndarray
    logp: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    starts: np.ndarray
    alpha: np.ndarray
    means: np.ndarray
    values: np.ndarray
    h: np.ndarray
    c: np.ndarray
    level_ids: np.ndarray
    bootstrap: np.ndarray
    advantages: np.ndarray = None
    returns: np.ndarray = None
    episodes: list = field(default_factory=list)

    @classmethod
    def allocate(cls, workers, steps, obs_dim, n_clusters, hidden):
        shape = (workers, steps)
        return cls(
            obs=np.zeros(shape + (obs_dim,)),
            actions=np.zeros(shape, dtype=np.int64),
            logp=np.zeros(shape),
            rewards=np.zeros(shape),
            dones=np.zeros(shape, dtype=bool),
            starts=np.zeros(shape, dtype=bool),
            alpha=np.zeros(shape + (n_clusters,)),
            means=np.zeros(shape + (n_clusters,)),
            values=np.zeros(shape),
            h=np.zeros(shape + (hidden,)),
            c=np.zeros(shape + (hidden,)),
            level_ids=np.zeros(shape, dtype=np.int64),
            bootstrap=np.zeros(workers),
        )

    @property
    def workers(self):
        return self.rewards.shape[0]

    @property
    def steps(self):
        return self.rewards.shape[1]

    def chunk_starts(self, chunk_length):
        """(worker, t0) of every chunk, worker-major."""
        return [(w, t0) for w in range(self.workers) for t0 in range(0, self.steps, chunk_length)]

    def minibatch(self, chunks, chunk_length):
        """Stack the given (worker, t0) chunks side by side into (L, B) arrays."""
        def stack(array):
            return np.stack([array[w, t0:t0 + chunk_length] for w, t0 in chunks], axis=1)

        return Minibatch(
            obs=stack(self.obs),
            starts=stack(self.starts),
            h0=np.stack([self.h[w, t0] for w, t0 in chunks]),
            c0=np.stack([self.c[w, t0] for w, t0 in chunks]),
            actions=stack(self.actions).reshape(-1),
            old_logp=stack(self.logp).reshape(-1),
            advantages=stack(self.advantages).reshape(-1),
            returns=stack(self.returns).reshape(-1),
        )

    def segments(self, array):
        """Split each worker's row of `array` into trajectory segments at episode starts."""
        pieces = []
        for w in range(self.workers):
            cuts = [t for t in np.flatnonzero(self.starts[w]) if t > 0]
            pieces.extend(np.split(array[w], cuts))
        return [piece for piece in pieces if len(piece)]

    def diagnostics(self):
        return ClusterDiagnostics.from_trajectories(self.segments(self.alpha))
