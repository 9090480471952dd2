"""
Confusion and contribution of cluster assignments, and the mixture value.

Provides:
- combine: V(s, M) = sum_i alpha_i * V_i(s).
- confusion: delta = 1 / (N_b * sum_i alpha_i^2); 1 at uniform alpha,
  1/N_b at a one-hot alpha.
- contribution: rho_i(tau) = mean_t delta_t * alpha_{t,i}.
- ClusterDiagnostics: per-step deltas and per-trajectory contributions for
  a batch, with the summaries written to the metrics file.
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from .exceptions import EmptyBatchError, SimplexError


SIMPLEX_TOLERANCE = 1e-6


def check_simplex(alpha, atol=SIMPLEX_TOLERANCE):
    """Return alpha as a float array, raising SimplexError unless every row is on the simplex."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim == 0 or alpha.shape[-1] == 0:
        raise SimplexError('cluster assignments need at least one entry')
    if not np.all(np.isfinite(alpha)):
        raise SimplexError('cluster assignments contain non-finite values')
    if np.any(alpha < -atol) or np.any(np.abs(alpha.sum(axis=-1) - 1.0) > atol):
        raise SimplexError('cluster assignments must be non-negative and sum to 1')
    return alpha


def combine(alpha, means):
    """Mixture value estimate; always within [min(means), max(means)]."""
    alpha = check_simplex(alpha)
    means = np.asarray(means, dtype=np.float64)
    if means.shape != alpha.shape:
        raise SimplexError(f'{alpha.shape[-1]} assignments for {means.shape[-1]} cluster means')
    value = (alpha * means).sum(axis=-1)
    return float(value) if value.ndim == 0 else value


def confusion(alpha):
    alpha = check_simplex(alpha)
    delta = 1.0 / (alpha.shape[-1] * (alpha * alpha).sum(axis=-1))
    return float(delta) if delta.ndim == 0 else delta


def contribution(alphas):
    """
    Per-cluster contribution over one trajectory.

    Args:
        alphas: (T, N_b) assignments, one row per step.

    Raises:
        EmptyBatchError: T == 0.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.ndim != 2 or alphas.shape[0] == 0:
        raise EmptyBatchError('contribution needs a non-empty (T, N_b) trajectory')
    deltas = confusion(alphas)
    return (deltas[:, None] * alphas).mean(axis=0)


@dataclass
class ClusterDiagnostics:
    """
    Attributes:
        deltas (np.ndarray): Confusion of every step in the batch.
        rhos (np.ndarray): (trajectories, N_b) contributions.
        max_alpha (np.ndarray): Largest assignment of every step.
    """
    deltas: np.ndarray
    rhos: np.ndarray
    max_alpha: np.ndarray

    @classmethod
    def from_trajectories(cls, trajectories):
        trajectories = [np.asarray(t, dtype=np.float64) for t in trajectories]
        if not trajectories:
            raise EmptyBatchError('no trajectories to summarise')
        stacked = np.concatenate(trajectories, axis=0)
        return cls(
            deltas=np.asarray(confusion(stacked), dtype=np.float64).reshape(-1),
            rhos=np.stack([contribution(t) for t in trajectories]),
            max_alpha=stacked.max(axis=-1),
        )

    @property
    def mean_delta(self):
        return float(self.deltas.mean())

    @property
    def mean_rho(self):
        return self.rhos.mean(axis=0)

    def max_alpha_quantiles(self):
        p50, p90 = np.quantile(self.max_alpha, [0.5, 0.9])
        return float(p50), float(p90)
