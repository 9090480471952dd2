"""
Differentiable confusion-contribution loss.

    L_CC = k1 * mean_steps[log(delta + eps)] + k2 * mean_traj[log(sum_i rho_i^2 + eps)]

The step mean runs over every step in the batch; the trajectory mean runs
over every (possibly truncated) trajectory segment in the batch.
"""

# 1. Third-party
import numpy as np

# 2. Local imports
from app_numerics.tensor import Tensor, log, matmul, reshape

from .exceptions import EmptyBatchError


def confusion_tensor(alpha):
    """delta for every row of an (S, N_b) assignment tensor."""
    return 1.0 / ((alpha * alpha).sum(axis=-1) * float(alpha.shape[-1]))


def segment_trajectory_ids(starts):
    """
    Label the steps of (L, B) recurrent chunks with trajectory ids.

    A new trajectory begins at the top of every column and at every step
    flagged as an episode start. Ids follow the t-major flattening used by
    the unrolled network outputs (index t * B + b).
    """
    starts = np.asarray(starts, dtype=bool)
    new = starts.copy()
    new[0, :] = True
    length, batch = new.shape
    ids = np.cumsum(new.T.reshape(-1)).reshape(batch, length).T - 1
    return ids.reshape(-1)


def trajectory_average_matrix(trajectory_ids):
    """(n_traj, S) matrix whose rows average the steps of each trajectory."""
    trajectory_ids = np.asarray(trajectory_ids)
    _, inverse, counts = np.unique(trajectory_ids, return_inverse=True, return_counts=True)
    matrix = np.zeros((counts.size, trajectory_ids.size))
    matrix[inverse, np.arange(trajectory_ids.size)] = 1.0 / counts[inverse]
    return matrix


def cc_loss(alpha, trajectory_ids, config):
    """
    Confusion-contribution loss over a batch of assignments.

    Args:
        alpha (Tensor): (S, N_b) assignments on the simplex.
        trajectory_ids (array): (S,) trajectory label of each step.
        config (CCLossConfig): Coefficients and log guard.

    Returns:
        Tensor: scalar loss.

    Raises:
        EmptyBatchError: the batch has no steps.
    """
    if alpha.ndim != 2 or alpha.shape[0] == 0:
        raise EmptyBatchError('cc_loss needs a non-empty (S, N_b) batch')
    if len(trajectory_ids) != alpha.shape[0]:
        raise EmptyBatchError('every step needs a trajectory id')
    delta = confusion_tensor(alpha)
    step_term = log(delta + config.eps_log).mean()

    averages = Tensor(trajectory_average_matrix(trajectory_ids), dtype=alpha.dtype)
    rho = matmul(averages, alpha * reshape(delta, (alpha.shape[0], 1)))
    trajectory_term = log((rho * rho).sum(axis=1) + config.eps_log).mean()
    return step_term * config.k1 + trajectory_term * config.k2
