"""
Generalized advantage estimation.

    delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
    A_t     = delta_t + gamma * lam * (1 - done_t) * A_{t+1}

Episodes that hit the step cap are treated as terminal.
"""

# 1. Third-party
import numpy as np

# 2. Local imports
from .exceptions import MissingBootstrapError


def compute_gae(rewards, values, dones, bootstrap, gamma, lam):
    """
    Advantages and value targets for time-major arrays.

    Args:
        rewards, values, dones: (T, ...) arrays.
        bootstrap: (...) value of the state after the last step; ignored where
            the last step ended an episode.

    Returns:
        tuple: (advantages, returns), both shaped like `rewards`.

    Raises:
        MissingBootstrapError: bootstrap is None.
    """
    if bootstrap is None:
        raise MissingBootstrapError('segment needs a bootstrap value for its final state')
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    nonterminal = 1.0 - np.asarray(dones, dtype=np.float64)
    next_values = np.concatenate([values[1:], np.asarray(bootstrap, dtype=np.float64)[None]], axis=0)
    deltas = rewards + gamma * next_values * nonterminal - values

    advantages = np.zeros_like(rewards)
    running = np.zeros_like(rewards[0])
    for t in range(rewards.shape[0] - 1, -1, -1):
        running = deltas[t] + gamma * lam * nonterminal[t] * running
        advantages[t] = running
    return advantages, advantages + values


def compute_buffer_advantages(buffer, gamma, lam):
    """Fill buffer.advantages and buffer.returns in place."""
    advantages, returns = compute_gae(buffer.rewards.T, buffer.values.T, buffer.dones.T,
                                      buffer.bootstrap, gamma, lam)
    buffer.advantages = advantages.T.copy()
    buffer.returns = returns.T.copy()
    return buffer


def normalize_advantages(advantages, eps=1e-8):
    advantages = np.asarray(advantages, dtype=np.float64)
    return (advantages - advantages.mean()) / (advantages.std() + eps)
