"""
PPO loss terms on tape tensors.
"""

# 2. Local imports
from app_numerics.tensor import Tensor, clip, exp, minimum, take_along


def policy_loss(log_probs, actions, old_logp, advantages, clip_eps):
    """
    Clipped surrogate: -mean(min(r * A, clip(r, 1 - eps, 1 + eps) * A)).

    Args:
        log_probs (Tensor): (S, n_actions) log-probabilities of the current policy.
        actions, old_logp, advantages: (S,) arrays recorded at collection time.
    """
    new_logp = take_along(log_probs, actions)
    ratio = exp(new_logp - Tensor(old_logp, dtype=new_logp.dtype))
    advantages = Tensor(advantages, dtype=new_logp.dtype)
    unclipped = ratio * advantages
    clipped = clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantages
    return -minimum(unclipped, clipped).mean()


def value_loss(values, returns):
    error = values - Tensor(returns, dtype=values.dtype)
    return (error * error).mean()


def entropy(log_probs):
    """Mean policy entropy of (S, n_actions) log-probabilities."""
    return -(exp(log_probs) * log_probs).sum(axis=-1).mean()
