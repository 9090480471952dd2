"""
One PPO update over a filled rollout buffer.

total = policy + value_coef * value - entropy_coef * entropy + boost_scale * cc

Minibatches are groups of whole recurrent chunks drawn without replacement
each epoch. The chunk order depends only on (seed, step).
"""

# 1. Standard library
import logging
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.losses import cc_loss, segment_trajectory_ids
from app_numerics.exceptions import NonFiniteError
from app_numerics.optim import adam_step, clip_grad_norm
from app_numerics.tensor import Tape, log_softmax

from .exceptions import TrainingError
from .gae import normalize_advantages
from .losses import entropy, policy_loss, value_loss


logger = logging.getLogger(__name__)


@dataclass
class UpdateStats:
    """Loss terms averaged over the minibatches of one update."""
    policy_loss: float
    value_loss: float
    entropy: float
    cc_loss: float
    grad_norm: float
    minibatches: int


def minibatch_losses(net, batch, config, boost_scale):
    """
    Loss terms for one minibatch, recorded on the active tape.

    Returns:
        dict: term name -> scalar Tensor; 'cc' is present only when the
        sparsity loss contributes.
    """
    use_cc = boost_scale * (config.dve.k1 + config.dve.k2) > 0
    out = net.unroll(batch.obs, batch.starts, batch.h0, batch.c0,
                     detach_for_cc=use_cc and config.dve.cc_assignments_only)
    log_probs = log_softmax(out.logits)
    terms = {
        'policy': policy_loss(log_probs, batch.actions, batch.old_logp,
                              normalize_advantages(batch.advantages), config.ppo.clip),
        'value': value_loss(out.value, batch.returns),
        'entropy': entropy(log_probs),
    }
    if use_cc:
        terms['cc'] = cc_loss(out.alpha_cc, segment_trajectory_ids(batch.starts), config.dve)
    return terms


def total_loss(terms, config, boost_scale):
    total = terms['policy'] + terms['value'] * config.ppo.value_coef - terms['entropy'] * config.ppo.entropy_coef
    if 'cc' in terms:
        total = total + terms['cc'] * boost_scale
    return total


def ppo_update(net, adam, buffer, config, boost_scale, step):
    """
    Run epochs x minibatches Adam steps on `net`.

    Args:
        net (PolicyValueNet): Learner network, updated in place.
        adam (AdamState): Optimizer state, updated in place.
        buffer (RolloutBuffer): With advantages and returns filled in.
        config (TrainConfig): Run configuration.
        boost_scale (float): Scale of the sparsity loss for this update.
        step (int): Environment steps so far; seeds the minibatch order.

    Raises:
        TrainingError: a loss term is not finite. Parameters are left as they
            were before the failing minibatch.
    """
    chunk_length = config.chunk_length
    chunks = buffer.chunk_starts(chunk_length)
    rng = np.random.default_rng([config.seed, step])
    params = net.parameters()
    sums = {'policy': 0.0, 'value': 0.0, 'entropy': 0.0, 'cc': 0.0, 'grad_norm': 0.0}
    count = 0

    for _ in range(config.ppo.epochs):
        order = rng.permutation(len(chunks))
        for group in np.array_split(order, config.ppo.minibatches):
            batch = buffer.minibatch([chunks[i] for i in group], chunk_length)
            try:
                with Tape() as tape:
                    terms = minibatch_losses(net, batch, config, boost_scale)
                    total = total_loss(terms, config, boost_scale)
            except NonFiniteError as exc:
                logger.error('aborting update at step %d: %s', step, exc)
                raise TrainingError(step, 'network output') from exc
            for name, term in terms.items():
                if not np.isfinite(term.item()):
                    logger.error('aborting update at step %d: %s loss is not finite', step, name)
                    raise TrainingError(step, name)
            grads = tape.gradient(total, params)
            grads, norm = clip_grad_norm(grads, config.ppo.max_grad_norm)
            adam_step(adam, params, grads)
            for name, term in terms.items():
                sums[name] += term.item()
            sums['grad_norm'] += norm
            count += 1

    return UpdateStats(
        policy_loss=sums['policy'] / count,
        value_loss=sums['value'] / count,
        entropy=sums['entropy'] / count,
        cc_loss=sums['cc'] / count,
        grad_norm=sums['grad_norm'] / count,
        minibatches=count,
    )
