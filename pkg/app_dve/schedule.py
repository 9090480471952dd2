"""
When to apply the confusion-contribution loss.

- pre: scale ramps linearly from 0 to 1 over the first `ramp_fraction` of
  training and stays at 1.
- post: scale is 0 until training has run `min_pretrain_steps` steps and
  the least-squares slope of the last `window` mean episode lengths falls
  below `slope_threshold`; then it latches at 1.
"""

# 1. Standard library
import logging

# 2. Third-party
import numpy as np


logger = logging.getLogger(__name__)


def episode_length_slope(history, window):
    """Least-squares slope of the last `window` entries, or None if there are fewer."""
    if len(history) < window:
        return None
    recent = np.asarray(list(history)[-window:], dtype=np.float64)
    return float(np.polyfit(np.arange(window, dtype=np.float64), recent, 1)[0])


def boost_coefficient(step, episode_length_history, config, total_steps, latched=False):
    """
    Scale factor in [0, 1] for the loss at environment step `step`.

    A post-boost history shorter than the window gives 0, not an error.
    """
    if step < 0:
        raise ValueError('step must be non-negative')
    if config.boost == 'pre':
        ramp = config.ramp_fraction * total_steps
        if ramp <= 0:
            return 1.0
        return float(min(1.0, step / ramp))
    if latched:
        return 1.0
    if step < config.min_pretrain_steps:
        return 0.0
    slope = episode_length_slope(episode_length_history, config.window)
    if slope is None:
        return 0.0
    return 1.0 if slope < config.slope_threshold else 0.0


class BoostScheduler:
    """
    Stateful wrapper around boost_coefficient.

    Holds the post-boost latch and warns once when a pre-boost ramp is
    running while episode lengths are still growing fast.
    """

    def __init__(self, config, total_steps, latched=False):
        self.config = config
        self.total_steps = total_steps
        self.latched = latched
        self.warned = False

    def __call__(self, step, history):
        scale = boost_coefficient(step, history, self.config, self.total_steps, latched=self.latched)
        if self.config.boost == 'post' and scale >= 1.0 and not self.latched:
            self.latched = True
            logger.info('post-boost triggered at step %d', step)
        elif self.config.boost == 'pre' and scale > 0 and not self.warned:
            slope = episode_length_slope(history, self.config.window)
            if slope is not None and slope >= self.config.slope_threshold:
                self.warned = True
                logger.warning(
                    'sparsity loss active at step %d while episode length still grows (slope %.3f); '
                    'assignments may sparsify over unexplored states', step, slope)
        return scale
