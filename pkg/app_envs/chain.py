"""
ChainOracle: parallel chains with analytically known values.

Each level is a chain of `chain_length` cells. Advancing from the last cell
pays the level's terminal reward r and ends the episode, so under the
always-advance policy V(s_k, M) = gamma^(L-1-k) * r. Terminal rewards are
drawn per level from a Gaussian mixture, which makes the joint value
distribution a mixture as well.

Each level also shows a signpost cue: the one-hot code of its mixture
component plus Gaussian noise. The cue is the only gameplay evidence about
the level's value group.

Actions: 0 advance, 1 noop.
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from .base import MultiSceneEnv
from .exceptions import EnvError, NotAnOracleError


ADVANCE, NOOP = 0, 1


@dataclass(frozen=True)
class ChainLevel:
    seed: int
    component: int
    reward: float
    cue: np.ndarray


class ChainOracle(MultiSceneEnv):
    name = 'chain-oracle'
    n_actions = 2
    obstacle_labels = ('chain',)
    options = ('chain_length', 'gamma', 'reward_means', 'reward_std', 'component_weights', 'cue_noise')

    def __init__(self, level_seeds, rng=None, levels=None, chain_length=8, gamma=0.99,
                 reward_means=(2.0, 10.0), reward_std=0.5, component_weights=None, cue_noise=0.6):
        if chain_length < 1:
            raise EnvError('chain_length must be at least 1')
        self.chain_length = int(chain_length)
        self.gamma = float(gamma)
        self.reward_means = tuple(float(m) for m in reward_means)
        self.reward_std = float(reward_std)
        count = len(self.reward_means)
        weights = np.full(count, 1.0 / count) if component_weights is None else np.asarray(component_weights, float)
        self.component_weights = weights / weights.sum()
        self.cue_noise = float(cue_noise)
        self.obs_dim = self.chain_length + count
        self.max_steps = 4 * self.chain_length
        super().__init__(level_seeds, rng=rng, levels=levels)

    def generate_level(self, seed):
        rng = np.random.default_rng(seed)
        count = len(self.reward_means)
        component = int(rng.choice(count, p=self.component_weights))
        reward = float(self.reward_means[component] + self.reward_std * rng.normal())
        cue = np.eye(count)[component] + self.cue_noise * rng.normal(size=count)
        return ChainLevel(seed=int(seed), component=component, reward=reward, cue=cue)

    def _start(self, level):
        self.position = 0

    def _advance(self, action):
        if action == NOOP:
            return 0.0, False
        if self.position == self.chain_length - 1:
            return self.level.reward, True
        self.position += 1
        return 0.0, False

    def observe(self):
        onehot = np.zeros(self.chain_length)
        onehot[self.position] = 1.0
        return np.concatenate([onehot, self.level.cue])

    def cell(self):
        return self.position

    def obstacle_label(self):
        return 'chain'

    def true_value(self, position, level_id):
        """V(s_k, M) = gamma^(L-1-k) * r_M under the always-advance policy."""
        if not 0 <= position < self.chain_length:
            raise EnvError(f'position {position} outside chain of length {self.chain_length}')
        return self.gamma ** (self.chain_length - 1 - position) * self.get_level(int(level_id)).reward


def true_value(env, state, level):
    """
    Analytic value of `state` (chain position) in `level`.

    Raises:
        NotAnOracleError: env has no analytic value function.
    """
    if not isinstance(env, ChainOracle):
        raise NotAnOracleError(f'{type(env).__name__} has no analytic value function')
    return env.true_value(state, level)
