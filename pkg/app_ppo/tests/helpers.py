"""
Small configs, a scripted environment and synthetic minibatches for the PPO tests.
"""

# 1. Third-party
import numpy as np

# 2. Local imports
from app_envs.base import MultiSceneEnv
from app_ppo.api.serializers import build_train_config
from app_ppo.buffer import Minibatch


TINY = {
    'seed': 7,
    'env.name': 'chain-oracle',
    'env.levels': 4,
    'env.chain_length': 4,
    'ppo.workers': 2,
    'ppo.segment_length': 8,
    'ppo.chunk_length': 4,
    'ppo.epochs': 2,
    'ppo.minibatches': 2,
    'ppo.total_steps': 48,
    'net.hidden': 8,
    'dve.n_clusters': 2,
    'eval.interval': 1,
    'eval.episodes': 2,
    'eval.levels': 2,
    'run.checkpoint_interval': 1,
    'run.dump_episodes': 1,
}


def tiny_config(**overrides):
    flat = dict(TINY)
    flat.update({key.replace('__', '.'): value for key, value in overrides.items()})
    return build_train_config(flat)


def curve_config(mode, seed, env_name, **overrides):
    """Config of the gated directional runs: long enough for the modes to separate."""
    return tiny_config(**{
        'mode': mode, 'seed': seed, 'env__name': env_name, 'env__levels': 500,
        'ppo__workers': 4, 'ppo__segment_length': 64, 'ppo__chunk_length': 16,
        'ppo__minibatches': 4, 'ppo__epochs': 3, 'ppo__total_steps': 60000,
        'net__hidden': 32, 'dve__n_clusters': 1 if mode == 'rl2' else 3,
        'eval__interval': 20, 'eval__episodes': 32, 'eval__levels': 50,
        'run__checkpoint_interval': 1000, 'run__dump_episodes': 0,
        **overrides,
    })


class StubEnv(MultiSceneEnv):
    """Every episode lasts exactly four steps with reward 1 per step."""
    name = 'stub'
    n_actions = 2
    obs_dim = 3
    max_steps = 10
    obstacle_labels = ('open',)

    def __init__(self, level_seeds, rng=None, fail_at=None):
        super().__init__(level_seeds, rng=rng)
        self.fail_at = fail_at
        self.calls = 0

    def generate_level(self, seed):
        return seed

    def _start(self, level):
        pass

    def _advance(self, action):
        self.calls += 1
        if self.fail_at is not None and self.calls >= self.fail_at:
            raise RuntimeError('scripted fault')
        return 1.0, self.t == 3

    def observe(self):
        return np.array([self.t / 4.0, (self.level % 7) / 7.0, 1.0])

    def cell(self):
        return self.t

    def obstacle_label(self):
        return 'open'


def synthetic_minibatch(rng, obs_dim=3, n_actions=3, hidden=4, length=3, batch=2):
    starts = np.zeros((length, batch), dtype=bool)
    starts[1, 0] = True
    return Minibatch(
        obs=rng.normal(size=(length, batch, obs_dim)),
        starts=starts,
        h0=0.1 * rng.normal(size=(batch, hidden)),
        c0=0.1 * rng.normal(size=(batch, hidden)),
        actions=rng.integers(n_actions, size=length * batch),
        old_logp=np.log(np.full(length * batch, 1.0 / n_actions)) + 0.05 * rng.normal(size=length * batch),
        advantages=rng.normal(size=length * batch),
        returns=rng.normal(size=length * batch),
    )
