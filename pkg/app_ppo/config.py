"""
Training configuration.

Contains:
- EnvConfig, PPOConfig, NetConfig, DVEConfig, EvalConfig, RunConfig: one
  frozen dataclass per dotted namespace of the run config file.
- TrainConfig: the complete, validated configuration of one run.
- fold_flat_mapping: turns `ppo.gamma=0.99` style keys into nested namespaces.

Instances are produced by app_ppo.api.serializers.build_train_config, which
validates every key first.
"""

# 1. Standard library
import hashlib
import json
from dataclasses import asdict, dataclass, field

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.config import CCLossConfig
from app_envs.registry import level_seed_list


MODES = ('rl2', 'dve', 'sparse-dve')
NAMESPACES = ('env', 'ppo', 'net', 'dve', 'eval', 'run')
TOP_LEVEL_KEYS = ('mode', 'seed')


@dataclass(frozen=True)
class EnvConfig:
    name: str = 'corridor-coin'
    levels: int = 500
    level_base_seed: int = 1000
    level_seeds: tuple = ()
    chain_length: int = 8

    def seeds(self):
        if self.level_seeds:
            return list(self.level_seeds)
        return level_seed_list(self.levels, self.level_base_seed)


@dataclass(frozen=True)
class PPOConfig:
    gamma: float = 0.99
    lam: float = 0.95
    clip: float = 0.2
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    lr: float = 5e-4
    max_grad_norm: float = 0.5
    workers: int = 4
    segment_length: int = 128
    chunk_length: int = 0
    epochs: int = 4
    minibatches: int = 4
    total_steps: int = 200000
    precision: str = 'float64'


@dataclass(frozen=True)
class NetConfig:
    hidden: int = 64


@dataclass(frozen=True)
class DVEConfig(CCLossConfig):
    n_clusters: int = 3


@dataclass(frozen=True)
class EvalConfig:
    interval: int = 5
    episodes: int = 16
    levels: int = 50
    level_base_seed: int = 900000

    def seeds(self):
        return level_seed_list(self.levels, self.level_base_seed)


@dataclass(frozen=True)
class RunConfig:
    checkpoint_interval: int = 25
    dump_episodes: int = 4


@dataclass(frozen=True)
class TrainConfig:
    """
    Attributes:
        mode (str): 'rl2', 'dve' or 'sparse-dve'.
        seed (int): Master seed every rng stream of the run derives from.
        env, ppo, net, dve, eval, run: namespace configs.
    """
    mode: str = 'sparse-dve'
    seed: int = 0
    env: EnvConfig = field(default_factory=EnvConfig)
    ppo: PPOConfig = field(default_factory=PPOConfig)
    net: NetConfig = field(default_factory=NetConfig)
    dve: DVEConfig = field(default_factory=DVEConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    run: RunConfig = field(default_factory=RunConfig)

    @property
    def dtype(self):
        return np.float32 if self.ppo.precision == 'float32' else np.float64

    @property
    def chunk_length(self):
        return self.ppo.chunk_length or self.ppo.segment_length

    @property
    def chunks_per_update(self):
        return self.ppo.workers * (self.ppo.segment_length // self.chunk_length)

    @property
    def steps_per_update(self):
        return self.ppo.workers * self.ppo.segment_length

    @property
    def total_updates(self):
        return max(1, self.ppo.total_steps // self.steps_per_update)

    def env_options(self):
        return {'chain_length': self.env.chain_length, 'gamma': self.ppo.gamma}

    def to_flat(self):
        """Flat dotted mapping with JSON-compatible values; build_train_config accepts it back."""
        flat = {'mode': self.mode, 'seed': self.seed}
        for namespace in NAMESPACES:
            for key, value in asdict(getattr(self, namespace)).items():
                flat[f'{namespace}.{key}'] = list(value) if isinstance(value, tuple) else value
        return flat

    def config_hash(self):
        canonical = json.dumps(self.to_flat(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def fold_flat_mapping(flat):
    """
    Fold dotted keys into one dict per namespace.

    Every namespace is present in the result (empty when no key names it), so
    nested serializers fill their defaults. Keys outside the known namespaces
    stay at the top level, where validation reports them.
    """
    nested = {namespace: {} for namespace in NAMESPACES}
    for key, value in flat.items():
        namespace, dot, name = key.partition('.')
        if dot and namespace in nested:
            nested[namespace][name] = value
        else:
            nested[key] = value
    return nested
