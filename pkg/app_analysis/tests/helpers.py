"""
In-memory checkpoints for the analysis tests.
"""

# 1. Local imports
from app_envs.registry import make_env
from app_numerics.optim import AdamState
from app_ppo.checkpoint import Checkpoint, TrainingProgress
from app_ppo.network import PolicyValueNet
from app_ppo.tests.helpers import tiny_config


def fresh_checkpoint(**overrides):
    """Untrained network wrapped as a checkpoint of a tiny run."""
    config = tiny_config(**overrides)
    sample_env = make_env(config.env.name, config.env.seeds(), **config.env_options())
    net = PolicyValueNet.from_config(config, sample_env.obs_dim, sample_env.n_actions)
    adam = AdamState.for_parameters(net.parameters(), lr=config.ppo.lr)
    return Checkpoint(config=config, net=net, adam=adam, progress=TrainingProgress(), meta={})
