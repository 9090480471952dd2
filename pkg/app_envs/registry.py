"""
Environment lookup, level-set construction and seeded rng streams.
"""

# 1. Third-party
import numpy as np

# 2. Local imports
from .chain import ChainOracle
from .corridor import CorridorCoin
from .exceptions import EnvError
from .fruit import FruitLine


ENVIRONMENTS = {
    CorridorCoin.name: CorridorCoin,
    FruitLine.name: FruitLine,
    ChainOracle.name: ChainOracle,
}


def level_seed_list(count, base_seed):
    return [int(base_seed) + i for i in range(int(count))]


def spawn_rng(master_seed, *keys):
    """Independent generator for (master seed, worker id, ...)."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *[int(k) for k in keys]]))


def make_env(name, level_seeds, rng=None, **options):
    """
    Build an environment by registry name.

    Options an environment does not declare in its `options` are ignored, so
    one call site can serve every family.
    """
    try:
        env_class = ENVIRONMENTS[name]
    except KeyError:
        raise EnvError(f'unknown environment {name!r}; choose from {sorted(ENVIRONMENTS)}') from None
    accepted = getattr(env_class, 'options', ())
    kwargs = {key: value for key, value in options.items() if key in accepted}
    return env_class(level_seeds, rng=rng, **kwargs)
