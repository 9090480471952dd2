"""
Cluster-spread study on the ChainOracle regression dataset.

Every (level, position) pair is one regression sample. The assignment
subnetwork sees the position one-hot and the level's cue, the mean
subnetwork only the position one-hot, so telling level groups apart has to
go through the assignments. The cluster head is fitted to the analytic
values once with the squared error alone and once with the sparsity loss
added, from the same initial weights.
"""

# 1. Standard library
import logging
from dataclasses import dataclass, field

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.config import CCLossConfig
from app_dve.heads import ClusterHead
from app_dve.losses import cc_loss
from app_dve.metrics import confusion
from app_envs.chain import ChainOracle
from app_envs.registry import level_seed_list
from app_numerics.exceptions import NonFiniteError
from app_numerics.optim import AdamState, adam_step
from app_numerics.tensor import Tape, Tensor


logger = logging.getLogger(__name__)

SHARP_ALPHA = 0.9
SPREAD_COLUMNS = ['seed', 'spread_mse', 'spread_sparse', 'mae_mse', 'mae_sparse',
                  'delta_initial_sparse', 'delta_final_sparse', 'sharp_share_sparse', 'converged']


@dataclass(frozen=True)
class SpreadConfig:
    """
    Attributes:
        levels (int): Number of chain levels in the dataset.
        reward_means (tuple): Centre of each level group's goal reward.
        cue_noise (float): Noise on the group cue shown to the assignment subnetwork.
        steps (int): Full-batch Adam steps per fit.
        k1, k2 (float): Sparsity loss coefficients of the sparse variant.
        seeds (int): Number of seeds; seed i initialises both variants identically.
    """
    levels: int = 40
    level_base_seed: int = 5000
    chain_length: int = 8
    gamma: float = 0.99
    reward_means: tuple = (2.0, 10.0)
    reward_std: float = 0.5
    cue_noise: float = 0.6
    n_clusters: int = 2
    steps: int = 2000
    lr: float = 0.05
    k1: float = 0.5
    k2: float = 0.5
    seeds: int = 5


@dataclass
class SpreadDataset:
    assign_inputs: np.ndarray
    mean_inputs: np.ndarray
    targets: np.ndarray
    trajectory_ids: np.ndarray
    components: np.ndarray
    positions: np.ndarray

    @classmethod
    def from_config(cls, config):
        seeds = level_seed_list(config.levels, config.level_base_seed)
        env = ChainOracle(seeds, chain_length=config.chain_length, gamma=config.gamma,
                          reward_means=config.reward_means, reward_std=config.reward_std,
                          cue_noise=config.cue_noise)
        onehots = np.eye(config.chain_length)
        assign, means, targets, ids, components, positions = [], [], [], [], [], []
        for index, seed in enumerate(seeds):
            level = env.get_level(seed)
            for position in range(config.chain_length):
                assign.append(np.concatenate([onehots[position], level.cue]))
                means.append(onehots[position])
                targets.append(env.true_value(position, seed))
                ids.append(index)
                components.append(level.component)
                positions.append(position)
        return cls(np.asarray(assign), np.asarray(means), np.asarray(targets),
                   np.asarray(ids), np.asarray(components), np.asarray(positions))

    def group_means(self):
        """Per-group average target at every position: the ideal cluster means, shape (groups, L)."""
        groups = np.unique(self.components)
        length = self.positions.max() + 1
        table = np.zeros((groups.size, length))
        for g, group in enumerate(groups):
            for position in range(length):
                mask = (self.components == group) & (self.positions == position)
                table[g, position] = self.targets[mask].mean()
        return table


@dataclass
class FitResult:
    seed: int
    sparse: bool
    spread: float
    mean_abs_error: float
    initial_delta: float
    final_delta: float
    sharp_share: float
    converged: bool
    alpha: np.ndarray = field(repr=False)
    means: np.ndarray = field(repr=False)


def fit_cluster_head(dataset, config, seed, sparse):
    """
    Fit a fresh ClusterHead by full-batch Adam.

    A non-finite loss stops the fit and marks the result as not converged.
    """
    rng = np.random.default_rng(seed)
    head = ClusterHead(dataset.assign_inputs.shape[1], config.n_clusters, rng,
                       mean_input_size=dataset.mean_inputs.shape[1])
    params = head.parameters()
    adam = AdamState.for_parameters(params, lr=config.lr)
    loss_config = CCLossConfig(k1=config.k1, k2=config.k2)
    x, m = Tensor(dataset.assign_inputs), Tensor(dataset.mean_inputs)
    targets = Tensor(dataset.targets)
    initial_delta = float(np.mean(confusion(head(x, mean_input=m).alpha.data)))

    converged = True
    for step in range(config.steps):
        try:
            with Tape() as tape:
                out = head(x, mean_input=m)
                error = out.value - targets
                loss = (error * error).mean()
                if sparse:
                    loss = loss + cc_loss(out.alpha, dataset.trajectory_ids, loss_config)
        except NonFiniteError:
            converged = False
        if not converged or not np.isfinite(loss.item()):
            converged = False
            logger.warning('spread fit (seed %d, sparse=%s) diverged at step %d', seed, sparse, step)
            break
        adam_step(adam, params, tape.gradient(loss, params))

    out = head(x, mean_input=m)
    alpha, means, value = out.alpha.data, out.means.data, out.value.data
    return FitResult(
        seed=seed,
        sparse=sparse,
        spread=float(np.mean(np.var(means, axis=1))),
        mean_abs_error=float(np.mean(np.abs(value - dataset.targets))),
        initial_delta=initial_delta,
        final_delta=float(np.mean(confusion(alpha))),
        sharp_share=float(np.mean(alpha.max(axis=1) >= SHARP_ALPHA)),
        converged=converged and bool(np.all(np.isfinite(value))),
        alpha=alpha,
        means=means,
    )


@dataclass
class SpreadReport:
    pairs: list

    @property
    def sparse_wins(self):
        """Seeds where the sparse fit spreads its cluster means wider."""
        return sum(sparse.spread > mse.spread for mse, sparse in self.pairs)

    def rows(self):
        rows = [{
            'seed': mse.seed,
            'spread_mse': mse.spread,
            'spread_sparse': sparse.spread,
            'mae_mse': mse.mean_abs_error,
            'mae_sparse': sparse.mean_abs_error,
            'delta_initial_sparse': sparse.initial_delta,
            'delta_final_sparse': sparse.final_delta,
            'sharp_share_sparse': sparse.sharp_share,
            'converged': mse.converged and sparse.converged,
        } for mse, sparse in self.pairs]
        summary = {key: float(np.mean([row[key] for row in rows])) for key in SPREAD_COLUMNS[1:-1]}
        summary.update(seed='mean', converged=all(row['converged'] for row in rows))
        return rows + [summary]


def spread_study(config=SpreadConfig()):
    dataset = SpreadDataset.from_config(config)
    pairs = []
    for seed in range(config.seeds):
        pairs.append((fit_cluster_head(dataset, config, seed, sparse=False),
                      fit_cluster_head(dataset, config, seed, sparse=True)))
        logger.info('spread seed %d: mse %.4f, sparse %.4f', seed, pairs[-1][0].spread, pairs[-1][1].spread)
    return SpreadReport(pairs=pairs)
