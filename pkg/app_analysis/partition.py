"""
Partition of visited states by their most active cluster.

States are sampled by playing held-out episodes with a trained checkpoint.
Each sample goes to the cluster with the largest assignment (lowest index on
ties), so the clusters' state sets are disjoint and cover every sample. The
environment's obstacle labels give a ground truth to test the partition
against.
"""

# 1. Standard library
import json
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from app_envs.registry import make_env, spawn_rng
from app_ppo.evaluation import run_episode

from .exceptions import AnalysisError
from .stats import association_p_value


PARTITION_STREAM = 0x70617274


@dataclass(frozen=True)
class StateSample:
    level_id: int
    step: int
    features: np.ndarray
    obstacle_label: str
    alpha: np.ndarray


def argmax_partition(alphas):
    """Cluster index per row; np.argmax returns the first maximum on ties."""
    return np.argmax(np.asarray(alphas), axis=-1)


@dataclass
class ClusterPartition:
    """
    Attributes:
        n_clusters (int): Number of clusters, including ones that own no state.
        samples (list[StateSample]): Sampled states.
        clusters (np.ndarray): Owning cluster of every sample.
    """
    n_clusters: int
    samples: list
    clusters: np.ndarray

    def __post_init__(self):
        sets = self.sets()
        owned = [i for members in sets.values() for i in members]
        if len(owned) != len(set(owned)):
            raise AnalysisError('cluster state sets overlap')
        if sorted(owned) != list(range(len(self.samples))):
            raise AnalysisError('cluster state sets do not cover the samples')

    def sets(self):
        return {c: [int(i) for i in np.flatnonzero(self.clusters == c)] for c in range(self.n_clusters)}

    def coverage(self):
        return np.bincount(self.clusters, minlength=self.n_clusters)

    def label_table(self):
        labels = sorted({s.obstacle_label for s in self.samples})
        table = np.zeros((self.n_clusters, len(labels)), dtype=np.int64)
        for sample, cluster in zip(self.samples, self.clusters):
            table[cluster, labels.index(sample.obstacle_label)] += 1
        return labels, table

    def p_value(self):
        return association_p_value(self.label_table()[1])

    def rows(self):
        labels, table = self.label_table()
        return [{'cluster': c, 'states': int(table[c].sum()), **{label: int(n) for label, n in zip(labels, table[c])}}
                for c in range(self.n_clusters)]


def partition_from_samples(samples, n_clusters):
    clusters = argmax_partition([s.alpha for s in samples]) if samples else np.zeros(0, dtype=np.int64)
    return ClusterPartition(n_clusters=n_clusters, samples=list(samples), clusters=clusters)


def partition_states(checkpoint, sample_count, level_seeds=None, seed=None):
    """
    Sample `sample_count` visited states and partition them.

    Args:
        checkpoint (Checkpoint): Loaded training checkpoint.
        sample_count (int): Number of states to sample (>= 1).
        level_seeds (list[int] | None): Levels to play; defaults to the run's held-out set.
        seed (int | None): Stream seed; defaults to the run seed.

    Raises:
        AnalysisError: the checkpoint has no cluster head or sample_count < 1.
    """
    config, net = checkpoint.config, checkpoint.net
    if config.mode == 'rl2':
        raise AnalysisError('partition requires cluster head; checkpoint was trained in rl2 mode')
    if sample_count < 1:
        raise AnalysisError('partition needs at least one sampled state')
    level_seeds = list(level_seeds or config.eval.seeds())
    seed = config.seed if seed is None else seed
    env = make_env(config.env.name, level_seeds, **config.env_options())

    samples = []
    episode = 0
    while len(samples) < sample_count:
        env.rng = spawn_rng(seed, PARTITION_STREAM, episode, 0)
        record = run_episode(net, env, level_seeds[episode % len(level_seeds)],
                             spawn_rng(seed, PARTITION_STREAM, episode, 1), config.ppo.gamma,
                             episode=episode, record=True)
        samples.extend(StateSample(record.level_id, step.step, step.obs, step.obstacle_label, step.alpha)
                       for step in record.steps)
        episode += 1
    return partition_from_samples(samples[:sample_count], net.n_clusters)


def write_partition_dump(path, partition):
    with open(path, 'w') as fh:
        for sample, cluster in zip(partition.samples, partition.clusters):
            fh.write(json.dumps({
                'cluster': int(cluster),
                'level_id': sample.level_id,
                'step': sample.step,
                'feature_vector': [float(v) for v in sample.features],
                'obstacle_label': sample.obstacle_label,
            }, sort_keys=True) + '\n')
