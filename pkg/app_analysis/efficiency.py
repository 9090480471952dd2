"""
Navigation-efficiency comparison between trained runs.

Every run is evaluated on the same held-out levels with the same episode
streams. The report has one row per run (mean reward, mean episode length,
mean revisits) and one paired row per (level, run).
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from app_ppo.evaluation import evaluate

from .exceptions import AnalysisError


EFFICIENCY_COLUMNS = ['run', 'mode', 'mean_reward', 'mean_episode_length', 'mean_revisits', 'episodes']
PAIRED_COLUMNS = ['level_id', 'run', 'mode', 'mean_episode_length', 'mean_revisits', 'episodes']


def count_revisits(cells):
    """Steps that entered a cell already visited earlier in the episode."""
    return len(cells) - len(set(cells))


@dataclass
class EvaluatedRun:
    mode: str
    records: list


@dataclass
class EfficiencyReport:
    rows: list
    paired: list


def summary_row(name, run):
    """One EFFICIENCY_COLUMNS row for an evaluated run."""
    return {
        'run': name,
        'mode': run.mode,
        'mean_reward': float(np.mean([r.total_reward for r in run.records])),
        'mean_episode_length': float(np.mean([r.length for r in run.records])),
        'mean_revisits': float(np.mean([count_revisits(r.cells) for r in run.records])),
        'episodes': len(run.records),
    }


def evaluate_checkpoints(checkpoints, level_seeds, episodes, seed=0):
    """
    Args:
        checkpoints (dict[str, Checkpoint]): Run name -> loaded checkpoint.

    Raises:
        AnalysisError: the checkpoints were trained on different environment families.
    """
    families = {checkpoint.config.env.name for checkpoint in checkpoints.values()}
    if len(families) > 1:
        raise AnalysisError(f'checkpoints come from different environments: {sorted(families)}')
    return {name: EvaluatedRun(checkpoint.config.mode,
                               evaluate(checkpoint.net, checkpoint.config, level_seeds, episodes, seed=seed))
            for name, checkpoint in checkpoints.items()}


def efficiency_report(results, min_episodes=1):
    """
    Build the comparison from evaluated runs.

    Args:
        results (dict[str, EvaluatedRun]): Runs covering at least two modes.
        min_episodes (int): Fewest episodes a run must contribute.

    Raises:
        AnalysisError: fewer than two modes, too few episodes, or runs
            evaluated on different level sets.
    """
    modes = {run.mode for run in results.values()}
    if len(modes) < 2:
        raise AnalysisError(f'an efficiency comparison needs at least two modes, got {sorted(modes)}')
    level_sets = {name: frozenset(r.level_id for r in run.records) for name, run in results.items()}
    if len(set(level_sets.values())) > 1:
        raise AnalysisError('runs were evaluated on different level sets')
    rows, paired = [], []
    for name, run in results.items():
        if len(run.records) < min_episodes:
            raise AnalysisError(f'{name} has {len(run.records)} episodes, fewer than {min_episodes}')
        rows.append(summary_row(name, run))
    for level_id in sorted(next(iter(level_sets.values()))):
        for name, run in results.items():
            played = [r for r in run.records if r.level_id == level_id]
            paired.append({
                'level_id': level_id,
                'run': name,
                'mode': run.mode,
                'mean_episode_length': float(np.mean([r.length for r in played])),
                'mean_revisits': float(np.mean([count_revisits(r.cells) for r in played])),
                'episodes': len(played),
            })
    return EfficiencyReport(rows=rows, paired=paired)
