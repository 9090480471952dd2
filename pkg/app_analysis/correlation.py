"""
Confusion-reward correlation over logged held-out evaluations.

Every eval.csv row of a run pairs the mean inverse confusion of an
evaluation with its mean reward. Rows whose step falls into the sampling
window are pooled over all runs, optionally subsampled uniformly, and
correlated.
"""

# 1. Standard library
import csv
from dataclasses import dataclass
from pathlib import Path

# 2. Third-party
import numpy as np

# 3. Local imports
from .exceptions import AnalysisError
from .stats import pearson


MIN_RUNS = 4


@dataclass(frozen=True)
class CorrelationSample:
    run: str
    step: int
    inverse_delta: float
    reward: float


@dataclass
class RunLog:
    """
    Attributes:
        name (str): Run directory name.
        mode (str): Training mode taken from metrics.csv.
        evaluations (list[dict]): eval.csv rows with numeric values.
    """
    name: str
    mode: str
    evaluations: list

    @classmethod
    def from_run_dir(cls, run_dir):
        run_dir = Path(run_dir)
        try:
            with open(run_dir / 'metrics.csv', newline='') as fh:
                first = next(csv.DictReader(fh), None)
            with open(run_dir / 'eval.csv', newline='') as fh:
                rows = list(csv.DictReader(fh))
        except FileNotFoundError as exc:
            raise AnalysisError(f'{run_dir} is not a training run directory: {exc.filename} missing') from exc
        if first is None:
            raise AnalysisError(f'{run_dir} has an empty metrics file')
        evaluations = [{'step': int(row['step']),
                        'mean_inverse_delta': float(row['mean_inverse_delta']),
                        'mean_reward': float(row['mean_reward'])} for row in rows]
        return cls(name=run_dir.name, mode=first['mode'], evaluations=evaluations)


@dataclass
class CorrelationReport:
    samples: list
    r: float

    @property
    def count(self):
        return len(self.samples)


def confusion_reward_study(runs, window, samples=None, seed=0, min_runs=MIN_RUNS):
    """
    Correlate inverse confusion with reward.

    Args:
        runs (list[RunLog]): Training runs in dve mode.
        window (tuple[int, int]): Inclusive range of logged steps to sample from.
        samples (int | None): Draw this many rows uniformly without
            replacement; None keeps every row in the window.
        seed (int): Seed of the subsampling.
        min_runs (int): Fewest runs accepted.

    Raises:
        AnalysisError: too few runs, a run not trained in dve mode, or no
            logged evaluation inside the window.
    """
    if len(runs) < min_runs:
        raise AnalysisError(f'the correlation study needs at least {min_runs} runs, got {len(runs)}')
    wrong = [run.name for run in runs if run.mode != 'dve']
    if wrong:
        raise AnalysisError(f'runs not trained in dve mode: {", ".join(wrong)}')
    low, high = window
    pool = [CorrelationSample(run.name, row['step'], row['mean_inverse_delta'], row['mean_reward'])
            for run in runs for row in run.evaluations if low <= row['step'] <= high]
    if not pool:
        raise AnalysisError(f'no logged evaluation between steps {low} and {high}')
    if samples is not None and samples < len(pool):
        picked = np.sort(np.random.default_rng(seed).choice(len(pool), size=samples, replace=False))
        pool = [pool[i] for i in picked]
    r = pearson([s.inverse_delta for s in pool], [s.reward for s in pool])
    return CorrelationReport(samples=pool, r=r)
