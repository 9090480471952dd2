"""
Training loop.

Contains:
- metric_columns / EVAL_COLUMNS: fixed CSV layouts of metrics.csv and eval.csv.
- train: alternate rollout collection and PPO updates until the step budget
  is spent, writing metrics, held-out evaluations, checkpoints and a final
  trajectory dump into the run directory.
"""

# 1. Standard library
import csv
import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.schedule import BoostScheduler
from app_envs.registry import make_env
from app_numerics.optim import AdamState

from .checkpoint import TrainingProgress, checkpoint_path, latest_checkpoint, load_checkpoint, save_checkpoint
from .evaluation import EvalSummary, evaluate
from .exceptions import RolloutError, TrainingError
from .gae import compute_buffer_advantages
from .network import PolicyValueNet
from .rollout import build_workers, collect_rollouts
from .update import ppo_update


logger = logging.getLogger(__name__)

METRICS_FILE = 'metrics.csv'
EVAL_FILE = 'eval.csv'
TRAJECTORY_FILE = 'trajectories.jsonl'
EPISODE_WINDOW = 100
EVAL_COLUMNS = ['step', 'mean_reward', 'mean_episode_length', 'mean_delta', 'mean_inverse_delta', 'episodes']


def metric_columns(n_clusters):
    return (['step', 'mode', 'mean_reward', 'mean_episode_length', 'mean_delta']
            + [f'rho_{i}' for i in range(1, n_clusters + 1)]
            + ['max_alpha_p50', 'max_alpha_p90', 'boost_scale',
               'policy_loss', 'value_loss', 'entropy', 'cc_loss'])


@dataclass
class TrainResult:
    run_dir: Path
    updates: int
    env_steps: int
    final_eval: EvalSummary = None
    artifacts: list = field(default_factory=list)


def _window_mean(values):
    return float(np.mean(values)) if values else math.nan


def _append_row(path, columns, row):
    new = not path.exists()
    with open(path, 'a', newline='') as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator='\n')
        if new:
            writer.writeheader()
        writer.writerow(row)


def _drop_rows_after(path, step):
    """Remove rows logged after the checkpoint a resumed run restarts from."""
    if not path.exists():
        return
    with open(path, newline='') as fh:
        reader = csv.DictReader(fh)
        columns = reader.fieldnames
        rows = [row for row in reader if int(row['step']) <= step]
    with open(path, 'w', newline='') as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)


def warn_on_level_overlap(train_seeds, eval_seeds):
    overlap = sorted(set(train_seeds) & set(eval_seeds))
    if overlap:
        logger.warning('%d held-out levels are also training levels (first: %d)', len(overlap), overlap[0])
    return overlap


def _start(config, run_dir, resume):
    if resume:
        path = latest_checkpoint(run_dir)
        if path is not None:
            checkpoint = load_checkpoint(path, expected_config=config)
            logger.info('resuming from %s at update %d', path, checkpoint.progress.update)
            _drop_rows_after(run_dir / METRICS_FILE, checkpoint.progress.env_steps)
            _drop_rows_after(run_dir / EVAL_FILE, checkpoint.progress.env_steps)
            return checkpoint.net, checkpoint.adam, checkpoint.progress
        logger.info('no checkpoint in %s; starting fresh', run_dir)
    sample_env = make_env(config.env.name, config.env.seeds()[:1], **config.env_options())
    net = PolicyValueNet.from_config(config, sample_env.obs_dim, sample_env.n_actions)
    adam = AdamState.for_parameters(net.parameters(), lr=config.ppo.lr)
    for name in (METRICS_FILE, EVAL_FILE):
        (run_dir / name).unlink(missing_ok=True)
    return net, adam, TrainingProgress()


def _write_trajectories(path, records):
    with open(path, 'w') as fh:
        for record in records:
            for step in record.steps:
                fh.write(json.dumps(step.as_dump(record.episode, record.level_id), sort_keys=True) + '\n')


def train(config, run_dir, resume=False):
    """
    Train one run.

    Args:
        config (TrainConfig): Validated configuration.
        run_dir (Path): Artifact directory; created if missing.
        resume (bool): Continue from the latest checkpoint in run_dir.

    Returns:
        TrainResult: Progress counters, final evaluation and artifact paths.

    Raises:
        RolloutError, TrainingError, CheckpointError: propagated after logging.
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    warn_on_level_overlap(config.env.seeds(), config.eval.seeds())
    net, adam, progress = _start(config, run_dir, resume)

    workers = build_workers(config, generation=progress.update)
    scheduler = BoostScheduler(config.dve, config.ppo.total_steps, latched=progress.latched)
    rewards = deque(progress.recent_rewards, maxlen=EPISODE_WINDOW)
    lengths = deque(progress.recent_lengths, maxlen=EPISODE_WINDOW)
    history = list(progress.history)
    columns = metric_columns(config.dve.n_clusters)
    final_eval = None

    for update in range(progress.update, config.total_updates):
        step = progress.env_steps
        boost_scale = scheduler(step, history) if config.mode == 'sparse-dve' else 0.0

        try:
            buffer = collect_rollouts(net, workers, config.ppo.segment_length)
            compute_buffer_advantages(buffer, config.ppo.gamma, config.ppo.lam)
            diagnostics = buffer.diagnostics()
            stats = ppo_update(net, adam, buffer, config, boost_scale, step)
        except (RolloutError, TrainingError) as exc:
            logger.error('update %d aborted at step %d: %s', update + 1, step, exc)
            raise

        progress.env_steps = step + config.steps_per_update
        progress.update = update + 1
        rewards.extend(e.total_reward for e in buffer.episodes)
        lengths.extend(e.length for e in buffer.episodes)
        mean_length = _window_mean(lengths)
        if not math.isnan(mean_length):
            history.append(mean_length)

        p50, p90 = diagnostics.max_alpha_quantiles()
        row = {
            'step': progress.env_steps,
            'mode': config.mode,
            'mean_reward': _window_mean(rewards),
            'mean_episode_length': mean_length,
            'mean_delta': diagnostics.mean_delta,
            'max_alpha_p50': p50,
            'max_alpha_p90': p90,
            'boost_scale': boost_scale,
            'policy_loss': stats.policy_loss,
            'value_loss': stats.value_loss,
            'entropy': stats.entropy,
            'cc_loss': stats.cc_loss,
        }
        row.update({f'rho_{i + 1}': float(rho) for i, rho in enumerate(diagnostics.mean_rho)})
        _append_row(run_dir / METRICS_FILE, columns, row)
        logger.info('step %d: reward %.3f, episode length %.1f, delta %.4f, boost %.2f',
                    progress.env_steps, row['mean_reward'], mean_length, row['mean_delta'], boost_scale)

        last = progress.update == config.total_updates
        if config.eval.episodes and (progress.update % config.eval.interval == 0 or last):
            final_eval = EvalSummary.from_records(
                evaluate(net, config, config.eval.seeds(), config.eval.episodes))
            _append_row(run_dir / EVAL_FILE, EVAL_COLUMNS, {'step': progress.env_steps, **vars(final_eval)})

        if progress.update % config.run.checkpoint_interval == 0 or last:
            progress.history = list(history)
            progress.latched = scheduler.latched
            progress.recent_rewards = list(rewards)
            progress.recent_lengths = list(lengths)
            save_checkpoint(checkpoint_path(run_dir, progress.update), net, adam, config, progress)

    artifacts = [run_dir / METRICS_FILE]
    if (run_dir / EVAL_FILE).exists():
        artifacts.append(run_dir / EVAL_FILE)
    if config.run.dump_episodes:
        records = evaluate(net, config, config.eval.seeds(), config.run.dump_episodes,
                           record_episodes=config.run.dump_episodes)
        _write_trajectories(run_dir / TRAJECTORY_FILE, records)
        artifacts.append(run_dir / TRAJECTORY_FILE)
    latest = latest_checkpoint(run_dir)
    if latest is not None:
        artifacts.append(latest)
    return TrainResult(run_dir=run_dir, updates=progress.update, env_steps=progress.env_steps,
                       final_eval=final_eval, artifacts=artifacts)
