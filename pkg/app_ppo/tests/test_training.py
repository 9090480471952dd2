"""
End-to-end tests of the training loop on tiny ChainOracle runs, plus gated
directional comparisons on CorridorCoin and FruitLine.
"""

# 1. Standard library
import csv
import os
import tempfile
import unittest
from pathlib import Path

# 2. Third-party
import numpy as np
from django.test import SimpleTestCase

# 3. Local imports
from app_numerics.optim import AdamState
from app_ppo.checkpoint import checkpoint_path, latest_checkpoint, load_checkpoint
from app_ppo.evaluation import EvalSummary, evaluate
from app_ppo.exceptions import CheckpointError, TrainingError
from app_ppo.gae import compute_buffer_advantages
from app_ppo.network import PolicyValueNet
from app_ppo.rollout import build_workers, collect_rollouts
from app_ppo.trainer import metric_columns, train, warn_on_level_overlap
from app_ppo.update import ppo_update

from .helpers import curve_config, tiny_config


SLOW = os.environ.get('SPARSE_DVE_SLOW_TESTS') == '1'
IGNORED_COLUMNS = ('mode', 'boost_scale')


def read_rows(path):
    with open(path, newline='') as fh:
        return list(csv.DictReader(fh))


def comparable(rows):
    return [{k: v for k, v in row.items() if k not in IGNORED_COLUMNS} for row in rows]


class TrainingRunTests(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_training(self, name, config, resume=False):
        return train(config, self.root / name, resume=resume)

    def test_run_writes_expected_artifacts(self):
        config = tiny_config()
        result = self.run_training('a', config)
        self.assertEqual(result.updates, 3)
        self.assertEqual(result.env_steps, 48)
        rows = read_rows(result.run_dir / 'metrics.csv')
        self.assertEqual(len(rows), 3)
        self.assertEqual(list(rows[0]), metric_columns(2))
        self.assertEqual([int(r['step']) for r in rows], [16, 32, 48])
        self.assertEqual(len(read_rows(result.run_dir / 'eval.csv')), 3)
        self.assertTrue((result.run_dir / 'trajectories.jsonl').read_text().strip())
        self.assertEqual(latest_checkpoint(result.run_dir), checkpoint_path(result.run_dir, 3))

    def test_same_seed_gives_byte_identical_outputs(self):
        config = tiny_config()
        a = self.run_training('a', config).run_dir
        b = self.run_training('b', config).run_dir
        for name in ('metrics.csv', 'eval.csv', 'trajectories.jsonl'):
            self.assertEqual((a / name).read_bytes(), (b / name).read_bytes(), name)

    def test_zero_coefficients_reproduce_dve_mode(self):
        dve = self.run_training('dve', tiny_config(mode='dve')).run_dir
        sparse = self.run_training('sparse', tiny_config(mode='sparse-dve', dve__k1=0, dve__k2=0)).run_dir
        self.assertEqual(comparable(read_rows(dve / 'metrics.csv')), comparable(read_rows(sparse / 'metrics.csv')))
        a = load_checkpoint(latest_checkpoint(dve)).net.state_dict()
        b = load_checkpoint(latest_checkpoint(sparse)).net.state_dict()
        for name in a:
            np.testing.assert_array_equal(a[name], b[name], err_msg=name)

    def test_rl2_matches_dve_with_one_cluster(self):
        rl2 = tiny_config(mode='rl2', dve__n_clusters=1)
        dve = tiny_config(mode='dve', dve__n_clusters=1)
        net_a = PolicyValueNet.from_config(rl2, 6, 2)
        net_b = PolicyValueNet.from_config(dve, 6, 2)
        obs = np.random.default_rng(0).normal(size=(5, 6))
        out_a, _ = net_a.forward(obs, net_a.initial_state(5))
        out_b, _ = net_b.forward(obs, net_b.initial_state(5))
        np.testing.assert_array_equal(out_a.value.data, out_b.value.data)
        np.testing.assert_array_equal(out_a.value.data, out_a.means.data[:, 0])
        rows_a = read_rows(self.run_training('rl2', rl2).run_dir / 'metrics.csv')
        rows_b = read_rows(self.run_training('dve', dve).run_dir / 'metrics.csv')
        self.assertEqual(comparable(rows_a), comparable(rows_b))

    def test_sparse_and_dve_agree_until_boost_starts(self):
        shared = dict(ppo__segment_length=16, ppo__chunk_length=8, ppo__total_steps=96)
        dve = self.run_training('dve', tiny_config(mode='dve', **shared)).run_dir
        sparse = self.run_training('sparse', tiny_config(
            mode='sparse-dve', dve__boost='post', dve__window=2, dve__slope_threshold=1e9,
            dve__min_pretrain_steps=64, **shared)).run_dir
        rows_dve = read_rows(dve / 'metrics.csv')
        rows_sparse = read_rows(sparse / 'metrics.csv')
        self.assertEqual(comparable(rows_dve[:2]), comparable(rows_sparse[:2]))
        self.assertEqual([float(r['boost_scale']) for r in rows_sparse], [0.0, 0.0, 1.0])
        self.assertNotEqual(float(rows_sparse[2]['cc_loss']), 0.0)

    def test_resume_continues_from_latest_checkpoint(self):
        config = tiny_config()
        full = self.run_training('full', config).run_dir
        partial = self.run_training('partial', config).run_dir
        checkpoint_path(partial, 3).unlink()
        result = self.run_training('partial', config, resume=True)
        self.assertEqual(result.updates, 3)
        rows_full, rows_resumed = read_rows(full / 'metrics.csv'), read_rows(partial / 'metrics.csv')
        self.assertEqual(len(rows_resumed), 3)
        self.assertEqual(rows_full[:2], rows_resumed[:2])

    def test_checkpoint_for_other_config_is_rejected(self):
        run_dir = self.run_training('a', tiny_config()).run_dir
        with self.assertRaises(CheckpointError):
            load_checkpoint(latest_checkpoint(run_dir), expected_config=tiny_config(seed=8))
        broken = run_dir / 'broken.npz'
        broken.write_bytes(b'not an archive')
        with self.assertRaises(CheckpointError):
            load_checkpoint(broken)


class UpdateFailureTests(SimpleTestCase):

    def test_non_finite_value_loss_aborts_with_step_and_term(self):
        config = tiny_config()
        net = PolicyValueNet.from_config(config, 6, 2)
        buffer = collect_rollouts(net, build_workers(config), config.ppo.segment_length)
        compute_buffer_advantages(buffer, config.ppo.gamma, config.ppo.lam)
        buffer.returns[:] = np.nan
        with self.assertRaises(TrainingError) as ctx:
            ppo_update(net, AdamState.for_parameters(net.parameters()), buffer, config, 0.0, step=16)
        self.assertEqual((ctx.exception.step, ctx.exception.term), (16, 'value'))

    def test_update_returns_finite_stats(self):
        config = tiny_config()
        net = PolicyValueNet.from_config(config, 6, 2)
        buffer = collect_rollouts(net, build_workers(config), config.ppo.segment_length)
        compute_buffer_advantages(buffer, config.ppo.gamma, config.ppo.lam)
        before = net.state_dict()
        stats = ppo_update(net, AdamState.for_parameters(net.parameters(), lr=1e-3), buffer, config, 1.0, step=0)
        self.assertEqual(stats.minibatches, config.ppo.epochs * config.ppo.minibatches)
        self.assertTrue(np.isfinite([stats.policy_loss, stats.value_loss, stats.entropy, stats.cc_loss]).all())
        self.assertLess(stats.cc_loss, 0.0)
        self.assertTrue(any(np.any(before[k] != v) for k, v in net.state_dict().items()))


class EvaluationTests(SimpleTestCase):

    def test_evaluation_is_reproducible_and_round_robin(self):
        config = tiny_config()
        net = PolicyValueNet.from_config(config, 6, 2)
        a = evaluate(net, config, [900000, 900001], 4, record_episodes=1)
        b = evaluate(net, config, [900000, 900001], 4)
        self.assertEqual([r.level_id for r in a], [900000, 900001, 900000, 900001])
        self.assertEqual([r.total_reward for r in a], [r.total_reward for r in b])
        self.assertEqual(len(a[0].steps), a[0].length)
        self.assertEqual(b[0].steps, [])
        summary = EvalSummary.from_records(a)
        self.assertEqual(summary.episodes, 4)
        self.assertGreaterEqual(summary.mean_inverse_delta, 1.0)

    def test_zero_episodes_is_an_error(self):
        config = tiny_config()
        net = PolicyValueNet.from_config(config, 6, 2)
        with self.assertRaises(ValueError):
            evaluate(net, config, [1], 0)
        with self.assertRaises(ValueError):
            EvalSummary.from_records([])

    def test_overlapping_levels_warn(self):
        with self.assertLogs('app_ppo.trainer', level='WARNING'):
            self.assertEqual(warn_on_level_overlap([1, 2, 3], [3, 4]), [3])


@unittest.skipUnless(SLOW, 'set SPARSE_DVE_SLOW_TESTS=1 to run training-curve reproductions')
class TrainingCurveTests(SimpleTestCase):
    """Directional comparisons of the modes on CorridorCoin and FruitLine."""

    def test_sparse_mode_rewards_and_episode_lengths(self):
        finals = {}
        with tempfile.TemporaryDirectory() as tmp:
            for mode in ('rl2', 'dve', 'sparse-dve'):
                for seed in range(3):
                    result = train(curve_config(mode, seed, 'corridor-coin'), Path(tmp) / f'{mode}-{seed}')
                    finals.setdefault(mode, []).append(result.final_eval)
        reward = {mode: np.mean([s.mean_reward for s in runs]) for mode, runs in finals.items()}
        length = {mode: np.mean([s.mean_episode_length for s in runs]) for mode, runs in finals.items()}
        self.assertGreaterEqual(reward['sparse-dve'], reward['dve'])
        self.assertLessEqual(length['sparse-dve'], length['dve'])
        self.assertLessEqual(reward['rl2'], reward['dve'])

    def test_post_boost_on_fruit_line_matches_or_beats_dve(self):
        wins = 0
        with tempfile.TemporaryDirectory() as tmp:
            for seed in range(3):
                dve = train(curve_config('dve', seed, 'fruit-line'), Path(tmp) / f'dve-{seed}')
                sparse = train(curve_config('sparse-dve', seed, 'fruit-line', dve__boost='post'),
                               Path(tmp) / f'sparse-dve-{seed}')
                wins += sparse.final_eval.mean_reward >= dve.final_eval.mean_reward
        self.assertGreaterEqual(wins, 2)
