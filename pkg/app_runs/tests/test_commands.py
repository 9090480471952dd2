"""
Tests for the train, eval, analyze and plot management commands.
"""

# 1. Standard library
import csv
import json
import tempfile
import xml.etree.ElementTree as ET
from io import StringIO
from pathlib import Path

# 2. Third-party
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

# 3. Local imports
from app_ppo.tests.helpers import TINY
from app_runs.manifest import read_manifest


def read_rows(path):
    with open(path, newline='') as fh:
        return list(csv.DictReader(fh))


def run(name, *args):
    out, err = StringIO(), StringIO()
    call_command(name, *args, stdout=out, stderr=err)
    return out.getvalue().strip(), err.getvalue()


class CommandTestCase(SimpleTestCase):
    """Trains a dve and an rl2 tiny run once for the whole class."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls._tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls._tmp.name)
        cls.config_path = cls.root / 'tiny.cfg'
        cls.config_path.write_text('# tiny ChainOracle run\n' + ''.join(f'{k}={v}\n' for k, v in TINY.items()))
        cls.dve_dir = cls.root / 'dve'
        cls.rl2_dir = cls.root / 'rl2'
        run('train', '--config', str(cls.config_path), '--set', 'mode=dve', '--run-dir', str(cls.dve_dir))
        run('train', '--config', str(cls.config_path), '--set', 'mode=rl2', '--set', 'dve.n_clusters=1',
            '--run-dir', str(cls.rl2_dir))

    @classmethod
    def tearDownClass(cls):
        cls._tmp.cleanup()
        super().tearDownClass()

    def assertExitCode(self, code, name, *args):
        with self.assertRaises(CommandError) as ctx:
            run(name, *args)
        self.assertEqual(ctx.exception.returncode, code)
        return str(ctx.exception)


class TrainCommandTests(CommandTestCase):

    def test_run_directory_holds_manifest_and_artifacts(self):
        manifest = read_manifest(self.dve_dir)
        self.assertEqual(manifest.config.mode, 'dve')
        self.assertIsNotNone(manifest.finished_at)
        self.assertIn('metrics.csv', manifest.artifacts)
        for artifact in manifest.artifacts:
            self.assertTrue((self.dve_dir / artifact).exists(), artifact)
        self.assertEqual(len(read_rows(self.dve_dir / 'metrics.csv')), 3)

    def test_same_config_gives_identical_metrics(self):
        out, _ = run('train', '--config', str(self.config_path), '--set', 'mode=dve',
                     '--run-dir', str(self.root / 'dve-again'))
        self.assertEqual(out, str(self.root / 'dve-again'))
        self.assertEqual((self.dve_dir / 'metrics.csv').read_bytes(),
                         (self.root / 'dve-again' / 'metrics.csv').read_bytes())

    def test_existing_run_dir_needs_resume(self):
        message = self.assertExitCode(2, 'train', '--config', str(self.config_path), '--set', 'mode=dve',
                                      '--run-dir', str(self.dve_dir))
        self.assertIn('--resume', message)

    def test_resume_of_a_finished_run_keeps_its_outputs(self):
        target = self.root / 'resumed'
        args = ['--config', str(self.config_path), '--set', 'mode=dve', '--run-dir', str(target)]
        run('train', *args)
        before = (target / 'metrics.csv').read_bytes()
        run('train', *args, '--resume')
        self.assertEqual((target / 'metrics.csv').read_bytes(), before)

    def test_resume_with_other_config_is_rejected(self):
        self.assertExitCode(2, 'train', '--config', str(self.config_path), '--set', 'mode=dve',
                            '--set', 'seed=8', '--run-dir', str(self.dve_dir), '--resume')

    def test_invalid_config_lists_every_violation(self):
        message = self.assertExitCode(2, 'train', '--set', 'env.levels=0', '--set', 'ppo.colour=red',
                                      '--run-dir', str(self.root / 'never'))
        self.assertIn('env.levels', message)
        self.assertIn('ppo.colour', message)
        self.assertFalse((self.root / 'never').exists())

    def test_default_run_dir_lives_under_runs_dir(self):
        runs = self.root / 'runs-root'
        with override_settings(SPARSE_DVE_RUNS_DIR=runs):
            out, _ = run('train', '--config', str(self.config_path), '--set', 'mode=dve', '--set', 'seed=9')
        self.assertEqual(Path(out).parent, runs)
        self.assertTrue(Path(out).name.startswith('dve-seed9-'))


class EvalCommandTests(CommandTestCase):

    def test_writes_one_row_report(self):
        output = self.root / 'eval-a.csv'
        run('eval', '--checkpoint', str(self.dve_dir), '--episodes', '3', '--output', str(output))
        rows = read_rows(output)
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]['run'], 'dve')
        self.assertEqual(rows[0]['episodes'], '3')
        self.assertEqual(rows[0]['level_overlap'], '0')

    def test_fixed_seed_reproduces_report(self):
        a, b = self.root / 'eval-r1.csv', self.root / 'eval-r2.csv'
        for path in (a, b):
            run('eval', '--checkpoint', str(self.dve_dir), '--episodes', '2', '--seed', '4', '--output', str(path))
        self.assertEqual(a.read_bytes(), b.read_bytes())

    def test_training_levels_give_a_warning_not_an_error(self):
        output = self.root / 'eval-overlap.csv'
        training = read_manifest(self.dve_dir).config.env.seeds()
        _, err = run('eval', '--checkpoint', str(self.dve_dir), '--episodes', '2',
                     '--level-seeds', ','.join(str(s) for s in training[:2]), '--output', str(output))
        self.assertIn('training levels', err)
        self.assertEqual(read_rows(output)[0]['level_overlap'], '2')

    def test_zero_episodes_is_an_error(self):
        self.assertExitCode(2, 'eval', '--checkpoint', str(self.dve_dir), '--episodes', '0')

    def test_missing_checkpoint_is_a_runtime_error(self):
        self.assertExitCode(3, 'eval', '--checkpoint', str(self.root / 'nothing-here'))


class AnalyzeCommandTests(CommandTestCase):

    def write_eval_run(self, name, rows):
        run_dir = self.root / 'correlation-runs' / name
        run_dir.mkdir(parents=True)
        (run_dir / 'metrics.csv').write_text('step,mode\n16,dve\n')
        lines = ['step,mean_reward,mean_episode_length,mean_delta,mean_inverse_delta,episodes']
        lines += [f'{step},{2.0 * inverse},10,{1.0 / inverse},{inverse},4' for step, inverse in rows]
        (run_dir / 'eval.csv').write_text('\n'.join(lines) + '\n')
        return str(run_dir)

    def test_correlation_over_four_runs(self):
        runs = [self.write_eval_run(f'run{i}', [(16, 1.1 + i * 0.1), (32, 1.5 + i * 0.2)]) for i in range(4)]
        output = self.root / 'correlation'
        out, _ = run('analyze', 'correlation', '--runs', *runs, '--output', str(output))
        self.assertTrue(out.startswith('r=1.0'))
        self.assertEqual(len(read_rows(output / 'correlation.csv')), 8)
        self.assertTrue((output / 'correlation.svg').exists())

    def test_spread_report_has_summary_row(self):
        output = self.root / 'spread'
        run('analyze', 'spread', '--seeds', '5', '--steps', '5', '--output', str(output))
        rows = read_rows(output / 'spread.csv')
        self.assertEqual(len(rows), 6)
        self.assertEqual(rows[-1]['seed'], 'mean')

    def test_partition_writes_dump(self):
        output = self.root / 'partition'
        out, _ = run('analyze', 'partition', '--checkpoint', str(self.dve_dir), '--samples', '12',
                     '--output', str(output))
        self.assertTrue(out.startswith('p='))
        lines = (output / 'partition.jsonl').read_text().splitlines()
        self.assertEqual(len(lines), 12)
        self.assertIn(json.loads(lines[0])['cluster'], (0, 1))

    def test_partition_of_rl2_run_needs_cluster_head(self):
        message = self.assertExitCode(3, 'analyze', 'partition', '--checkpoint', str(self.rl2_dir),
                                      '--output', str(self.root / 'rl2-partition'))
        self.assertIn('requires cluster head', message)

    def test_efficiency_compares_runs(self):
        output = self.root / 'efficiency'
        run('analyze', 'efficiency', '--checkpoints', str(self.dve_dir), str(self.rl2_dir),
            '--episodes', '2', '--output', str(output))
        rows = read_rows(output / 'efficiency.csv')
        self.assertEqual([row['run'] for row in rows], ['dve', 'rl2'])
        self.assertEqual([row['mode'] for row in rows], ['dve', 'rl2'])

    def test_inputs_must_match_kind(self):
        self.assertExitCode(2, 'analyze', 'correlation', '--output', str(self.root / 'x'))
        self.assertExitCode(2, 'analyze', 'spread', '--checkpoint', str(self.dve_dir), '--output', str(self.root / 'x'))


class PlotCommandTests(CommandTestCase):

    def test_one_polyline_per_run(self):
        output = self.root / 'charts'
        paths = [str(self.dve_dir / 'metrics.csv')]
        for seed in (11, 12):
            run_dir = self.root / f'dve-plot-{seed}'
            run('train', '--config', str(self.config_path), '--set', 'mode=dve', '--set', f'seed={seed}',
                '--run-dir', str(run_dir))
            paths.append(str(run_dir / 'metrics.csv'))
        out, _ = run('plot', '--csv', *paths, '--column', 'mean_delta', '--output', str(output))
        root = ET.fromstring((output / 'mean_delta.svg').read_text())
        self.assertEqual(len(root.findall('{http://www.w3.org/2000/svg}polyline')), 3)
        self.assertEqual(out, str(output / 'mean_delta.svg'))

    def test_unknown_column_lists_available(self):
        message = self.assertExitCode(3, 'plot', '--csv', str(self.dve_dir / 'metrics.csv'),
                                      '--column', 'nonsense', '--output', str(self.root / 'charts-x'))
        self.assertIn('available: step, mode', message)
