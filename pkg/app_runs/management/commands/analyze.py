"""
Analyses over finished runs: `python manage.py analyze <kind> ...`.

Kinds and their inputs:
- correlation: --runs (at least four dve run directories)
- spread:      none (synthetic ChainOracle regression dataset)
- partition:   --checkpoint (a dve or sparse-dve checkpoint)
- efficiency:  --checkpoints (at least two checkpoints)

Every kind writes its CSV report and an SVG chart into --output.
"""

# 1. Standard library
from dataclasses import replace
from pathlib import Path

# 2. Third-party
from django.core.management.base import CommandError

# 3. Local imports
from app_analysis.charts import line_chart_svg, scatter_chart_svg, write_svg
from app_analysis.correlation import RunLog, confusion_reward_study
from app_analysis.efficiency import (
    EFFICIENCY_COLUMNS, PAIRED_COLUMNS, efficiency_report, evaluate_checkpoints)
from app_analysis.partition import partition_states, write_partition_dump
from app_analysis.spread import SPREAD_COLUMNS, SpreadConfig, spread_study
from app_ppo.api.serializers import IntegerListField
from app_runs.commands import (
    USAGE_ERROR, OperatorCommand, checkpoint_run_dir, resolve_checkpoint, runs_dir, write_csv)


KINDS = ('correlation', 'spread', 'partition', 'efficiency')
KIND_INPUTS = {'correlation': 'runs', 'spread': None, 'partition': 'checkpoint', 'efficiency': 'checkpoints'}
CORRELATION_COLUMNS = ['run', 'step', 'inverse_delta', 'reward']


class Command(OperatorCommand):
    help = 'Run one analysis (correlation, spread, partition, efficiency) and write its report and chart.'

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=KINDS)
        parser.add_argument('--runs', nargs='+', help='Run directories (correlation).')
        parser.add_argument('--checkpoint', help='Checkpoint file or run directory (partition).')
        parser.add_argument('--checkpoints', nargs='+', help='Checkpoint files or run directories (efficiency).')
        parser.add_argument('--window', nargs=2, type=int, metavar=('LOW', 'HIGH'),
                            help='Inclusive step window of logged evaluations (correlation).')
        parser.add_argument('--samples', type=int, help='Uniform subsample size (correlation) or states (partition).')
        parser.add_argument('--episodes', type=int, help='Evaluation episodes per run (efficiency).')
        parser.add_argument('--level-seeds', help='Comma separated held-out levels (partition, efficiency).')
        parser.add_argument('--seeds', type=int, help='Number of seeds (spread).')
        parser.add_argument('--steps', type=int, help='Adam steps per fit (spread).')
        parser.add_argument('--seed', type=int, default=0, help='Seed of sampling and evaluation streams.')
        parser.add_argument('--output', help='Report directory (default: <runs dir>/analysis/<kind>).')

    def run(self, kind, output=None, **options):
        self._check_inputs(kind, options)
        output = Path(output) if output else runs_dir() / 'analysis' / kind
        output.mkdir(parents=True, exist_ok=True)
        getattr(self, f'_{kind}')(output, **options)

    def _check_inputs(self, kind, options):
        needed = KIND_INPUTS[kind]
        if needed and not options.get(needed):
            raise CommandError(f'{kind} needs --{needed}', returncode=USAGE_ERROR)
        stray = [name for name in sorted(set(KIND_INPUTS.values()) - {needed, None}) if options.get(name)]
        if stray:
            raise CommandError(f'{kind} does not take --{stray[0]}', returncode=USAGE_ERROR)

    def _level_seeds(self, options, default):
        if options.get('level_seeds'):
            return list(IntegerListField().run_validation(options['level_seeds']))
        return default

    def _correlation(self, output, runs, window=None, samples=None, seed=0, **options):
        logs = [RunLog.from_run_dir(path) for path in runs]
        if not window:
            steps = [row['step'] for log in logs for row in log.evaluations] or [0]
            window = (min(steps), max(steps))
        window = tuple(window)
        report = confusion_reward_study(logs, window, samples=samples, seed=seed)
        write_csv(output / 'correlation.csv', CORRELATION_COLUMNS, [vars(s) for s in report.samples])
        write_csv(output / 'correlation_summary.csv', ['r', 'samples', 'runs', 'window_low', 'window_high'],
                  [{'r': report.r, 'samples': report.count, 'runs': len(logs),
                    'window_low': window[0], 'window_high': window[1]}])
        write_svg(output / 'correlation.svg', scatter_chart_svg(
            f'reward vs inverse confusion (r = {report.r:.3f})',
            [s.inverse_delta for s in report.samples], [s.reward for s in report.samples],
            x_label='1/delta', y_label='reward'))
        self.stdout.write(f'r={report.r:.6f} samples={report.count}')

    def _spread(self, output, seeds=None, steps=None, **options):
        config = SpreadConfig()
        if seeds is not None:
            config = replace(config, seeds=seeds)
        if steps is not None:
            config = replace(config, steps=steps)
        report = spread_study(config)
        write_csv(output / 'spread.csv', SPREAD_COLUMNS, report.rows())
        xs = [mse.seed for mse, _ in report.pairs]
        write_svg(output / 'spread.svg', line_chart_svg('cluster-mean spread per seed', [
            ('mse', xs, [mse.spread for mse, _ in report.pairs]),
            ('mse + sparsity', xs, [sparse.spread for _, sparse in report.pairs]),
        ], x_label='seed', y_label='spread'))
        self.stdout.write(f'sparse spread wider in {report.sparse_wins} of {len(report.pairs)} seeds')

    def _partition(self, output, checkpoint, samples=None, seed=0, **options):
        loaded = resolve_checkpoint(checkpoint)
        level_seeds = self._level_seeds(options, None)
        count = 500 if samples is None else samples
        partition = partition_states(loaded, count, level_seeds=level_seeds, seed=seed)
        labels, _ = partition.label_table()
        write_csv(output / 'partition.csv', ['cluster', 'states'] + labels, partition.rows())
        write_partition_dump(output / 'partition.jsonl', partition)
        coverage = partition.coverage()
        write_svg(output / 'partition.svg', line_chart_svg('states per cluster', [
            ('states', list(range(len(coverage))), [float(n) for n in coverage]),
        ], x_label='cluster', y_label='states'))
        self.stdout.write(f'p={partition.p_value():.6g} states={len(partition.samples)}')

    def _efficiency(self, output, checkpoints, episodes=None, seed=0, **options):
        loaded = {}
        for path in checkpoints:
            base = name = checkpoint_run_dir(path).name
            suffix = 2
            while name in loaded:
                name, suffix = f'{base}-{suffix}', suffix + 1
            loaded[name] = resolve_checkpoint(path)
        first = next(iter(loaded.values())).config
        episodes = first.eval.episodes if episodes is None else episodes
        if episodes < 1:
            raise CommandError('--episodes must be at least 1', returncode=USAGE_ERROR)
        level_seeds = self._level_seeds(options, first.eval.seeds())
        report = efficiency_report(evaluate_checkpoints(loaded, level_seeds, episodes, seed=seed))
        write_csv(output / 'efficiency.csv', EFFICIENCY_COLUMNS, report.rows)
        write_csv(output / 'efficiency_levels.csv', PAIRED_COLUMNS, report.paired)
        series = []
        for name in loaded:
            rows = [row for row in report.paired if row['run'] == name]
            series.append((name, list(range(len(rows))), [row['mean_episode_length'] for row in rows]))
        write_svg(output / 'efficiency.svg', line_chart_svg('episode length per held-out level', series,
                                                            x_label='level', y_label='episode length'))
        for row in report.rows:
            self.stdout.write(f"{row['run']}: reward {row['mean_reward']:.3f}, "
                              f"length {row['mean_episode_length']:.1f}, revisits {row['mean_revisits']:.2f}")
