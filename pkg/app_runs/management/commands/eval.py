"""
Held-out evaluation of one checkpoint: `python manage.py eval --checkpoint runs/sparse-dve-seed0-...`.
"""

# 1. Standard library
from pathlib import Path

# 2. Third-party
from django.core.management.base import CommandError

# 3. Local imports
from app_analysis.efficiency import EFFICIENCY_COLUMNS, EvaluatedRun, summary_row
from app_envs.registry import level_seed_list
from app_ppo.api.serializers import IntegerListField
from app_ppo.evaluation import evaluate
from app_ppo.trainer import warn_on_level_overlap
from app_runs.commands import USAGE_ERROR, OperatorCommand, checkpoint_run_dir, resolve_checkpoint, write_csv


EVAL_REPORT_COLUMNS = EFFICIENCY_COLUMNS + ['level_overlap']


class Command(OperatorCommand):
    help = 'Evaluate a checkpoint on held-out levels with fixed seeds and write a one-row CSV report.'

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True, help='Checkpoint file or run directory (latest checkpoint).')
        parser.add_argument('--episodes', type=int, help='Episodes to play (default: the run\'s eval.episodes).')
        parser.add_argument('--levels', type=int, help='Number of held-out levels (default: the run\'s eval.levels).')
        parser.add_argument('--level-base-seed', type=int, help='First held-out level seed.')
        parser.add_argument('--level-seeds', help='Explicit comma separated level seeds; overrides --levels.')
        parser.add_argument('--seed', type=int, help='Evaluation stream seed (default: the run seed).')
        parser.add_argument('--output', help='CSV path (default: <run dir>/eval_report.csv).')

    def run(self, checkpoint, episodes=None, levels=None, level_base_seed=None, level_seeds=None,
            seed=None, output=None, **options):
        loaded = resolve_checkpoint(checkpoint)
        config = loaded.config
        episodes = config.eval.episodes if episodes is None else episodes
        if episodes < 1:
            raise CommandError('--episodes must be at least 1', returncode=USAGE_ERROR)

        if level_seeds:
            seeds = list(IntegerListField().run_validation(level_seeds))
        else:
            seeds = level_seed_list(config.eval.levels if levels is None else levels,
                                    config.eval.level_base_seed if level_base_seed is None else level_base_seed)
        if not seeds:
            raise CommandError('no held-out levels selected', returncode=USAGE_ERROR)

        overlap = warn_on_level_overlap(config.env.seeds(), seeds)
        if overlap:
            self.stderr.write(f'warning: {len(overlap)} of {len(seeds)} evaluation levels are training levels')

        records = evaluate(loaded.net, config, seeds, episodes, seed=seed)
        run_dir = checkpoint_run_dir(checkpoint)
        row = summary_row(run_dir.name, EvaluatedRun(config.mode, records))
        row['level_overlap'] = len(overlap)
        path = Path(output) if output else run_dir / 'eval_report.csv'
        write_csv(path, EVAL_REPORT_COLUMNS, [row])
        self.stdout.write(str(path))
