"""
Train one run: `python manage.py train --config corridor.cfg --set mode=sparse-dve`.
"""

# 1. Standard library
from pathlib import Path

# 2. Local imports
from app_ppo.trainer import train
from app_runs.commands import OperatorCommand, runs_dir
from app_runs.config import load_train_config
from app_runs.exceptions import RunDirectoryError
from app_runs.manifest import RunManifest, read_manifest, utc_now, write_manifest


def default_run_dir(config):
    return runs_dir() / f'{config.mode}-seed{config.seed}-{config.config_hash()[:8]}'


class Command(OperatorCommand):
    help = 'Train one run and write its manifest, metrics, evaluations, checkpoints and trajectory dump.'

    def add_arguments(self, parser):
        parser.add_argument('--config', dest='config_path', help='Flat key=value config file.')
        parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                            help='Override one config key; may be repeated.')
        parser.add_argument('--run-dir', help='Artifact directory (default: derived from mode, seed and config hash).')
        parser.add_argument('--resume', action='store_true', help='Continue from the latest checkpoint in --run-dir.')

    def run(self, config_path=None, overrides=(), run_dir=None, resume=False, **options):
        config = load_train_config(config_path, overrides)
        run_dir = Path(run_dir) if run_dir else default_run_dir(config)

        if resume:
            manifest = read_manifest(run_dir)
            if manifest.config.config_hash() != config.config_hash():
                raise RunDirectoryError(f'{run_dir} was trained with a different config; cannot resume it')
            started_at = manifest.started_at
        else:
            if run_dir.exists() and any(run_dir.iterdir()):
                raise RunDirectoryError(f'{run_dir} already exists; pass --resume to continue it')
            started_at = utc_now()

        run_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(run_dir, RunManifest(config=config, started_at=started_at))
        result = train(config, run_dir, resume=resume)
        artifacts = [str(Path(path).relative_to(run_dir)) for path in result.artifacts]
        write_manifest(run_dir, RunManifest(config=config, started_at=started_at,
                                            finished_at=utc_now(), artifacts=artifacts))
        self.stdout.write(str(run_dir))
