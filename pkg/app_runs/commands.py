"""
Shared plumbing of the management commands.

Contains:
- OperatorCommand: BaseCommand whose `run` errors are turned into
  CommandError exit codes (2 for configuration and usage problems, 3 for
  faults while running).
- format_errors: flatten a DRF error dictionary into `key: message` lines.
- resolve_checkpoint / write_csv: small helpers the commands share.
"""

# 1. Standard library
import csv
import logging
from pathlib import Path

# 2. Third-party
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

# 3. Local imports
from app_ppo.checkpoint import latest_checkpoint, load_checkpoint
from app_ppo.exceptions import CheckpointError

from .exceptions import ConfigFileError, RunDirectoryError


logger = logging.getLogger(__name__)

USAGE_ERROR = 2
RUNTIME_ERROR = 3


def format_errors(detail, prefix=''):
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            lines.extend(format_errors(value, f'{prefix}.{key}' if prefix else str(key)))
        return lines
    if isinstance(detail, (list, tuple)):
        lines = []
        for item in detail:
            lines.extend(format_errors(item, prefix))
        return lines
    return [f'{prefix}: {detail}' if prefix else str(detail)]


def runs_dir():
    return Path(settings.SPARSE_DVE_RUNS_DIR)


def resolve_checkpoint(path):
    """
    Load a checkpoint from an .npz file or the latest one in a run directory.

    Raises:
        CheckpointError: nothing to load at `path`.
    """
    path = Path(path)
    if path.is_dir():
        latest = latest_checkpoint(path)
        if latest is None:
            raise CheckpointError(f'{path} holds no checkpoint')
        path = latest
    return load_checkpoint(path)


def checkpoint_run_dir(path):
    """Run directory of a checkpoint file or run directory argument."""
    path = Path(path)
    return path if path.is_dir() else path.parent.parent


def write_csv(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
    return path


class OperatorCommand(BaseCommand):
    """
    Base class of train, eval, analyze and plot.

    Subclasses implement `run(**options)`. Messages go to stderr through
    CommandError or logging; data goes to files.
    """

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except CommandError:
            raise
        except serializers.ValidationError as exc:
            message = '\n'.join(['invalid configuration:'] + format_errors(exc.detail))
            raise CommandError(message, returncode=USAGE_ERROR) from exc
        except (ConfigFileError, RunDirectoryError) as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except (ValueError, RuntimeError, LookupError, OSError) as exc:
            logger.error('%s failed: %s', self.__module__.rsplit('.', 1)[-1], exc)
            raise CommandError(str(exc), returncode=RUNTIME_ERROR) from exc

    def run(self, **options):
        raise NotImplementedError
