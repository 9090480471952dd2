"""
Run manifests.

Every run directory holds exactly one manifest.json with the config
snapshot, its seed and hash, start and finish timestamps and the artifact
paths relative to the run directory. The config alone reproduces the run.
"""

# 1. Standard library
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

# 2. Local imports
from .api.serializers import RunManifestSerializer
from .exceptions import RunDirectoryError


MANIFEST_FILE = 'manifest.json'


def utc_now():
    return datetime.now(timezone.utc).replace(microsecond=0)


@dataclass
class RunManifest:
    """
    Attributes:
        config (TrainConfig): Validated run config.
        started_at (datetime): When training started.
        finished_at (datetime | None): When training finished; None while running.
        artifacts (list[str]): Artifact paths relative to the run directory.
    """
    config: object
    started_at: datetime
    finished_at: datetime = None
    artifacts: list = field(default_factory=list)

    def as_document(self):
        return {
            'config': self.config.to_flat(),
            'seed': self.config.seed,
            'config_hash': self.config.config_hash(),
            'started_at': self.started_at.isoformat(),
            'finished_at': self.finished_at.isoformat() if self.finished_at else None,
            'artifacts': list(self.artifacts),
        }


def write_manifest(run_dir, manifest):
    path = Path(run_dir) / MANIFEST_FILE
    path.write_text(json.dumps(manifest.as_document(), indent=2, sort_keys=True) + '\n')
    return path


def read_manifest(run_dir):
    """
    Raises:
        RunDirectoryError: missing or unreadable manifest, or one whose hash
            does not match its config.
    """
    path = Path(run_dir) / MANIFEST_FILE
    try:
        document = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise RunDirectoryError(f'{run_dir} has no {MANIFEST_FILE}') from exc
    except json.JSONDecodeError as exc:
        raise RunDirectoryError(f'{path} is not valid JSON: {exc}') from exc
    serializer = RunManifestSerializer(data=document)
    if not serializer.is_valid():
        raise RunDirectoryError(f'{path} is invalid: {serializer.errors}')
    data = serializer.validated_data
    return RunManifest(config=data['train_config'], started_at=data['started_at'],
                       finished_at=data['finished_at'], artifacts=data['artifacts'])
