"""
Checkpoint archives.

A checkpoint is a numpy .npz archive holding the network parameters, the
Adam moments, the trainer progress and a JSON metadata string with the
format version, the flat config and its hash.
"""

# 1. Standard library
import json
import logging
import os
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

# 2. Third-party
import numpy as np
from rest_framework import serializers

# 3. Local imports
from app_numerics.exceptions import ShapeError
from app_numerics.optim import AdamState

from .api.serializers import build_train_config
from .exceptions import CheckpointError
from .network import PolicyValueNet


logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
CHECKPOINT_DIR = 'checkpoints'


@dataclass
class TrainingProgress:
    """
    Trainer state needed to resume.

    Attributes:
        update (int): Updates completed.
        env_steps (int): Environment steps completed.
        history (list[float]): Rolling mean episode length after each update.
        latched (bool): Post-boost trigger already fired.
        recent_rewards, recent_lengths (list[float]): Rolling episode window.
    """
    update: int = 0
    env_steps: int = 0
    history: list = field(default_factory=list)
    latched: bool = False
    recent_rewards: list = field(default_factory=list)
    recent_lengths: list = field(default_factory=list)


@dataclass
class Checkpoint:
    config: object
    net: PolicyValueNet
    adam: AdamState
    progress: TrainingProgress
    meta: dict


def checkpoint_path(run_dir, update):
    return Path(run_dir) / CHECKPOINT_DIR / f'update_{update:06d}.npz'


def latest_checkpoint(run_dir):
    paths = sorted((Path(run_dir) / CHECKPOINT_DIR).glob('update_*.npz'))
    return paths[-1] if paths else None


def save_checkpoint(path, net, adam, config, progress):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        'version': CHECKPOINT_VERSION,
        'config': config.to_flat(),
        'config_hash': config.config_hash(),
        'mode': config.mode,
        'net': net.architecture(),
        'update': progress.update,
        'env_steps': progress.env_steps,
        'latched': progress.latched,
    }
    arrays = {f'param.{name}': value for name, value in net.state_dict().items()}
    arrays.update(adam.state_dict())
    arrays['progress.history'] = np.asarray(progress.history, dtype=np.float64)
    arrays['progress.recent_rewards'] = np.asarray(progress.recent_rewards, dtype=np.float64)
    arrays['progress.recent_lengths'] = np.asarray(progress.recent_lengths, dtype=np.float64)
    partial = path.with_suffix('.partial')
    with open(partial, 'wb') as fh:
        np.savez(fh, meta=np.asarray(json.dumps(meta, sort_keys=True)), **arrays)
    os.replace(partial, path)
    logger.debug('checkpoint written to %s', path)
    return path


def load_checkpoint(path, expected_config=None):
    """
    Load a checkpoint and rebuild the network it belongs to.

    Args:
        path: .npz archive written by save_checkpoint.
        expected_config (TrainConfig | None): When given, the archive must
            carry the same config hash.

    Raises:
        CheckpointError: unreadable archive, unknown version, config hash or
            parameter shape mismatch.
    """
    try:
        with np.load(path, allow_pickle=False) as archive:
            arrays = {key: archive[key] for key in archive.files}
        meta = json.loads(str(arrays.pop('meta')))
    except (OSError, ValueError, KeyError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f'cannot read checkpoint {path}: {exc}') from exc

    if meta.get('version') != CHECKPOINT_VERSION:
        raise CheckpointError(f'checkpoint version {meta.get("version")} is not {CHECKPOINT_VERSION}')
    try:
        config = build_train_config(meta['config'])
    except serializers.ValidationError as exc:
        raise CheckpointError(f'checkpoint config does not validate: {exc.detail}') from exc
    if config.config_hash() != meta['config_hash']:
        raise CheckpointError('checkpoint config hash does not match its stored config')
    if expected_config is not None and expected_config.config_hash() != meta['config_hash']:
        raise CheckpointError('checkpoint was written with a different config')

    arch = meta['net']
    if arch['n_clusters'] != config.dve.n_clusters or arch['hidden'] != config.net.hidden:
        raise CheckpointError('network shape does not match the embedded config')
    net = PolicyValueNet(arch['obs_dim'], arch['n_actions'], arch['hidden'], arch['n_clusters'],
                         np.random.default_rng(0), dtype=config.dtype)
    try:
        net.load_state_dict({key[len('param.'):]: value for key, value in arrays.items()
                             if key.startswith('param.')})
        adam = AdamState.for_parameters(net.parameters(), lr=config.ppo.lr)
        adam.load_state_dict(arrays)
    except (ShapeError, KeyError) as exc:
        raise CheckpointError(f'checkpoint parameters do not fit the network: {exc}') from exc

    progress = TrainingProgress(
        update=int(meta['update']),
        env_steps=int(meta['env_steps']),
        history=arrays['progress.history'].tolist(),
        latched=bool(meta['latched']),
        recent_rewards=arrays['progress.recent_rewards'].tolist(),
        recent_lengths=arrays['progress.recent_lengths'].tolist(),
    )
    return Checkpoint(config=config, net=net, adam=adam, progress=progress, meta=meta)
