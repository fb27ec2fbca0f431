"""
Checkpoint layout: a directory with

    manifest.json   CheckpointManifest (names, shapes, byte offsets, config echo, hash, epoch)
    tensors.bin     little-endian float64 arrays concatenated in manifest order
"""
import json
import logging
import os

import numpy as np
from pydantic import ValidationError

from api.verifyModel import CheckpointManifest, TensorEntry, TrainConfig
from utill.errors import CheckpointError, MissingArtifactError
from utill.gen import dict_sha256
from .mhl import GlobalCenter

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST = 'manifest.json'
TENSORS = 'tensors.bin'
CENTER = 'center'
DTYPE = np.dtype('<f8')


def config_hash(config: TrainConfig) -> str:
    return dict_sha256(json.loads(config.json()))


def save_checkpoint(path, params: dict, center: GlobalCenter, config: TrainConfig, epoch: int,
                    num_features: int) -> list[str]:
    os.makedirs(path, exist_ok=True)
    tensors = dict(sorted(params.items()))
    tensors[CENTER] = center.c0
    entries, offset = [], 0
    with open(os.path.join(path, TENSORS), 'wb') as f:
        for name, value in tensors.items():
            data = np.ascontiguousarray(value, dtype=DTYPE)
            entries.append(TensorEntry(name=name, shape=list(data.shape), offset=offset))
            f.write(data.tobytes())
            offset += data.nbytes
    manifest = CheckpointManifest(format_version=FORMAT_VERSION, tensors=entries, config=config,
                                  config_hash=config_hash(config), epoch=epoch,
                                  center_mode=center.mode, num_features=num_features)
    with open(os.path.join(path, MANIFEST), 'w', encoding='utf8') as f:
        f.write(manifest.json(indent=2))
    logger.info('checkpoint (epoch %d, %d tensors) written to %s', epoch, len(entries), path)
    return [os.path.join(path, MANIFEST), os.path.join(path, TENSORS)]


def load_checkpoint(path, expected_shapes: dict | None = None) -> tuple[dict, GlobalCenter, CheckpointManifest]:
    mpath, tpath = os.path.join(path, MANIFEST), os.path.join(path, TENSORS)
    for p in (mpath, tpath):
        if not os.path.exists(p):
            raise MissingArtifactError(p, 'train')
    try:
        manifest = CheckpointManifest.parse_file(mpath)
    except ValidationError as e:
        raise CheckpointError(f'{mpath}: {e}')
    if manifest.format_version != FORMAT_VERSION:
        raise CheckpointError(f'{mpath}: format version {manifest.format_version}, expected {FORMAT_VERSION}')
    if manifest.config_hash != config_hash(manifest.config):
        raise CheckpointError(f'{mpath}: config hash does not match the config echo')
    raw = np.fromfile(tpath, dtype=DTYPE)
    params = {}
    for entry in manifest.tensors:
        start = entry.offset // DTYPE.itemsize
        size = int(np.prod(entry.shape))
        if start + size > len(raw):
            raise CheckpointError(f'{tpath}: truncated at tensor {entry.name}')
        params[entry.name] = raw[start:start + size].reshape(entry.shape).astype(np.float64)
    if CENTER not in params:
        raise CheckpointError(f'{mpath}: no center tensor')
    center = GlobalCenter(params.pop(CENTER), manifest.center_mode)
    if expected_shapes is not None:
        check_shapes(params, expected_shapes)
    return params, center, manifest


def check_shapes(params: dict, expected: dict):
    missing = sorted(set(expected) - set(params))
    if missing:
        raise CheckpointError(f'checkpoint lacks tensors {missing}')
    for name, shape in expected.items():
        if tuple(params[name].shape) != tuple(shape):
            raise CheckpointError(f'shape mismatch for {name}: checkpoint {tuple(params[name].shape)}, '
                                  f'model {tuple(shape)}')
