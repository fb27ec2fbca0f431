import argparse
import json
import logging
import os
import time

import numpy as np
import pandas as pd
from pydantic import ValidationError

from api.verifyModel import PipelineManifest, ResourceSnapshot, TrainConfig
from config import Config, preset
from utill.errors import ConfigError, MissingArtifactError
from utill.gen import dict_sha256, file_sha256
from utill.monitor import getcpumsg, resolve_workers

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'

# TrainConfig fields exposed as `train` flags
TRAIN_FLAGS = {
    'lambda_loc': float, 'lambda_clu': float, 'num_clusters': int, 'center_mode': str,
    'hidden_dim': int, 'num_layers': int, 'tau': float, 'delta': float, 'max_graphlet_size': int,
    'learning_rate': float, 'weight_decay': float, 'max_epochs': int, 'patience': int,
    'variant': str, 'stopping_mode': str,
}


def add_graph_arguments(parser: argparse.ArgumentParser, labels: str = 'optional'):
    parser.add_argument('--edges', required=True, help='edge list, one "i j" pair per line')
    parser.add_argument('--attrs', required=True, help='attribute matrix, one comma-separated row per node')
    parser.add_argument('--labels', required=labels == 'required', default=None,
                        help='0/1 anomaly label per line')


def add_train_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('model')
    for name, kind in TRAIN_FLAGS.items():
        group.add_argument('--' + name.replace('_', '-'), dest=name, type=kind, default=None)
    group.add_argument('--split-ratios', dest='split_ratios', type=float, nargs=3, default=None)
    group.add_argument('--stratify', dest='stratify', action='store_true', default=None,
                       help='split every label class with the same ratios')
    group.add_argument('--preset', default=None, help='per-dataset hyperparameter row from config.yaml')


def out_dir(args) -> str:
    path = args.out_dir or '.'
    os.makedirs(path, exist_ok=True)
    return path


def workers() -> int:
    return resolve_workers(Config['workers'])


def train_config(args) -> TrainConfig:
    """yaml defaults < preset < --config json < flags < --seed"""
    values = {}
    if getattr(args, 'preset', None):
        values.update(preset(args.preset))
    try:
        if args.config:
            if not os.path.exists(args.config):
                raise ConfigError(f'config file {args.config} not found')
            values.update(TrainConfig.parse_file(args.config).dict(exclude_unset=True))
        for name in list(TRAIN_FLAGS) + ['split_ratios', 'stratify']:
            v = getattr(args, name, None)
            if v is not None:
                values[name] = v
        if args.seed is not None:
            values['seed'] = args.seed
        return TrainConfig(**values)
    except ValidationError as e:
        raise ConfigError(f'invalid train config: {e}')


def require(path, stage: str) -> str:
    if not os.path.exists(path):
        raise MissingArtifactError(path, stage)
    return path


def write_json(obj, path):
    with open(path, 'w', encoding='utf8') as f:
        json.dump(obj, f, indent=2, sort_keys=True)
    return path


def write_scores(scores: np.ndarray, path):
    pd.DataFrame({'node_id': np.arange(len(scores)), 'score': scores}).to_csv(
        path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_scores(path) -> np.ndarray:
    df = pd.read_csv(require(path, 'score'), float_precision='round_trip')
    return df.sort_values('node_id')['score'].to_numpy(dtype=np.float64)


class Stage:
    """
    Times a stage and, on success, writes <out>/manifest_<name>.json listing
    input hashes, the config hash and every output (each must exist).
    """

    def __init__(self, name: str, out: str, inputs: dict | None = None, config: dict | None = None):
        self.name = name
        self.out = out
        self.inputs = {k: v for k, v in (inputs or {}).items() if v}
        self.config = config or {}
        self.outputs: list[str] = []

    def add(self, *paths):
        self.outputs.extend(str(p) for p in paths)

    def __enter__(self):
        logger.info('stage %s started', self.name)
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            return False
        missing = [p for p in self.outputs if not os.path.exists(p)]
        if missing:
            raise MissingArtifactError(missing[0], self.name)
        cpu = getcpumsg()
        manifest = PipelineManifest(
            stage=self.name,
            inputs={k: file_sha256(v) for k, v in self.inputs.items()},
            config_hash=dict_sha256(self.config),
            outputs=self.outputs,
            wall_time=time.perf_counter() - self.t0,
            resources=ResourceSnapshot(cpu_logical=cpu['cpu_logical'], cpu_physical=cpu['cpu_physical'],
                                       memory_total=cpu['memory']['total'],
                                       memory_available=cpu['memory']['available']),
        )
        path = os.path.join(self.out, f'manifest_{self.name}.json')
        with open(path, 'w', encoding='utf8') as f:
            f.write(manifest.json(indent=2))
        logger.info('stage %s finished in %.2fs, %d outputs', self.name, manifest.wall_time, len(self.outputs))
        return False
