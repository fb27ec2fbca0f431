import argparse
import os
import os.path

import ruamel.yaml

yaml = ruamel.yaml.YAML()
ppath = os.path.dirname(__file__)
CONFIG_PATH = os.path.join(ppath, 'config.yaml')
with open(CONFIG_PATH, 'r', encoding='utf8') as f:
    Config: dict = yaml.load(f)

if 'HETSPHERE_WORKERS' in os.environ:
    Config['workers'] = int(os.environ['HETSPHERE_WORKERS'])


def add_global_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('global')
    group.add_argument('--config', metavar='JSON', help='TrainConfig json file', default=None)
    group.add_argument('--seed', type=int, help='seed for every random stream', default=None)
    group.add_argument('--out-dir', help='where the stage writes its outputs', default=None)
    group.add_argument('--log-level', help='logging level', default=Config['log_level'])
    return parser


def preset(name: str) -> dict:
    from utill.errors import ConfigError
    presets = Config.get('presets') or {}
    if name not in presets:
        raise ConfigError(f'unknown preset {name!r}; known: {", ".join(sorted(presets))}')
    return dict(presets[name])
