import io

from .options import Config, CONFIG_PATH, yaml
from utill.errors import ConfigError


def _lookup(arg: str):
    node = Config
    for part in arg.split('.'):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f'not found {arg}')
        node = node[part]
    return node


def show(arg: str = '') -> list[str]:
    lines = []
    if arg == '':
        for i, j in Config.items():
            if isinstance(j, dict):
                for k, v in j.items():
                    lines.append(f'{i}.{k} : {v}')
            else:
                lines.append(f'{i} : {j}')
    else:
        lines.append(f'{arg} : {_lookup(arg)}')
    for line in lines:
        print(line)
    return lines


def _coerce(text: str):
    # let yaml decide the scalar type: 1 -> int, 0.5 -> float, true -> bool
    return yaml.load(io.StringIO(text))


def setc(arg: str, *args, path=CONFIG_PATH):
    parts = arg.split('.')
    parent = _lookup('.'.join(parts[:-1])) if len(parts) > 1 else Config
    key = parts[-1]
    if not isinstance(parent, dict) or key not in parent:
        raise ConfigError(f'not found {arg}')
    old = parent[key]
    if isinstance(old, dict):
        raise ConfigError(f'[{arg}] is a dict, use "." ')
    values = [_coerce(a) for a in args]
    if isinstance(old, list):
        parent[key] = values
    elif len(values) == 1:
        parent[key] = values[0]
    else:
        raise ConfigError(f'{arg} takes exactly one value')
    print(parent[key])
    with open(path, 'w', encoding='utf8') as fs:
        yaml.dump(Config, fs)
    return parent[key]
