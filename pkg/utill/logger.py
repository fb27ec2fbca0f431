import logging
import sys

FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def setup_logging(level: str | int = 'INFO'):
    if isinstance(level, str):
        level = level.upper()
    root = logging.getLogger()
    if not any(getattr(h, '_hetsphere', False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(FORMAT, datefmt='%H:%M:%S'))
        handler._hetsphere = True
        root.addHandler(handler)
    root.setLevel(level)


def progress_enabled() -> bool:
    # tqdm bars only on an interactive terminal
    return sys.stderr.isatty()
