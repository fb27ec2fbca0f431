from .options import Config, CONFIG_PATH, preset
