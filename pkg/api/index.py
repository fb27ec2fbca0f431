import argparse

from config.options import add_global_arguments
from api import configapi, distributionapi, evalapi, injectapi, preprocessapi, scoreapi, statsapi, trainapi

STAGES = [preprocessapi, injectapi, trainapi, scoreapi, evalapi, distributionapi, statsapi, configapi]


def build_parser() -> argparse.ArgumentParser:
    common = add_global_arguments(argparse.ArgumentParser(add_help=False))
    parser = argparse.ArgumentParser(prog='hetsphere', description='unsupervised graph anomaly detection pipeline')
    sub = parser.add_subparsers(dest='stage', required=True, metavar='stage')
    for stage in STAGES:
        stage.register(sub, [common])
    return parser
