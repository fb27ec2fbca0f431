import logging
import sys

from api.index import build_parser
from utill.errors import PipelineError
from utill.logger import setup_logging

logger = logging.getLogger('hetsphere')


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except PipelineError as e:
        logger.error('%s: %s', type(e).__name__, e.detail)
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
