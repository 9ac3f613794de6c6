import logging
import os
import sys

DEBUG_ENV = 'HANOICTL_DEBUG'


def debug_requested(environ=None):
    environ = os.environ if environ is None else environ
    return environ.get(DEBUG_ENV, '') not in ('', '0')


def setup_logging(debug=False, stream=None):
    '''Route the hanoictl logger to stderr as `hanoictl-LEVEL: message` lines.'''
    logger = logging.getLogger('hanoictl')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter('hanoictl-%(levelname)s: %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if debug or debug_requested() else logging.WARNING)
    logger.propagate = False
    return logger
