import logging
import math
import os
import sys

import numpy as np

from constants import LOG_FORMAT, THREADS_ENV

logger = logging.getLogger(__name__)


def resource_path(*parts):
    """
    Return path to a bundled resource whether running from source or from PyInstaller --onefile.
    Usage: resource_path('data', 'table1.json')
    """
    base = getattr(sys, '_MEIPASS', os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(base, *parts)


def configure_logging(verbosity=0):
    """Install a single stderr handler; -v gives INFO, -vv gives DEBUG"""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)


def thread_count(requested=None):
    """Worker count: explicit request, then the environment, then 1"""
    if requested is not None:
        return max(1, int(requested))

    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring %s=%r: not an integer", THREADS_ENV, raw)
        return 1


def replicate_seeds(master_seed, replicate, streams=2, stream=()):
    """
    Counter-based split of a master seed.
    Replicate r always receives the same `streams` integer seeds, independently
    of how many replicates run or in which order. `stream` separates grid cells.
    """
    key = tuple(int(k) for k in stream) + (int(replicate),)
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return [int(s) for s in sequence.generate_state(streams, dtype=np.uint32)]


def stable_sum(values):
    """Compensated sum, independent of the order partial results arrived in"""
    return math.fsum(float(v) for v in values)
