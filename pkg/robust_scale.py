"""
Qn scale estimator of Rousseeuw and Croux for RobustLM

Qn(x) = c * {|x_j - x_k|; j < k}_(tau), the tau-th smallest of the n(n-1)/2
pairwise distances, tau = floor((C(n,2) + 2) / 4) + 1 (1-based).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from constants import QN_CONSTANT
from errors import InsufficientDataError, SpecError


@dataclass(frozen=True)
class QnConfig:
    """Consistency constant c; tau always follows the floor rule above"""

    c: float = QN_CONSTANT

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise SpecError(f"Qn constant must be positive, got c={self.c}")


def qn_order_index(n):
    """1-based order statistic index tau for a sample of size n"""
    if n < 2:
        raise InsufficientDataError(f"Qn needs at least 2 values, got {n}")
    pairs = n * (n - 1) // 2
    return (pairs + 2) // 4 + 1


def pairwise_distances(values):
    """All |x_j - x_k|, j < k, in condensed order"""
    values = np.asarray(values, dtype=float).reshape(-1, 1)
    return pdist(values, 'cityblock')


def qn_scale(values, config=None):
    """c times the tau-th smallest pairwise distance; selection, no full sort"""
    config = config or QnConfig()
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size < 2:
        raise InsufficientDataError(f"Qn needs at least 2 values, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise SpecError("Qn input must be finite")

    k = qn_order_index(values.size) - 1
    distances = pairwise_distances(values)
    return config.c * float(np.partition(distances, k)[k])
