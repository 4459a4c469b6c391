"""
Classical and Qn-based autocovariance / autocorrelation for RobustLM
"""
from dataclasses import dataclass

import numpy as np

from arfima import AcvfSequence
from errors import LagRangeError, SpecError, UndefinedCorrelationError
from robust_scale import QnConfig, qn_scale

ESTIMATORS = ('classical', 'robust')


@dataclass(frozen=True)
class LagVectors:
    """u = first n-h observations, v = last n-h observations"""

    u: np.ndarray
    v: np.ndarray
    h: int

    @classmethod
    def from_series(cls, series, h):
        """Split a series at lag h"""
        _check_lag(series.n, h)
        values = series.values
        return cls(values[:series.n - h], values[h:], h)

    @property
    def total(self):
        """u + v"""
        return self.u + self.v

    @property
    def spread(self):
        """u - v"""
        return self.u - self.v


def _check_lag(n, h):
    if not 0 <= h <= n - 2:
        raise LagRangeError(f"lag h={h} outside 0..{n - 2} for a series of length {n}")


def sample_acvf(series, h):
    """(1/n) sum_{t=1}^{n-h} (x_t - xbar)(x_{t+h} - xbar), divisor n"""
    _check_lag(series.n, h)
    centered = series.values - series.values.mean()
    return float(centered[:series.n - h] @ centered[h:]) / series.n


def sample_acf(series, h):
    """Classical autocorrelation gamma(h) / gamma(0)"""
    variance = sample_acvf(series, 0)
    if variance == 0.0:
        raise UndefinedCorrelationError("classical autocorrelation undefined for a constant series")
    return sample_acvf(series, h) / variance


def _qn_squares(series, h, config):
    lagged = LagVectors.from_series(series, h)
    return qn_scale(lagged.total, config) ** 2, qn_scale(lagged.spread, config) ** 2


def robust_acvf(series, h, config=None):
    """(1/4)[Q^2(u + v) - Q^2(u - v)]; no centering, Qn is location invariant"""
    plus, minus = _qn_squares(series, h, config or QnConfig())
    return 0.25 * (plus - minus)


def robust_acf(series, h, config=None):
    """[Q^2(u + v) - Q^2(u - v)] / [Q^2(u + v) + Q^2(u - v)]"""
    plus, minus = _qn_squares(series, h, config or QnConfig())
    denominator = plus + minus
    if denominator == 0.0:
        raise UndefinedCorrelationError(
            f"robust autocorrelation undefined at lag {h}: both Qn terms are zero"
        )
    return (plus - minus) / denominator


def acvf_curve(series, max_lag, method='robust', config=None):
    """Autocovariances at lags 0..max_lag with the chosen estimator"""
    if method == 'classical':
        gamma = [sample_acvf(series, h) for h in range(max_lag + 1)]
        return AcvfSequence(gamma, 'classical-sample')
    if method == 'robust':
        config = config or QnConfig()
        gamma = [robust_acvf(series, h, config) for h in range(max_lag + 1)]
        return AcvfSequence(gamma, 'robust-Q')
    raise SpecError(f"unknown autocovariance method {method!r}; expected one of {ESTIMATORS}")


def acf_curve(series, max_lag, method='robust', config=None):
    """Autocorrelations at lags 0..max_lag with the chosen estimator"""
    if method == 'classical':
        return np.array([sample_acf(series, h) for h in range(max_lag + 1)])
    if method == 'robust':
        config = config or QnConfig()
        return np.array([robust_acf(series, h, config) for h in range(max_lag + 1)])
    raise SpecError(f"unknown autocorrelation method {method!r}; expected one of {ESTIMATORS}")
