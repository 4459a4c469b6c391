"""
GPH and robust GPHR log-periodogram regression estimators of d for RobustLM

Both regress the log of a spectral estimate on v_j = log(4 sin^2(w_j / 2)) over
the lowest m' Fourier frequencies and report d = -slope / 2.
"""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from arfima import difference
from constants import DEFAULT_ALPHA, METHODS, MIN_REGRESSION_FREQUENCIES
from errors import (
    DegeneratePeriodogramError, EstimationRefused, InsufficientDataError, SpecError
)
from robust_scale import QnConfig
from spectral import WindowSpec, fourier_grid, periodogram, robust_pseudo_periodogram

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BandwidthSpec:
    """Number of regression frequencies: explicit m, or m' = floor(n^alpha)"""

    alpha: float = DEFAULT_ALPHA
    m: int = None

    def __post_init__(self):
        if self.m is not None and (int(self.m) != self.m or self.m < 1):
            raise SpecError(f"bandwidth must be a positive integer, got m={self.m}")
        if self.m is None and not 0.0 < self.alpha < 1.0:
            raise SpecError(f"bandwidth exponent must lie in (0, 1), got alpha={self.alpha}")

    def bandwidth(self, n):
        """m' for a series of length n, 1 <= m' <= floor(n/2)"""
        m = int(self.m) if self.m is not None else int(math.floor(n ** self.alpha))
        if not 1 <= m <= n // 2:
            raise SpecError(f"bandwidth m'={m} must satisfy 1 <= m' <= {n // 2} for n={n}")
        return m


@dataclass
class RegressionFit:
    """OLS of log spectral values on the GPH regressor"""

    d_hat: float
    se_ols: float
    intercept: float
    regressors: np.ndarray
    v_bar: float
    s_vv: float
    residuals: np.ndarray


@dataclass
class DEstimate:
    """Estimated memory parameter with standard errors and regression detail"""

    d_hat: float
    se_ols: float
    se_asymptotic: float
    m_used: int
    method: str
    n: int
    dropped: int = 0
    dropped_indices: tuple = ()
    regression: RegressionFit = None
    window: str = None
    M: int = None
    differenced: bool = False

    @property
    def retained(self):
        """Frequencies that entered the regression"""
        return self.m_used - self.dropped

    def summary(self):
        """Plain dict for printing and JSON output"""
        return {
            'method': self.method,
            'd_hat': self.d_hat,
            'se_ols': self.se_ols,
            'se_asymptotic': self.se_asymptotic,
            'm_used': self.m_used,
            'dropped': self.dropped,
            'dropped_indices': list(self.dropped_indices),
            'window': self.window,
            'M': self.M,
            'n': self.n,
            'differenced': self.differenced,
        }


def gph_regressors(frequencies):
    """v_j = log(4 sin^2(w_j / 2))"""
    return np.log(4.0 * np.sin(np.asarray(frequencies, dtype=float) / 2.0) ** 2)


def asymptotic_standard_error(m):
    """pi / sqrt(24 m')"""
    return math.pi / math.sqrt(24.0 * m)


def log_periodogram_regression(frequencies, values):
    """Fit log(values) = a0 - d v_j + error; d is minus the slope on v_j = log(4 sin^2(w_j / 2))"""
    values = np.asarray(values, dtype=float)
    count = values.size
    if count < MIN_REGRESSION_FREQUENCIES:
        raise EstimationRefused(
            f"log-periodogram regression needs at least {MIN_REGRESSION_FREQUENCIES} "
            f"frequencies, got {count}",
            retained=count,
        )
    if np.any(values <= 0.0):
        raise SpecError("log-periodogram regression needs strictly positive spectral values")

    v = gph_regressors(frequencies)
    y = np.log(values)
    v_bar = float(v.mean())
    centered = v - v_bar
    s_vv = float(centered @ centered)
    slope = float(centered @ (y - y.mean())) / s_vv
    intercept = float(y.mean()) - slope * v_bar
    residuals = y - intercept - slope * v
    variance = float(residuals @ residuals) / (count - 2)
    se_ols = math.sqrt(variance / s_vv)
    return RegressionFit(-slope, se_ols, intercept, v, v_bar, s_vv, residuals)


def gph(series, bandwidth=None):
    """Classical GPH estimate from the periodogram at j = 1..m'"""
    bandwidth = bandwidth or BandwidthSpec()
    grid = fourier_grid(series.n)
    m = bandwidth.bandwidth(series.n)
    if m < MIN_REGRESSION_FREQUENCIES:
        raise EstimationRefused(f"bandwidth m'={m} leaves fewer than "
                                f"{MIN_REGRESSION_FREQUENCIES} frequencies", retained=m)

    frequencies = grid.frequencies[:m]
    if np.ptp(series.values) == 0.0:
        raise DegeneratePeriodogramError(1, float(frequencies[0]), 0.0)
    values = periodogram(series, grid).values[:m]
    bad = np.flatnonzero(values <= 0.0)
    if bad.size:
        k = int(bad[0])
        raise DegeneratePeriodogramError(k + 1, float(frequencies[k]), float(values[k]))

    fit = log_periodogram_regression(frequencies, values)
    return DEstimate(fit.d_hat, fit.se_ols, asymptotic_standard_error(m), m, 'gph', series.n,
                     regression=fit)


def gph_robust(series, bandwidth=None, window=None, config=None):
    """GPHR: the GPH regression on the robust pseudo-periodogram, dropping I_Q <= 0"""
    bandwidth = bandwidth or BandwidthSpec()
    window = window or WindowSpec()
    config = config or QnConfig()
    grid = fourier_grid(series.n)
    m = bandwidth.bandwidth(series.n)

    spectrum = robust_pseudo_periodogram(series, window, config, grid)
    frequencies = grid.frequencies[:m]
    values = spectrum.values[:m]
    keep = values > 0.0
    dropped_indices = tuple(int(j) for j in grid.indices[:m][~keep])
    retained = int(np.count_nonzero(keep))
    if retained < MIN_REGRESSION_FREQUENCIES:
        raise EstimationRefused(
            f"only {retained} of {m} frequencies have a positive pseudo-periodogram",
            retained=retained, dropped=len(dropped_indices), dropped_indices=dropped_indices,
        )
    if dropped_indices:
        logger.debug("GPHR dropped %d of %d frequencies: %s", len(dropped_indices), m,
                     list(dropped_indices))

    fit = log_periodogram_regression(frequencies[keep], values[keep])
    return DEstimate(fit.d_hat, fit.se_ols, asymptotic_standard_error(m), m, 'gphr', series.n,
                     dropped=len(dropped_indices), dropped_indices=dropped_indices,
                     regression=fit, window=window.kind, M=spectrum.M)


def estimate(series, method='gph', bandwidth=None, window=None, config=None, differenced=False):
    """Dispatch to GPH or GPHR, optionally through the difference-then-estimate workflow"""
    if differenced:
        return estimate_after_difference(series, method, bandwidth, window, config)
    if method == 'gph':
        return gph(series, bandwidth)
    if method == 'gphr':
        return gph_robust(series, bandwidth, window, config)
    raise SpecError(f"unknown estimation method {method!r}; expected one of {METHODS}")


def estimate_after_difference(series, method='gphr', bandwidth=None, window=None, config=None):
    """d* = d(first differences) + 1"""
    if series.n < 3:
        raise InsufficientDataError(f"difference-then-estimate needs n >= 3, got n={series.n}")
    fit = estimate(difference(series), method, bandwidth, window, config)
    return replace(fit, d_hat=fit.d_hat + 1.0, differenced=True)
