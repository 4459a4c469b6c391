"""
Periodogram, lag windows and the robust truncated pseudo-periodogram for RobustLM

Also holds the Hurvich-Beltrao limits L_j(d), L*_j(d) of the normalized
periodogram I(w_j) / f(w_j) for long-memory Gaussian processes.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from autocovariance import acvf_curve
from constants import (
    DEFAULT_BETA, WINDOW_TYPES, QUADRATURE_TOLERANCE, QUADRATURE_LIMIT
)
from errors import SpecError, TruncationError, QuadratureError
from robust_scale import QnConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FourierGrid:
    """Fourier frequencies w_j = 2 pi j / n, j = 1..floor(n/2)"""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise SpecError(f"a Fourier grid needs n >= 2, got {self.n}")

    @property
    def indices(self):
        """j = 1..floor(n/2)"""
        return np.arange(1, self.n // 2 + 1)

    @property
    def frequencies(self):
        """w_j in (0, pi]"""
        return 2.0 * np.pi * self.indices / self.n

    def __len__(self):
        return self.n // 2


def fourier_grid(n):
    """Factory for the grid of a series of length n"""
    return FourierGrid(int(n))


@dataclass(frozen=True)
class WindowSpec:
    """Lag window kind and truncation point M (explicit, or floor(n^beta))"""

    kind: str = 'truncated'
    M: int = None
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if self.kind not in WINDOW_TYPES:
            raise SpecError(f"unknown lag window {self.kind!r}; expected one of {sorted(WINDOW_TYPES)}")
        if self.M is not None and (int(self.M) != self.M or self.M < 1):
            raise SpecError(f"truncation point must be a positive integer, got M={self.M}")
        if self.M is None and not 0.0 < self.beta < 1.0:
            raise SpecError(f"truncation exponent must lie in (0, 1), got beta={self.beta}")

    @property
    def label(self):
        """Human readable window name"""
        return WINDOW_TYPES[self.kind]['label']

    def truncation(self, n):
        """Truncation point for a series of length n, 1 <= M < n"""
        M = int(self.M) if self.M is not None else int(math.floor(n ** self.beta))
        if not 1 <= M < n:
            raise TruncationError(f"truncation point M={M} must satisfy 1 <= M < n={n}")
        return M

    def resolved(self, n):
        """Copy with M fixed for length n"""
        return WindowSpec(self.kind, self.truncation(n), self.beta)


def breakdown_truncation(n, expected_outliers):
    """
    Heuristic M <= h' = min{0 < h < n : (n - h) / (4n) <= m / n} - 1, using the
    lower temporal breakdown bound (n - h) / (2n) * 1/2 of the Qn autocovariance.
    Without outliers the bound is vacuous and the largest admissible M is returned.
    """
    if n < 3:
        raise TruncationError(f"series of length {n} admits no truncation point")
    largest = n - 2
    if expected_outliers <= 0:
        return largest
    first = max(1, math.ceil(n - 4.0 * expected_outliers))
    if first >= n:
        return largest
    return int(min(max(first - 1, 1), largest))


def _window_weights(kind, M, lags):
    """kappa(h) for an array of non-negative lags"""
    r = np.asarray(lags, dtype=float) / M
    if kind == 'truncated':
        weights = np.ones_like(r)
    elif kind == 'bartlett':
        weights = 1.0 - r
    elif kind == 'tukey-hamming':
        weights = 0.54 + 0.46 * np.cos(np.pi * r)
    elif kind == 'parzen':
        weights = np.where(r <= 0.5, 1.0 - 6.0 * r ** 2 + 6.0 * r ** 3, 2.0 * (1.0 - r) ** 3)
    else:
        raise SpecError(f"unknown lag window {kind!r}")
    return np.where(r <= 1.0, weights, 0.0)


def lag_window_weight(window, h):
    """kappa(h) in [0, 1]; 1 at h = 0 and 0 beyond M"""
    if window.M is None:
        raise SpecError("lag window needs an explicit truncation point; call resolved(n) first")
    if h < 0:
        raise SpecError(f"lag must be non-negative, got h={h}")
    return float(_window_weights(window.kind, window.M, [h])[0])


@dataclass
class SpectralEstimate:
    """Spectral values on a Fourier grid plus how they were obtained"""

    grid: FourierGrid
    values: np.ndarray
    method: str  # 'classical' or 'robust'
    window: str = None
    M: int = None
    nonpositive: int = 0
    centered: bool = False

    @property
    def frequencies(self):
        """Fourier frequencies of the values"""
        return self.grid.frequencies


def periodogram_ordinates(values):
    """All n ordinates |sum x_t e^{i w_k t}|^2 / (2 pi n), k = 0..n-1"""
    values = np.asarray(values, dtype=float)
    n = values.size
    return np.abs(np.fft.fft(values)) ** 2 / (2.0 * np.pi * n)


def periodogram(series, grid=None):
    """Classical periodogram at w_j, j = 1..floor(n/2), without mean correction"""
    grid = grid or fourier_grid(series.n)
    if grid.n != series.n:
        raise SpecError(f"grid built for n={grid.n} used with a series of length {series.n}")
    ordinates = periodogram_ordinates(series.values)[grid.indices]
    return SpectralEstimate(grid, ordinates, 'classical', centered=False)


def robust_pseudo_periodogram(series, window=None, config=None, grid=None, acvf_method='robust'):
    """
    I_Q(w) = (1 / 2 pi)[kappa(0) g(0) + 2 sum_{h=1}^{M} kappa(h) g(h) cos(h w)], with
    g the Qn autocovariance. acvf_method='classical' substitutes the sample
    autocovariance. Non-positive values are kept and counted.
    """
    window = window or WindowSpec()
    config = config or QnConfig()
    grid = grid or fourier_grid(series.n)
    if grid.n != series.n:
        raise SpecError(f"grid built for n={grid.n} used with a series of length {series.n}")

    M = window.truncation(series.n)
    if series.n - M < 2:
        raise TruncationError(f"truncation point M={M} leaves fewer than 2 pairs at lag M (n={series.n})")

    gamma = acvf_curve(series, M, acvf_method, config).gamma
    lags = np.arange(M + 1)
    weighted = _window_weights(window.kind, M, lags) * gamma
    cosines = np.cos(np.multiply.outer(grid.frequencies, lags[1:]))
    values = (weighted[0] + 2.0 * cosines @ weighted[1:]) / (2.0 * np.pi)

    nonpositive = int(np.count_nonzero(values <= 0.0))
    if nonpositive:
        logger.debug("pseudo-periodogram has %d non-positive ordinates (n=%d, M=%d, %s)",
                     nonpositive, series.n, M, window.kind)
    return SpectralEstimate(grid, values, 'robust', window.kind, M, nonpositive, centered=False)


def _quad(function, lower, upper, tolerance, **options):
    """scipy quad that raises instead of warning"""
    result = integrate.quad(function, lower, upper, full_output=1, epsabs=tolerance,
                            limit=QUADRATURE_LIMIT, **options)
    value, error = result[0], result[1]
    if len(result) > 3:
        raise QuadratureError(f"integral over [{lower}, {upper}] did not converge: {result[3]}", error)
    return value, error


def _fold_integral(j, d, kernel, tolerance):
    """
    int_0^inf sin^2(w / 2) kernel(w) dw, split at 2 pi j; the tail beyond 4 pi j
    is written with sin^2 = (1 - cos) / 2 and the cosine part integrated as a
    Fourier integral.
    """
    pole = 2.0 * np.pi * j
    piece = tolerance / 4.0

    def integrand(w):
        # sin^2(w/2) == sin^2((w - 2 pi j)/2), accurate near the removable point
        return math.sin((w - pole) / 2.0) ** 2 * kernel(w)

    near, e1 = _quad(integrand, 0.0, pole, piece)
    middle, e2 = _quad(integrand, pole, 2.0 * pole, piece)
    flat, e3 = _quad(kernel, 2.0 * pole, np.inf, piece)
    wave, e4 = _quad(kernel, 2.0 * pole, np.inf, piece, weight='cos', wvar=1.0)
    achieved = e1 + e2 + 0.5 * (e3 + e4)
    if achieved > tolerance:
        raise QuadratureError(f"normalized-periodogram integral for j={j}, d={d}", achieved)
    return near + middle + 0.5 * (flat - wave)


def _check_limit_arguments(j, d):
    if int(j) != j or j < 1:
        raise SpecError(f"Fourier index must be a positive integer, got j={j}")
    if not -0.5 < d < 0.5:
        raise SpecError(f"memory parameter must lie in (-0.5, 0.5), got d={d}")


def hurvich_beltrao_L(j, d, tolerance=QUADRATURE_TOLERANCE):
    """L_j(d) = lim E[I(w_j) / f(w_j)] = (2/pi) int sin^2(w/2) / (2 pi j - w)^2 |w / 2 pi j|^(-2d) dw"""
    _check_limit_arguments(j, d)
    pole = 2.0 * np.pi * j

    def kernel(w):
        scale = (w / pole) ** (-2.0 * d)
        return scale * (1.0 / (pole - w) ** 2 + 1.0 / (pole + w) ** 2)

    return 2.0 / np.pi * _fold_integral(j, d, kernel, tolerance)


def hurvich_beltrao_Lstar(j, d, tolerance=QUADRATURE_TOLERANCE):
    """L*_j(d) = (1/pi) int sin^2(w/2) / ((2 pi j - w)(2 pi j + w)) |w / 2 pi j|^(-2d) dw"""
    _check_limit_arguments(j, d)
    pole = 2.0 * np.pi * j

    def kernel(w):
        return 2.0 * (w / pole) ** (-2.0 * d) / ((pole - w) * (pole + w))

    return 1.0 / np.pi * _fold_integral(j, d, kernel, tolerance)


def normalized_periodogram_weights(j, d, tolerance=QUADRATURE_TOLERANCE):
    """(alpha_1, alpha_2) = (L - 2 L*, L + 2 L*) of the limiting quadratic form"""
    level = hurvich_beltrao_L(j, d, tolerance)
    cross = hurvich_beltrao_Lstar(j, d, tolerance)
    return level - 2.0 * cross, level + 2.0 * cross
