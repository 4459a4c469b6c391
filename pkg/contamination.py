"""
Additive outlier contamination for RobustLM

Z_t = X_t + sum_j w_j Y_{j,t}, where Y_{j,t} is Bernoulli(p_j) times a
Rademacher sign, independent over t and over j.
"""
import math
from dataclasses import dataclass

import numpy as np

from arfima import AcvfSequence, TimeSeries, arfima_spectral_density
from errors import SpecError


@dataclass
class OutlierSpec:
    """m outlier types, each a (magnitude, probability) pair"""

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple((float(w), float(p)) for w, p in self.entries)
        for j, (magnitude, probability) in enumerate(entries):
            if not math.isfinite(magnitude):
                raise SpecError(f"outlier type {j}: magnitude must be finite, got {magnitude}")
            if not 0.0 <= probability <= 1.0:
                raise SpecError(f"outlier type {j}: probability must lie in [0, 1], got {probability}")
        self.entries = entries

    @classmethod
    def single(cls, magnitude, probability):
        """One outlier type (m = 1)"""
        return cls(((magnitude, probability),))

    @property
    def m(self):
        """Number of outlier types"""
        return len(self.entries)

    @property
    def magnitudes(self):
        """Magnitudes as an array"""
        return np.array([w for w, _ in self.entries], dtype=float)

    @property
    def probabilities(self):
        """Occurrence probabilities as an array"""
        return np.array([p for _, p in self.entries], dtype=float)

    def is_clean(self):
        """True when no outlier can ever fire with non-zero size"""
        return all(w == 0.0 or p == 0.0 for w, p in self.entries)


def outlier_variance(spec):
    """sum_j w_j^2 p_j, the variance added at lag zero"""
    return math.fsum(w * w * p for w, p in spec.entries)


def expected_outliers(spec, n):
    """Expected number of shocks in a series of length n"""
    return n * math.fsum(p for _, p in spec.entries)


@dataclass
class ContaminatedSeries:
    """Contaminated values plus the signed hit record of every outlier type"""

    values: np.ndarray
    hits: np.ndarray  # shape (m, n), entries in {-1, 0, 1}
    spec: OutlierSpec
    clean: TimeSeries

    @property
    def shocks(self):
        """Total additive shock at every index"""
        if self.spec.m == 0:
            return np.zeros_like(self.values)
        return self.spec.magnitudes @ self.hits

    @property
    def hit_count(self):
        """Number of fired (index, type) shocks"""
        return int(np.count_nonzero(self.hits))

    def as_series(self):
        """Contaminated values as a TimeSeries"""
        return self.clean.derive(self.values, contaminated=True)

    def restore(self):
        """Clean values recovered from the recorded shocks"""
        return self.values - self.shocks


def contaminate(series, spec, seed):
    """Inject +/- w_j with probability p_j / 2 each, independently at every index"""
    rng = np.random.default_rng(seed)
    n = series.n
    hits = np.zeros((spec.m, n), dtype=np.int8)
    for j, (_, probability) in enumerate(spec.entries):
        fired = rng.random(n) < probability
        signs = np.where(rng.random(n) < 0.5, -1, 1)
        hits[j] = np.where(fired, signs, 0)

    shocks = spec.magnitudes @ hits if spec.m else np.zeros(n)
    return ContaminatedSeries(series.values + shocks, hits, spec, series)


def single_outlier(series, index, magnitude):
    """Series with one additive outlier of the given signed size at `index`"""
    if not 0 <= index < series.n:
        raise SpecError(f"outlier index {index} outside 0..{series.n - 1}")
    values = series.values.copy()
    values[index] += magnitude
    return series.derive(values, outlier_index=index, outlier_magnitude=magnitude)


def contaminated_acvf(base, spec):
    """gamma_Z(h) = gamma_X(h) + delta(h) sum w_j^2 p_j"""
    gamma = base.gamma.copy()
    gamma[0] += outlier_variance(spec)
    return AcvfSequence(gamma, base.source)


def contaminated_spectrum(spec, outliers, omega):
    """f_Z(omega) = f_X(omega) + (1 / 2 pi) sum w_j^2 p_j"""
    return arfima_spectral_density(spec, omega) + outlier_variance(outliers) / (2.0 * np.pi)


def mean_modified(series, indices):
    """Replace the listed observations by the mean of the original full series"""
    indices = sorted(set(int(i) for i in indices))
    for index in indices:
        if not 0 <= index < series.n:
            raise SpecError(f"index {index} outside 0..{series.n - 1}")
    values = series.values.copy()
    values[indices] = series.values.mean()
    return series.derive(values, replaced=indices)
