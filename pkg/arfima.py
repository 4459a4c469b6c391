"""
ARFIMA(p,d,q) processes for RobustLM

The model is Phi(B)(1-B)^d (X_t - mu) = Theta(B) eps_t with
Phi(z) = 1 - sum phi_j z^j and Theta(z) = 1 - sum theta_i z^i.
This module provides the theoretical autocovariance and spectral density,
exact Gaussian simulation and integer (de)differencing.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import linalg, signal
from scipy.special import gammaln

from constants import (
    MA_TRUNCATION, MA_TAIL_TOLERANCE, BURN_IN_MIN, BURN_IN_PER_ORDER,
    ROOT_MARGIN
)
from errors import SpecError, PoleError, InsufficientDataError

logger = logging.getLogger(__name__)


def _lag_polynomial_roots(coefficients):
    """Roots of 1 - c_1 z - ... - c_k z^k"""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.size == 0 or not np.any(coefficients):
        return np.array([], dtype=complex)
    # np.roots wants the highest power first
    poly = np.concatenate((-coefficients[::-1], [1.0]))
    return np.roots(np.trim_zeros(poly, 'f'))


@dataclass
class ArfimaSpec:
    """ARFIMA(p,d,q) model; phi and theta follow the 1 - sum c_j B^j convention"""

    d: float
    phi: tuple = ()
    theta: tuple = ()
    sigma2: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        self.phi = tuple(float(c) for c in self.phi)
        self.theta = tuple(float(c) for c in self.theta)
        self.d = float(self.d)
        self.sigma2 = float(self.sigma2)
        self.mu = float(self.mu)

        values = (self.d, self.sigma2, self.mu) + self.phi + self.theta
        if not all(math.isfinite(v) for v in values):
            raise SpecError(f"ARFIMA parameters must be finite: {self}")
        if self.sigma2 <= 0:
            raise SpecError(f"innovation variance must be positive, got sigma2={self.sigma2}")

        for name, coefficients in (('Phi', self.phi), ('Theta', self.theta)):
            for root in _lag_polynomial_roots(coefficients):
                if abs(root) <= 1.0 + ROOT_MARGIN:
                    raise SpecError(
                        f"{name}(z) has root {root:.6g} with modulus {abs(root):.6g}; "
                        f"all roots must lie outside the unit circle"
                    )

    @classmethod
    def fractional_noise(cls, d, sigma2=1.0, mu=0.0):
        """ARFIMA(0,d,0) factory"""
        return cls(d=d, sigma2=sigma2, mu=mu)

    @property
    def p(self):
        """AR order"""
        return len(self.phi)

    @property
    def q(self):
        """MA order"""
        return len(self.theta)

    @property
    def is_stationary(self):
        """True when -0.5 < d < 0.5"""
        return -0.5 < self.d < 0.5

    def check_stationary(self):
        """Reject memory parameters outside the stationary, invertible range"""
        if not self.is_stationary:
            raise SpecError(
                f"d={self.d} is outside (-0.5, 0.5); non-stationary models are only "
                f"available through integer integration"
            )
        return self

    def with_memory(self, d):
        """Same ARMA part, different memory parameter"""
        return ArfimaSpec(d=d, phi=self.phi, theta=self.theta, sigma2=self.sigma2, mu=self.mu)

    def describe(self):
        """Compact one-line description used in file headers"""
        phi = ','.join(repr(c) for c in self.phi)
        theta = ','.join(repr(c) for c in self.theta)
        return (f"p={self.p} d={self.d!r} q={self.q} phi=[{phi}] theta=[{theta}] "
                f"sigma2={self.sigma2!r} mu={self.mu!r}")


@dataclass
class TimeSeries:
    """Observed values x_1..x_n plus provenance metadata"""

    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float).reshape(-1)
        if self.values.size < 1:
            raise InsufficientDataError("a time series needs at least one observation")
        if not np.all(np.isfinite(self.values)):
            bad = np.flatnonzero(~np.isfinite(self.values))
            raise SpecError(f"time series values must be finite; offending indices {bad[:10].tolist()}")

    def __len__(self):
        return self.values.size

    @property
    def n(self):
        """Number of observations"""
        return self.values.size

    def derive(self, values, **metadata):
        """New series carrying this series' metadata plus updates"""
        merged = dict(self.metadata)
        merged.update(metadata)
        return TimeSeries(values, merged)


@dataclass
class AcvfSequence:
    """Autocovariances gamma(0..H) tagged with the estimator that produced them"""

    gamma: np.ndarray
    source: str = 'theoretical'

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=float).reshape(-1)
        if self.source not in ('theoretical', 'classical-sample', 'robust-Q'):
            raise SpecError(f"unknown autocovariance source {self.source!r}")

    def __len__(self):
        return self.gamma.size

    def __getitem__(self, h):
        return self.gamma[h]

    @property
    def max_lag(self):
        """Largest lag H held"""
        return self.gamma.size - 1

    def acf(self):
        """Autocorrelations gamma(h) / gamma(0)"""
        return self.gamma / self.gamma[0]


def fractional_noise_acvf(d, sigma2, max_lag):
    """
    ACVF of ARFIMA(0,d,0): gamma(0) = sigma2 Gamma(1-2d) / Gamma(1-d)^2 through
    log-Gamma, then gamma(h) = gamma(h-1) (h-1+d) / (h-d).
    """
    gamma0 = sigma2 * math.exp(gammaln(1.0 - 2.0 * d) - 2.0 * gammaln(1.0 - d))
    h = np.arange(1, max_lag + 1, dtype=float)
    ratios = (h - 1.0 + d) / (h - d)
    return gamma0 * np.concatenate(([1.0], np.cumprod(ratios)))


def arma_psi_weights(spec, count):
    """First `count` MA(inf) weights of Theta(B)/Phi(B)"""
    impulse = np.zeros(count)
    impulse[0] = 1.0
    b = np.concatenate(([1.0], -np.asarray(spec.theta)))
    a = np.concatenate(([1.0], -np.asarray(spec.phi)))
    return signal.lfilter(b, a, impulse)


def arfima_acvf(spec, max_lag):
    """Theoretical autocovariances gamma(0..max_lag) of a stationary ARFIMA model"""
    spec.check_stationary()
    if max_lag < 0:
        raise SpecError(f"max_lag must be non-negative, got {max_lag}")

    if spec.p == 0 and spec.q == 0:
        return AcvfSequence(fractional_noise_acvf(spec.d, spec.sigma2, max_lag))

    psi = arma_psi_weights(spec, 2 * MA_TRUNCATION)
    tail = np.sum(np.abs(psi[MA_TRUNCATION:]))
    if tail >= MA_TAIL_TOLERANCE:
        raise SpecError(
            f"ARMA part decays too slowly: MA(inf) tail mass {tail:.3e} beyond "
            f"{MA_TRUNCATION} weights; a root is too close to the unit circle"
        )
    psi = psi[:MA_TRUNCATION]

    # weight autocorrelation c(m) = sum_j psi_j psi_{j+m}, m = -(K-1)..K-1
    weights = np.correlate(psi, psi, mode='full')
    shifts = np.arange(-(MA_TRUNCATION - 1), MA_TRUNCATION)
    core = fractional_noise_acvf(spec.d, spec.sigma2, max_lag + MA_TRUNCATION)
    lags = np.abs(np.arange(max_lag + 1)[:, None] - shifts[None, :])
    return AcvfSequence(core[lags] @ weights)


def _polynomial_on_circle(coefficients, omega):
    """1 - sum c_j exp(-i j omega)"""
    j = np.arange(1, len(coefficients) + 1)
    if j.size == 0:
        return np.ones_like(omega, dtype=complex)
    phases = np.exp(-1j * np.multiply.outer(omega, j))
    return 1.0 - phases @ np.asarray(coefficients, dtype=float)


def arfima_spectral_density(spec, omega):
    """f_X(omega) = sigma2/(2 pi) |Theta|^2/|Phi|^2 [2 sin(omega/2)]^(-2d)"""
    spec.check_stationary()
    scalar = np.isscalar(omega)
    omega = np.abs(np.asarray(omega, dtype=float))
    if np.any(omega > np.pi + 1e-12):
        raise SpecError("frequencies must lie in [-pi, pi]")
    if spec.d > 0 and np.any(omega == 0.0):
        raise PoleError(f"spectral density has a pole at omega=0 for d={spec.d}")

    ratio = (np.abs(_polynomial_on_circle(spec.theta, omega)) ** 2
             / np.abs(_polynomial_on_circle(spec.phi, omega)) ** 2)
    with np.errstate(divide='ignore'):
        memory = (2.0 * np.sin(omega / 2.0)) ** (-2.0 * spec.d)
    density = spec.sigma2 / (2.0 * np.pi) * ratio * memory
    return float(density) if scalar else density


@lru_cache(maxsize=16)
def _durbin_levinson_factor(d, sigma2, n):
    """
    Unit lower-triangular A and innovation variances v such that A x = e,
    e_t ~ N(0, v_t) independent, reproduces the ARFIMA(0,d,0) covariance.
    """
    gamma = fractional_noise_acvf(d, sigma2, n - 1)
    factor = np.eye(n)
    variances = np.empty(n)
    variances[0] = gamma[0]
    phi = np.zeros(0)
    for t in range(1, n):
        reflection = (gamma[t] - phi @ gamma[t - 1:0:-1]) / variances[t - 1]
        phi = np.concatenate((phi - reflection * phi[::-1], [reflection]))
        variances[t] = variances[t - 1] * (1.0 - reflection ** 2)
        factor[t, :t] = -phi[::-1]
    factor.setflags(write=False)
    variances.setflags(write=False)
    return factor, variances


def _fractional_noise(d, sigma2, n, rng):
    """Exact Gaussian ARFIMA(0,d,0) sample by Durbin-Levinson conditioning"""
    factor, variances = _durbin_levinson_factor(float(d), float(sigma2), int(n))
    innovations = np.sqrt(variances) * rng.standard_normal(n)
    return linalg.solve_triangular(factor, innovations, lower=True, unit_diagonal=True)


def simulate_arfima(spec, n, seed, integrate_order=0):
    """
    Gaussian ARFIMA(p, d, q) realisation of length n, deterministic given seed.
    With integrate_order k the stationary core has memory d - k and the
    result is integrated k times from zero.
    """
    if n < 2:
        raise InsufficientDataError(f"simulation needs n >= 2, got n={n}")
    if integrate_order < 0:
        raise SpecError(f"integrate_order must be non-negative, got {integrate_order}")

    core = spec.with_memory(spec.d - integrate_order).check_stationary()
    length = n - integrate_order
    if length < 2:
        raise InsufficientDataError(f"n={n} too short for {integrate_order} integrations")

    rng = np.random.default_rng(seed)
    if core.p == 0 and core.q == 0:
        values = _fractional_noise(core.d, core.sigma2, length, rng)
    else:
        burn = max(BURN_IN_MIN, BURN_IN_PER_ORDER * (core.p + core.q))
        noise = _fractional_noise(core.d, core.sigma2, length + burn, rng)
        b = np.concatenate(([1.0], -np.asarray(core.theta)))
        a = np.concatenate(([1.0], -np.asarray(core.phi)))
        values = signal.lfilter(b, a, noise)[burn:]

    series = TimeSeries(values, {'seed': seed, 'model': spec.describe()})
    for _ in range(integrate_order):
        series = integrate(series, 0.0)
    return series.derive(series.values + spec.mu, integrated=integrate_order)


def difference(series):
    """First differences w_t = x_{t+1} - x_t"""
    if series.n < 2:
        raise InsufficientDataError(f"differencing needs n >= 2, got n={series.n}")
    times = series.metadata.get('differenced', 0) + 1
    return series.derive(np.diff(series.values), differenced=times)


def integrate(series, initial=0.0):
    """Cumulative sums starting from `initial`; returns n + 1 values"""
    values = np.cumsum(np.concatenate(([float(initial)], series.values)))
    return series.derive(values, integrated=series.metadata.get('integrated', 0) + 1)
