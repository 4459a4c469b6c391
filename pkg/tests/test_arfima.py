import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.integrate import quad
from scipy.linalg import toeplitz
from scipy.special import gamma as gamma_function
from scipy.special import gammaln, gammasgn

from arfima import (
    AcvfSequence, ArfimaSpec, TimeSeries, arfima_acvf, arfima_spectral_density,
    arma_psi_weights, difference, fractional_noise_acvf, integrate, simulate_arfima
)
from autocovariance import sample_acvf
from errors import InsufficientDataError, PoleError, SpecError


def test_white_noise_acvf():
    acvf = arfima_acvf(ArfimaSpec.fractional_noise(0.0), 3)
    assert acvf.source == 'theoretical'
    assert_allclose(acvf.gamma, [1.0, 0.0, 0.0, 0.0], atol=1e-15)


def test_fractional_noise_recursion_matches_gamma_functions():
    d = 0.3
    gamma = arfima_acvf(ArfimaSpec.fractional_noise(d), 20).gamma
    h = np.arange(1, 21)
    assert_allclose(gamma[1:] / gamma[:-1], (h - 1 + d) / (h - d), rtol=1e-12)

    # closed form gamma(h) = Gamma(1-2d) Gamma(h+d) / (Gamma(d) Gamma(1-d) Gamma(h+1-d))
    direct = (gamma_function(1 - 2 * d) * gamma_function(h + d)
              / (gamma_function(d) * gamma_function(1 - d) * gamma_function(h + 1 - d)))
    assert_allclose(gamma[1:], direct, rtol=1e-10)
    assert gamma[0] == pytest.approx(gamma_function(1 - 2 * d) / gamma_function(1 - d) ** 2)


def test_hyperbolic_decay():
    gamma = arfima_acvf(ArfimaSpec.fractional_noise(0.45), 20000).gamma
    scaled = gamma[[5000, 10000, 20000]] * np.array([5000, 10000, 20000]) ** 0.1
    assert np.all(scaled > 0)
    assert scaled[2] == pytest.approx(scaled[1], rel=1e-3)
    assert abs(scaled[2] - scaled[1]) < abs(scaled[1] - scaled[0])


def test_ar1_acvf_matches_closed_form():
    phi = 0.6
    gamma = arfima_acvf(ArfimaSpec(0.0, phi=(phi,)), 10).gamma
    expected = phi ** np.arange(11) / (1 - phi ** 2)
    assert_allclose(gamma, expected, rtol=1e-9)


def test_acvf_bounded_by_variance():
    for spec in (ArfimaSpec(0.2, phi=(0.5,)), ArfimaSpec(-0.3, theta=(0.4,)),
                 ArfimaSpec(0.4, phi=(-0.3,), theta=(0.2,))):
        gamma = arfima_acvf(spec, 50).gamma
        assert gamma[0] > 0
        assert np.all(np.abs(gamma) <= gamma[0] + 1e-12)


def test_nonstationary_specs_are_rejected():
    with pytest.raises(SpecError, match="root"):
        ArfimaSpec(0.2, phi=(1.1,))
    with pytest.raises(SpecError, match="root"):
        ArfimaSpec(0.2, theta=(1.0,))
    with pytest.raises(SpecError):
        arfima_acvf(ArfimaSpec.fractional_noise(0.5), 5)
    with pytest.raises(SpecError):
        ArfimaSpec(0.2, sigma2=0.0)


def test_psi_weights_of_ar1():
    assert_allclose(arma_psi_weights(ArfimaSpec(0.0, phi=(0.5,)), 5), 0.5 ** np.arange(5))


def test_spectral_density():
    spec = ArfimaSpec.fractional_noise(0.3)
    assert arfima_spectral_density(spec, math.pi) == pytest.approx(2 ** -0.6 / (2 * math.pi))
    omega = np.linspace(0.01, math.pi, 50)
    density = arfima_spectral_density(spec, omega)
    assert np.all(density > 0)
    assert np.all(np.diff(density) < 0)

    white = arfima_spectral_density(ArfimaSpec.fractional_noise(0.0, sigma2=2.0), omega)
    assert_allclose(white, 1.0 / math.pi)


def test_spectral_density_of_arma_part():
    phi, theta = 0.5, 0.3
    omega = 1.2
    expected = (abs(1 - theta * np.exp(-1j * omega)) ** 2
                / abs(1 - phi * np.exp(-1j * omega)) ** 2 / (2 * math.pi))
    spec = ArfimaSpec(0.0, phi=(phi,), theta=(theta,))
    assert arfima_spectral_density(spec, omega) == pytest.approx(expected)


def test_spectral_density_pole():
    with pytest.raises(PoleError):
        arfima_spectral_density(ArfimaSpec.fractional_noise(0.2), 0.0)
    assert arfima_spectral_density(ArfimaSpec.fractional_noise(-0.2), 0.0) == 0.0


def test_simulation_is_deterministic():
    spec = ArfimaSpec.fractional_noise(0.3)
    first = simulate_arfima(spec, 300, seed=42)
    second = simulate_arfima(spec, 300, seed=42)
    assert first.n == 300
    assert_array_equal(first.values, second.values)
    assert first.metadata['seed'] == 42
    assert not np.array_equal(first.values, simulate_arfima(spec, 300, seed=43).values)


def test_simulated_autocorrelation_matches_theory():
    spec = ArfimaSpec.fractional_noise(0.3)
    theory = arfima_acvf(spec, 1).acf()[1]
    estimates = []
    for seed in range(200):
        x = simulate_arfima(spec, 200, seed).values
        # uncentered, the mean is known to be zero
        estimates.append((x[:-1] @ x[1:]) / (x @ x))
    assert np.mean(estimates) == pytest.approx(theory, abs=0.03)


def test_simulate_arma_part_and_mean():
    spec = ArfimaSpec(0.2, phi=(0.5,), mu=3.0)
    series = simulate_arfima(spec, 500, seed=1)
    assert series.n == 500
    assert abs(series.values.mean() - 3.0) < 3.0


def test_integrated_simulation():
    spec = ArfimaSpec.fractional_noise(1.0)
    series = simulate_arfima(spec, 300, seed=5, integrate_order=1)
    assert series.n == 300
    assert series.values[0] == 0.0
    core = difference(series)
    assert core.n == 299
    with pytest.raises(SpecError):
        simulate_arfima(ArfimaSpec.fractional_noise(0.6), 100, seed=1)


def test_difference_inverts_integrate():
    series = TimeSeries([1.0, -2.0, 0.5, 4.0])
    restored = difference(integrate(series, initial=7.0))
    assert_allclose(restored.values, series.values)
    assert integrate(series, 7.0).values[0] == 7.0
    assert difference(series).metadata['differenced'] == 1


def test_short_inputs():
    with pytest.raises(InsufficientDataError):
        difference(TimeSeries([1.0]))
    with pytest.raises(InsufficientDataError):
        simulate_arfima(ArfimaSpec.fractional_noise(0.1), 1, seed=0)
    with pytest.raises(SpecError):
        TimeSeries([1.0, np.nan])


def test_acvf_sequence_acf():
    acvf = AcvfSequence([2.0, 1.0, 0.5])
    assert acvf.max_lag == 2
    assert_allclose(acvf.acf(), [1.0, 0.5, 0.25])
    with pytest.raises(SpecError):
        AcvfSequence([1.0], source='guess')


def test_fractional_noise_acvf_sigma_scaling():
    assert_allclose(fractional_noise_acvf(0.2, 3.0, 5), 3.0 * fractional_noise_acvf(0.2, 1.0, 5))


def _smooth_part(spec, omega):
    # f(w) w^(2d) is bounded near zero; the w^(-2d) factor is left to the quadrature weight
    omega = max(omega, 1e-12)
    return arfima_spectral_density(spec, omega) * omega ** (2 * spec.d)


@pytest.mark.parametrize('spec', [
    ArfimaSpec.fractional_noise(-0.45),
    ArfimaSpec.fractional_noise(-0.2),
    ArfimaSpec.fractional_noise(0.0, sigma2=2.0),
    ArfimaSpec.fractional_noise(0.2),
    ArfimaSpec.fractional_noise(0.45),
    ArfimaSpec(0.2, phi=(0.5,)),
    ArfimaSpec(-0.3, theta=(0.4,)),
])
def test_spectral_density_integrates_to_variance(spec):
    half, _ = quad(lambda w: _smooth_part(spec, w), 0.0, math.pi, weight='alg',
                             wvar=(-2 * spec.d, 0.0), epsabs=1e-11, limit=200)
    assert 2 * half == pytest.approx(arfima_acvf(spec, 0).gamma[0], abs=1e-4)


@pytest.mark.parametrize('d', [-0.45, -0.2, 0.0, 0.2, 0.3, 0.45])
def test_recursion_matches_gamma_oracle_to_lag_200(d):
    gamma = arfima_acvf(ArfimaSpec.fractional_noise(d), 200).gamma
    assert gamma[0] == pytest.approx(math.exp(gammaln(1 - 2 * d) - 2 * gammaln(1 - d)), rel=1e-12)
    h = np.arange(1, 201)
    if d == 0.0:
        assert_allclose(gamma[1:], 0.0, atol=1e-15)
        return
    log_ratio = (gammaln(1 - 2 * d) + gammaln(h + d) - gammaln(d) - gammaln(1 - d)
                 - gammaln(h + 1 - d))
    assert_allclose(gamma[1:], gammasgn(d) * np.exp(log_ratio), rtol=1e-10)


def test_white_noise_simulation_battery():
    n, replicates = 400, 50
    spec = ArfimaSpec.fractional_noise(0.0)
    paths = np.array([simulate_arfima(spec, n, seed).values for seed in range(replicates)])
    pooled = paths.reshape(-1)
    total = pooled.size
    assert abs(pooled.mean()) < 4 / math.sqrt(total)
    assert abs(pooled.var() - 1.0) < 4 * math.sqrt(2 / total)
    lag_one = [np.corrcoef(x[:-1], x[1:])[0, 1] for x in paths]
    assert abs(np.mean(lag_one)) < 4 / math.sqrt(total) + 1 / n


def test_sample_acvf_of_long_memory_matches_its_expectation():
    n, replicates, d = 200, 300, 0.3
    spec = ArfimaSpec.fractional_noise(d)
    covariance = toeplitz(arfima_acvf(spec, n - 1).gamma)
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    centered_covariance = centering @ covariance @ centering

    estimates = np.array([
        [sample_acvf(series, h) for h in range(6)]
        for series in (simulate_arfima(spec, n, 5000 + seed) for seed in range(replicates))
    ])
    for h in range(6):
        # exact mean of the centred estimator with divisor n
        expected = np.trace(centered_covariance[h:, :n - h]) / n
        band = 4 * estimates[:, h].std(ddof=1) / math.sqrt(replicates)
        assert abs(estimates[:, h].mean() - expected) < band
    assert estimates[:, 0].mean() < arfima_acvf(spec, 0).gamma[0]
