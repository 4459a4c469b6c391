import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from arfima import ArfimaSpec, TimeSeries, arfima_acvf, arfima_spectral_density, simulate_arfima
from autocovariance import sample_acf, sample_acvf
from contamination import (
    OutlierSpec, contaminate, contaminated_acvf, contaminated_spectrum, expected_outliers,
    mean_modified, outlier_variance, single_outlier
)
from errors import SpecError

STUDY_OUTLIERS = OutlierSpec.single(10.0, 0.05)


def test_outlier_spec_validation():
    assert STUDY_OUTLIERS.m == 1
    assert_allclose(STUDY_OUTLIERS.magnitudes, [10.0])
    with pytest.raises(SpecError):
        OutlierSpec.single(10.0, 1.5)
    with pytest.raises(SpecError):
        OutlierSpec.single(math.inf, 0.1)
    assert OutlierSpec().is_clean()
    assert OutlierSpec.single(0.0, 0.3).is_clean()
    assert not STUDY_OUTLIERS.is_clean()


def test_outlier_variance_and_count():
    spec = OutlierSpec(((10.0, 0.05), (5.0, 0.02)))
    assert outlier_variance(spec) == pytest.approx(100 * 0.05 + 25 * 0.02)
    assert expected_outliers(spec, 1000) == pytest.approx(70.0)


def test_contamination_is_additive_and_restorable(long_memory_series):
    result = contaminate(long_memory_series, STUDY_OUTLIERS, seed=7)
    assert result.hits.shape == (1, 300)
    assert set(np.unique(result.hits)) <= {-1, 0, 1}
    assert_allclose(result.values - long_memory_series.values, 10.0 * result.hits[0])
    assert_allclose(result.restore(), long_memory_series.values)
    assert result.hit_count == np.count_nonzero(result.hits)
    assert result.as_series().metadata['contaminated'] is True


def test_contamination_is_deterministic(long_memory_series):
    first = contaminate(long_memory_series, STUDY_OUTLIERS, seed=3)
    second = contaminate(long_memory_series, STUDY_OUTLIERS, seed=3)
    assert_array_equal(first.values, second.values)


def test_clean_spec_leaves_series_alone(long_memory_series):
    for spec in (OutlierSpec(), OutlierSpec.single(10.0, 0.0)):
        result = contaminate(long_memory_series, spec, seed=1)
        assert_array_equal(result.values, long_memory_series.values)
        assert result.hit_count == 0


def test_every_index_hit_with_probability_one(white_noise):
    result = contaminate(white_noise, OutlierSpec.single(2.0, 1.0), seed=9)
    assert_allclose(np.abs(result.shocks), 2.0)


def test_hit_rate_and_sign_balance():
    series = TimeSeries(np.zeros(20000))
    result = contaminate(series, STUDY_OUTLIERS, seed=11)
    hits = result.hits[0]
    rate = np.count_nonzero(hits) / hits.size
    assert rate == pytest.approx(0.05, abs=4 * math.sqrt(0.05 * 0.95 / hits.size))
    assert abs(hits.sum()) < 4 * math.sqrt(np.count_nonzero(hits))


def test_contaminated_variance_uplift():
    # sample variance difference estimates sum w_j^2 p_j = 5
    spec = ArfimaSpec.fractional_noise(0.0)
    uplifts = []
    for seed in range(200):
        clean = simulate_arfima(spec, 1000, seed)
        dirty = contaminate(clean, STUDY_OUTLIERS, seed=10_000 + seed)
        uplifts.append(dirty.values.var() - clean.values.var())
    uplifts = np.array(uplifts)
    band = 4 * uplifts.std(ddof=1) / math.sqrt(uplifts.size)
    assert abs(uplifts.mean() - outlier_variance(STUDY_OUTLIERS)) < band


def test_contaminated_theory():
    spec = ArfimaSpec.fractional_noise(0.3)
    base = arfima_acvf(spec, 5)
    shifted = contaminated_acvf(base, STUDY_OUTLIERS)
    assert shifted.gamma[0] == pytest.approx(base.gamma[0] + 5.0)
    assert_array_equal(shifted.gamma[1:], base.gamma[1:])

    omega = np.linspace(0.1, math.pi, 20)
    uplift = contaminated_spectrum(spec, STUDY_OUTLIERS, omega) - arfima_spectral_density(spec, omega)
    assert_allclose(uplift, 5.0 / (2 * math.pi))


def test_single_outlier():
    series = TimeSeries([0.0, 1.0, 2.0])
    moved = single_outlier(series, 1, -1e6)
    assert_array_equal(moved.values, [0.0, 1.0 - 1e6, 2.0])
    with pytest.raises(SpecError):
        single_outlier(series, 3, 1.0)


def test_mean_modified():
    series = TimeSeries([1.0, 2.0, 3.0])
    assert_array_equal(mean_modified(series, [0]).values, [2.0, 2.0, 3.0])
    assert_array_equal(mean_modified(series, []).values, series.values)
    assert mean_modified(series, [2, 0]).metadata['replaced'] == [0, 2]
    with pytest.raises(SpecError):
        mean_modified(series, [5])


def test_mean_modified_uses_the_original_mean():
    series = TimeSeries([0.0, 0.0, 9.0, 3.0])
    assert_array_equal(mean_modified(series, [2, 3]).values, [0.0, 0.0, 3.0, 3.0])


@pytest.mark.parametrize('magnitude', [10.0, -3.5])
def test_single_outlier_shifts_sample_acvf_exactly(long_memory_series, magnitude):
    x = long_memory_series
    n, T = x.n, 120
    z = single_outlier(x, T, magnitude)
    c = x.values - x.values.mean()
    for h in range(6):
        # centred z is c + w (e_T - 1/n)
        cross = c[T - h] + c[T + h] - (c[:n - h].sum() + c[h:].sum()) / n
        square = (1.0 if h == 0 else 0.0) - 2.0 / n + (n - h) / n ** 2
        expected = (magnitude * cross + magnitude ** 2 * square) / n
        assert sample_acvf(z, h) - sample_acvf(x, h) == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_outliers_shrink_the_autocorrelation():
    phi = 0.6
    spec = ArfimaSpec(0.0, phi=(phi,))
    outliers = OutlierSpec.single(3.0, 0.1)
    gamma0 = 1.0 / (1.0 - phi ** 2)
    shrink = gamma0 / (gamma0 + outlier_variance(outliers))
    lags = (1, 2, 3)
    estimates = np.array([
        [sample_acf(contaminate(simulate_arfima(spec, 1000, seed), outliers, 400 + seed).as_series(), h)
         for h in lags]
        for seed in range(100)
    ])
    expected = np.array([phi ** h for h in lags]) * shrink
    assert_allclose(estimates.mean(axis=0), expected, atol=0.015)
    assert np.all(estimates.mean(axis=0) < 0.8 * phi ** np.array(lags))
