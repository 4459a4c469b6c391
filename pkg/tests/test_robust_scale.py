import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from constants import QN_CONSTANT
from errors import InsufficientDataError, SpecError
from robust_scale import QnConfig, pairwise_distances, qn_order_index, qn_scale


def brute_force_qn(values, c=QN_CONSTANT):
    distances = sorted(abs(a - b) for a, b in itertools.combinations(values, 2))
    n = len(values)
    tau = (n * (n - 1) // 2 + 2) // 4 + 1
    return c * distances[tau - 1]


def test_order_index():
    assert qn_order_index(2) == 1
    assert qn_order_index(3) == 2
    assert qn_order_index(10) == 12
    with pytest.raises(InsufficientDataError):
        qn_order_index(1)


def test_matches_sort_all_pairs_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        n = int(rng.integers(2, 61))
        values = rng.standard_normal(n) * rng.uniform(0.1, 10.0)
        assert qn_scale(values) == brute_force_qn(values.tolist())


def test_two_points():
    assert qn_scale([1.0, 4.0]) == pytest.approx(3.0 * QN_CONSTANT)


def test_pairwise_distances():
    assert_allclose(pairwise_distances([0.0, 1.0, 3.0]), [1.0, 3.0, 2.0])


def test_location_and_scale_equivariance(rng):
    x = rng.standard_normal(101)
    base = qn_scale(x)
    assert qn_scale(x + 17.0) == pytest.approx(base, rel=1e-12)
    assert qn_scale(-x) == base
    assert qn_scale(2.0 * x) == 2.0 * base
    assert qn_scale(3.5 * x) == pytest.approx(3.5 * base, rel=1e-12)


def test_consistency_at_the_normal():
    rng = np.random.default_rng(99)
    x = rng.standard_normal(4000)
    assert qn_scale(x) == pytest.approx(1.0, abs=0.05)


def test_bounded_with_forty_percent_replaced(rng):
    x = rng.standard_normal(1000)
    clean = qn_scale(x)
    dirty = x.copy()
    dirty[:400] = 1e6
    assert qn_scale(dirty) < 3 * clean


def test_explodes_with_sixty_percent_distinct_outliers(rng):
    x = rng.standard_normal(1000)
    clean = qn_scale(x)
    dirty = x.copy()
    dirty[:600] = 1e6 * (np.arange(600) + 1)
    assert qn_scale(dirty) > 1e3 * clean


def test_implodes_with_sixty_percent_constant(rng):
    x = rng.standard_normal(1000)
    x[:600] = 5.0
    assert qn_scale(x) == 0.0


def test_invalid_inputs():
    with pytest.raises(InsufficientDataError):
        qn_scale([1.0])
    with pytest.raises(SpecError):
        qn_scale([1.0, np.inf])
    with pytest.raises(SpecError):
        QnConfig(c=0.0)
    assert qn_scale([0.0, 1.0], QnConfig(c=1.0)) == 1.0
