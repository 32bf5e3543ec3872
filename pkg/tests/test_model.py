#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `drlr.model` module."""
import math

import numpy as np
import pytest

from drlr import exceptions
from drlr.model import (
    LOG2, Dataset, LabeledSample, LogisticModel, MetricParams, NormKind,
    parse_kappa,
)


@pytest.fixture
def get_default_data():
    """Returns default data for LogisticModel tests.

    Returns:
        dict: object with beta, x and dataset.
    """
    return {
        "beta": np.array([1.0, -2.0, 0.5]),
        "x": np.array([0.3, 0.1, -1.0]),
        "dataset": Dataset(
            X=[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]],
            y=[1, -1, 1]
        ),
    }


def test_logloss_at_zero_is_log2(get_default_data):
    """ Test logloss of beta = 0 is log 2 for both labels. """
    x = get_default_data.get("x")
    for y in (-1, 1):
        assert LogisticModel.logloss(np.zeros(3), x, y) == \
            pytest.approx(LOG2, abs=1e-15)


def test_logloss_value(get_default_data):
    """ Test logloss against the closed form. """
    beta = get_default_data.get("beta")
    x = get_default_data.get("x")
    expected = math.log1p(math.exp(-np.dot(beta, x)))
    assert LogisticModel.logloss(beta, x, 1) == pytest.approx(expected)


def test_logloss_dimension_mismatch(get_default_data):
    """ Test logloss raises DimensionError on mismatched vectors. """
    with pytest.raises(exceptions.DimensionError):
        LogisticModel.logloss(get_default_data.get("beta"), [1.0, 2.0], 1)


def test_softplus_is_stable():
    """ Test softplus does not overflow for large arguments. """
    assert LogisticModel.softplus(1000.0) == pytest.approx(1000.0)
    assert LogisticModel.softplus(-1000.0) == pytest.approx(0.0, abs=1e-300)
    assert np.isfinite(LogisticModel.softplus(np.array([-800.0, 800.0]))).all()


@pytest.mark.parametrize("seed", range(200))
def test_logloss_gradient_matches_finite_differences(seed):
    """ Test the analytic gradient against central differences. """
    rng = np.random.default_rng(seed)
    beta = rng.normal(size=4)
    x = rng.normal(size=4)
    y = rng.choice([-1, 1])
    gradient = LogisticModel.logloss_gradient(beta, x, y)

    step = 1e-6
    for j in range(4):
        shift = np.zeros(4)
        shift[j] = step
        numeric = (
            LogisticModel.logloss(beta + shift, x, y) -
            LogisticModel.logloss(beta - shift, x, y)
        ) / (2 * step)
        assert gradient[j] == pytest.approx(numeric, abs=1e-7)


@pytest.mark.parametrize("seed", range(200))
def test_softplus_monotone_and_convex(seed):
    """ Test softplus is increasing and midpoint convex. """
    rng = np.random.default_rng(seed)
    low, high = np.sort(rng.uniform(-30, 30, size=2))
    if low == high:
        return
    assert LogisticModel.softplus(low) < LogisticModel.softplus(high)
    middle = LogisticModel.softplus(0.5 * (low + high))
    average = 0.5 * (
        LogisticModel.softplus(low) + LogisticModel.softplus(high))
    assert middle <= average + 1e-12


@pytest.mark.parametrize("seed", range(100))
def test_logloss_of_both_labels_is_at_least_2_log2(seed):
    """ Test both labels cost at least 2 log 2, equal on the boundary. """
    rng = np.random.default_rng(seed)
    beta = rng.normal(size=4) * rng.uniform(0.1, 5.0)
    x = rng.normal(size=4)
    total = LogisticModel.logloss(beta, x, 1) + \
        LogisticModel.logloss(beta, x, -1)
    assert total >= 2 * LOG2 - 1e-12

    boundary = x - np.dot(beta, x) / np.dot(beta, beta) * beta
    total = LogisticModel.logloss(beta, boundary, 1) + \
        LogisticModel.logloss(beta, boundary, -1)
    assert total == pytest.approx(2 * LOG2, abs=1e-12)


def test_classify_tie_is_negative():
    """ Test points on the decision boundary are labeled -1. """
    assert LogisticModel.classify([1.0, -1.0], [2.0, 2.0]) == -1
    assert LogisticModel.classify([1.0, 0.0], [0.5, 3.0]) == 1
    predictions = LogisticModel.predict([1.0, 0.0], [[0.0, 1.0], [2.0, 0.0]])
    np.testing.assert_array_equal(predictions, [-1.0, 1.0])


def test_mean_loss_gradient_averages_samples(get_default_data):
    """ Test the dataset gradient is the mean of sample gradients. """
    data = get_default_data.get("dataset")
    beta = np.array([0.4, -0.7])
    expected = np.mean([
        LogisticModel.logloss_gradient(beta, sample.x, sample.y)
        for sample in data.samples
    ], axis=0)
    np.testing.assert_allclose(
        LogisticModel.mean_loss_gradient(beta, data), expected)


def test_dataset_validation():
    """ Test Dataset rejects bad labels, shapes and values. """
    with pytest.raises(exceptions.DataError):
        Dataset(X=[[1.0], [2.0]], y=[0, 1])
    with pytest.raises(exceptions.DimensionError):
        Dataset(X=[[1.0], [2.0]], y=[1])
    with pytest.raises(exceptions.DataError):
        Dataset(X=[[np.nan], [2.0]], y=[1, -1])
    with pytest.raises(exceptions.DataError):
        LabeledSample(x=[1.0], y=2)


def test_dataset_is_read_only(get_default_data):
    """ Test dataset arrays cannot be modified in place. """
    data = get_default_data.get("dataset")
    with pytest.raises(ValueError):
        data.X[0, 0] = 5.0
    assert len(data) == 3
    assert data.n == 2


def test_dataset_from_samples():
    """ Test building a dataset from labeled samples. """
    samples = [LabeledSample(x=[1.0, 2.0], y=1),
               LabeledSample(x=[0.0, -1.0], y=-1)]
    data = Dataset.from_samples(samples)
    assert data.size == 2
    np.testing.assert_array_equal(data.y, [1.0, -1.0])
    with pytest.raises(exceptions.DimensionError):
        Dataset.from_samples(samples + [LabeledSample(x=[1.0], y=1)])


def test_norm_and_kappa_parsing():
    """ Test norm names, dual norms and kappa parsing. """
    assert NormKind.parse('inf') is NormKind.LINF
    assert NormKind.parse('L1').dual is NormKind.LINF
    assert NormKind.L2.dual is NormKind.L2
    assert math.isinf(parse_kappa('inf'))
    assert MetricParams(norm='linf', kappa='inf').infinite_kappa
    with pytest.raises(exceptions.ConfigError):
        NormKind.parse('l3')
    with pytest.raises(exceptions.ConfigError):
        parse_kappa(0)
    with pytest.raises(exceptions.ConfigError):
        parse_kappa('abc')
