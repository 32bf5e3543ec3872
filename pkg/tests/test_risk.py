#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `drlr.risk` module."""
import math

import numpy as np
import pytest
import timeout_decorator

from drlr import exceptions
from drlr.calibration import TEST_STREAM
from drlr.config import default_epsilon_grid
from drlr.datasets import Datasets, SyntheticSpec
from drlr.model import Dataset, LogisticModel, MetricParams, NormKind
from drlr.norms import Norms
from drlr.risk import RiskEstimator
from drlr.solver import DRLRSolver, TrainConfig

from .test_base import random_dataset, risk_lp

KINDS = [NormKind.L1, NormKind.L2, NormKind.LINF]
KAPPAS = [0.5, 1.0, math.inf]


def random_case(seed, size=8):
    rng = np.random.default_rng(seed)
    data = random_dataset(seed, size=size, n=3)
    beta = rng.normal(size=3)
    epsilon = float(rng.choice([0.0, rng.uniform(0, 0.5), rng.uniform(0, 3)]))
    metric = MetricParams(KINDS[seed % 3], KAPPAS[(seed // 3) % 3])
    return beta, data, epsilon, metric


@pytest.fixture
def get_default_data():
    """Returns default data for RiskEstimator tests.

    Returns:
        dict: object with beta, dataset and metric.
    """
    return {
        "beta": np.array([1.0, -0.5]),
        "data": random_dataset(7, size=30, n=2),
        "metric": MetricParams(norm='l1', kappa=1.0),
    }


@pytest.mark.parametrize("seed", range(200))
def test_matches_linear_program(seed):
    """ Test both bounds against a direct LP solve. """
    beta, data, epsilon, metric = random_case(seed)
    risk_max, _ = RiskEstimator.worst_case_risk(beta, data, epsilon, metric)
    risk_min, _ = RiskEstimator.best_case_risk(beta, data, epsilon, metric)
    assert risk_max == pytest.approx(
        min(risk_lp(beta, data, epsilon, metric), 1.0), abs=1e-6)
    assert risk_min == pytest.approx(
        max(risk_lp(beta, data, epsilon, metric, best_case=True), 0.0),
        abs=1e-6)


@pytest.mark.parametrize("seed", range(50))
def test_breakpoint_minimum_is_certified(seed):
    """ Test g(lam) on a dense grid never beats the returned minimum. """
    beta, data, epsilon, metric = random_case(seed, size=12)
    epsilon = max(epsilon, 1e-3)
    for best_case in (False, True):
        if best_case:
            value, lam = RiskEstimator.best_case_risk(
                beta, data, epsilon, metric)
            optimum = 1.0 - value
        else:
            optimum, lam = RiskEstimator.worst_case_risk(
                beta, data, epsilon, metric)
        assert lam >= 0
        for grid_lam in np.linspace(0.0, 50.0, 2001):
            value = RiskEstimator.reduced_objective(
                grid_lam, beta, data, epsilon, metric, best_case=best_case)
            assert value >= min(optimum, 1.0) - 1e-12


@pytest.mark.parametrize("seed", range(30))
def test_epsilon_zero_is_empirical_risk(seed):
    """ Test the interval collapses to the empirical risk at epsilon 0. """
    beta, data, _, metric = random_case(seed, size=25)
    bounds = RiskEstimator.risk_bounds(beta, data, 0.0, metric)
    empirical = RiskEstimator.empirical_risk(beta, data)
    assert bounds.risk_max == pytest.approx(empirical, abs=1e-12)
    assert bounds.risk_min == pytest.approx(empirical, abs=1e-12)


@pytest.mark.parametrize("seed", range(30))
def test_scale_invariance(seed):
    """ Test bounds do not change under beta -> c * beta. """
    beta, data, epsilon, metric = random_case(seed)
    scale = 10 ** np.random.default_rng(seed).uniform(-3, 3)
    original = RiskEstimator.risk_bounds(beta, data, epsilon, metric)
    scaled = RiskEstimator.risk_bounds(scale * beta, data, epsilon, metric)
    assert scaled.risk_max == pytest.approx(original.risk_max, abs=1e-9)
    assert scaled.risk_min == pytest.approx(original.risk_min, abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_intervals_are_nested(seed):
    """ Test the interval widens monotonically with epsilon. """
    beta, data, _, metric = random_case(seed, size=20)
    empirical = RiskEstimator.empirical_risk(beta, data)
    previous = None
    for epsilon in np.concatenate(([0.0], np.logspace(-4, 1, 40))):
        bounds = RiskEstimator.risk_bounds(beta, data, epsilon, metric)
        assert 0.0 <= bounds.risk_min <= bounds.risk_max <= 1.0
        assert bounds.risk_min <= empirical + 1e-12
        assert bounds.risk_max >= empirical - 1e-12
        if previous is not None:
            assert bounds.risk_max >= previous.risk_max - 1e-12
            assert bounds.risk_min <= previous.risk_min + 1e-12
        previous = bounds


def test_zero_beta():
    """ Test beta = 0 gives the trivial interval [0, 1]. """
    data = random_dataset(1, size=10, n=2)
    metric = MetricParams(norm='l2', kappa=1.0)
    for epsilon in (0.0, 0.1, 10.0):
        bounds = RiskEstimator.risk_bounds(np.zeros(2), data, epsilon, metric)
        assert (bounds.risk_min, bounds.risk_max) == (0.0, 1.0)
    assert RiskEstimator.empirical_risk(np.zeros(2), data) == 1.0


def test_large_epsilon_reaches_one(get_default_data):
    """ Test a huge radius makes every sample misclassifiable. """
    risk_max, lam = RiskEstimator.worst_case_risk(
        get_default_data.get("beta"), get_default_data.get("data"), 1e6,
        get_default_data.get("metric"))
    assert risk_max == 1.0
    assert lam == 0.0


def test_infinite_kappa_lp_agreement(get_default_data):
    """ Test the kappa = inf reduction drops the label flip branch. """
    beta = get_default_data.get("beta")
    data = get_default_data.get("data")
    metric = MetricParams(norm='l2', kappa=math.inf)
    for epsilon in (0.0, 0.05, 0.5):
        risk_max, _ = RiskEstimator.worst_case_risk(beta, data, epsilon,
                                                    metric)
        assert risk_max == pytest.approx(
            min(risk_lp(beta, data, epsilon, metric), 1.0), abs=1e-6)


def test_separating_beta_has_zero_empirical_risk():
    """ Test a separating beta with margin has no empirical errors. """
    data = Dataset(X=[[1.0, 0.0], [2.0, 1.0], [-1.0, 0.5]], y=[1, 1, -1])
    assert RiskEstimator.empirical_risk([1.0, 0.0], data) == 0.0


def test_boundary_sample_is_fully_misclassifiable():
    """ Test a sample with zero margin counts fully in the worst case. """
    data = Dataset(X=[[0.0, 1.0], [3.0, 0.0]], y=[1, 1])
    metric = MetricParams(norm='l2', kappa=1.0)
    risk_max, _ = RiskEstimator.worst_case_risk([1.0, 0.0], data, 0.0,
                                                metric)
    risk_min, _ = RiskEstimator.best_case_risk([1.0, 0.0], data, 0.0, metric)
    assert risk_max == pytest.approx(0.5)
    assert risk_min == pytest.approx(0.0)


def test_empirical_risk_complements_ccr(get_default_data):
    """ Test empirical risk equals 1 - CCR without boundary samples. """
    beta = get_default_data.get("beta")
    data = get_default_data.get("data")
    predictions = LogisticModel.predict(beta, data.X)
    assert RiskEstimator.empirical_risk(beta, data) == pytest.approx(
        1.0 - np.mean(predictions == data.y))


def test_breakpoints_are_sorted_and_unique():
    """ Test the candidate set includes 0, every kink and a tail point. """
    scaled = np.array([0.5, 0.5, -1.0, 0.0])
    points = RiskEstimator.breakpoints(scaled, 1.0)
    assert points[0] == 0.0
    assert np.all(np.diff(points) > 0)
    for kink in (2.0, 1.0, 0.5):
        assert np.any(np.isclose(points, kink))
    assert points[-1] > 2.0
    assert Norms.dual_norm([0.0, 0.0], NormKind.L1) == 0.0


def test_negative_epsilon_rejected(get_default_data):
    """ Test epsilon < 0 raises ConfigError. """
    with pytest.raises(exceptions.ConfigError):
        RiskEstimator.worst_case_risk(
            get_default_data.get("beta"), get_default_data.get("data"),
            -0.1, get_default_data.get("metric"))


@pytest.mark.parametrize("epsilon", [math.inf, math.nan])
@pytest.mark.parametrize("best_case", [False, True])
def test_non_finite_epsilon_rejected(get_default_data, epsilon, best_case):
    """ Test infinite or undefined radii raise ConfigError. """
    bound = RiskEstimator.best_case_risk if best_case \
        else RiskEstimator.worst_case_risk
    with pytest.raises(exceptions.ConfigError):
        bound(get_default_data.get("beta"), get_default_data.get("data"),
              epsilon, get_default_data.get("metric"))


@timeout_decorator.timeout(60)
def test_interval_covers_test_risk_on_synthetic_data():
    """ Test the interval of a fitted model reaches its test risk. """
    spec = SyntheticSpec(n=10, beta_true='first_axis_10', seed=0)
    train = Datasets.generate(spec, 140)
    test = Datasets.generate(spec, 10000, TEST_STREAM)
    metric = MetricParams(norm='linf', kappa=1.0)
    model = DRLRSolver.train_drlr(
        train, TrainConfig(epsilon=0.01, metric=metric))
    test_risk = RiskEstimator.empirical_risk(model.beta, test)

    first = RiskEstimator.risk_bounds(model.beta, train, 0.0, metric)
    empirical = RiskEstimator.empirical_risk(model.beta, train)
    assert first.risk_min == pytest.approx(empirical, abs=1e-12)
    assert first.risk_max == pytest.approx(empirical, abs=1e-12)

    covered, previous = [], first
    for epsilon in default_epsilon_grid():
        bounds = RiskEstimator.risk_bounds(model.beta, train, epsilon, metric)
        assert bounds.risk_max >= previous.risk_max - 1e-12
        assert bounds.risk_min <= previous.risk_min + 1e-12
        covered.append(bounds.risk_min <= test_risk <= bounds.risk_max)
        previous = bounds
    assert any(covered)
