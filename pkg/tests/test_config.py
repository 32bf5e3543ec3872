#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `drlr.config` module."""
import math
import os

import pytest

from drlr import __version__, exceptions
from drlr.config import RunConfig, default_epsilon_grid
from drlr.model import NormKind


@pytest.fixture
def get_default_data(tmp_path):
    """Returns default data for RunConfig tests.

    Returns:
        dict: object with a configuration file path.
    """
    config_path = os.path.join(str(tmp_path), "run.conf")
    with open(config_path, "w") as config_file:
        config_file.write(
            "# synthetic run\n"
            "seed = 7\n"
            "norm = linf   # feature norm\n"
            "kappa = inf\n"
            "epsilon_grid = 0.1, 0.01\n"
            "sample_sizes = 10,50\n"
            "quiet = yes\n"
        )
    return {
        "config_path": config_path,
        "tmp_path": str(tmp_path),
    }


def test_from_file(get_default_data):
    """ Test values, comments and lists are read from the file. """
    config = RunConfig.from_file(get_default_data.get("config_path"))
    assert config.seed == 7
    assert config.norm == 'linf'
    assert math.isinf(config.kappa)
    assert config.sample_sizes == (10, 50)
    assert config.quiet is True
    assert config.grid() == [0.01, 0.1]
    assert config.is_set('norm')
    assert not config.is_set('runs')


def test_missing_file_is_io_error(get_default_data):
    """ Test a missing configuration file raises code 3. """
    with pytest.raises(exceptions.DRLRError) as error:
        RunConfig.from_file(os.path.join(get_default_data.get("tmp_path"),
                                         "absent.conf"))
    assert error.value.code == 3


def test_malformed_file(get_default_data):
    """ Test lines without a value separator raise ConfigError. """
    path = os.path.join(get_default_data.get("tmp_path"), "bad.conf")
    with open(path, "w") as config_file:
        config_file.write("seed\n")
    with pytest.raises(exceptions.ConfigError):
        RunConfig.from_file(path)


def test_overrides():
    """ Test --key style overrides are converted by field type. """
    config = RunConfig().with_values({
        'train-size': '25', 'standardize': 'false', 'obj_tol': '1e-6',
        'pair': '1,7',
    })
    assert config.train_size == 25
    assert config.standardize is False
    assert config.obj_tol == 1e-6
    assert config.pair == ('1', '7')
    assert config.csv_schema().pair == ('1', '7')


def test_invalid_overrides():
    """ Test unknown keys and unparseable values raise ConfigError. """
    with pytest.raises(exceptions.ConfigError):
        RunConfig().with_values({'learning_rate': '0.1'})
    with pytest.raises(exceptions.ConfigError):
        RunConfig().with_values({'runs': 'many'})
    with pytest.raises(exceptions.ConfigError):
        RunConfig().with_values({'quiet': 'maybe'})
    with pytest.raises(exceptions.ConfigError):
        RunConfig().with_values({'kappa': '-1'})


def test_default_norm_applies_unless_set():
    """ Test experiment defaults yield to an explicit norm. """
    assert RunConfig().metric('l1').norm == NormKind.L1
    explicit = RunConfig().with_values({'norm': 'l2'})
    assert explicit.metric('l1').norm == NormKind.L2


def test_default_grid():
    """ Test the default radius grid. """
    grid = default_epsilon_grid()
    assert len(grid) == 30
    assert grid[0] == pytest.approx(1e-4)
    assert grid[-1] == pytest.approx(1.0)
    assert RunConfig().grid() == grid


def test_train_config():
    """ Test solver settings are carried into TrainConfig. """
    config = RunConfig().with_values({'epsilon': '0.2', 'max_iters': '100',
                                      'kappa': 'inf'})
    train = config.train_config()
    assert train.epsilon == 0.2
    assert train.max_iters == 100
    assert train.mode == 'regularized'
    assert config.train_config(epsilon=0.0).mode == 'classical'


def test_provenance_is_serializable():
    """ Test provenance echoes the resolved configuration. """
    config = RunConfig().with_values({'kappa': 'inf', 'seed': '3'})
    provenance = config.provenance('train')
    assert provenance['command'] == 'train'
    assert provenance['version'] == __version__
    assert provenance['seed'] == 3
    assert provenance['config']['kappa'] == 'inf'
    assert provenance['config']['sample_sizes'] == [10, 100, 1000]
    assert 'explicit' not in provenance['config']


def test_from_dict_restores_provenance():
    """ Test a provenance echo rebuilds the run and explicit flags win. """
    trained = RunConfig().with_values({
        'seed': '5', 'kappa': 'inf', 'epsilon_grid': '0.01,0.1',
        'pair': '1,7', 'standardize': 'false', 'beta_true': '1,0,0'})
    restored = RunConfig.from_dict(trained.provenance('train')['config'])
    assert restored == trained
    assert not restored.explicit

    current = RunConfig().with_values({'train_size': '40', 'model': 'm.json'})
    merged = restored.overlay(current)
    assert merged.seed == 5
    assert merged.train_size == 40
    assert merged.pair == ('1', '7')
    assert merged.is_set('model')
