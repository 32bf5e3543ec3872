#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Run configuration for the drlr command line.

Configuration files are plain `key = value` lines (`#` starts a comment);
`--key value` flags override file values. Lists are comma separated.
"""

import configparser
import dataclasses
import math
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__, exceptions
from .datasets import CsvSchema, SplitSpec, SyntheticSpec
from .metrics import DEFAULT_ALPHAS
from .model import MetricParams, NormKind, parse_kappa
from .solver import TrainConfig

SECTION = 'run'


def default_epsilon_grid() -> list:
    """30 log-spaced radii in [1e-4, 1]."""
    return np.logspace(-4, 0, 30).tolist()


@dataclass(frozen=True)
class RunConfig:
    """Declarative description of a CLI run."""

    seed: int = 0
    out_dir: str = 'drlr_output'
    threads: int = 1
    quiet: bool = False

    source: str = 'synthetic'
    n: int = 10
    beta_true: str = 'first_axis_10'
    train_size: int = 100
    test_size: int = 10000
    csv_path: str = ''
    test_csv_path: str = ''
    label_column: str = '-1'
    header: bool = True
    standardize: bool = True
    pair: tuple = ()
    train_fraction: float = 0.6

    norm: str = 'l2'
    kappa: float = 1.0
    epsilon: float = 0.0
    epsilon_grid: tuple = ()
    eta: float = 0.05
    runs: int = 20
    sample_sizes: tuple = (10, 100, 1000)
    alphas: tuple = DEFAULT_ALPHAS
    risk_epsilon: float = 0.003
    model: str = ''

    max_iters: int = 50000
    obj_tol: float = 1e-8
    method: str = 'smoothed'
    step_rule: str = 'backtracking'

    explicit: frozenset = field(default=frozenset(), compare=False)

    @classmethod
    def keys(cls) -> list:
        return [f.name for f in fields(cls) if f.name != 'explicit']

    @classmethod
    def _convert(cls, name: str, value):
        default = {f.name: f.default for f in fields(cls)}[name]
        text = str(value).strip()
        try:
            if isinstance(default, bool):
                lowered = text.lower()
                if lowered not in ('true', 'false', '1', '0', 'yes', 'no'):
                    raise ValueError(text)
                return lowered in ('true', '1', 'yes')
            if name == 'kappa':
                return parse_kappa(text)
            if isinstance(default, int):
                return int(text)
            if isinstance(default, float):
                return float(text)
            if isinstance(default, tuple):
                items = [item.strip() for item in text.split(',')
                         if item.strip()]
                if name == 'pair':
                    return tuple(items)
                if name == 'sample_sizes':
                    return tuple(int(item) for item in items)
                return tuple(float(item) for item in items)
        except (TypeError, ValueError):
            raise exceptions.ConfigError(
                1, f'invalid value {value!r} for {name}')
        return text

    def with_values(self, values: dict) -> 'RunConfig':
        """Returns a copy with `values` (raw strings allowed) applied.

        Raises:
            exceptions.ConfigError: unknown key or invalid value.
        """
        known = set(self.keys())
        converted = {}
        for key, value in values.items():
            name = key.replace('-', '_').lower()
            if name not in known:
                raise exceptions.ConfigError(
                    1, f'unknown configuration key {key!r}')
            converted[name] = self._convert(name, value)
        return dataclasses.replace(
            self, explicit=self.explicit | frozenset(converted),
            **converted)

    @classmethod
    def from_file(cls, path: str) -> 'RunConfig':
        """Reads a key-value configuration file.

        Raises:
            exceptions.DRLRError: file missing (code 3).
            exceptions.ConfigError: malformed content.
        """
        if not os.path.isfile(path):
            raise exceptions.DRLRError(3, f'config file {path} not found')
        parser = configparser.ConfigParser(
            inline_comment_prefixes=('#',), interpolation=None)
        with open(path, encoding='utf-8') as config_file:
            text = config_file.read()
        try:
            parser.read_string(f'[{SECTION}]\n{text}', source=path)
        except configparser.Error as exc:
            raise exceptions.ConfigError(1, f'cannot parse {path}: {exc}')
        return cls().with_values(dict(parser.items(SECTION)))

    @classmethod
    def from_dict(cls, values: dict) -> 'RunConfig':
        """Rebuilds a configuration echoed by `to_dict`.

        Unknown keys are ignored and no key counts as explicitly set.

        Raises:
            exceptions.ConfigError: invalid value.
        """
        known = set(cls.keys())
        raw = {
            key: ','.join(str(item) for item in value)
            if isinstance(value, list) else value
            for key, value in values.items() if key in known
        }
        return dataclasses.replace(cls().with_values(raw),
                                   explicit=frozenset())

    def overlay(self, other: 'RunConfig') -> 'RunConfig':
        """Copy taking every value `other` set explicitly."""
        return dataclasses.replace(
            self, explicit=self.explicit | other.explicit,
            **{name: getattr(other, name) for name in other.explicit})

    def is_set(self, name: str) -> bool:
        return name in self.explicit

    def metric(self, default_norm: str = None) -> MetricParams:
        """Metric of the run; `default_norm` applies unless norm was set."""
        norm = self.norm
        if default_norm is not None and not self.is_set('norm'):
            norm = default_norm
        return MetricParams(norm=NormKind.parse(norm), kappa=self.kappa)

    def train_config(self, epsilon: float = None, metric=None):
        return TrainConfig(
            epsilon=self.epsilon if epsilon is None else epsilon,
            metric=metric or self.metric(),
            max_iters=self.max_iters,
            obj_tol=self.obj_tol,
            method=self.method,
            step_rule=self.step_rule,
        )

    def grid(self) -> list:
        if self.epsilon_grid:
            return sorted(float(value) for value in self.epsilon_grid)
        return default_epsilon_grid()

    def synthetic_spec(self, seed: int = None) -> SyntheticSpec:
        beta = self.beta_true
        if beta not in ('first_axis_10', 'uniform_sphere'):
            beta = [float(item) for item in beta.split(',')]
        return SyntheticSpec(
            n=self.n, beta_true=beta,
            seed=self.seed if seed is None else seed)

    def csv_schema(self) -> CsvSchema:
        return CsvSchema(
            label_column=self.label_column,
            standardize=False,
            header=self.header,
            pair=self.pair or None,
        )

    def split_spec(self, seed: int = None) -> SplitSpec:
        return SplitSpec(
            train_fraction=self.train_fraction,
            seed=self.seed if seed is None else seed)

    def to_dict(self) -> dict:
        data = {name: getattr(self, name) for name in self.keys()}
        for name, value in data.items():
            if isinstance(value, tuple):
                data[name] = list(value)
            elif isinstance(value, float) and math.isinf(value):
                data[name] = 'inf'
        return data

    def provenance(self, command: str) -> dict:
        """Resolved configuration echoed into every artifact."""
        return {
            'command': command,
            'version': __version__,
            'seed': self.seed,
            'config': self.to_dict(),
        }
