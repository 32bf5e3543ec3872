#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Synthetic generators, CSV ingestion and splitting for drlr.

Random draws come from Philox streams (see `Utils.rng`); each concern uses
its own stream id so changing one draw never shifts another.
"""

import os
import math
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.special import expit

from . import exceptions
from .model import Dataset, MetricParams
from .norms import Norms
from .utils import Utils, FLOAT_FORMAT

logger = logging.getLogger(__name__)

BETA_STREAM = 0
SAMPLE_STREAM = 1
SPLIT_STREAM = 2
PERTURB_STREAM = 3

BETA_PRESETS = ('first_axis_10', 'uniform_sphere')


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian features with logistic labels.

    Attributes:
        n (int): feature dimension.
        beta_true: explicit vector, 'first_axis_10' for (10, 0, ..., 0) or
            'uniform_sphere' for a seeded uniform draw on the unit sphere.
        seed (int): 64-bit seed.
    """

    n: int = 10
    beta_true: object = 'first_axis_10'
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 1:
            raise exceptions.ConfigError(1, 'dimension n must be positive')
        if isinstance(self.beta_true, str):
            if self.beta_true not in BETA_PRESETS:
                raise exceptions.ConfigError(
                    1, f'beta_true must be a vector or one of {BETA_PRESETS}')
        else:
            beta = np.asarray(self.beta_true, dtype=float).reshape(-1)
            if beta.shape[0] != int(self.n):
                raise exceptions.DimensionError(
                    5, f'beta_true has dimension {beta.shape[0]}, '
                       f'expected {self.n}')
            object.__setattr__(self, 'beta_true', tuple(beta.tolist()))

    def resolve_beta(self) -> np.ndarray:
        """Returns the concrete true weight vector."""
        if self.beta_true == 'first_axis_10':
            beta = np.zeros(self.n)
            beta[0] = 10.0
            return beta
        if self.beta_true == 'uniform_sphere':
            draw = Utils.rng(self.seed, BETA_STREAM).standard_normal(self.n)
            return draw / np.linalg.norm(draw)
        return np.asarray(self.beta_true, dtype=float)

    def to_dict(self) -> dict:
        beta = self.beta_true
        return {
            'n': self.n,
            'beta_true': beta if isinstance(beta, str) else list(beta),
            'seed': self.seed,
        }


@dataclass(frozen=True)
class SplitSpec:
    """Random train/test partition.

    Exactly one of `train_fraction` (in (0, 1)) or `train_count` is used;
    `train_count` wins when both are given.
    """

    train_fraction: float = 0.6
    train_count: int = None
    seed: int = 0

    def __post_init__(self):
        if self.train_count is None and not 0 < self.train_fraction < 1:
            raise exceptions.ConfigError(
                1, f'train_fraction must be in (0, 1), '
                   f'got {self.train_fraction}')


@dataclass(frozen=True)
class CsvSchema:
    """How to read a labeled CSV file.

    Attributes:
        label_column: column name, or integer position (negative allowed).
        label_encoding (dict): raw label (as text) -> -1/+1. When None the
            two sorted label values map to -1 and +1.
        standardize (bool): rescale features to mean 0, variance 1.
        header (bool): first row holds column names.
        pair (tuple): keep only rows whose label is one of these two raw
            values (one-vs-one subsets of multi-class data).
        drop_constant (bool): drop constant features instead of failing
            when standardizing.
    """

    label_column: object = -1
    label_encoding: dict = None
    standardize: bool = False
    header: bool = True
    pair: tuple = None
    drop_constant: bool = False


class Datasets:
    """Default datasets for drlr processes.

    Contains the synthetic generators of the simulation studies and the
    ingestion path for user provided CSV files.
    """

    @classmethod
    def generate(cls, spec: SyntheticSpec, count: int,
                 stream: int = SAMPLE_STREAM) -> Dataset:
        """Draws x ~ N(0, I) and y = +1 with probability sigmoid(<b, x>).

        Args:
            spec (SyntheticSpec): generator description.
            count (int): number of samples.
            stream (int, optional): Philox stream id, so that training and
                test sets of one seed are independent.

        Raises:
            exceptions.ConfigError: count < 1.

        Returns:
            Dataset: generated samples.
        """
        if int(count) < 1:
            raise exceptions.ConfigError(1, 'count must be positive')
        beta = spec.resolve_beta()
        rng = Utils.rng(spec.seed, stream)
        X = rng.standard_normal((int(count), spec.n))
        probabilities = expit(X @ beta)
        y = np.where(rng.random(int(count)) < probabilities, 1.0, -1.0)
        return Dataset(X=X, y=y)

    @classmethod
    def _column_label(cls, frame: pd.DataFrame, label_column) -> object:
        if isinstance(label_column, str) and label_column in frame.columns:
            return label_column
        try:
            position = int(label_column)
        except (TypeError, ValueError):
            raise exceptions.DataError(
                4, f'label column {label_column!r} not found')
        if not -frame.shape[1] <= position < frame.shape[1]:
            raise exceptions.DataError(
                4, f'label column {position} out of range')
        return frame.columns[position]

    @classmethod
    def _encode_labels(cls, raw: pd.Series, encoding: dict) -> np.ndarray:
        values = sorted(raw.unique().tolist())
        if len(values) > 2:
            raise exceptions.DataError(
                5, f'expected two label values, found {len(values)}: '
                   f'{values[:10]}')
        if encoding is None:
            if set(values) <= {'-1', '1', '+1'}:
                encoding = {'-1': -1, '1': 1, '+1': 1}
            else:
                encoding = {value: sign for value, sign in zip(
                    values, (-1, 1))}
        encoding = {str(key).strip(): int(value)
                    for key, value in encoding.items()}
        unknown = [value for value in values if value not in encoding]
        if unknown:
            raise exceptions.DataError(
                5, f'labels {unknown} missing from label encoding')
        if set(encoding.values()) - {-1, 1}:
            raise exceptions.ConfigError(
                1, 'label encoding must map to -1 and +1')
        return raw.map(encoding).to_numpy(dtype=float)

    @classmethod
    def load_csv(cls, path: str, schema: CsvSchema = None) -> Dataset:
        """Loads a numeric CSV file with a binary label column.

        Args:
            path (str): path to a comma separated, UTF-8 file.
            schema (CsvSchema, optional): reading options.

        Raises:
            exceptions.DRLRError: file does not exist (code 3).
            exceptions.DataError: missing or unparseable cells (the message
                lists the offending rows), more than two labels, or a
                constant feature under standardization.

        Returns:
            Dataset: features with labels mapped to -1/+1.
        """
        schema = schema or CsvSchema()
        if not os.path.isfile(path):
            raise exceptions.DRLRError(3, f'input file {path} does not exist')

        frame = pd.read_csv(
            path,
            header=0 if schema.header else None,
            dtype=str,
            skipinitialspace=True,
            encoding='utf-8',
        )
        label = cls._column_label(frame, schema.label_column)
        missing = frame.index[frame.isna().any(axis=1)].tolist()
        if missing:
            raise exceptions.DataError(
                6, f'{path}: missing values in rows {missing[:20]}')

        raw_labels = frame[label].str.strip()
        if schema.pair is not None:
            keep = raw_labels.isin([str(value) for value in schema.pair])
            frame, raw_labels = frame[keep], raw_labels[keep]
        features = frame.drop(columns=[label])

        numeric = features.apply(pd.to_numeric, errors='coerce')
        bad = numeric.isna() & features.notna()
        if bad.any().any():
            rows, cols = np.nonzero(bad.to_numpy())
            cells = [
                f'row {frame.index[r]} column {features.columns[c]}'
                for r, c in zip(rows[:20], cols[:20])
            ]
            raise exceptions.DataError(
                7, f'{path}: unparseable cells at {", ".join(cells)}')

        y = cls._encode_labels(raw_labels, schema.label_encoding)
        X = features.astype(float).to_numpy()
        names = [str(name) for name in features.columns]

        if schema.standardize:
            X, names = cls._standardized(X, names, schema.drop_constant)

        logger.info(f'loaded {X.shape[0]} samples with {X.shape[1]} '
                    f'features from {path}')
        return Dataset(X=X, y=y, feature_names=names)

    @classmethod
    def _standardized(cls, X: np.ndarray, names: list,
                      drop_constant: bool) -> tuple:
        deviation = X.std(axis=0)
        constant = deviation == 0
        if np.any(constant):
            if not drop_constant:
                columns = [names[i] for i in np.nonzero(constant)[0]]
                raise exceptions.DataError(
                    8, f'constant features cannot be standardized: '
                       f'{columns}')
            X = X[:, ~constant]
            names = [name for name, c in zip(names, constant) if not c]
            deviation = deviation[~constant]
        return (X - X.mean(axis=0)) / deviation, names

    @classmethod
    def standardize(cls, train: Dataset, test: Dataset = None) -> tuple:
        """Standardizes with statistics of `train`, applied to both sets.

        Features constant on `train` are left unscaled (only centered).

        Returns:
            tuple: (train, test) standardized; test is None if not given.
        """
        mean = train.X.mean(axis=0)
        deviation = train.X.std(axis=0)
        deviation = np.where(deviation > 0, deviation, 1.0)

        def apply(data):
            if data is None:
                return None
            return Dataset(
                X=(data.X - mean) / deviation,
                y=data.y,
                feature_names=data.feature_names
            )

        return apply(train), apply(test)

    @classmethod
    def split(cls, data: Dataset, spec: SplitSpec) -> tuple:
        """Seeded uniform shuffle followed by a train/test partition.

        Raises:
            exceptions.SplitError: one of the parts would be empty.

        Returns:
            tuple: (train, test) datasets.
        """
        if spec.train_count is not None:
            train_size = int(spec.train_count)
        else:
            train_size = int(round(spec.train_fraction * data.size))
        if not 0 < train_size < data.size:
            raise exceptions.SplitError(
                1, f'split of {data.size} samples gives {train_size} '
                   f'training samples; both parts must be nonempty')

        order = Utils.rng(spec.seed, SPLIT_STREAM).permutation(data.size)
        return data.subset(order[:train_size]), data.subset(
            order[train_size:])

    @classmethod
    def subsample(cls, data: Dataset, count: int, seed: int) -> Dataset:
        """Seeded sample of `count` rows without replacement."""
        if count >= data.size:
            return data
        order = Utils.rng(seed, SPLIT_STREAM).permutation(data.size)
        return data.subset(np.sort(order[:count]))

    @classmethod
    def perturb(cls, data: Dataset, budget: float, metric: MetricParams,
                seed: int, flip_probability: float = 0.3) -> tuple:
        """Moves each sample so the mean transport cost is at most budget.

        Every sample keeps its mass 1/N and is mapped to one new point, so
        the map is a coupling whose cost is the mean per-sample distance.
        A label is flipped when its random share of the budget covers
        kappa; the rest of the share shifts the features along a random
        direction of unit norm.

        Args:
            data (Dataset): empirical distribution.
            budget (float): Wasserstein radius to stay within.
            metric (MetricParams): transport metric.
            seed (int): seed of the perturbation stream.
            flip_probability (float, optional): chance of trying a flip.

        Returns:
            tuple: (perturbed Dataset, audited mean transport cost).
        """
        rng = Utils.rng(seed, PERTURB_STREAM)
        shares = rng.dirichlet(np.ones(data.size)) * budget * data.size
        X = data.X.copy()
        y = data.y.copy()

        for i in range(data.size):
            remaining = shares[i]
            if not math.isinf(metric.kappa) and \
               remaining >= metric.kappa and \
               rng.random() < flip_probability:
                y[i] = -y[i]
                remaining -= metric.kappa
            direction = rng.standard_normal(data.n)
            size = Norms.norm(direction, metric.norm)
            if size > 0 and remaining > 0:
                X[i] += direction * (remaining / size)

        costs = [
            Norms.transport_cost(a, b, c, d, metric)
            for a, b, c, d in zip(data.X, data.y, X, y)
        ]
        return Dataset(X=X, y=y), float(np.mean(costs))

    @classmethod
    def write_csv(cls, data: Dataset, output_path: str) -> str:
        """Writes features and a final `y` column of -1/+1 labels."""
        names = list(data.feature_names) or [
            f'x{i + 1}' for i in range(data.n)]
        frame = pd.DataFrame(data.X, columns=names)
        frame['y'] = data.y.astype(int)
        Utils.check_creation_folder(os.path.dirname(output_path) or '.')
        frame.to_csv(output_path, index=False, float_format=FLOAT_FORMAT)
        return output_path
