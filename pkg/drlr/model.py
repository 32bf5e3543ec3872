#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Domain types and the logistic model used across drlr.

Labels are always stored as -1/+1; datasets encoded as 0/1 are converted
when they are loaded (see `drlr.datasets`).
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import exceptions

LOG2 = math.log(2.0)


class NormKind(enum.Enum):
    """Norm used on the feature space of the transport metric."""

    L1 = 'l1'
    L2 = 'l2'
    LINF = 'linf'

    @property
    def dual(self) -> 'NormKind':
        """Returns the dual norm kind (l1 <-> linf, l2 <-> l2)."""
        return {
            NormKind.L1: NormKind.LINF,
            NormKind.L2: NormKind.L2,
            NormKind.LINF: NormKind.L1,
        }[self]

    @classmethod
    def parse(cls, value) -> 'NormKind':
        """Parses 'l1', 'l2', 'linf' (also 'inf', 'Linf') into a NormKind.

        Raises:
            exceptions.ConfigError: unknown norm name.
        """
        if isinstance(value, cls):
            return value
        name = str(value).strip().lower()
        if name == 'inf':
            name = 'linf'
        try:
            return cls(name)
        except ValueError:
            raise exceptions.ConfigError(
                1, f'unknown norm {value!r}, expected l1, l2 or linf')


def parse_kappa(value) -> float:
    """Parses a label-flip weight, accepting 'inf' for +infinity.

    Raises:
        exceptions.ConfigError: kappa is not a positive number.
    """
    try:
        kappa = float(value)
    except (TypeError, ValueError):
        raise exceptions.ConfigError(1, f'invalid kappa {value!r}')
    if math.isnan(kappa) or kappa <= 0:
        raise exceptions.ConfigError(1, f'kappa must be positive, got {value}')
    return kappa


@dataclass(frozen=True)
class MetricParams:
    """Feature-label transport metric d = ||x - x'|| + kappa * |y - y'| / 2.

    `kappa = math.inf` forbids moving mass across labels.
    """

    norm: NormKind = NormKind.L2
    kappa: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'norm', NormKind.parse(self.norm))
        object.__setattr__(self, 'kappa', parse_kappa(self.kappa))

    @property
    def infinite_kappa(self) -> bool:
        return math.isinf(self.kappa)

    def to_dict(self) -> dict:
        return {'norm': self.norm.value, 'kappa': self.kappa}

    @classmethod
    def from_dict(cls, data: dict) -> 'MetricParams':
        return cls(norm=data['norm'], kappa=data['kappa'])


@dataclass(frozen=True)
class LabeledSample:
    """A single feature vector with its -1/+1 label."""

    x: np.ndarray
    y: int

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        if not np.all(np.isfinite(x)):
            raise exceptions.DataError(1, 'sample features must be finite')
        if self.y not in (-1, 1):
            raise exceptions.DataError(
                2, f'labels must be -1 or +1, got {self.y}')
        x.setflags(write=False)
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'y', int(self.y))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Empirical distribution putting mass 1/N on each sample.

    Attributes:
        X (np.ndarray): N x n feature matrix (read only).
        y (np.ndarray): N labels in {-1, +1} (read only).
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = field(default=())

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.array(self.y, dtype=float).reshape(-1)

        if X.ndim != 2 or X.shape[0] < 1:
            raise exceptions.DataError(
                3, 'dataset needs at least one sample')
        if X.shape[0] != y.shape[0]:
            raise exceptions.DimensionError(
                1, f'{X.shape[0]} feature rows but {y.shape[0]} labels')
        if not np.all(np.isfinite(X)):
            raise exceptions.DataError(1, 'dataset features must be finite')
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise exceptions.DataError(2, 'labels must be -1 or +1')

        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'feature_names', tuple(self.feature_names))

    @classmethod
    def from_samples(cls, samples: list) -> 'Dataset':
        """Builds a dataset from a list of `LabeledSample`.

        Raises:
            exceptions.DimensionError: samples of different dimension.
        """
        if not samples:
            raise exceptions.DataError(
                3, 'dataset needs at least one sample')
        sizes = {sample.x.shape[0] for sample in samples}
        if len(sizes) != 1:
            raise exceptions.DimensionError(
                2, f'samples have mixed dimensions {sorted(sizes)}')
        return cls(
            X=np.vstack([sample.x for sample in samples]),
            y=np.array([sample.y for sample in samples], dtype=float)
        )

    @property
    def size(self) -> int:
        """Number of samples N."""
        return self.X.shape[0]

    @property
    def n(self) -> int:
        """Feature dimension n."""
        return self.X.shape[1]

    @property
    def samples(self) -> tuple:
        return tuple(
            LabeledSample(x=row, y=int(label))
            for row, label in zip(self.X, self.y)
        )

    def subset(self, index) -> 'Dataset':
        """Returns the dataset restricted to `index` (in that order)."""
        index = np.asarray(index, dtype=int)
        return Dataset(
            X=self.X[index], y=self.y[index],
            feature_names=self.feature_names
        )

    def __len__(self):
        return self.size


class LogisticModel:
    """Logloss, its gradient and the classifier of logistic regression."""

    @staticmethod
    def _check_dimensions(beta: np.ndarray, x: np.ndarray) -> None:
        if beta.shape[-1] != x.shape[-1]:
            raise exceptions.DimensionError(
                3, f'beta has dimension {beta.shape[-1]} '
                   f'but x has dimension {x.shape[-1]}')

    @staticmethod
    def softplus(u):
        """Overflow free log(1 + exp(u)).

        Args:
            u (float or np.ndarray): argument.

        Returns:
            float or np.ndarray: softplus values.
        """
        return np.logaddexp(0.0, u)

    @staticmethod
    def logloss(beta, x, y) -> float:
        """Logloss log(1 + exp(-y <beta, x>)) of a single sample.

        Args:
            beta (array): weight vector.
            x (array): feature vector.
            y (int): label in {-1, +1}.

        Raises:
            exceptions.DimensionError: beta and x differ in dimension.

        Returns:
            float: nonnegative logloss.
        """
        beta = np.asarray(beta, dtype=float).reshape(-1)
        x = np.asarray(x, dtype=float).reshape(-1)
        LogisticModel._check_dimensions(beta, x)
        return float(LogisticModel.softplus(-y * np.dot(beta, x)))

    @staticmethod
    def logloss_gradient(beta, x, y) -> np.ndarray:
        """Gradient of `logloss` with respect to beta.

        Equals -y * sigmoid(-y <beta, x>) * x.

        Raises:
            exceptions.DimensionError: beta and x differ in dimension.

        Returns:
            np.ndarray: gradient vector.
        """
        beta = np.asarray(beta, dtype=float).reshape(-1)
        x = np.asarray(x, dtype=float).reshape(-1)
        LogisticModel._check_dimensions(beta, x)
        return -y * expit(-y * np.dot(beta, x)) * x

    @staticmethod
    def margins(beta, data: Dataset) -> np.ndarray:
        """Signed margins y_i <beta, x_i> of every sample.

        Raises:
            exceptions.DimensionError: beta does not match the dataset.
        """
        beta = np.asarray(beta, dtype=float).reshape(-1)
        LogisticModel._check_dimensions(beta, data.X)
        return data.y * (data.X @ beta)

    @staticmethod
    def losses(beta, data: Dataset) -> np.ndarray:
        """Per-sample logloss vector on `data`."""
        return LogisticModel.softplus(-LogisticModel.margins(beta, data))

    @staticmethod
    def mean_loss_gradient(beta, data: Dataset) -> np.ndarray:
        """Gradient of the empirical average logloss."""
        margins = LogisticModel.margins(beta, data)
        weights = -data.y * expit(-margins)
        return data.X.T @ weights / data.size

    @staticmethod
    def classify(beta, x) -> int:
        """Predicts +1 when <beta, x> > 0 and -1 otherwise.

        Ties <beta, x> = 0 are labeled -1, so a +1 sample on the boundary
        counts as misclassified, matching the indicator 1{y<beta,x> <= 0}.

        Raises:
            exceptions.DimensionError: beta and x differ in dimension.

        Returns:
            int: predicted label.
        """
        beta = np.asarray(beta, dtype=float).reshape(-1)
        x = np.asarray(x, dtype=float).reshape(-1)
        LogisticModel._check_dimensions(beta, x)
        return 1 if np.dot(beta, x) > 0 else -1

    @staticmethod
    def predict(beta, X) -> np.ndarray:
        """Vectorized `classify` over the rows of X."""
        beta = np.asarray(beta, dtype=float).reshape(-1)
        X = np.asarray(X, dtype=float)
        LogisticModel._check_dimensions(beta, X)
        return np.where(X @ beta > 0, 1.0, -1.0)
