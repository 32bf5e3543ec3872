#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Out-of-sample evaluation of trained models."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import exceptions
from .model import Dataset, LogisticModel

DEFAULT_ALPHAS = (0.05, 0.1, 0.25, 0.5, 1.0)


@dataclass(frozen=True, eq=False)
class EvalSummary:
    """Test-set summary of a model.

    Attributes:
        mean_logloss (float): average logloss.
        ccr (float): correct classification rate.
        cvar (dict): alpha -> CVaR of the logloss at level alpha.
        empirical_risk (float): fraction with y <beta, x> <= 0.
        logloss_samples (np.ndarray): per-sample losses, when retained.
    """

    mean_logloss: float
    ccr: float
    cvar: dict
    empirical_risk: float
    logloss_samples: np.ndarray = field(default=None)

    def to_dict(self) -> dict:
        return {
            'mean_logloss': self.mean_logloss,
            'ccr': self.ccr,
            'empirical_risk': self.empirical_risk,
            'cvar': {repr(alpha): value for alpha, value in self.cvar.items()},
        }


class Metrics:
    """Logloss, CCR and CVaR of a model on a test set."""

    @staticmethod
    def _beta(model) -> np.ndarray:
        return np.asarray(getattr(model, 'beta', model), dtype=float)

    @staticmethod
    def _check(test: Dataset) -> None:
        if test is None or test.size == 0:
            raise exceptions.DataError(3, 'test set is empty')

    @staticmethod
    def cvar(losses, alpha: float) -> float:
        """Average of the alpha fraction of largest losses.

        With k = alpha * M, the floor(k) largest values get weight 1 and the
        next order statistic gets the fractional weight k - floor(k), so the
        tail carries probability mass exactly alpha.

        Args:
            losses (array): loss realizations.
            alpha (float): tail probability in (0, 1].

        Raises:
            exceptions.ConfigError: alpha outside (0, 1].

        Returns:
            float: CVaR at level alpha.
        """
        if not 0 < alpha <= 1:
            raise exceptions.ConfigError(
                1, f'alpha must be in (0, 1], got {alpha}')
        ordered = np.sort(np.asarray(losses, dtype=float))[::-1]
        if alpha == 1:
            return float(np.mean(ordered))

        tail = alpha * ordered.size
        whole = min(int(math.floor(tail)), ordered.size)
        fraction = tail - whole
        total = float(np.sum(ordered[:whole]))
        if fraction > 0 and whole < ordered.size:
            total += fraction * ordered[whole]
        return total / tail

    @staticmethod
    def evaluate(model, test: Dataset, alphas=DEFAULT_ALPHAS,
                 keep_samples: bool = False) -> EvalSummary:
        """Evaluates a model (or a raw beta) on `test`.

        Raises:
            exceptions.DataError: empty test set.

        Returns:
            EvalSummary: metrics.
        """
        Metrics._check(test)
        beta = Metrics._beta(model)
        losses = LogisticModel.losses(beta, test)
        predictions = LogisticModel.predict(beta, test.X)
        return EvalSummary(
            mean_logloss=float(np.mean(losses)),
            ccr=float(np.mean(predictions == test.y)),
            cvar={
                float(alpha): Metrics.cvar(losses, float(alpha))
                for alpha in alphas
            },
            empirical_risk=float(
                np.mean(LogisticModel.margins(beta, test) <= 0)),
            logloss_samples=losses if keep_samples else None,
        )

    @staticmethod
    def loss_cdf(model, test: Dataset, grid=None, points: int = 200) -> list:
        """Empirical CDF of the test logloss at the given thresholds.

        Args:
            model: TrainedModel or beta.
            test (Dataset): test set.
            grid (array, optional): thresholds. Defaults to `points`
                equally spaced values from 0 to the largest loss.
            points (int, optional): default grid size.

        Returns:
            list: (threshold, fraction of losses <= threshold) pairs.
        """
        Metrics._check(test)
        losses = np.sort(LogisticModel.losses(Metrics._beta(model), test))
        if grid is None:
            grid = np.linspace(0.0, losses[-1], points)
        grid = np.asarray(grid, dtype=float)
        counts = np.searchsorted(losses, grid, side='right')
        return [
            (float(threshold), float(count) / losses.size)
            for threshold, count in zip(grid, counts)
        ]
