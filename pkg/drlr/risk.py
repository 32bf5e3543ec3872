#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Worst- and best-case misclassification risk over a Wasserstein ball.

Both bounds are linear programs in (lam, s, r, t). For a fixed lam the
per-sample variables have closed forms, which leaves a convex piecewise
linear function of lam

    g(lam) = lam * eps + (1/N) sum_i s_i(lam)

whose minimum is attained at lam = 0 or at one of its breakpoints. The
bounds are therefore computed exactly by evaluating g on that finite set.
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from . import exceptions
from .model import Dataset, LogisticModel, MetricParams
from .norms import Norms

logger = logging.getLogger(__name__)

DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class RiskBounds:
    """Confidence interval [risk_min, risk_max] for the true risk."""

    risk_min: float
    risk_max: float
    lambda_star_max: float
    lambda_star_min: float
    epsilon: float
    kappa: float

    def to_dict(self) -> dict:
        return {
            'epsilon': self.epsilon,
            'kappa': self.kappa,
            'risk_min': self.risk_min,
            'risk_max': self.risk_max,
            'lambda_star_max': self.lambda_star_max,
            'lambda_star_min': self.lambda_star_min,
        }


class RiskEstimator:
    """Risk certificates for the linear classifier sign(<beta, x>)."""

    @staticmethod
    def _check(beta, data: Dataset, epsilon: float) -> np.ndarray:
        if not math.isfinite(epsilon) or epsilon < 0:
            raise exceptions.ConfigError(
                1, f'epsilon must be finite and >= 0, got {epsilon}')
        beta = np.asarray(beta, dtype=float).reshape(-1)
        if not np.all(np.isfinite(beta)):
            raise exceptions.DataError(1, 'beta must be finite')
        return beta

    @staticmethod
    def slack_values(lams, scaled: np.ndarray, kappa: float,
                     best_case: bool = False) -> np.ndarray:
        """Per-sample optimal slacks s_i(lam) for each lam in `lams`.

        With m_i the margins divided by ||beta||_*, the worst case uses
        s_i = max(0, 1 - lam * max(m_i, 0), 1 - lam * kappa
        - lam * max(-m_i, 0)); the best case swaps the signs of m_i.

        Args:
            lams (array): multipliers, shape (K,).
            scaled (np.ndarray): margins / ||beta||_*, shape (N,).
            kappa (float): label-flip weight, may be inf.
            best_case (bool, optional): use the best-case reduction.

        Returns:
            np.ndarray: slacks, shape (K, N).
        """
        lams = np.asarray(lams, dtype=float).reshape(-1, 1)
        if best_case:
            scaled = -scaled
        keep = 1.0 - lams * np.maximum(scaled, 0.0)
        flip_shift = lams * np.maximum(-scaled, 0.0)
        if math.isinf(kappa):
            flip = np.where(lams > 0, -np.inf, 1.0 - flip_shift)
        else:
            flip = 1.0 - lams * kappa - flip_shift
        return np.maximum(0.0, np.maximum(keep, flip))

    @staticmethod
    def breakpoints(scaled: np.ndarray, kappa: float) -> np.ndarray:
        """Candidate minimizers of g: 0, every slope change and a tail point.

        Args:
            scaled (np.ndarray): margins / ||beta||_* (sign already set for
                the bound being computed).
            kappa (float): label-flip weight.

        Returns:
            np.ndarray: sorted, deduplicated candidates.
        """
        positive = scaled[scaled > 0]
        negative = -scaled[scaled < 0]
        candidates = [np.zeros(1), 1.0 / positive]
        if not math.isinf(kappa):
            candidates.append(np.array([1.0 / kappa]))
            candidates.append(1.0 / (kappa + negative))
        points = np.sort(np.concatenate(candidates))
        points = points[np.isfinite(points)]
        tail = 2.0 * points[-1] + 1.0
        points = np.append(points, tail)
        keep = np.concatenate(([True], np.diff(points) > DEDUP_TOL))
        return points[keep]

    @staticmethod
    def _minimize(beta: np.ndarray, data: Dataset, epsilon: float,
                  metric: MetricParams, best_case: bool) -> tuple:
        scale = Norms.dual_norm(beta, metric.norm)
        scaled = LogisticModel.margins(beta, data) / scale
        signed = -scaled if best_case else scaled
        lams = RiskEstimator.breakpoints(signed, metric.kappa)
        slacks = RiskEstimator.slack_values(
            lams, scaled, metric.kappa, best_case=best_case)
        values = lams * epsilon + np.mean(slacks, axis=1)
        best = int(np.argmin(values))
        return float(values[best]), float(lams[best])

    @staticmethod
    def reduced_objective(lam: float, beta, data: Dataset, epsilon: float,
                          metric: MetricParams,
                          best_case: bool = False) -> float:
        """Evaluates g(lam) of the chosen bound (beta must be nonzero)."""
        beta = np.asarray(beta, dtype=float).reshape(-1)
        scaled = LogisticModel.margins(beta, data) / Norms.dual_norm(
            beta, metric.norm)
        slacks = RiskEstimator.slack_values(
            [lam], scaled, metric.kappa, best_case=best_case)
        return float(lam * epsilon + np.mean(slacks))

    @staticmethod
    def worst_case_risk(beta, data: Dataset, epsilon: float,
                        metric: MetricParams) -> tuple:
        """Sup of P[y <beta, x> <= 0] over the Wasserstein ball.

        Args:
            beta (array): classifier weights.
            data (Dataset): samples the ball is centered at.
            epsilon (float): radius.
            metric (MetricParams): transport metric.

        Raises:
            exceptions.ConfigError: epsilon negative or not finite.

        Returns:
            tuple: (risk_max, minimizing lam).
        """
        beta = RiskEstimator._check(beta, data, epsilon)
        if Norms.dual_norm(beta, metric.norm) == 0:
            return 1.0, 0.0
        value, lam = RiskEstimator._minimize(
            beta, data, epsilon, metric, best_case=False)
        return min(max(value, 0.0), 1.0), lam

    @staticmethod
    def best_case_risk(beta, data: Dataset, epsilon: float,
                       metric: MetricParams) -> tuple:
        """Inf of P[y <beta, x> < 0] over the Wasserstein ball.

        Raises:
            exceptions.ConfigError: epsilon negative or not finite.

        Returns:
            tuple: (risk_min, minimizing lam).
        """
        beta = RiskEstimator._check(beta, data, epsilon)
        if Norms.dual_norm(beta, metric.norm) == 0:
            return 0.0, 0.0
        value, lam = RiskEstimator._minimize(
            beta, data, epsilon, metric, best_case=True)
        return min(max(1.0 - value, 0.0), 1.0), lam

    @staticmethod
    def risk_bounds(beta, data: Dataset, epsilon: float,
                    metric: MetricParams) -> RiskBounds:
        """Both bounds of the risk confidence interval."""
        risk_max, lam_max = RiskEstimator.worst_case_risk(
            beta, data, epsilon, metric)
        risk_min, lam_min = RiskEstimator.best_case_risk(
            beta, data, epsilon, metric)
        if risk_min > risk_max:
            logger.warning(
                f'risk_min {risk_min} exceeded risk_max {risk_max} '
                f'at epsilon={epsilon}; clipping')
            risk_min = risk_max
        return RiskBounds(
            risk_min=risk_min,
            risk_max=risk_max,
            lambda_star_max=lam_max,
            lambda_star_min=lam_min,
            epsilon=float(epsilon),
            kappa=metric.kappa,
        )

    @staticmethod
    def empirical_risk(beta, data: Dataset) -> float:
        """Fraction of samples with y <beta, x> <= 0."""
        return float(np.mean(LogisticModel.margins(beta, data) <= 0))
