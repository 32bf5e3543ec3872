#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Distributionally robust logistic regression solver.

Minimizes the worst-case expected logloss over a Wasserstein ball around the
empirical distribution through its convex reformulation

    min  lam * eps + (1/N) sum_i s_i
    s.t. logloss(beta, x_i, y_i) <= s_i
         logloss(beta, x_i, -y_i) - lam * kappa <= s_i
         ||beta||_* <= lam

The slacks are eliminated, which leaves

    F(beta, lam) = lam * eps + mean(logloss_i + max(0, u_i - lam * kappa))

with margins u_i = y_i <beta, x_i>, minimized over the dual-norm cone.
"""

import math
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from . import exceptions
from .model import Dataset, LogisticModel, MetricParams
from .norms import Norms

logger = logging.getLogger(__name__)

METHODS = ('smoothed', 'subgradient')
STEP_RULES = ('fixed', 'backtracking')


@dataclass(frozen=True)
class TrainConfig:
    """Training configuration.

    Attributes:
        epsilon (float): Wasserstein radius, >= 0.
        metric (MetricParams): feature norm and label-flip weight kappa.
        max_iters (int): iteration budget shared by all solver stages.
        obj_tol (float): relative objective change that stops a stage.
        feas_tol (float): tolerance of the returned feasibility checks.
        step_rule (str): 'backtracking' or 'fixed' (Lipschitz bound).
        method (str): 'smoothed' or 'subgradient'.
        patience (int): window, in iterations, of the stopping rule.
        tau_start (float): first smoothing temperature.
        tau_min (float): last smoothing temperature.
        subgradient_step (float): initial step of the subgradient method.
        beta_cap (float): largest allowed ||beta||_2 (separable data guard).
    """

    epsilon: float = 0.0
    metric: MetricParams = field(default_factory=MetricParams)
    max_iters: int = 50000
    obj_tol: float = 1e-8
    feas_tol: float = 1e-8
    step_rule: str = 'backtracking'
    method: str = 'smoothed'
    patience: int = 50
    tau_start: float = 1e-1
    tau_min: float = 1e-6
    subgradient_step: float = 0.5
    beta_cap: float = 1e6

    def __post_init__(self):
        if isinstance(self.metric, dict):
            object.__setattr__(
                self, 'metric', MetricParams.from_dict(self.metric))
        epsilon = float(self.epsilon)
        if math.isnan(epsilon) or epsilon < 0 or math.isinf(epsilon):
            raise exceptions.ConfigError(
                1, f'epsilon must be finite and >= 0, got {self.epsilon}')
        object.__setattr__(self, 'epsilon', epsilon)

        if int(self.max_iters) < 1 or int(self.patience) < 1:
            raise exceptions.ConfigError(
                1, 'max_iters and patience must be positive')
        if self.obj_tol <= 0 or self.feas_tol <= 0:
            raise exceptions.ConfigError(
                1, 'obj_tol and feas_tol must be positive')
        if not 0 < self.tau_min <= self.tau_start:
            raise exceptions.ConfigError(
                1, 'expected 0 < tau_min <= tau_start')
        if self.step_rule not in STEP_RULES:
            raise exceptions.ConfigError(
                1, f'step_rule must be one of {STEP_RULES}')
        if self.method not in METHODS:
            raise exceptions.ConfigError(
                1, f'method must be one of {METHODS}')

    @property
    def mode(self) -> str:
        """'classical' at epsilon = 0, 'regularized' at kappa = inf."""
        if self.epsilon == 0:
            return 'classical'
        if self.metric.infinite_kappa:
            return 'regularized'
        return 'robust'

    def to_dict(self) -> dict:
        return {
            'epsilon': self.epsilon,
            'metric': self.metric.to_dict(),
            'max_iters': self.max_iters,
            'obj_tol': self.obj_tol,
            'feas_tol': self.feas_tol,
            'step_rule': self.step_rule,
            'method': self.method,
            'patience': self.patience,
            'tau_start': self.tau_start,
            'tau_min': self.tau_min,
            'subgradient_step': self.subgradient_step,
            'beta_cap': self.beta_cap,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'TrainConfig':
        values = dict(data)
        values['metric'] = MetricParams.from_dict(values['metric'])
        return cls(**values)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Solution of the reformulated program.

    Attributes:
        beta (np.ndarray): weight vector.
        lam (float): dual multiplier of the Wasserstein constraint.
        slacks (np.ndarray): per-sample slack values.
        j_hat (float): worst-case expected logloss.
        config (TrainConfig): configuration used for the fit.
        converged (bool): stopping rule met before the budget ran out.
        iterations (int): iterations used.
        guard_triggered (bool): ||beta|| hit `config.beta_cap`.
    """

    beta: np.ndarray
    lam: float
    slacks: np.ndarray
    j_hat: float
    config: TrainConfig
    converged: bool = True
    iterations: int = 0
    guard_triggered: bool = False

    @property
    def mode(self) -> str:
        return self.config.mode

    def to_dict(self) -> dict:
        return {
            'mode': self.mode,
            'beta': self.beta.tolist(),
            'lambda': self.lam,
            'slacks': self.slacks.tolist(),
            'j_hat': self.j_hat,
            'converged': self.converged,
            'iterations': self.iterations,
            'guard_triggered': self.guard_triggered,
            'config': self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'TrainedModel':
        return cls(
            beta=np.asarray(data['beta'], dtype=float),
            lam=float(data['lambda']),
            slacks=np.asarray(data['slacks'], dtype=float),
            j_hat=float(data['j_hat']),
            config=TrainConfig.from_dict(data['config']),
            converged=bool(data['converged']),
            iterations=int(data['iterations']),
            guard_triggered=bool(data['guard_triggered']),
        )


@dataclass(frozen=True)
class LossDecomposition:
    """Worst-case loss split into regularization, fit and label terms."""

    reg_term: float
    empirical_logloss: float
    label_uncertainty_term: float

    @property
    def total(self) -> float:
        return (
            self.reg_term + self.empirical_logloss +
            self.label_uncertainty_term
        )

    def to_dict(self) -> dict:
        return {
            'reg_term': self.reg_term,
            'empirical_logloss': self.empirical_logloss,
            'label_uncertainty_term': self.label_uncertainty_term,
        }


class DRLRSolver:
    """Trains classical, regularized and distributionally robust models."""

    @staticmethod
    def _hinge(margins: np.ndarray, lam: float, kappa: float) -> np.ndarray:
        """Label uncertainty terms max(0, u_i - lam * kappa)."""
        if math.isinf(kappa):
            return np.zeros_like(margins)
        return np.maximum(0.0, margins - lam * kappa)

    @staticmethod
    def objective(beta, lam: float, data: Dataset, config: TrainConfig):
        """Exact eliminated objective F(beta, lam).

        Args:
            beta (array): weight vector.
            lam (float): multiplier, assumed to satisfy ||beta||_* <= lam.
            data (Dataset): training set.
            config (TrainConfig): radius and metric.

        Returns:
            float: F(beta, lam).
        """
        margins = LogisticModel.margins(beta, data)
        slacks = LogisticModel.softplus(-margins) + DRLRSolver._hinge(
            margins, lam, config.metric.kappa)
        return lam * config.epsilon + float(np.mean(slacks))

    @staticmethod
    def _window_converged(history: list, patience: int, tol: float) -> bool:
        if len(history) <= patience:
            return False
        previous, current = history[-1 - patience], history[-1]
        return abs(previous - current) <= tol * max(1.0, abs(current))

    @staticmethod
    def _cap(beta: np.ndarray, cap: float) -> tuple:
        size = float(np.linalg.norm(beta))
        if size <= cap:
            return beta, False
        return beta * (cap / size), True

    @staticmethod
    def _accelerated(smooth, prox, nonsmooth, z0, lipschitz, config,
                     budget, tol, n_beta):
        """Accelerated proximal gradient with adaptive restart.

        Args:
            smooth (callable): z -> (value, gradient) of the smooth part.
            prox (callable): (point, step) -> proximal / projected point.
            nonsmooth (callable): z -> value of the nonsmooth part.
            z0 (np.ndarray): feasible start.
            lipschitz (float): Lipschitz bound of the smooth gradient.
            config (TrainConfig): step rule, patience and beta cap.
            budget (int): iteration budget.
            tol (float): relative objective change of the stopping rule.
            n_beta (int): the first `n_beta` entries of z are beta.

        Returns:
            tuple: (z, iterations, converged, guard_triggered).
        """
        fixed = config.step_rule == 'fixed'
        z = z0.copy()
        point = z.copy()
        momentum = 1.0
        step_size = lipschitz
        value_point, grad_point = smooth(point)
        history = [value_point + nonsmooth(z)]

        for iteration in range(1, budget + 1):
            while True:
                z_new = prox(point - grad_point / step_size, 1.0 / step_size)
                diff = z_new - point
                value_new, grad_new = smooth(z_new)
                bound = (
                    value_point + grad_point @ diff +
                    0.5 * step_size * diff @ diff +
                    1e-12 * max(1.0, abs(value_point))
                )
                if fixed or value_new <= bound or step_size > 1e20:
                    break
                step_size *= 2.0

            z_new[:n_beta], guard = DRLRSolver._cap(
                z_new[:n_beta], config.beta_cap)
            if guard:
                logger.warning(
                    f'||beta|| reached the cap {config.beta_cap}; '
                    f'data is likely separable')
                return z_new, iteration, False, True

            total = value_new + nonsmooth(z_new)
            if total > history[-1]:
                momentum = 1.0
                point, value_point, grad_point = z_new, value_new, grad_new
            else:
                next_momentum = 0.5 * (1.0 + math.sqrt(
                    1.0 + 4.0 * momentum ** 2))
                point = z_new + ((momentum - 1.0) / next_momentum) * (
                    z_new - z)
                momentum = next_momentum
                value_point, grad_point = smooth(point)

            z = z_new
            history.append(total)
            if DRLRSolver._window_converged(history, config.patience, tol):
                return z, iteration, True, False
            if not fixed:
                step_size = max(0.9 * step_size, 1e-12)

        return z, budget, False, False

    @staticmethod
    def _spectral_bound(data: Dataset) -> float:
        return max(
            float(np.linalg.norm(data.X, 2)) ** 2 / (4.0 * data.size), 1e-12)

    @staticmethod
    def _fit_classical(data: Dataset, config: TrainConfig, start) -> tuple:
        """Average logloss minimization (epsilon = 0)."""
        def smooth(beta):
            return (
                float(np.mean(LogisticModel.losses(beta, data))),
                LogisticModel.mean_loss_gradient(beta, data)
            )

        beta0 = np.zeros(data.n) if start is None else start[0].copy()
        beta, iterations, converged, guard = DRLRSolver._accelerated(
            smooth=smooth,
            prox=lambda point, step: point,
            nonsmooth=lambda beta: 0.0,
            z0=beta0,
            lipschitz=DRLRSolver._spectral_bound(data),
            config=config,
            budget=config.max_iters,
            tol=config.obj_tol,
            n_beta=data.n,
        )

        lam = Norms.dual_norm(beta, config.metric.norm)
        if not config.metric.infinite_kappa:
            margins = LogisticModel.margins(beta, data)
            lam = max(lam, float(np.max(margins)) / config.metric.kappa)
        return beta, lam, iterations, converged, guard

    @staticmethod
    def _fit_regularized(data: Dataset, config: TrainConfig, start) -> tuple:
        """Composite logloss + epsilon * ||beta||_* (kappa = inf).

        lam is eliminated as ||beta||_*, which is optimal once the label
        flip constraints are void.
        """
        norm = config.metric.norm

        def smooth(beta):
            return (
                float(np.mean(LogisticModel.losses(beta, data))),
                LogisticModel.mean_loss_gradient(beta, data)
            )

        beta0 = np.zeros(data.n) if start is None else start[0].copy()
        beta, iterations, converged, guard = DRLRSolver._accelerated(
            smooth=smooth,
            prox=lambda point, step: Norms.prox_dual_norm(
                point, step * config.epsilon, norm),
            nonsmooth=lambda beta: config.epsilon * Norms.dual_norm(
                beta, norm),
            z0=beta0,
            lipschitz=DRLRSolver._spectral_bound(data),
            config=config,
            budget=config.max_iters,
            tol=config.obj_tol,
            n_beta=data.n,
        )
        return (
            beta, Norms.dual_norm(beta, norm), iterations, converged, guard
        )

    @staticmethod
    def _temperatures(config: TrainConfig) -> list:
        temperatures = [config.tau_start]
        while temperatures[-1] > config.tau_min * (1.0 + 1e-9):
            temperatures.append(max(temperatures[-1] / 10.0, config.tau_min))
        return temperatures

    @staticmethod
    def _fit_smoothed(data: Dataset, config: TrainConfig, start) -> tuple:
        """Projected accelerated gradient on a smoothed hinge.

        max(0, z) is replaced by tau * softplus(z / tau) and tau decreases
        geometrically; every stage starts from the previous solution.
        """
        n = data.n
        epsilon = config.epsilon
        kappa = config.metric.kappa
        norm = config.metric.norm
        X, y = data.X, data.y
        row_norms = float(np.sum(X * X)) / data.size

        def projection(point, step):
            beta, lam = Norms.project_epigraph(point[:n], point[n], norm)
            return np.append(beta, lam)

        if start is None:
            z = np.zeros(n + 1)
        else:
            z = projection(np.append(start[0], start[1]), 0.0)

        used, converged, guard = 0, False, False
        temperatures = DRLRSolver._temperatures(config)
        for stage, tau in enumerate(temperatures):
            def smooth(point, tau=tau):
                margins = y * (X @ point[:n])
                shifted = (margins - point[n] * kappa) / tau
                value = (
                    point[n] * epsilon +
                    np.mean(LogisticModel.softplus(-margins)) +
                    tau * np.mean(LogisticModel.softplus(shifted))
                )
                weights = expit(shifted)
                grad_beta = X.T @ (y * (weights - expit(-margins))) / (
                    data.size)
                grad_lam = epsilon - kappa * np.mean(weights)
                return float(value), np.append(grad_beta, grad_lam)

            last = stage == len(temperatures) - 1
            lipschitz = 0.25 * (row_norms + (row_norms + kappa ** 2) / tau)
            z, iterations, converged, guard = DRLRSolver._accelerated(
                smooth=smooth,
                prox=projection,
                nonsmooth=lambda point: 0.0,
                z0=z,
                lipschitz=lipschitz,
                config=config,
                budget=config.max_iters - used,
                tol=config.obj_tol if last else max(config.obj_tol, 1e-6),
                n_beta=n,
            )
            used += iterations
            logger.debug(
                f'smoothing stage tau={tau:g} finished after {iterations} '
                f'iterations (converged={converged})')
            if guard or used >= config.max_iters:
                converged = converged and last
                break

        return z[:n], float(z[n]), used, converged, guard

    @staticmethod
    def _fit_subgradient(data: Dataset, config: TrainConfig, start) -> tuple:
        """Projected subgradient with diminishing steps on F.

        Ties u_i = lam * kappa take the midpoint subgradient 1/2.
        """
        n = data.n
        epsilon = config.epsilon
        kappa = config.metric.kappa
        norm = config.metric.norm
        X, y = data.X, data.y

        if start is None:
            beta, lam = np.zeros(n), 0.0
        else:
            beta, lam = Norms.project_epigraph(start[0], start[1], norm)

        best_beta, best_lam = beta, lam
        best = DRLRSolver.objective(beta, lam, data, config)
        history = [best]
        converged, guard, iterations = False, False, config.max_iters

        for iteration in range(1, config.max_iters + 1):
            margins = y * (X @ beta)
            if math.isinf(kappa):
                active = np.zeros_like(margins)
                grad_lam = epsilon
            else:
                shifted = margins - lam * kappa
                active = np.where(
                    shifted > 0, 1.0, np.where(shifted < 0, 0.0, 0.5))
                grad_lam = epsilon - kappa * np.mean(active)
            grad_beta = X.T @ (y * (active - expit(-margins))) / data.size

            size = math.sqrt(float(grad_beta @ grad_beta) + grad_lam ** 2)
            if size == 0.0:
                converged, iterations = True, iteration
                break
            step = config.subgradient_step / (
                math.sqrt(iteration) * max(1.0, size))
            beta, lam = Norms.project_epigraph(
                beta - step * grad_beta, lam - step * grad_lam, norm)
            beta, guard = DRLRSolver._cap(beta, config.beta_cap)
            if guard:
                logger.warning(
                    f'||beta|| reached the cap {config.beta_cap}; '
                    f'data is likely separable')
                iterations = iteration
                break

            value = DRLRSolver.objective(beta, lam, data, config)
            if value < best:
                best, best_beta, best_lam = value, beta, lam
            history.append(best)
            if DRLRSolver._window_converged(
                    history, config.patience, config.obj_tol):
                converged, iterations = True, iteration
                break

        return best_beta, best_lam, iterations, converged, guard

    @staticmethod
    def _check_finite(data: Dataset) -> None:
        if not (np.all(np.isfinite(data.X)) and np.all(np.isfinite(data.y))):
            raise exceptions.DataError(1, 'training data must be finite')

    @staticmethod
    def _solve(data: Dataset, config: TrainConfig, start=None):
        DRLRSolver._check_finite(data)

        if config.method == 'subgradient':
            solution = DRLRSolver._fit_subgradient(data, config, start)
        elif config.epsilon == 0:
            solution = DRLRSolver._fit_classical(data, config, start)
        elif config.metric.infinite_kappa:
            solution = DRLRSolver._fit_regularized(data, config, start)
        else:
            solution = DRLRSolver._fit_smoothed(data, config, start)

        beta, lam, iterations, converged, guard = solution
        lam = max(float(lam), Norms.dual_norm(beta, config.metric.norm))
        margins = LogisticModel.margins(beta, data)
        slacks = LogisticModel.softplus(-margins) + DRLRSolver._hinge(
            margins, lam, config.metric.kappa)
        j_hat = lam * config.epsilon + float(np.mean(slacks))

        if not converged:
            logger.warning(
                f'{config.mode} fit at epsilon={config.epsilon} did not '
                f'converge within {config.max_iters} iterations')

        return TrainedModel(
            beta=beta.copy(),
            lam=lam,
            slacks=slacks,
            j_hat=j_hat,
            config=config,
            converged=converged,
            iterations=iterations,
            guard_triggered=guard,
        )

    @staticmethod
    def train_drlr(data: Dataset, config: TrainConfig) -> TrainedModel:
        """Fits a distributionally robust logistic regression model.

        At epsilon = 0 the average logloss is minimized directly; at
        kappa = inf the problem is solved as regularized logistic regression
        with penalty epsilon * ||beta||_*. Otherwise the eliminated program
        is solved over the dual-norm cone with `config.method`.

        Args:
            data (Dataset): training set.
            config (TrainConfig): radius, metric and solver settings.

        Raises:
            exceptions.DataError: data contains non-finite values.

        Returns:
            TrainedModel: solution; check `converged` before trusting it.
        """
        return DRLRSolver._solve(data, config)

    @staticmethod
    def train_classical(data: Dataset, config: TrainConfig = None):
        """Classical logistic regression (epsilon = 0)."""
        config = config or TrainConfig()
        return DRLRSolver._solve(data, replace(config, epsilon=0.0))

    @staticmethod
    def train_regularized(data: Dataset, epsilon: float, norm,
                          config: TrainConfig = None) -> TrainedModel:
        """Regularized logistic regression (kappa = inf).

        Args:
            data (Dataset): training set.
            epsilon (float): penalty weight on ||beta||_*.
            norm (NormKind): feature norm; the penalty uses its dual.
            config (TrainConfig, optional): solver settings.

        Returns:
            TrainedModel: solution.
        """
        config = config or TrainConfig()
        return DRLRSolver._solve(data, replace(
            config,
            epsilon=epsilon,
            metric=MetricParams(norm=norm, kappa=math.inf)
        ))

    @staticmethod
    def fit_path(data: Dataset, config: TrainConfig, epsilons) -> list:
        """Fits one model per radius, warm starting from the previous one.

        Args:
            data (Dataset): training set.
            config (TrainConfig): settings; its epsilon is ignored.
            epsilons (list): radii, solved in the given order.

        Returns:
            list: TrainedModel per radius.
        """
        models, start = [], None
        for epsilon in epsilons:
            model = DRLRSolver._solve(
                data, replace(config, epsilon=float(epsilon)), start)
            models.append(model)
            if not model.guard_triggered:
                start = (model.beta, model.lam)
        return models

    @staticmethod
    def worst_case_loss_decomposition(model: TrainedModel,
                                      data: Dataset) -> LossDecomposition:
        """Splits j_hat into lam * eps, training logloss and label term.

        Raises:
            exceptions.DimensionError: model and data dimensions differ.

        Returns:
            LossDecomposition: the three terms.
        """
        if model.beta.shape[0] != data.n:
            raise exceptions.DimensionError(
                4, f'model has dimension {model.beta.shape[0]} '
                   f'but data has dimension {data.n}')
        margins = LogisticModel.margins(model.beta, data)
        label_terms = DRLRSolver._hinge(
            margins, model.lam, model.config.metric.kappa)
        return LossDecomposition(
            reg_term=model.lam * model.config.epsilon,
            empirical_logloss=float(np.mean(
                LogisticModel.softplus(-margins))),
            label_uncertainty_term=float(np.mean(label_terms)),
        )
