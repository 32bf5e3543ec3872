#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Choice of the Wasserstein radius.

Two routes are offered: the a priori radius of the light-tailed finite
sample guarantee, whose constants the caller must supply, and an empirical
calibration that measures how often the certified loss covers the
out-of-sample loss on synthetic data.
"""

import math
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import isotonic_regression

from . import exceptions
from .datasets import Datasets, SyntheticSpec
from .metrics import Metrics
from .solver import DRLRSolver, TrainConfig
from .utils import Utils

logger = logging.getLogger(__name__)

TEST_STREAM = 7
DEFAULT_TEST_SIZE = 10000


@dataclass(frozen=True)
class RadiusFormulaParams:
    """Constants of the a priori radius.

    Attributes:
        a (float): light-tail exponent, > 1.
        c1, c2, c3 (float): positive constants of the concentration bound.
        n (int): feature dimension.
        eta (float): allowed failure probability in (0, 1].
    """

    a: float
    c1: float
    c2: float
    c3: float
    n: int
    eta: float

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise exceptions.ConfigError(
                1, f'eta must be in (0, 1], got {self.eta}')
        if self.a <= 1:
            raise exceptions.ConfigError(1, f'a must exceed 1, got {self.a}')
        if min(self.c1, self.c2, self.c3) <= 0:
            raise exceptions.ConfigError(1, 'c1, c2, c3 must be positive')
        if int(self.n) < 1:
            raise exceptions.ConfigError(1, 'n must be positive')


@dataclass(frozen=True)
class CalibrationReport:
    """Coverage of the certified loss across a radius grid.

    Attributes:
        grid (list): rows with epsilon, coverage, mean_ccr, mean_logloss.
        chosen_epsilon (float): smallest radius reaching the target, or
            None when no grid point does.
        target_confidence (float): 1 - eta_target.
        smoothed_coverage (list): isotonic fit of the coverage curve.
        noise_bound (float): largest tolerated coverage decrease.
        monotone (bool): no raw decrease exceeded its noise bound.
        diagnostic (str): explanation when something went wrong.
    """

    grid: list
    chosen_epsilon: float
    target_confidence: float
    runs: int
    sample_size: int
    seed: int
    smoothed_coverage: list = field(default_factory=list)
    noise_bound: float = 0.0
    monotone: bool = True
    diagnostic: str = ''

    def to_dict(self) -> dict:
        return {
            'chosen_epsilon': self.chosen_epsilon,
            'target_confidence': self.target_confidence,
            'runs': self.runs,
            'sample_size': self.sample_size,
            'seed': self.seed,
            'noise_bound': self.noise_bound,
            'monotone': self.monotone,
            'diagnostic': self.diagnostic,
            'smoothed_coverage': list(self.smoothed_coverage),
            'grid': list(self.grid),
        }

    def write(self, json_path: str, csv_path: str, provenance: dict = None):
        """Writes the report as JSON (with provenance) and CSV."""
        data = self.to_dict()
        if provenance is not None:
            data['provenance'] = provenance
        Utils.write_json(data, json_path)
        Utils.write_csv(
            self.grid, csv_path,
            columns=['epsilon', 'coverage', 'mean_ccr', 'mean_logloss']
        )


def coverage_trial(task: dict) -> list:
    """Runs one simulation trial over the whole radius grid.

    Kept at module level so process pools can pickle it.

    Args:
        task (dict): generator, trial, sample_size, test_size, grid,
            config and alphas.

    Returns:
        list: one row per radius.
    """
    generator = task['generator']
    train = Datasets.generate(generator, task['sample_size'])
    test = Datasets.generate(generator, task['test_size'], TEST_STREAM)
    models = DRLRSolver.fit_path(train, task['config'], task['grid'])

    rows = []
    for epsilon, model in zip(task['grid'], models):
        summary = Metrics.evaluate(model, test, alphas=task['alphas'])
        row = {
            'trial': task['trial'],
            'seed': generator.seed,
            'epsilon': float(epsilon),
            'j_hat': model.j_hat,
            'test_logloss': summary.mean_logloss,
            'ccr': summary.ccr,
            'covered': bool(summary.mean_logloss <= model.j_hat),
            'beta_norm': float(np.linalg.norm(model.beta)),
            'converged': model.converged,
        }
        for alpha, value in summary.cvar.items():
            row[f'cvar_{alpha:g}'] = value
        rows.append(row)
    return rows


class Calibration:
    """Radius selection by formula or by simulated coverage."""

    @staticmethod
    def radius_formula(sample_size: int, params: RadiusFormulaParams):
        """A priori radius guaranteeing coverage with probability 1 - eta.

        Uses exponent 1/a when N < log(c1/eta) / (c2 c3) and 1/n otherwise
        (N equal to the threshold takes the large-N branch).

        Args:
            sample_size (int): number of training samples N >= 1.
            params (RadiusFormulaParams): constants.

        Raises:
            exceptions.ConfigError: N < 1.
            exceptions.CalibrationError: c1 <= eta (no positive radius).

        Returns:
            float: radius epsilon_N(eta).
        """
        if int(sample_size) < 1:
            raise exceptions.ConfigError(1, 'N must be positive')
        level = math.log(params.c1 / params.eta)
        if level <= 0:
            raise exceptions.CalibrationError(
                1, 'c1 must exceed eta for a positive radius')
        threshold = level / (params.c2 * params.c3)
        base = level / (params.c2 * sample_size)
        exponent = 1.0 / params.a if sample_size < threshold \
            else 1.0 / params.n
        return base ** exponent

    @staticmethod
    def run_trials(generator: SyntheticSpec, sample_size: int,
                   epsilon_grid, runs: int, seed: int,
                   config: TrainConfig = None,
                   test_size: int = DEFAULT_TEST_SIZE,
                   alphas=(0.05, 1.0), workers: int = 1) -> list:
        """Simulation trials shared by calibration and the experiments.

        Trial k uses a generator seeded with `Utils.trial_seed(seed, k)`,
        so the rows do not depend on the worker schedule.

        Returns:
            list: per (trial, radius) rows, ordered by trial then radius.
        """
        config = config or TrainConfig()
        tasks = [
            {
                'generator': replace(
                    generator, seed=Utils.trial_seed(seed, trial)),
                'trial': trial,
                'sample_size': int(sample_size),
                'test_size': int(test_size),
                'grid': [float(epsilon) for epsilon in epsilon_grid],
                'config': config,
                'alphas': tuple(alphas),
            }
            for trial in range(int(runs))
        ]
        results = Utils.map(coverage_trial, tasks, workers)
        return [row for rows in results for row in rows]

    @staticmethod
    def summarize(rows: list, epsilon_grid, runs: int, eta_target: float,
                  sample_size: int, seed: int) -> CalibrationReport:
        """Aggregates trial rows into a CalibrationReport."""
        grid = []
        for epsilon in epsilon_grid:
            selected = [row for row in rows if row['epsilon'] == epsilon]
            grid.append({
                'epsilon': float(epsilon),
                'coverage': float(np.mean(
                    [row['covered'] for row in selected])),
                'mean_ccr': float(np.mean([row['ccr'] for row in selected])),
                'mean_logloss': float(np.mean(
                    [row['test_logloss'] for row in selected])),
            })

        coverage = np.array([row['coverage'] for row in grid])
        smoothed = isotonic_regression(coverage, increasing=True).x

        noise_bound, violations = 0.0, []
        for k in range(len(coverage) - 1):
            p = 0.5 * (coverage[k] + coverage[k + 1])
            bound = 3.0 * math.sqrt(p * (1.0 - p) / runs)
            noise_bound = max(noise_bound, bound)
            if coverage[k] - coverage[k + 1] > bound:
                violations.append(grid[k + 1]['epsilon'])

        target = 1.0 - eta_target
        reached = [row['epsilon'] for row in grid
                   if row['coverage'] >= target]
        chosen = reached[0] if reached else None

        diagnostics = []
        if chosen is None:
            diagnostics.append(
                f'no radius reached coverage {target:.3f}; largest coverage '
                f'was {coverage.max():.3f} at epsilon='
                f'{grid[int(np.argmax(coverage))]["epsilon"]:g}')
        if violations:
            diagnostics.append(
                f'coverage decreased beyond Monte-Carlo noise at epsilon '
                f'{violations}')
        for message in diagnostics:
            logger.warning(message)

        return CalibrationReport(
            grid=grid,
            chosen_epsilon=chosen,
            target_confidence=target,
            runs=int(runs),
            sample_size=int(sample_size),
            seed=int(seed),
            smoothed_coverage=smoothed.tolist(),
            noise_bound=noise_bound,
            monotone=not violations,
            diagnostic='; '.join(diagnostics),
        )

    @staticmethod
    def calibrate_by_coverage(generator: SyntheticSpec, sample_size: int,
                              eta_target: float, epsilon_grid, runs: int,
                              seed: int, config: TrainConfig = None,
                              test_size: int = DEFAULT_TEST_SIZE,
                              workers: int = 1) -> CalibrationReport:
        """Smallest grid radius whose certified loss covers the test loss.

        For every trial a fresh training set of size N and a test set are
        drawn; the model is fitted along the grid and the trial counts as
        covered at a radius when the test average logloss is <= j_hat.

        Args:
            generator (SyntheticSpec): data model.
            sample_size (int): training samples per trial.
            eta_target (float): allowed failure rate; the target coverage
                is 1 - eta_target.
            epsilon_grid (list): sorted, nonempty radii.
            runs (int): number of trials.
            seed (int): master seed.
            config (TrainConfig, optional): metric and solver settings.
            test_size (int, optional): test samples per trial.
            workers (int, optional): process pool size.

        Raises:
            exceptions.ConfigError: empty or unsorted grid, runs < 1.

        Returns:
            CalibrationReport: coverage curve and chosen radius.
        """
        grid = [float(epsilon) for epsilon in epsilon_grid]
        if not grid or any(b < a for a, b in zip(grid, grid[1:])):
            raise exceptions.ConfigError(
                1, 'epsilon grid must be nonempty and sorted')
        if int(runs) < 1:
            raise exceptions.ConfigError(1, 'runs must be positive')
        if not 0 < eta_target < 1:
            raise exceptions.ConfigError(
                1, f'eta_target must be in (0, 1), got {eta_target}')

        rows = Calibration.run_trials(
            generator, sample_size, grid, runs, seed,
            config=config, test_size=test_size, workers=workers)
        return Calibration.summarize(
            rows, grid, runs, eta_target, sample_size, seed)
