#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Seeded simulation and case-study protocols.

Every experiment writes a per-run CSV, an aggregate CSV and a JSON manifest
with the resolved configuration, the trial seeds and the wall-clock time.
Trials are seeded individually, so the output does not depend on the
number of workers.
"""

import os
import time
import logging
import datetime
from dataclasses import replace

import numpy as np
import pandas as pd

from . import exceptions
from .calibration import Calibration, TEST_STREAM
from .config import RunConfig
from .datasets import Datasets
from .metrics import Metrics
from .model import MetricParams
from .risk import RiskEstimator
from .solver import DRLRSolver
from .utils import Utils

logger = logging.getLogger(__name__)

EXPECTED_DATASETS = (
    'ionosphere.csv', 'thoracic_surgery.csv', 'breast_cancer.csv',
    'mnist_1_7.csv',
)


def split_trial(task: dict) -> list:
    """Fits LR, RLR and DRLR on one seeded split of a real dataset.

    Kept at module level so process pools can pickle it.

    Args:
        task (dict): data, dataset, trial, seed, split, train_size, grid,
            robust (TrainConfig), regularized (TrainConfig) and alphas.

    Returns:
        list: one row per (method, radius).
    """
    train, test = Datasets.split(
        task['data'], replace(task['split'], seed=task['seed']))
    train, test = Datasets.standardize(train, test)
    if task['train_size']:
        train = Datasets.subsample(train, task['train_size'], task['seed'])

    fits = [('LR', [DRLRSolver.train_classical(train, task['robust'])])]
    fits.append(('RLR', DRLRSolver.fit_path(
        train, task['regularized'], task['grid'])))
    fits.append(('DRLR', DRLRSolver.fit_path(
        train, task['robust'], task['grid'])))

    rows = []
    for method, models in fits:
        for model in models:
            summary = Metrics.evaluate(model, test, alphas=task['alphas'])
            row = {
                'dataset': task['dataset'],
                'trial': task['trial'],
                'seed': task['seed'],
                'method': method,
                'epsilon': model.config.epsilon,
                'logloss': summary.mean_logloss,
                'ccr': summary.ccr,
                'converged': model.converged,
            }
            for alpha, value in summary.cvar.items():
                row[f'cvar_{alpha:g}'] = value
            rows.append(row)
    return rows


class Experiments:
    """Runs the out-of-sample, ball-size and real-data studies."""

    @staticmethod
    def _folder(config: RunConfig, which: int) -> str:
        return Utils.check_creation_folder(
            os.path.join(config.out_dir, f'experiment_{which}'))

    @staticmethod
    def _manifest(config: RunConfig, which: int, folder: str, started: float,
                  files: list, seeds: list, results: dict) -> dict:
        manifest = {
            'experiment': which,
            'provenance': config.provenance(f'experiment {which}'),
            'trial_seeds': seeds,
            'started_at': datetime.datetime.now().isoformat(
                timespec='seconds'),
            'wall_clock_seconds': time.perf_counter() - started,
            'files': [os.path.basename(path) for path in files],
            'results': results,
        }
        Utils.write_json(manifest, os.path.join(folder, 'manifest.json'))
        return manifest

    @staticmethod
    def _cvar_columns(alphas) -> list:
        return [f'cvar_{float(alpha):g}' for alpha in alphas]

    @staticmethod
    def out_of_sample(config: RunConfig) -> dict:
        """Coverage and CCR versus radius for several training sizes.

        Defaults: x ~ N(0, I_10), beta = (10, 0, ..., 0), linf norm and
        kappa = 1.

        Returns:
            dict: manifest.
        """
        started = time.perf_counter()
        folder = Experiments._folder(config, 1)
        grid = config.grid()
        train_config = config.train_config(metric=config.metric('linf'))
        generator = config.synthetic_spec()

        runs, aggregate, chosen = [], [], {}
        for sample_size in config.sample_sizes:
            Utils.print(f'experiment 1: N={sample_size}', config.quiet)
            rows = Calibration.run_trials(
                generator, sample_size, grid, config.runs, config.seed,
                config=train_config, test_size=config.test_size,
                workers=config.threads)
            report = Calibration.summarize(
                rows, grid, config.runs, config.eta, sample_size,
                config.seed)
            chosen[str(sample_size)] = report.chosen_epsilon
            for row in rows:
                runs.append({'sample_size': sample_size, **row})
            for row, smoothed in zip(report.grid, report.smoothed_coverage):
                aggregate.append({
                    'sample_size': sample_size,
                    'smoothed_coverage': smoothed,
                    **row,
                })

        files = [
            Utils.write_csv(runs, os.path.join(folder, 'runs.csv')),
            Utils.write_csv(aggregate, os.path.join(folder, 'aggregate.csv')),
        ]
        seeds = [Utils.trial_seed(config.seed, k) for k in range(config.runs)]
        return Experiments._manifest(
            config, 1, folder, started, files, seeds,
            {'chosen_epsilon': chosen, 'target_confidence': 1 - config.eta})

    @staticmethod
    def ball_size(config: RunConfig) -> dict:
        """CVaR, logloss distribution and ||beta|| versus radius.

        Defaults: beta drawn uniformly on the unit sphere, l2 norm,
        kappa = 1 and N = 100. The loss CDF is reported for the first trial.

        Returns:
            dict: manifest.
        """
        started = time.perf_counter()
        folder = Experiments._folder(config, 2)
        grid = config.grid()
        train_config = config.train_config(metric=config.metric('l2'))
        beta_true = config.beta_true if config.is_set('beta_true') \
            else 'uniform_sphere'
        generator = replace(config, beta_true=beta_true).synthetic_spec()

        rows = Calibration.run_trials(
            generator, config.train_size, grid, config.runs, config.seed,
            config=train_config, test_size=config.test_size,
            alphas=config.alphas, workers=config.threads)

        metrics = ['test_logloss', 'ccr', 'beta_norm', 'j_hat']
        metrics += Experiments._cvar_columns(config.alphas)
        frame = pd.DataFrame(rows)
        aggregate = frame.groupby('epsilon', sort=True)[metrics].mean()
        aggregate = aggregate.add_prefix('mean_').reset_index()

        first = replace(generator, seed=Utils.trial_seed(config.seed, 0))
        train = Datasets.generate(first, config.train_size)
        test = Datasets.generate(first, config.test_size, TEST_STREAM)
        cdf = []
        for model in DRLRSolver.fit_path(train, train_config, grid):
            for threshold, probability in Metrics.loss_cdf(model, test):
                cdf.append({
                    'epsilon': model.config.epsilon,
                    'logloss': threshold,
                    'probability': probability,
                })

        files = [
            Utils.write_csv(rows, os.path.join(folder, 'runs.csv')),
            Utils.write_csv(
                aggregate.to_dict('records'),
                os.path.join(folder, 'aggregate.csv')),
            Utils.write_csv(cdf, os.path.join(folder, 'loss_cdf.csv')),
        ]
        seeds = [Utils.trial_seed(config.seed, k) for k in range(config.runs)]
        return Experiments._manifest(
            config, 2, folder, started, files, seeds,
            {'beta_true': generator.resolve_beta().tolist()})

    @staticmethod
    def _dataset_paths(config: RunConfig) -> list:
        paths = [path.strip() for path in config.csv_path.split(',')
                 if path.strip()]
        missing = [path for path in paths if not os.path.isfile(path)]
        if not paths or missing:
            raise exceptions.ConfigError(
                1, f'experiment 3 needs labeled CSV files given by '
                   f'csv_path (comma separated), for example '
                   f'{", ".join(EXPECTED_DATASETS)}; '
                   f'missing: {missing or "csv_path is empty"}')
        return paths

    @staticmethod
    def _best(frame: pd.DataFrame, alphas) -> tuple:
        """Per-radius means and, per dataset and method, the best radius."""
        metrics = ['logloss', 'ccr'] + Experiments._cvar_columns(alphas)
        curves = frame.groupby(
            ['dataset', 'method', 'epsilon'], sort=True)[metrics].mean()
        curves = curves.reset_index()

        table = []
        for (dataset, method), group in curves.groupby(
                ['dataset', 'method'], sort=False):
            best = group.loc[group['ccr'].idxmax()]
            row = {'dataset': dataset, 'method': method,
                   'best_epsilon': float(best['epsilon'])}
            row.update({f'mean_{name}': float(best[name])
                        for name in metrics})
            table.append(row)
        return curves, table

    @staticmethod
    def _risk_curve(data, config: RunConfig, metric: MetricParams,
                    grid: list, seed: int) -> list:
        train, test = Datasets.split(data, config.split_spec(seed))
        train, test = Datasets.standardize(train, test)
        model = DRLRSolver.train_drlr(
            train, config.train_config(config.risk_epsilon, metric))
        rows = []
        for epsilon in [0.0] + grid:
            bounds = RiskEstimator.risk_bounds(
                model.beta, train, epsilon, metric)
            rows.append({
                'epsilon': epsilon,
                'risk_min': bounds.risk_min,
                'risk_max': bounds.risk_max,
                'empirical_risk': RiskEstimator.empirical_risk(
                    model.beta, train),
                'test_risk': RiskEstimator.empirical_risk(model.beta, test),
            })
        return rows

    @staticmethod
    def real_data(config: RunConfig) -> dict:
        """LR, RLR and DRLR on seeded 60/40 splits of user supplied CSVs.

        The best radius of RLR and DRLR is the one with the highest mean
        test CCR over the splits. The risk interval of the DRLR model at
        `risk_epsilon` is reported for the first split of every dataset.

        Raises:
            exceptions.ConfigError: no dataset or missing files.

        Returns:
            dict: manifest.
        """
        started = time.perf_counter()
        paths = Experiments._dataset_paths(config)
        folder = Experiments._folder(config, 3)
        grid = config.grid()
        metric = config.metric('l1')
        robust = config.train_config(metric=metric)
        regularized = config.train_config(
            metric=replace(metric, kappa=np.inf))
        seeds = [Utils.trial_seed(config.seed, k) for k in range(config.runs)]
        train_size = config.train_size if config.is_set('train_size') \
            else None

        files, rows = [], []
        for path in paths:
            dataset = os.path.splitext(os.path.basename(path))[0]
            Utils.print(f'experiment 3: {dataset}', config.quiet)
            data = Datasets.load_csv(path, config.csv_schema())
            tasks = [
                {
                    'data': data,
                    'dataset': dataset,
                    'trial': trial,
                    'seed': seed,
                    'split': config.split_spec(),
                    'train_size': train_size,
                    'grid': grid,
                    'robust': robust,
                    'regularized': regularized,
                    'alphas': tuple(config.alphas),
                }
                for trial, seed in enumerate(seeds)
            ]
            for result in Utils.map(split_trial, tasks, config.threads):
                rows.extend(result)

            risk = Experiments._risk_curve(
                data, config, metric, grid, seeds[0])
            files.append(Utils.write_csv(
                risk, os.path.join(folder, f'risk_{dataset}.csv')))

        curves, table = Experiments._best(pd.DataFrame(rows), config.alphas)
        files += [
            Utils.write_csv(rows, os.path.join(folder, 'runs.csv')),
            Utils.write_csv(
                curves.to_dict('records'),
                os.path.join(folder, 'curves.csv')),
            Utils.write_csv(table, os.path.join(folder, 'aggregate.csv')),
        ]
        return Experiments._manifest(
            config, 3, folder, started, files, seeds,
            {'table': table,
             'selection': 'radius with the highest mean test CCR'})

    @staticmethod
    def run(which: int, config: RunConfig) -> dict:
        """Runs experiment 1, 2 or 3.

        Raises:
            exceptions.ConfigError: unknown experiment.
        """
        protocols = {
            1: Experiments.out_of_sample,
            2: Experiments.ball_size,
            3: Experiments.real_data,
        }
        if which not in protocols:
            raise exceptions.ConfigError(
                1, f'unknown experiment {which}, expected 1, 2 or 3')
        logger.info(f'running experiment {which} with seed {config.seed}')
        return protocols[which](config)
