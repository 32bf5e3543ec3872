#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Console script for drlr.

Subcommands: train, risk, experiment, calibrate and generate. Any
configuration key can be given as `--key value`; exit codes are 0 on
success, 1 for usage or configuration errors, 2 when a fit did not converge
and 3 for I/O errors.
"""

import os
import sys
import logging
import argparse

from . import exceptions
from .calibration import Calibration, TEST_STREAM
from .config import RunConfig
from .datasets import Datasets
from .experiments import Experiments
from .metrics import Metrics
from .risk import RiskEstimator
from .solver import DRLRSolver, TrainedModel
from .utils import Utils

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_IO = 3


def _training_data(config: RunConfig) -> tuple:
    """Train and test sets described by the run configuration."""
    if config.source == 'synthetic':
        spec = config.synthetic_spec()
        return (
            Datasets.generate(spec, config.train_size),
            Datasets.generate(spec, config.test_size, TEST_STREAM),
        )
    if config.source != 'csv':
        raise exceptions.ConfigError(
            1, f'source must be synthetic or csv, got {config.source!r}')
    if not config.csv_path:
        raise exceptions.ConfigError(1, 'source csv requires csv_path')

    data = Datasets.load_csv(config.csv_path, config.csv_schema())
    if config.test_csv_path:
        train = data
        test = Datasets.load_csv(config.test_csv_path, config.csv_schema())
    else:
        train, test = Datasets.split(data, config.split_spec())
    if config.standardize:
        train, test = Datasets.standardize(train, test)
    return train, test


def cmd_train(config: RunConfig) -> int:
    """Fits one model and writes model.json and evaluation.json."""
    train, test = _training_data(config)
    model = DRLRSolver.train_drlr(train, config.train_config())
    decomposition = DRLRSolver.worst_case_loss_decomposition(model, train)
    summary = Metrics.evaluate(model, test, alphas=config.alphas)
    provenance = config.provenance('train')

    model_path = os.path.join(config.out_dir, 'model.json')
    Utils.write_json({
        **model.to_dict(),
        'decomposition': decomposition.to_dict(),
        'provenance': provenance,
    }, model_path)
    Utils.write_json({
        **summary.to_dict(),
        'provenance': provenance,
    }, os.path.join(config.out_dir, 'evaluation.json'))

    Utils.print(
        f'{model.mode} model: j_hat={model.j_hat:.6g} '
        f'test logloss={summary.mean_logloss:.6g} ccr={summary.ccr:.4f} '
        f'-> {model_path}', config.quiet)
    return EXIT_OK if model.converged else EXIT_NOT_CONVERGED


def cmd_risk(config: RunConfig) -> int:
    """Writes the risk interval of a saved model over the radius grid."""
    if not config.model:
        raise exceptions.ConfigError(1, 'risk requires --model path')
    if not os.path.isfile(config.model):
        raise exceptions.DRLRError(3, f'model file {config.model} not found')
    content = Utils.read_json(config.model)
    model = TrainedModel.from_dict(content)
    data_config = config
    trained_with = content.get('provenance', {}).get('config')
    if trained_with is not None:
        data_config = RunConfig.from_dict(trained_with).overlay(config)
        logger.info(f'risk data rebuilt from the provenance of '
                    f'{config.model} (seed {data_config.seed})')
    train, _ = _training_data(data_config)
    if model.beta.shape[0] != train.n:
        raise exceptions.DimensionError(
            1, f'model has dimension {model.beta.shape[0]} but data has '
               f'dimension {train.n}')

    metric = model.config.metric
    grid = config.grid() if config.is_set('epsilon_grid') \
        else [0.0] + config.grid()
    empirical = RiskEstimator.empirical_risk(model.beta, train)
    rows = []
    for epsilon in grid:
        bounds = RiskEstimator.risk_bounds(model.beta, train, epsilon, metric)
        rows.append({
            'epsilon': epsilon,
            'risk_min': bounds.risk_min,
            'risk_max': bounds.risk_max,
            'empirical_risk': empirical,
        })

    csv_path = os.path.join(config.out_dir, 'risk.csv')
    Utils.write_csv(rows, csv_path)
    Utils.write_json({
        'rows': rows,
        'model': config.model,
        'provenance': data_config.provenance('risk'),
    }, os.path.join(config.out_dir, 'risk.json'))
    Utils.print(f'risk interval over {len(rows)} radii -> {csv_path}',
                config.quiet)
    return EXIT_OK


def cmd_experiment(config: RunConfig, which: int) -> int:
    manifest = Experiments.run(which, config)
    Utils.print(
        f'experiment {which} finished in '
        f'{manifest["wall_clock_seconds"]:.1f}s', config.quiet)
    return EXIT_OK


def cmd_calibrate(config: RunConfig) -> int:
    """Chooses the radius by simulated coverage on the synthetic model."""
    report = Calibration.calibrate_by_coverage(
        generator=config.synthetic_spec(),
        sample_size=config.train_size,
        eta_target=config.eta,
        epsilon_grid=config.grid(),
        runs=config.runs,
        seed=config.seed,
        config=config.train_config(),
        test_size=config.test_size,
        workers=config.threads,
    )
    report.write(
        os.path.join(config.out_dir, 'calibration.json'),
        os.path.join(config.out_dir, 'calibration.csv'),
        provenance=config.provenance('calibrate'),
    )
    Utils.print(f'chosen epsilon: {report.chosen_epsilon}', config.quiet)
    return EXIT_OK


def cmd_generate(config: RunConfig) -> int:
    """Writes a synthetic train/test pair as CSV."""
    spec = config.synthetic_spec()
    train = Datasets.generate(spec, config.train_size)
    test = Datasets.generate(spec, config.test_size, TEST_STREAM)
    Datasets.write_csv(train, os.path.join(config.out_dir, 'train.csv'))
    Datasets.write_csv(test, os.path.join(config.out_dir, 'test.csv'))
    Utils.write_json({
        'generator': spec.to_dict(),
        'beta_true': spec.resolve_beta().tolist(),
        'provenance': config.provenance('generate'),
    }, os.path.join(config.out_dir, 'generate.json'))
    Utils.print(f'wrote {train.size} + {test.size} samples to '
                f'{config.out_dir}', config.quiet)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key = value configuration file')
    common.add_argument('--seed', type=int, help='64-bit experiment seed')
    common.add_argument('--out-dir', help='output directory')
    common.add_argument('--threads', type=int, help='worker processes')
    common.add_argument('--quiet', action='store_true',
                        help='silence progress messages')
    common.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    parser = argparse.ArgumentParser(
        prog='drlr',
        description='Distributionally robust logistic regression',
        epilog='Other configuration keys are accepted as --key value.')
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('train', parents=[common], help='fit one model')
    commands.add_parser('risk', parents=[common],
                        help='risk interval of a saved model')
    experiment = commands.add_parser(
        'experiment', parents=[common], help='run experiment 1, 2 or 3')
    experiment.add_argument('which', type=int, choices=[1, 2, 3])
    commands.add_parser('calibrate', parents=[common],
                        help='choose epsilon by simulated coverage')
    commands.add_parser('generate', parents=[common],
                        help='write a synthetic dataset')
    return parser


def parse_overrides(extra: list) -> dict:
    """Turns ['--key', 'value', ...] into {'key': 'value'}.

    Raises:
        exceptions.ConfigError: dangling flag or positional value.
    """
    overrides, index = {}, 0
    while index < len(extra):
        token = extra[index]
        if not token.startswith('--'):
            raise exceptions.ConfigError(1, f'unexpected argument {token!r}')
        key = token[2:]
        if '=' in key:
            key, value = key.split('=', 1)
            index += 1
        elif index + 1 < len(extra):
            value = extra[index + 1]
            index += 2
        else:
            raise exceptions.ConfigError(1, f'missing value for {token}')
        overrides[key] = value
    return overrides


def resolve_config(args: argparse.Namespace, extra: list) -> RunConfig:
    """File values, then --key overrides, then the global flags."""
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    values = parse_overrides(extra)
    for key in ('seed', 'out_dir', 'threads'):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    if args.quiet:
        values['quiet'] = 'true'
    return config.with_values(values)


def main(argv: list = None) -> int:
    """Console script entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s %(name)s %(levelname)s %(message)s')

    commands = {
        'train': cmd_train,
        'risk': cmd_risk,
        'calibrate': cmd_calibrate,
        'generate': cmd_generate,
    }
    try:
        config = resolve_config(args, extra)
        Utils.check_creation_folder(config.out_dir)
        if args.command == 'experiment':
            return cmd_experiment(config, args.which)
        return commands[args.command](config)
    except exceptions.DRLRError as exc:
        logger.error(f'{args.command} failed: {exc.message}')
        print(f'drlr: error: {exc.message}', file=sys.stderr)
        io_error = type(exc) is exceptions.DRLRError and exc.code == EXIT_IO
        return EXIT_IO if io_error else EXIT_CONFIG
    except OSError as exc:
        print(f'drlr: error: {exc}', file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())  # pragma: no cover
