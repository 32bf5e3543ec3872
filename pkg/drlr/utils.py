#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Utils used on drlr module. """

import os
import json
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from . import exceptions

FLOAT_FORMAT = '%.17g'


class Utils:
    """Misc utility methods."""

    @staticmethod
    def print(msg: str, quiet: bool) -> None:
        """Used to print messages if quiet is False.

        Args:
            msg (str): message to print.
            quiet (bool): show logs.
        """
        if not quiet:
            print(msg)

    @staticmethod
    def check_creation_folder(directory: str) -> str:
        """Check whether a directory exists, if not the will be created.

        Args:
            directory (str): directory path

        Returns:
            str: path to directory.
        """
        if not os.path.exists(directory) and \
           not os.path.isdir(directory):
            os.makedirs(directory, exist_ok=True)

        return directory

    @staticmethod
    def rng(seed: int, stream: int = 0) -> np.random.Generator:
        """Returns a Philox generator for the (seed, stream) pair.

        Philox is counter based, so distinct streams of the same seed are
        independent and the result does not depend on call order.

        Args:
            seed (int): 64-bit experiment seed.
            stream (int, optional): stream id. Defaults to 0.

        Returns:
            np.random.Generator: seeded generator.
        """
        sequence = np.random.SeedSequence(
            entropy=int(seed) % 2 ** 64,
            spawn_key=(int(stream),)
        )
        return np.random.Generator(np.random.Philox(sequence))

    @staticmethod
    def trial_seed(seed: int, trial: int) -> int:
        """Derives an independent 64-bit seed for trial `trial`."""
        sequence = np.random.SeedSequence(
            entropy=int(seed) % 2 ** 64,
            spawn_key=(int(trial),)
        )
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    @staticmethod
    def map(function, items: list, workers: int = 1) -> list:
        """Applies `function` to every item, in a process pool if workers > 1.

        Results keep the order of `items`, whatever the schedule.

        Args:
            function (callable): picklable module level function.
            items (list): arguments, one per call.
            workers (int, optional): pool size. Defaults to 1 (inline).

        Returns:
            list: results.
        """
        items = list(items)
        if workers <= 1 or len(items) <= 1:
            return [function(item) for item in items]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, items))

    @staticmethod
    def to_jsonable(value):
        """Converts numpy values and infinities into JSON friendly values.

        Infinite floats are written as the strings "inf" / "-inf".

        Args:
            value: any nested structure of dicts, lists and scalars.

        Returns:
            object: structure accepted by `json.dumps`.
        """
        if isinstance(value, dict):
            return {str(k): Utils.to_jsonable(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [Utils.to_jsonable(v) for v in value]
        if isinstance(value, np.ndarray):
            return [Utils.to_jsonable(v) for v in value.tolist()]
        if isinstance(value, (np.bool_, bool)):
            return bool(value)
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, (np.floating, float)):
            value = float(value)
            if math.isinf(value):
                return 'inf' if value > 0 else '-inf'
            return value
        return value

    @staticmethod
    def write_json(data: dict, output_path: str) -> str:
        """Writes `data` as indented JSON.

        Raises:
            exceptions.DRLRError: file could not be written (code 3).

        Args:
            data (dict): content.
            output_path (str): path to json file.

        Returns:
            str: path to written file.
        """
        Utils.check_creation_folder(os.path.dirname(output_path) or '.')
        try:
            with open(output_path, 'w') as output_file:
                json.dump(Utils.to_jsonable(data), output_file, indent=2)
        except OSError as exc:
            raise exceptions.DRLRError(3, f'cannot write {output_path}: {exc}')

        return output_path

    @staticmethod
    def read_json(input_path: str) -> dict:
        """Reads a JSON file.

        Raises:
            exceptions.DRLRError: file missing or unreadable (code 3).

        Args:
            input_path (str): path to json file.

        Returns:
            dict: parsed content.
        """
        try:
            with open(input_path) as input_file:
                return json.load(input_file)
        except (OSError, ValueError) as exc:
            raise exceptions.DRLRError(3, f'cannot read {input_path}: {exc}')

    @staticmethod
    def write_csv(rows: list, output_path: str, columns: list = None) -> str:
        """Writes rows to CSV with 17 significant digits per float.

        Raises:
            exceptions.DRLRError: file could not be written (code 3).

        Args:
            rows (list): list of dicts, one per row.
            output_path (str): path to csv file.
            columns (list, optional): column order. Defaults to the
                keys of the first row.

        Returns:
            str: path to written file.
        """
        Utils.check_creation_folder(os.path.dirname(output_path) or '.')
        frame = pd.DataFrame(rows, columns=columns)
        try:
            frame.to_csv(output_path, index=False, float_format=FLOAT_FORMAT)
        except OSError as exc:
            raise exceptions.DRLRError(3, f'cannot write {output_path}: {exc}')

        return output_path
