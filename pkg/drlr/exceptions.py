#!/usr/bin/env python
# -*- coding: utf-8 -*-


class DRLRError(Exception):
    """Base class for drlr exceptions."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
        self.message = message


class DimensionError(DRLRError):
    """Class for vector dimension mismatch exception."""


class DataError(DRLRError):
    """Class for invalid dataset exception.

    Raised for non-finite values, unparseable or missing CSV cells,
    label columns with more than two values and constant features.
    """


class ConfigError(DRLRError):
    """Class for invalid configuration exception."""


class SplitError(DRLRError):
    """Class for train/test split exception."""


class CalibrationError(DRLRError):
    """Class for radius calibration exception."""
