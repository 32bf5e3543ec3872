# -*- coding: utf-8 -*-

"""Top-level package for Distributionally Robust Logistic Regression."""

__author__ = """Hex Informatica"""
__email__ = 'contato@hexgis.com'
__version__ = '0.1.0'
