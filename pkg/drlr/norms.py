#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Norms, dual norms and the projections built on them."""

import math

import numpy as np

from .model import MetricParams, NormKind

_ORD = {NormKind.L1: 1, NormKind.L2: 2, NormKind.LINF: np.inf}


class Norms:
    """Norm utilities on the feature space.

    Every method takes the *feature* norm kind; dual quantities are derived
    from it (l1 <-> linf, l2 <-> l2).
    """

    @staticmethod
    def norm(v, kind: NormKind) -> float:
        """Returns ||v|| for the feature norm `kind`."""
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size == 0:
            return 0.0
        return float(np.linalg.norm(v, ord=_ORD[NormKind.parse(kind)]))

    @staticmethod
    def dual_norm(v, kind: NormKind) -> float:
        """Returns ||v||_* for the feature norm `kind`.

        Args:
            v (array): vector.
            kind (NormKind): feature norm; l1 gives linf, l2 gives l2 and
                linf gives l1.

        Returns:
            float: dual norm value.
        """
        return Norms.norm(v, NormKind.parse(kind).dual)

    @staticmethod
    def _project_linf_epigraph(b: np.ndarray, lam: float) -> tuple:
        """Projects (b, lam) onto {(c, t): ||c||_inf <= t}.

        The projected level t minimizes sum (|b_j| - t)_+^2 + (t - lam)^2
        over t >= 0; the active set is found from the sorted magnitudes.
        """
        magnitudes = np.sort(np.abs(b))[::-1]
        if magnitudes.size == 0 or magnitudes[0] <= lam:
            return b.copy(), max(lam, 0.0)

        partial = np.concatenate(([0.0], np.cumsum(magnitudes)))
        counts = np.arange(magnitudes.size + 1)
        levels = (lam + partial) / (1.0 + counts)
        upper = np.concatenate(([np.inf], magnitudes))
        lower = np.concatenate((magnitudes, [-np.inf]))
        valid = np.nonzero((levels < upper) & (levels >= lower))[0]
        level = max(float(levels[valid[0]]), 0.0)

        return np.sign(b) * np.minimum(np.abs(b), level), level

    @staticmethod
    def project_epigraph(beta, lam: float, kind: NormKind) -> tuple:
        """Euclidean projection of (beta, lam) onto {||b||_* <= l}.

        The set is the cone of the dual norm of `kind`: second-order cone
        for l2, linf-epigraph for l1 and l1-epigraph for linf. The l1 case
        uses the Moreau decomposition with its polar cone, which is the
        reflected linf-epigraph.

        Args:
            beta (array): weight vector.
            lam (float): epigraph level.
            kind (NormKind): feature norm.

        Returns:
            tuple: projected (beta, lam).
        """
        beta = np.asarray(beta, dtype=float).reshape(-1)
        lam = float(lam)
        dual = NormKind.parse(kind).dual

        if dual is NormKind.L2:
            size = float(np.linalg.norm(beta))
            if size <= lam:
                return beta.copy(), lam
            if size <= -lam:
                return np.zeros_like(beta), 0.0
            level = 0.5 * (size + lam)
            return beta * (level / size), level

        if dual is NormKind.LINF:
            return Norms._project_linf_epigraph(beta, lam)

        if np.sum(np.abs(beta)) <= lam:
            return beta.copy(), lam
        polar_beta, polar_level = Norms._project_linf_epigraph(beta, -lam)
        return beta - polar_beta, lam + polar_level

    @staticmethod
    def _project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
        """Projects v onto {||w||_1 <= radius} by sorting."""
        if np.sum(np.abs(v)) <= radius:
            return v.copy()
        if radius <= 0:
            return np.zeros_like(v)
        magnitudes = np.sort(np.abs(v))[::-1]
        cumulative = np.cumsum(magnitudes) - radius
        ranks = np.arange(1, v.size + 1)
        rho = np.nonzero(magnitudes > cumulative / ranks)[0][-1]
        threshold = cumulative[rho] / (rho + 1.0)
        return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)

    @staticmethod
    def prox_dual_norm(v, step: float, kind: NormKind) -> np.ndarray:
        """Proximal operator of step * ||.||_* for the feature norm `kind`.

        Args:
            v (array): point.
            step (float): nonnegative scaling of the dual norm.
            kind (NormKind): feature norm.

        Returns:
            np.ndarray: argmin_w step * ||w||_* + ||w - v||^2 / 2.
        """
        v = np.asarray(v, dtype=float).reshape(-1)
        dual = NormKind.parse(kind).dual
        if step <= 0:
            return v.copy()

        if dual is NormKind.L1:
            return np.sign(v) * np.maximum(np.abs(v) - step, 0.0)
        if dual is NormKind.L2:
            size = float(np.linalg.norm(v))
            if size <= step:
                return np.zeros_like(v)
            return v * (1.0 - step / size)
        return v - Norms._project_l1_ball(v, step)

    @staticmethod
    def transport_cost(x, y, x_other, y_other, metric: MetricParams) -> float:
        """Feature-label distance ||x - x'|| + kappa * |y - y'| / 2.

        A label change costs +inf when kappa is infinite.
        """
        feature_cost = Norms.norm(
            np.asarray(x, dtype=float) - np.asarray(x_other, dtype=float),
            metric.norm
        )
        if y == y_other:
            return feature_cost
        if math.isinf(metric.kappa):
            return math.inf
        return feature_cost + metric.kappa * abs(y - y_other) / 2.0
