"""Cournot quantity competition: a closed form in terms of Lambert W.

Each displayed seller's ratio ``w_i = q_i / q_0`` solves
``w_i * exp(w_i) = exp(theta_i - 1)`` independently of the others, so
``q_i = w_i / (1 + sum w)``, ``q_0 = 1 / (1 + sum w)`` and ``p_i = 1 + w_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from segmenter.errors import InternalConsistencyError
from segmenter.model import (
    DEFAULT_CONFIG,
    DemandVector,
    DisplaySet,
    PriceVector,
    ProductCatalog,
    SolverConfig,
)
from segmenter.special import lambert_w_log

FOC_TOL = 1e-8


@dataclass(frozen=True)
class CournotEquilibrium:
    display: DisplaySet
    w_values: np.ndarray
    demands: DemandVector
    prices: PriceVector
    welfare: float
    revenue: float


def lambert_ratios(theta, config: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """w_i = W(exp(theta_i - 1)) for every entry of ``theta``."""
    return np.array([lambert_w_log(t - 1.0, config).value for t in np.asarray(theta, dtype=float)])


def first_order_residuals(theta, demands: DemandVector) -> np.ndarray:
    """d r_i / d q_i = theta_i - 1 - q_i/q_0 - log(q_i/q_0) for each seller."""
    ratio = demands.demands / demands.outside_share
    return np.asarray(theta, dtype=float) - 1.0 - ratio - np.log(ratio)


def solve_equilibrium(catalog: ProductCatalog, display: DisplaySet,
                      config: SolverConfig = DEFAULT_CONFIG) -> CournotEquilibrium:
    theta = display.qualities(catalog)
    w = lambert_ratios(theta, config)
    total = math.fsum(w)
    q0 = 1.0 / (1.0 + total)
    demands = DemandVector(w * q0, q0)
    if len(w):
        worst = float(np.max(np.abs(first_order_residuals(theta, demands))))
        if worst > FOC_TOL:
            raise InternalConsistencyError(
                f"Cournot first-order conditions violated (max residual {worst:.3g})"
            )
    gain = math.fsum(w * w + w) * q0
    return CournotEquilibrium(
        display=display,
        w_values=w,
        demands=demands,
        prices=PriceVector(1.0 + w),
        welfare=math.log1p(total) + gain,
        revenue=gain,
    )


def equilibrium_welfare(eq: CournotEquilibrium) -> float:
    return eq.welfare


def equilibrium_revenue(eq: CournotEquilibrium) -> float:
    return eq.revenue
