"""Full-control benchmark: the platform sets every displayed price itself.

Welfare is maximized by pricing at zero.  Revenue is maximized by the
uniform price ``1 + omega`` with ``omega = W(sum_j exp(theta_j - 1))``, and
the optimal revenue equals ``omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from segmenter.errors import DomainError
from segmenter.model import (
    DEFAULT_CONFIG,
    DemandVector,
    DisplaySet,
    PriceVector,
    ProductCatalog,
    SolverConfig,
)
from segmenter.special import lambert_w_log


@dataclass(frozen=True)
class MonopolyOutcome:
    objective: str
    prices: PriceVector
    demands: DemandVector
    value: float


def _nonempty(catalog, display):
    theta = display.qualities(catalog)
    if len(theta) == 0:
        raise DomainError("monopoly benchmark needs a nonempty display")
    return theta


def welfare_optimal(catalog: ProductCatalog, display: DisplaySet) -> MonopolyOutcome:
    theta = _nonempty(catalog, display)
    a = np.exp(theta)
    denom = 1.0 + math.fsum(a)
    return MonopolyOutcome(
        objective="welfare",
        prices=PriceVector(np.zeros(len(theta))),
        demands=DemandVector(a / denom, 1.0 / denom),
        value=math.log(denom),
    )


def revenue_optimal(catalog: ProductCatalog, display: DisplaySet,
                    config: SolverConfig = DEFAULT_CONFIG) -> MonopolyOutcome:
    theta = _nonempty(catalog, display)
    omega = lambert_w_log(float(logsumexp(theta - 1.0)), config).value
    q = np.exp(theta - 1.0 - omega) / (1.0 + omega)
    # sum_j e^{theta_j - 1 - omega} = omega at the optimum, so q_0 = 1 / (1 + omega)
    return MonopolyOutcome(
        objective="revenue",
        prices=PriceVector(np.full(len(theta), 1.0 + omega)),
        demands=DemandVector(q, 1.0 / (1.0 + omega)),
        value=omega,
    )
