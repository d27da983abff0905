"""Bertrand price competition among the displayed sellers.

At the unique equilibrium every displayed seller charges ``1 / (1 - q_i)``
and the demands satisfy ``q_0 * exp(theta_i - 1) = q_i * exp(q_i / (1 - q_i))``,
so ``q_i = V(q_0 * exp(theta_i - 1))``.  The outside share is the root of the
increasing scalar function

    F(q_0) = q_0 + sum_i V(q_0 * exp(theta_i - 1)) - 1.

The root is found in ``t = log(q_0)``, which stays well scaled when strong
products push ``q_0`` towards zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from segmenter.errors import ConvergenceError, DomainError, InternalConsistencyError
from segmenter.model import (
    DEFAULT_CONFIG,
    EXPONENT_CAP,
    DemandVector,
    DisplaySet,
    PriceVector,
    ProductCatalog,
    SolverConfig,
    _as_prices,
    mnl_demand,
    social_welfare,
    total_revenue,
)
from segmenter.special import ScalarSolveReport, lambert_w_log, solve_increasing, v_odds_log


@dataclass(frozen=True)
class BertrandEquilibrium:
    display: DisplaySet
    prices: PriceVector
    demands: DemandVector
    welfare: float
    revenue: float
    solve_report: ScalarSolveReport
    # q_i / (1 - q_i), equal to p_i - 1 at equilibrium; kept for precision
    odds: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)


def _zero_outcome(display):
    return BertrandEquilibrium(
        display=display,
        prices=PriceVector(np.zeros(0)),
        demands=DemandVector(np.zeros(0), 1.0),
        welfare=0.0,
        revenue=0.0,
        solve_report=ScalarSolveReport(1.0, 0.0, 0),
    )


def _odds_at(log_q0, shifted, config):
    return np.array([v_odds_log(log_q0 + c, config).value for c in shifted])


def equilibrium_constraint(catalog: ProductCatalog, display: DisplaySet, q0: float,
                           config: SolverConfig = DEFAULT_CONFIG) -> float:
    """F(q_0) = q_0 + sum V(q_0 e^{theta_i - 1}) - 1; zero at the equilibrium."""
    if not 0 < q0 <= 1:
        raise DomainError("q0 must lie in (0, 1]")
    shifted = display.qualities(catalog) - 1.0
    u = _odds_at(math.log(q0), shifted, config)
    return q0 + math.fsum(u / (1.0 + u)) - 1.0


def solve_equilibrium(catalog: ProductCatalog, display: DisplaySet,
                      config: SolverConfig = DEFAULT_CONFIG) -> BertrandEquilibrium:
    """Unique Bertrand equilibrium on ``display``.

    An empty display yields the zero outcome (no prices, ``q_0 = 1``).
    """
    theta = display.qualities(catalog)
    if len(theta) == 0:
        return _zero_outcome(display)
    shifted = theta - 1.0

    def func(t):
        q0 = math.exp(t)
        u = _odds_at(t, shifted, config)
        v = u / (1.0 + u)
        # x V'(x) = 1 / (1/V + 1/(1-V)^2)
        slope = q0 + math.fsum(1.0 / (1.0 / v + (1.0 + u) ** 2))
        return q0 + math.fsum(v) - 1.0, slope

    # V(x) <= x gives F < 0 below -log(1 + sum e^{theta_i - 1})
    lo = -float(logsumexp(np.append(shifted, 0.0))) - 1.0
    try:
        t, resid, iters = solve_increasing(func, lo, 0.0, 0.5 * lo, config, "bertrand outside share")
    except ConvergenceError as exc:
        raise ConvergenceError(f"Bertrand equilibrium on {len(theta)} products: {exc}", exc.report) from None
    report = ScalarSolveReport(math.exp(t), resid, iters)
    if abs(resid) > config.residual_tol:
        raise ConvergenceError("Bertrand equilibrium: constraint residual above tolerance", report)

    u = _odds_at(t, shifted, config)
    q = u / (1.0 + u)
    prices = 1.0 + u
    # price-demand duality: p_i = theta_i + log q_0 - log q_i
    dual = theta + t - np.log(q)
    if np.max(np.abs(dual - prices)) > 1e-8:
        raise InternalConsistencyError("Bertrand equilibrium violates the price-demand relation")

    revenue = math.fsum(u)
    return BertrandEquilibrium(
        display=display,
        prices=PriceVector(prices),
        demands=DemandVector(q, math.exp(t)),
        welfare=-t + revenue,
        revenue=revenue,
        solve_report=report,
        odds=u,
    )


def equilibrium_welfare(eq: BertrandEquilibrium) -> float:
    return eq.welfare


def equilibrium_revenue(eq: BertrandEquilibrium) -> float:
    return eq.revenue


def best_response(i: int, prices, catalog: ProductCatalog, display: DisplaySet,
                  config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Revenue-maximizing price of displayed rank ``i`` against the others.

    ``prices`` is aligned with ``display``; the entry for ``i`` is ignored.
    With ``A = 1 + sum_{j != i} exp(theta_j - p_j)`` the optimum is
    ``theta_i - log(A * W(e^{theta_i - 1} / A))``, which simplifies to
    ``1 + W(e^{theta_i - 1} / A)`` because ``log W(x) = log x - W(x)``.
    """
    if i not in display:
        raise DomainError(f"rank {i} is not displayed")
    theta = display.qualities(catalog)
    p = _as_prices(prices)
    if len(p) != len(theta):
        raise DomainError(f"{len(p)} prices given for {len(theta)} displayed products")
    pos = display.members.index(i)
    others = np.delete(theta - p, pos)
    if np.any(others > EXPONENT_CAP):
        raise DomainError("theta_j - p_j exceeds the overflow guard")
    log_a = math.log1p(math.fsum(np.exp(others)))
    return 1.0 + lambert_w_log(theta[pos] - 1.0 - log_a, config).value


def log_potential(catalog: ProductCatalog, display: DisplaySet, prices) -> float:
    """log G(p) with G(p) = prod_i(p_i a_i) / (1 + sum_j a_j); -inf if some p_i = 0."""
    theta = display.qualities(catalog)
    p = _as_prices(prices)
    if len(p) != len(theta):
        raise DomainError(f"{len(p)} prices given for {len(theta)} displayed products")
    if len(p) == 0:
        return 0.0
    if np.any(p == 0):
        return -math.inf
    exponent = theta - p
    if np.any(exponent > EXPONENT_CAP):
        raise DomainError("theta_i - p_i exceeds the overflow guard")
    return math.fsum(np.log(p) + exponent) - math.log1p(math.fsum(np.exp(exponent)))


def potential(catalog: ProductCatalog, display: DisplaySet, prices) -> float:
    """Ordinal potential of the Bertrand game.

    A unilateral move changes G in the same direction as the mover's revenue.
    At a zero price the product vanishes and G is 0 (boundary case).
    """
    return math.exp(log_potential(catalog, display, prices))


@dataclass(frozen=True)
class TraceEntry:
    round: int
    rank: int
    price: float
    delta: float
    potential: float
    log_potential: float
    prices: tuple


@dataclass
class DynamicsTrace:
    entries: list = field(default_factory=list)
    converged: bool = False

    @property
    def rounds(self):
        """Per-round summary: (round, prices, potential, max price change)."""
        out = []
        for entry in self.entries:
            if out and out[-1][0] == entry.round:
                r, _, _, mx = out[-1]
                out[-1] = (r, entry.prices, entry.potential, max(mx, entry.delta))
            else:
                out.append((entry.round, entry.prices, entry.potential, entry.delta))
        return out


def best_response_dynamics(catalog: ProductCatalog, display: DisplaySet, initial,
                           config: SolverConfig = DEFAULT_CONFIG):
    """Round-robin best responses in rank order until a round moves no price
    by more than ``config.dynamics_tol``.

    Returns ``(equilibrium_approximation, trace)``.
    """
    p = np.array(_as_prices(initial), dtype=float)
    if len(p) != len(display):
        raise DomainError(f"{len(p)} initial prices for {len(display)} displayed products")
    trace = DynamicsTrace()
    if len(display) == 0:
        trace.converged = True
        return _zero_outcome(display), trace

    for rnd in range(1, config.max_dynamics_rounds + 1):
        max_delta = 0.0
        for pos, rank in enumerate(display.members):
            new = best_response(rank, p, catalog, display, config)
            delta = abs(new - p[pos])
            p[pos] = new
            max_delta = max(max_delta, delta)
            lg = log_potential(catalog, display, p)
            trace.entries.append(
                TraceEntry(rnd, rank, new, delta, math.exp(lg), lg, tuple(p.tolist()))
            )
        if max_delta <= config.dynamics_tol:
            trace.converged = True
            break
    else:
        raise ConvergenceError(
            f"best-response dynamics did not settle within {config.max_dynamics_rounds} rounds",
            trace,
        )

    prices = PriceVector(p)
    demands = mnl_demand(catalog, display, prices)
    eq = BertrandEquilibrium(
        display=display,
        prices=prices,
        demands=demands,
        welfare=social_welfare(catalog, display, prices),
        revenue=total_revenue(catalog, display, prices),
        solve_report=ScalarSolveReport(demands.outside_share, max_delta, rnd),
        odds=p - 1.0,
    )
    return eq, trace
