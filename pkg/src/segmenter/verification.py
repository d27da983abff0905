"""Grid checks of the scalar facts the segmentation results rest on.

Each scan evaluates a predicate on a fixed, documented grid and reports the
first violating point, if any.  Nothing here is used by the solvers; these
are falsifiable numerical checks of monotonicity, quasi-convexity and a
Lambert W lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from segmenter import bertrand
from segmenter.errors import DomainError
from segmenter.model import DEFAULT_CONFIG, DisplaySet, ProductCatalog, SolverConfig
from segmenter.special import lambert_w, v_odds_log

WELFARE_GRID = 200
REVENUE_GRID = 200
LAMBERT_GRID = 10_000
FD_REL_STEP = 1e-6
QUASICONVEX_TOL = 1e-9
LAMBERT_BOUND_TOL = 1e-12


@dataclass
class ScanReport:
    instance: str
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    holds: bool
    violation: float | None = None
    margin: float = math.inf

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else f"violated({self.violation!r})"

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "grid_size": int(len(self.grid)),
            "grid_min": float(self.grid.min()) if len(self.grid) else None,
            "grid_max": float(self.grid.max()) if len(self.grid) else None,
            "verdict": "holds" if self.holds else "violated",
            "violation": self.violation,
            "margin": self.margin,
        }


def _check_open_unit(q, name):
    if not 0 < q < 1:
        raise DomainError(f"{name} needs 0 < q < 1, got {q!r}")


def f_sigmoid(q: float) -> float:
    """f(q) = (1 - (1-q)^2) / ((1-q)^2 / q + 1): increasing, with f(q) + f(1-q) = 1."""
    _check_open_unit(q, "f_sigmoid")
    s = (1.0 - q) ** 2
    return (1.0 - s) / (s / q + 1.0)


def g_func(q: float) -> float:
    """g(q) = (1/q^2 - 2/(1-q)^3) / (1/q + 1/(1-q)^2)^2; decreasing on (0, 0.5]."""
    _check_open_unit(q, "g_func")
    return (1.0 / q**2 - 2.0 / (1.0 - q) ** 3) / (1.0 / q + 1.0 / (1.0 - q) ** 2) ** 2


def _shares_at(q0, shifted, config):
    u = np.array([v_odds_log(math.log(q0) + c, config).value for c in shifted])
    return u, u / (1.0 + u)


def _outside_share(catalog, display, config):
    return bertrand.solve_equilibrium(catalog, display, config).demands.outside_share


def incremental_welfare(q0: float, shifted, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Welfare of a selected set plus one candidate, as a function of q_0 alone.

    The candidate's share is whatever mass ``1 - q_0 - sum q_i`` is left over.
    """
    u, v = _shares_at(q0, shifted, config)
    inside = q0 + math.fsum(v)
    return -math.log(q0) + math.fsum(u) + (1.0 - inside) / inside


def incremental_revenue(q0: float, shifted, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Revenue counterpart of :func:`incremental_welfare`."""
    u, v = _shares_at(q0, shifted, config)
    return math.fsum(u) + 1.0 / (q0 + math.fsum(v)) - 1.0


def welfare_q0_derivative_scan(catalog: ProductCatalog, display: DisplaySet,
                               config: SolverConfig = DEFAULT_CONFIG,
                               grid_size: int = WELFARE_GRID) -> ScanReport:
    """Finite-difference slope of the incremental welfare over every candidate's
    feasible q_0 interval; the predicate is slope < 0 everywhere.

    The central difference uses a step of ``FD_REL_STEP * q_0`` so that tiny
    outside shares are handled.
    """
    shifted = display.qualities(catalog) - 1.0
    q0_max = _outside_share(catalog, display, config)
    grids, slopes = [], []
    for j in range(len(catalog)):
        if j in display:
            continue
        q0_min = _outside_share(catalog, display.union(j), config)
        grid = np.linspace(q0_min, q0_max, grid_size)
        for q0 in grid:
            h = FD_REL_STEP * q0
            up = incremental_welfare(min(q0 + h, 1.0), shifted, config)
            down = incremental_welfare(q0 - h, shifted, config)
            slopes.append((up - down) / (min(q0 + h, 1.0) - (q0 - h)))
        grids.append(grid)
    grid = np.concatenate(grids) if grids else np.zeros(0)
    slopes = np.array(slopes)
    bad = np.flatnonzero(slopes >= 0)
    return ScanReport(
        instance=f"welfare slope, theta={catalog.qualities.tolist()}, S={list(display.members)}",
        grid=grid,
        values=slopes,
        holds=bad.size == 0,
        violation=float(grid[bad[0]]) if bad.size else None,
        margin=float(-slopes.max()) if slopes.size else math.inf,
    )


def revenue_quasiconvexity_scan(catalog: ProductCatalog, selected: DisplaySet,
                                config: SolverConfig = DEFAULT_CONFIG,
                                grid_size: int = REVENUE_GRID) -> ScanReport:
    """Incremental revenue between q_0^min (add the best unselected product)
    and q_0^max (add nothing) never exceeds the larger endpoint value.
    """
    remaining = [r for r in range(len(catalog)) if r not in selected]
    if not remaining:
        raise DomainError("revenue scan needs at least one unselected product")
    shifted = selected.qualities(catalog) - 1.0
    q0_max = _outside_share(catalog, selected, config)
    q0_min = _outside_share(catalog, selected.union(remaining[0]), config)
    grid = np.linspace(q0_min, q0_max, grid_size)
    values = np.array([incremental_revenue(q0, shifted, config) for q0 in grid])
    ceiling = max(values[0], values[-1])
    bad = np.flatnonzero(values > ceiling + QUASICONVEX_TOL)
    return ScanReport(
        instance=f"revenue quasi-convexity, theta={catalog.qualities.tolist()}, S={list(selected.members)}",
        grid=grid,
        values=values,
        holds=bad.size == 0,
        violation=float(grid[bad[0]]) if bad.size else None,
        margin=float(ceiling - values.max()),
    )


def lambert_bound_check(config: SolverConfig = DEFAULT_CONFIG,
                        grid_size: int = LAMBERT_GRID) -> ScanReport:
    """W(x) >= 2x / (e + x) on [1/e, 2 e^2]; equality holds at x = e."""
    grid = np.linspace(math.exp(-1.0), 2.0 * math.e**2, grid_size)
    margins = np.array([lambert_w(x, config) - 2.0 * x / (math.e + x) for x in grid])
    bad = np.flatnonzero(margins < -LAMBERT_BOUND_TOL)
    return ScanReport(
        instance="lambert lower bound 2x/(e+x)",
        grid=grid,
        values=margins,
        holds=bad.size == 0,
        violation=float(grid[bad[0]]) if bad.size else None,
        margin=float(margins.min()),
    )
