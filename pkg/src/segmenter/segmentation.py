"""Choosing which products to display.

For Bertrand welfare the answer is always the whole catalog.  For the other
three (game, objective) pairs the optimum is a quality prefix, so scanning
the top-k sets for k = 1..n finds it with n equilibrium solves.
``brute_force_optimize`` enumerates every nonempty subset and serves as the
ground truth for small catalogs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

from segmenter import bertrand, cournot
from segmenter.errors import ConvergenceError, DomainError, RefusalError
from segmenter.model import DEFAULT_CONFIG, DisplaySet, ProductCatalog, SolverConfig

THREADS_ENV = "SEGMENTER_THREADS"
# values this close to the best are ties for the oracle's tie-break
TIE_RTOL = 1e-12
# below this many subsets the oracle never spawns worker processes
_PARALLEL_MIN_SUBSETS = 1 << 12


class Game(str, Enum):
    BERTRAND = "bertrand"
    COURNOT = "cournot"


class Objective(str, Enum):
    WELFARE = "welfare"
    REVENUE = "revenue"


@dataclass(frozen=True)
class SegmentationResult:
    game: Game
    objective: Objective
    chosen: DisplaySet
    k_star: int
    objective_value: float
    curve: tuple


def solve_game(catalog: ProductCatalog, display: DisplaySet, game,
               config: SolverConfig = DEFAULT_CONFIG):
    if Game(game) is Game.BERTRAND:
        return bertrand.solve_equilibrium(catalog, display, config)
    return cournot.solve_equilibrium(catalog, display, config)


def equilibrium_value(catalog: ProductCatalog, display: DisplaySet, game, objective,
                      config: SolverConfig = DEFAULT_CONFIG) -> float:
    eq = solve_game(catalog, display, game, config)
    return eq.welfare if Objective(objective) is Objective.WELFARE else eq.revenue


def objective_curve(catalog: ProductCatalog, game, objective,
                    config: SolverConfig = DEFAULT_CONFIG) -> list[tuple[int, float]]:
    """Equilibrium objective of each top-k prefix, k = 0..n (k = 0 is 0)."""
    curve = [(0, 0.0)]
    for k in range(1, len(catalog) + 1):
        try:
            value = equilibrium_value(catalog, DisplaySet.top(k), game, objective, config)
        except ConvergenceError as exc:
            raise ConvergenceError(f"top-{k} prefix: {exc}", exc.report) from None
        curve.append((k, value))
    return curve


def optimize(catalog: ProductCatalog, game, objective,
             config: SolverConfig = DEFAULT_CONFIG) -> SegmentationResult:
    if len(catalog) == 0:
        raise DomainError("cannot segment an empty catalog")
    game, objective = Game(game), Objective(objective)
    curve = objective_curve(catalog, game, objective, config)
    if game is Game.BERTRAND and objective is Objective.WELFARE:
        k_star = len(catalog)
    else:
        best = max(v for _, v in curve[1:])
        k_star = next(k for k, v in curve[1:] if v == best)
    return SegmentationResult(
        game=game,
        objective=objective,
        chosen=DisplaySet.top(k_star),
        k_star=k_star,
        objective_value=curve[k_star][1],
        curve=tuple(curve),
    )


def _members(mask: int) -> tuple[int, ...]:
    return tuple(r for r in range(mask.bit_length()) if mask >> r & 1)


def _evaluate_masks(qualities, game, objective, config, start, stop):
    catalog = ProductCatalog.from_qualities(qualities)
    return [
        equilibrium_value(catalog, DisplaySet(_members(m)), game, objective, config)
        for m in range(start, stop)
    ]


def oracle_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def brute_force_optimize(catalog: ProductCatalog, game, objective,
                         config: SolverConfig = DEFAULT_CONFIG,
                         workers: int | None = None) -> tuple[DisplaySet, float]:
    """Best display set over all 2^n - 1 nonempty subsets.

    Values within ``TIE_RTOL`` of the maximum count as ties; among those the
    smaller set wins, then the lexicographically smaller rank tuple.  The
    reduction runs after all values are known, so the answer does not depend
    on evaluation order or on ``workers``.
    """
    n = len(catalog)
    if n == 0:
        raise DomainError("cannot enumerate subsets of an empty catalog")
    if n > config.oracle_max_products:
        raise RefusalError(
            f"{n} products exceed the oracle limit of {config.oracle_max_products}"
        )
    game, objective = Game(game), Objective(objective)
    qualities = tuple(float(q) for q in catalog.qualities)
    total = 1 << n
    workers = oracle_workers() if workers is None else max(1, int(workers))

    if workers == 1 or total < _PARALLEL_MIN_SUBSETS:
        values = _evaluate_masks(qualities, game, objective, config, 1, total)
    else:
        bounds = [1 + (total - 1) * k // (4 * workers) for k in range(4 * workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_evaluate_masks, qualities, game, objective, config, a, b)
                for a, b in zip(bounds, bounds[1:])
            ]
            values = [v for f in futures for v in f.result()]

    best = max(values)
    cutoff = best - TIE_RTOL * max(1.0, abs(best))
    winner = min(
        (_members(m) for m, v in zip(range(1, total), values) if v >= cutoff),
        key=lambda members: (len(members), members),
    )
    mask = sum(1 << r for r in winner)
    return DisplaySet(winner), values[mask - 1]


def is_quality_prefix(catalog: ProductCatalog, display: DisplaySet) -> bool:
    """True when ``display`` has the same qualities as the top-|display| prefix."""
    k = len(display)
    chosen = sorted(display.qualities(catalog), reverse=True)
    return all(math.isclose(a, b, rel_tol=0, abs_tol=0) for a, b in zip(chosen, catalog.qualities[:k]))
