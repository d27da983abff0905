"""MNL market primitives: catalogs, display sets, prices, demands, welfare.

The outside option has quality and price fixed at zero, so with
``a_i = exp(theta_i - p_i)`` the purchase probabilities are::

    q_i = a_i / (1 + sum_j a_j)        q_0 = 1 / (1 + sum_j a_j)
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from segmenter.errors import CatalogError, DomainError

#: Largest accepted quality; exp(300) is comfortably representable.
QUALITY_CAP = 300.0
#: Largest accepted utility exponent theta_i - p_i in demand evaluation.
EXPONENT_CAP = 500.0


@dataclass(frozen=True)
class SolverConfig:
    residual_tol: float = 1e-12
    step_tol: float = 1e-13
    max_scalar_iters: int = 200
    max_dynamics_rounds: int = 10000
    dynamics_tol: float = 1e-10
    oracle_max_products: int = 18

    def __post_init__(self):
        for name in ("residual_tol", "step_tol", "dynamics_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        for name in ("max_scalar_iters", "max_dynamics_rounds", "oracle_max_products"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class Product:
    id: str
    quality: float


class ProductCatalog:
    """Immutable product list held in canonical (non-increasing quality) order.

    Ranks are 0-based positions in canonical order; rank 0 is the best
    product.  Equal qualities keep their input order.
    """

    __slots__ = ("_products", "_sort_permutation", "_qualities")

    def __init__(self, products: Iterable[Product | tuple[str, float]]):
        items = []
        for entry in products:
            if isinstance(entry, Product):
                pid, quality = entry.id, entry.quality
            else:
                pid, quality = entry
            items.append((str(pid), _check_quality(pid, quality)))

        seen = set()
        for pid, _ in items:
            if pid in seen:
                raise CatalogError(f"duplicate product id {pid!r}")
            seen.add(pid)

        # sorted() is stable, so ties keep input order
        order = sorted(range(len(items)), key=lambda k: -items[k][1])
        self._products = tuple(Product(*items[k]) for k in order)
        self._sort_permutation = tuple(order)
        q = np.array([p.quality for p in self._products], dtype=float)
        q.setflags(write=False)
        self._qualities = q

    @classmethod
    def from_qualities(cls, qualities: Sequence[float], ids: Sequence[str] | None = None):
        if ids is None:
            ids = [f"p{k + 1}" for k in range(len(qualities))]
        if len(ids) != len(qualities):
            raise CatalogError("ids and qualities differ in length")
        return cls(zip(ids, qualities))

    @property
    def products(self) -> tuple[Product, ...]:
        return self._products

    @property
    def sort_permutation(self) -> tuple[int, ...]:
        """Canonical rank -> position in the original input."""
        return self._sort_permutation

    @property
    def qualities(self) -> np.ndarray:
        return self._qualities

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self._products)

    def __len__(self):
        return len(self._products)

    def __iter__(self):
        return iter(self._products)

    def __repr__(self):
        body = ", ".join(f"{p.id}={p.quality:g}" for p in self._products)
        return f"ProductCatalog({body})"

    def rank_of(self, product_id: str) -> int:
        for rank, p in enumerate(self._products):
            if p.id == product_id:
                return rank
        raise CatalogError(f"unknown product id {product_id!r}")

    def digest(self) -> str:
        """Content hash of the canonicalized catalog."""
        payload = json.dumps(
            [[p.id, repr(float(p.quality))] for p in self._products],
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _check_quality(pid, quality) -> float:
    try:
        value = float(quality)
    except (TypeError, ValueError):
        raise CatalogError(f"quality of {pid!r} is not a number: {quality!r}") from None
    if not math.isfinite(value):
        raise CatalogError(f"quality of {pid!r} is not finite")
    if value < 0:
        raise CatalogError(f"quality of {pid!r} is negative")
    if value > QUALITY_CAP:
        raise CatalogError(f"quality of {pid!r} exceeds {QUALITY_CAP:g}")
    return value


@dataclass(frozen=True)
class DisplaySet:
    """Ranks of the displayed products, kept sorted ascending."""

    members: tuple[int, ...] = ()

    def __post_init__(self):
        ranks = tuple(sorted(set(int(r) for r in self.members)))
        if ranks and ranks[0] < 0:
            raise DomainError("display ranks must be nonnegative")
        object.__setattr__(self, "members", ranks)

    @classmethod
    def full(cls, catalog: ProductCatalog) -> "DisplaySet":
        return cls(tuple(range(len(catalog))))

    @classmethod
    def top(cls, k: int) -> "DisplaySet":
        return cls(tuple(range(k)))

    @classmethod
    def from_ids(cls, catalog: ProductCatalog, ids: Iterable[str]) -> "DisplaySet":
        return cls(tuple(catalog.rank_of(i) for i in ids))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, rank):
        return rank in self.members

    def union(self, *ranks: int) -> "DisplaySet":
        return DisplaySet(self.members + tuple(ranks))

    def validate(self, catalog: ProductCatalog) -> "DisplaySet":
        if self.members and self.members[-1] >= len(catalog):
            raise DomainError(
                f"display rank {self.members[-1]} outside catalog of size {len(catalog)}"
            )
        return self

    def qualities(self, catalog: ProductCatalog) -> np.ndarray:
        self.validate(catalog)
        return catalog.qualities[list(self.members)]


@dataclass(frozen=True)
class PriceVector:
    prices: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        p = np.array(self.prices, dtype=float).reshape(-1)
        if not np.all(np.isfinite(p)):
            raise DomainError("prices must be finite")
        if np.any(p < 0):
            raise DomainError("prices must be nonnegative")
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)

    def __len__(self):
        return len(self.prices)


@dataclass(frozen=True)
class DemandVector:
    demands: np.ndarray
    outside_share: float

    def __post_init__(self):
        q = np.array(self.demands, dtype=float).reshape(-1)
        q.setflags(write=False)
        object.__setattr__(self, "demands", q)
        object.__setattr__(self, "outside_share", float(self.outside_share))

    def __len__(self):
        return len(self.demands)

    def total(self) -> float:
        return self.outside_share + math.fsum(self.demands)


def _as_prices(prices) -> np.ndarray:
    if isinstance(prices, PriceVector):
        return prices.prices
    return PriceVector(prices).prices


def _attractions(catalog, display, prices) -> np.ndarray:
    theta = display.qualities(catalog)
    p = _as_prices(prices)
    if len(p) != len(theta):
        raise DomainError(f"{len(p)} prices given for {len(theta)} displayed products")
    exponent = theta - p
    if np.any(exponent > EXPONENT_CAP):
        raise DomainError("theta_i - p_i exceeds the overflow guard; demand is unnormalizable")
    return np.exp(exponent)


def mnl_demand(catalog: ProductCatalog, display: DisplaySet, prices) -> DemandVector:
    a = _attractions(catalog, display, prices)
    denom = 1.0 + math.fsum(a)
    return DemandVector(a / denom, 1.0 / denom)


def price_from_demand(catalog: ProductCatalog, display: DisplaySet, demands: DemandVector) -> PriceVector:
    """Invert the MNL map: ``p_i = theta_i + log(q_0) - log(q_i)``.

    ``q_0`` is taken from ``demands.outside_share`` after checking it equals
    ``1 - sum(q)``; using the stored value keeps precision when ``q_0`` is tiny.
    """
    theta = display.qualities(catalog)
    q = demands.demands
    if len(q) != len(theta):
        raise DomainError(f"{len(q)} demands given for {len(theta)} displayed products")
    if np.any(~np.isfinite(q)) or np.any(q <= 0):
        raise DomainError("every demand must be strictly positive")
    inside = math.fsum(q)
    if inside >= 1:
        raise DomainError("demands sum to 1 or more; no mass left for the outside option")
    q0 = demands.outside_share
    if not (0 < q0 <= 1) or abs(q0 + inside - 1) > 1e-9:
        raise DomainError("outside share is inconsistent with 1 - sum(demands)")
    p = theta + math.log(q0) - np.log(q)
    if np.any(p < -1e-9):
        raise DomainError("demand vector is infeasible: implied price is negative")
    return PriceVector(np.maximum(p, 0.0))


def is_feasible(catalog: ProductCatalog, display: DisplaySet, demands: DemandVector) -> bool:
    """Per-product feasibility ``q_i <= exp(theta_i) * q_0`` (nonnegative prices)."""
    theta = display.qualities(catalog)
    q = demands.demands
    return bool(np.all(q > 0)) and bool(np.all(np.log(q) <= theta + math.log(demands.outside_share) + 1e-12))


def buyer_utility(catalog: ProductCatalog, display: DisplaySet, prices) -> float:
    return math.log1p(math.fsum(_attractions(catalog, display, prices)))


def seller_revenue(rank: int, catalog: ProductCatalog, display: DisplaySet, prices) -> float:
    if rank not in display:
        raise DomainError(f"rank {rank} is not displayed")
    q = mnl_demand(catalog, display, prices)
    pos = display.members.index(rank)
    return float(_as_prices(prices)[pos] * q.demands[pos])


def total_revenue(catalog: ProductCatalog, display: DisplaySet, prices) -> float:
    q = mnl_demand(catalog, display, prices)
    return math.fsum(_as_prices(prices) * q.demands)


def social_welfare(catalog: ProductCatalog, display: DisplaySet, prices) -> float:
    return buyer_utility(catalog, display, prices) + total_revenue(catalog, display, prices)
