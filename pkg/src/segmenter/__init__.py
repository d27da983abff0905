"""Equilibrium pricing and display-set selection under MNL demand."""

from segmenter.errors import (
    CatalogError,
    ConvergenceError,
    DomainError,
    InternalConsistencyError,
    RefusalError,
)
from segmenter.model import (
    DemandVector,
    DisplaySet,
    PriceVector,
    Product,
    ProductCatalog,
    SolverConfig,
    buyer_utility,
    mnl_demand,
    price_from_demand,
    seller_revenue,
    social_welfare,
    total_revenue,
)
from segmenter.special import ScalarSolveReport, lambert_w, v_func, v_func_derivative

__all__ = [
    "CatalogError",
    "ConvergenceError",
    "DemandVector",
    "DisplaySet",
    "DomainError",
    "InternalConsistencyError",
    "PriceVector",
    "Product",
    "ProductCatalog",
    "RefusalError",
    "ScalarSolveReport",
    "SolverConfig",
    "buyer_utility",
    "lambert_w",
    "mnl_demand",
    "price_from_demand",
    "seller_revenue",
    "social_welfare",
    "total_revenue",
    "v_func",
    "v_func_derivative",
]
