import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from segmenter import (
    CatalogError,
    DemandVector,
    DisplaySet,
    DomainError,
    PriceVector,
    ProductCatalog,
    SolverConfig,
    buyer_utility,
    mnl_demand,
    price_from_demand,
    seller_revenue,
    social_welfare,
    total_revenue,
)
from segmenter.model import is_feasible

qualities = st.lists(st.floats(0, 20, allow_nan=False), min_size=1, max_size=8)


def cat(*theta):
    return ProductCatalog.from_qualities(list(theta))


def full(c):
    return DisplaySet.full(c)


class TestCatalog:
    def test_canonical_order_is_stable(self):
        c = ProductCatalog([("x", 1.0), ("y", 3.0), ("z", 1.0), ("w", 2.0)])
        assert c.ids == ("y", "w", "x", "z")
        assert c.sort_permutation == (1, 3, 0, 2)
        assert c.rank_of("x") == 2

    def test_default_ids(self):
        assert cat(0.5, 2.0).ids == ("p2", "p1")

    @pytest.mark.parametrize("bad", [-0.1, math.nan, math.inf, 300.5, "abc"])
    def test_rejects_bad_quality(self, bad):
        with pytest.raises(CatalogError):
            ProductCatalog([("a", bad)])

    def test_rejects_duplicate_ids(self):
        with pytest.raises(CatalogError):
            ProductCatalog([("a", 1), ("a", 2)])

    def test_qualities_read_only(self):
        with pytest.raises(ValueError):
            cat(1, 2).qualities[0] = 5

    def test_digest_ignores_input_order(self):
        a = ProductCatalog([("a", 1.0), ("b", 2.0)])
        b = ProductCatalog([("b", 2.0), ("a", 1.0)])
        assert a.digest() == b.digest()
        assert a.digest() != ProductCatalog([("a", 1.0), ("b", 2.5)]).digest()

    def test_unknown_id(self):
        with pytest.raises(CatalogError):
            cat(1).rank_of("nope")


class TestDisplaySet:
    def test_members_sorted_unique(self):
        assert DisplaySet((3, 1, 1)).members == (1, 3)

    def test_negative_rank_rejected(self):
        with pytest.raises(DomainError):
            DisplaySet((-1,))

    def test_validate_bounds(self):
        with pytest.raises(DomainError):
            DisplaySet((2,)).validate(cat(1, 2))

    def test_from_ids_and_union(self):
        c = ProductCatalog([("a", 1.0), ("b", 2.0), ("c", 0.0)])
        d = DisplaySet.from_ids(c, ["c", "b"])
        assert d.members == (0, 2)
        assert d.union(1).members == (0, 1, 2)
        assert DisplaySet.top(2).members == (0, 1)


class TestVectors:
    def test_negative_price_rejected(self):
        with pytest.raises(DomainError):
            PriceVector([1.0, -0.5])

    def test_nonfinite_price_rejected(self):
        with pytest.raises(DomainError):
            PriceVector([math.inf])


class TestDemand:
    @pytest.mark.parametrize("theta,p,q,q0", [
        ([0.0], [0.0], [0.5], 0.5),
        ([0.0, 0.0], [0.0, 0.0], [1 / 3, 1 / 3], 1 / 3),
        ([1.0], [1.0], [0.5], 0.5),
    ])
    def test_examples(self, theta, p, q, q0):
        c = cat(*theta)
        d = mnl_demand(c, full(c), p)
        np.testing.assert_allclose(d.demands, q, atol=1e-15)
        assert d.outside_share == pytest.approx(q0, abs=1e-15)

    def test_empty_display(self):
        d = mnl_demand(cat(1.0), DisplaySet(()), [])
        assert d.outside_share == 1.0 and len(d) == 0

    def test_extreme_quality_stays_finite(self):
        # quality cap 300 with p >= 0 keeps every exponent below the guard
        c = cat(300.0, 299.0)
        d = mnl_demand(c, full(c), [0.0, 0.0])
        assert np.all(np.isfinite(d.demands)) and d.outside_share > 0

    def test_misaligned_prices(self):
        c = cat(1.0, 2.0)
        with pytest.raises(DomainError):
            mnl_demand(c, full(c), [0.0])

    @given(qualities, st.data())
    def test_normalization(self, theta, data):
        c = ProductCatalog.from_qualities(theta)
        p = data.draw(st.lists(st.floats(0, 30), min_size=len(c), max_size=len(c)))
        d = mnl_demand(c, full(c), p)
        assert d.total() == pytest.approx(1.0, abs=1e-12)
        assert d.outside_share + math.fsum(d.demands) == pytest.approx(1.0, abs=1e-12)
        assert np.all(d.demands >= 0)


class TestInverse:
    @pytest.mark.parametrize("theta,q,p", [([0.0], [0.5], [0.0]), ([1.0], [0.5], [1.0])])
    def test_examples(self, theta, q, p):
        c = cat(*theta)
        out = price_from_demand(c, full(c), DemandVector(q, 1 - sum(q)))
        np.testing.assert_allclose(out.prices, p, atol=1e-15)

    def test_round_trip_example(self):
        c = ProductCatalog([("a", 2.0), ("b", 1.0)])
        d = mnl_demand(c, full(c), [1.3, 0.7])
        np.testing.assert_allclose(price_from_demand(c, full(c), d).prices, [1.3, 0.7], atol=1e-12)

    @pytest.mark.parametrize("q", [[0.0, 0.3], [0.6, 0.5], [-0.1, 0.2]])
    def test_rejects_infeasible_mass(self, q):
        c = cat(1.0, 1.0)
        with pytest.raises(DomainError):
            price_from_demand(c, full(c), DemandVector(q, 1 - sum(q)))

    def test_rejects_negative_implied_price(self):
        c = cat(0.0)
        with pytest.raises(DomainError):
            price_from_demand(c, full(c), DemandVector([0.9], 0.1))
        assert not is_feasible(c, full(c), DemandVector([0.9], 0.1))
        assert is_feasible(c, full(c), DemandVector([0.4], 0.6))

    @given(qualities, st.data())
    def test_duality(self, theta, data):
        c = ProductCatalog.from_qualities(theta)
        p = data.draw(st.lists(st.floats(0, 25), min_size=len(c), max_size=len(c)))
        d = mnl_demand(c, full(c), p)
        back = price_from_demand(c, full(c), d)
        np.testing.assert_allclose(back.prices, p, rtol=0, atol=1e-10)
        again = mnl_demand(c, full(c), back)
        np.testing.assert_allclose(again.demands, d.demands, rtol=0, atol=1e-10)


class TestObjectives:
    def test_buyer_utility_examples(self):
        assert buyer_utility(cat(1.0), DisplaySet(()), []) == 0.0
        c = cat(0.0)
        assert buyer_utility(c, full(c), [0.0]) == pytest.approx(math.log(2), abs=1e-15)
        c = cat(1.0, 1.0)
        assert buyer_utility(c, full(c), [1.0, 1.0]) == pytest.approx(math.log(3), abs=1e-15)

    def test_welfare_examples(self):
        c = cat(1.0)
        assert social_welfare(c, full(c), [1.0]) == pytest.approx(math.log(2) + 0.5, abs=1e-15)
        assert social_welfare(c, DisplaySet(()), []) == 0.0
        c = cat(1.0, 2.0)
        assert social_welfare(c, full(c), [0, 0]) == pytest.approx(math.log(1 + math.e + math.e**2))

    def test_revenue_examples(self):
        c = cat(1.0)
        assert total_revenue(c, full(c), [1.0]) == pytest.approx(0.5, abs=1e-15)
        c = cat(0.0, 0.0)
        expected = (math.exp(-1) + 2 * math.exp(-2)) / (1 + math.exp(-1) + math.exp(-2))
        assert total_revenue(c, full(c), [1.0, 2.0]) == pytest.approx(expected, abs=1e-15)
        assert round(expected, 5) == 0.42479
        assert total_revenue(c, full(c), [0.0, 0.0]) == 0.0

    def test_seller_revenue_requires_display(self):
        c = cat(1.0, 2.0)
        with pytest.raises(DomainError):
            seller_revenue(1, c, DisplaySet((0,)), [1.0])

    @given(qualities, st.data())
    def test_welfare_decomposition(self, theta, data):
        c = ProductCatalog.from_qualities(theta)
        p = data.draw(st.lists(st.floats(0, 25), min_size=len(c), max_size=len(c)))
        d = full(c)
        gap = social_welfare(c, d, p) - buyer_utility(c, d, p)
        assert gap == pytest.approx(total_revenue(c, d, p), abs=1e-12)
        parts = math.fsum(seller_revenue(r, c, d, p) for r in d)
        assert parts == pytest.approx(total_revenue(c, d, p), abs=1e-12)


class TestConfig:
    @pytest.mark.parametrize("field", ["residual_tol", "step_tol", "dynamics_tol"])
    def test_positive_tolerances(self, field):
        with pytest.raises(DomainError):
            SolverConfig(**{field: 0.0})

    def test_iteration_caps(self):
        with pytest.raises(DomainError):
            SolverConfig(max_scalar_iters=0)
