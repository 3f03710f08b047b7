"""Allocation, settlement, and their symmetry/stability properties."""

import math

import numpy as np
import pytest

from qpauctions import (AuctionOutcome, BidVector, DegenerateBidsError,
                        Exponential, Polynomial, Power, ValuationProfile,
                        allocate, settle)

from oracles import SYMMETRIC_EXP_C2_BID


class TestTypes:
    def test_profile_validation(self):
        with pytest.raises(ValueError):
            ValuationProfile((1.0,))
        with pytest.raises(ValueError):
            ValuationProfile((1.0, 0.0))
        with pytest.raises(ValueError):
            ValuationProfile((1.0, -2.0))
        assert ValuationProfile((2, 1)).values == (2.0, 1.0)

    def test_bid_validation(self):
        with pytest.raises(ValueError):
            BidVector(())
        with pytest.raises(ValueError):
            BidVector((0.5, -0.1))
        with pytest.raises(ValueError):
            BidVector((0.5, math.nan))
        assert BidVector((0, 1)).bids == (0.0, 1.0)


class TestAllocate:
    def test_symmetric_split(self):
        for x in (0.3, 1.0, 5.0):
            a = allocate(Exponential(1.0), (x, x))
            np.testing.assert_allclose(a, [0.5, 0.5], rtol=1e-14)

    def test_known_shares(self):
        a = allocate(Exponential(1.0), (math.log(3.0), math.log(2.0)))
        np.testing.assert_allclose(a, [2.0 / 3.0, 1.0 / 3.0], rtol=1e-14)

    def test_single_positive_bid(self):
        a = allocate(Power(1.0), (1.0, 0.0, 0.0))
        assert a.tolist() == [1.0, 0.0, 0.0]

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateBidsError):
            allocate(Power(1.0), (0.0, 0.0))

    def test_simplex(self):
        rng = np.random.default_rng(21)
        specs = [Exponential(0.5), Exponential(30.0), Power(0.7), Power(4.0),
                 Polynomial((1.0, 0.5))]
        for _ in range(500):
            n = int(rng.integers(2, 8))
            bids = rng.uniform(0.0, 5.0, size=n)
            bids[int(rng.integers(n))] = rng.uniform(0.1, 5.0)  # ensure one positive
            a = allocate(specs[int(rng.integers(len(specs)))], bids)
            assert np.all(a >= 0.0)
            assert abs(a.sum() - 1.0) < 1e-12

    def test_swap_symmetry_exact(self):
        # swapping two bids swaps the two shares bit-for-bit
        rng = np.random.default_rng(22)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            bids = rng.uniform(0.0, 3.0, size=n)
            bids[0] = rng.uniform(0.5, 3.0)
            spec = Exponential(float(rng.uniform(0.2, 20.0)))
            i, j = rng.choice(n, size=2, replace=False)
            a = allocate(spec, bids)
            swapped = bids.copy()
            swapped[[i, j]] = swapped[[j, i]]
            a2 = allocate(spec, swapped)
            assert a2[i] == a[j] and a2[j] == a[i]
            keep = [k for k in range(n) if k not in (i, j)]
            assert np.array_equal(a2[keep], a[keep])

    def test_strictly_monotone_in_own_bid(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            bids = rng.uniform(0.1, 2.0, size=n)
            spec = Power(float(rng.uniform(0.3, 4.0)))
            i = int(rng.integers(n))
            a_before = allocate(spec, bids)[i]
            bids[i] += 0.1
            a_after = allocate(spec, bids)[i]
            assert a_after > a_before

    def test_power_scale_invariance(self):
        rng = np.random.default_rng(24)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            bids = rng.uniform(0.1, 2.0, size=n)
            spec = Power(float(rng.uniform(0.3, 5.0)))
            lam = float(rng.uniform(0.2, 8.0))
            np.testing.assert_allclose(
                allocate(spec, lam * bids), allocate(spec, bids), rtol=1e-12)

    def test_exponential_not_scale_invariant(self):
        a1 = allocate(Exponential(1.0), (1.0, 2.0))
        a2 = allocate(Exponential(1.0), (2.0, 4.0))
        assert abs(a1[0] - a2[0]) > 0.05

    def test_steep_exponential_no_overflow(self):
        # shares at c = 1000 match the shifted-log hand computation
        a = allocate(Exponential(1000.0), (1.0, 0.999))
        r = math.exp(-1.0)  # weight ratio f(0.999)/f(1.0) to double precision
        np.testing.assert_allclose(a, [1.0 / (1.0 + r), r / (1.0 + r)], rtol=1e-9)
        assert np.all(np.isfinite(a))
        assert abs(a.sum() - 1.0) < 1e-12


class TestSettle:
    def test_linear_weight_example(self):
        out = settle(Power(1.0), (2.0, 1.0), (1.0, 0.5))
        np.testing.assert_allclose(out.allocations, [2.0 / 3.0, 1.0 / 3.0], rtol=1e-14)
        np.testing.assert_allclose(out.utilities, [2.0 / 3.0, 1.0 / 6.0], rtol=1e-14)
        assert out.revenue == pytest.approx(5.0 / 6.0, rel=1e-14)

    def test_bidding_value_gives_zero_utility(self):
        for spec in (Exponential(2.0), Power(0.5), Polynomial((1.0, 1.0))):
            out = settle(spec, (3.0, 1.0), (3.0, 0.0))
            assert out.utilities[0] == 0.0

    def test_symmetric_exponential_equilibrium_revenue(self):
        b = SYMMETRIC_EXP_C2_BID
        out = settle(Exponential(2.0), (1.0, 1.0), (b, b))
        assert out.revenue == pytest.approx(b, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            settle(Power(1.0), (1.0, 1.0), (0.5, 0.5, 0.5))

    def test_revenue_bounded_by_max_bid(self):
        rng = np.random.default_rng(25)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            v = rng.uniform(0.5, 4.0, size=n)
            bids = rng.uniform(0.0, 1.0, size=n) * v
            if not np.any(bids > 0):
                bids[0] = v[0] / 2
            out = settle(Exponential(2.0), v, bids)
            assert out.revenue <= np.max(bids) + 1e-12
            assert isinstance(out, AuctionOutcome)

    def test_payments_and_utilities_definition(self):
        rng = np.random.default_rng(26)
        v = rng.uniform(1.0, 3.0, size=4)
        bids = rng.uniform(0.1, 1.0, size=4)
        out = settle(Power(2.0), v, bids)
        a = np.asarray(out.allocations)
        np.testing.assert_allclose(out.payments, bids * a, rtol=1e-15)
        np.testing.assert_allclose(out.utilities, (v - bids) * a, rtol=1e-15)
        assert out.revenue == pytest.approx(np.sum(bids * a), rel=1e-15)

    def test_bids_above_value_allowed_here(self):
        out = settle(Power(1.0), (1.0, 1.0), (1.5, 0.5))
        assert out.utilities[0] < 0.0
