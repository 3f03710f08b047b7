"""Allocation, payment, utility and revenue rules.

Bidder i receives the share a_i(b) = f(b_i) / sum_j f(b_j), pays their own
bid times that share, and earns utility (v_i - b_i) * a_i(b). Shares are
computed from log weights normalized against the largest one, so arbitrarily
steep exponential weights never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weights import WeightSpec, log_weight


class DegenerateBidsError(ValueError):
    """All bids are zero, so allocation shares are undefined."""


@dataclass(frozen=True)
class ValuationProfile:
    """Private values v_1..v_n, one per bidder; n >= 2, all positive."""

    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) < 2:
            raise ValueError(f"need at least two bidders, got {len(values)}")
        if any(not np.isfinite(v) or v <= 0.0 for v in values):
            raise ValueError("every private value must be positive and finite")
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return len(self.values)

    def as_array(self):
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class BidVector:
    """Nonnegative bids b_1..b_n; bounds against values are checked where
    a pairing with a profile is required."""

    bids: tuple

    def __post_init__(self):
        bids = tuple(float(b) for b in self.bids)
        if not bids:
            raise ValueError("empty bid vector")
        if any(not np.isfinite(b) or b < 0.0 for b in bids):
            raise ValueError("every bid must be nonnegative and finite")
        object.__setattr__(self, "bids", bids)

    @property
    def n(self):
        return len(self.bids)

    def as_array(self):
        return np.asarray(self.bids, dtype=float)


@dataclass(frozen=True)
class AuctionOutcome:
    """Cleared auction: shares sum to one, payment_i = b_i * a_i,
    utility_i = (v_i - b_i) * a_i, revenue = sum of payments."""

    allocations: tuple
    payments: tuple
    utilities: tuple
    revenue: float


def as_bid_vector(bids):
    return bids if isinstance(bids, BidVector) else BidVector(tuple(bids))


def as_profile(values):
    return values if isinstance(values, ValuationProfile) else ValuationProfile(tuple(values))


def normalized_shares(log_weights):
    """Shares exp(lw_i - max) / denom with the denominator summed over the
    sorted terms along the last axis.

    The canonical summation order makes shares exactly symmetric under
    permutations of the bids (swapping two bids swaps the two shares
    bit-for-bit). Rows that are all -inf are rejected by callers.
    """
    lw = np.asarray(log_weights, dtype=float)
    m = np.max(lw, axis=-1, keepdims=True)
    w = np.exp(lw - m)
    denom = np.sum(np.sort(w, axis=-1), axis=-1, keepdims=True)
    return w / denom


def allocate(spec: WeightSpec, bids):
    """Allocation shares f(b_i) / sum_j f(b_j) for one bid vector.

    Raises DegenerateBidsError when every bid is zero.
    """
    b = as_bid_vector(bids).as_array()
    lw = np.asarray(log_weight(spec, b), dtype=float)
    if np.all(np.isneginf(lw)):
        raise DegenerateBidsError("all bids are zero; allocation shares are undefined")
    return normalized_shares(lw)


def settle(spec: WeightSpec, profile, bids) -> AuctionOutcome:
    """Clear the auction: allocations, payments, utilities and revenue."""
    profile = as_profile(profile)
    bid_vec = as_bid_vector(bids)
    if bid_vec.n != profile.n:
        raise ValueError(
            f"bid vector has {bid_vec.n} entries but profile has {profile.n} bidders")
    a = allocate(spec, bid_vec)
    b = bid_vec.as_array()
    v = profile.as_array()
    payments = b * a
    utilities = (v - b) * a
    return AuctionOutcome(
        allocations=tuple(float(x) for x in a),
        payments=tuple(float(x) for x in payments),
        utilities=tuple(float(x) for x in utilities),
        revenue=float(np.sum(payments)),
    )
