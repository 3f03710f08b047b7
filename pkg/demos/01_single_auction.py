"""Walkthrough: weight families and settling a single auction.

A quasi-proportional auction gives bidder i the share
f(b_i) / sum_j f(b_j) of the good, where f is a weight function chosen by
the auctioneer, and charges everyone their own bid times their share.
This script evaluates the three supported weight families and settles a
small auction under each of them.
"""

import numpy as np

from qpauctions import (Exponential, Polynomial, Power, allocate, settle,
                        weight_deriv, weight_eval)

# --- the weight families ---------------------------------------------------
# All of them vanish at zero and increase strictly: a zero bid gets nothing,
# higher bids get more. The steepness parameter (c or p) controls how hard
# the mechanism favors the highest bid.

exp_spec = Exponential(c=2.0)      # f(x) = e^(2x) - 1
pow_spec = Power(p=2.0)            # f(x) = x^2
poly_spec = Polynomial((1.0, 0.5))  # f(x) = x + 0.5 x^2

xs = np.array([0.0, 0.25, 0.5, 1.0, 2.0])
print("x        ", "  ".join(f"{x:8.2f}" for x in xs))
for name, spec in [("exp c=2", exp_spec), ("pow p=2", pow_spec), ("poly", poly_spec)]:
    print(f"{name:9s}", "  ".join(f"{weight_eval(spec, x):8.4f}" for x in xs))

# Derivatives are analytic, no finite differences anywhere.
print("\nf'(1) per family:",
      {name: round(weight_deriv(spec, 1.0), 4)
       for name, spec in [("exp", exp_spec), ("pow", pow_spec), ("poly", poly_spec)]})

# --- allocation is a weighted share ----------------------------------------
bids = (1.0, 0.8, 0.3)
for name, spec in [("exp c=2", exp_spec), ("pow p=2", pow_spec)]:
    shares = allocate(spec, bids)
    print(f"\nshares under {name} at bids {bids}: {np.round(shares, 4)}")
    print("  sum:", shares.sum())

# Steeper weights concentrate the allocation on the top bid.
for c in (0.5, 2.0, 10.0, 50.0):
    shares = allocate(Exponential(c), bids)
    print(f"c={c:5.1f}  top-bidder share {shares[0]:.4f}")

# --- settlement: payments, utilities, revenue -------------------------------
values = (2.0, 1.5, 1.0)
outcome = settle(exp_spec, values, bids)
print("\nsettlement under exp c=2 with values", values, "and bids", bids)
print("  allocations:", np.round(outcome.allocations, 4))
print("  payments:   ", np.round(outcome.payments, 4))
print("  utilities:  ", np.round(outcome.utilities, 4))
print("  revenue:    ", round(outcome.revenue, 4))

# Every positive-share bidder pays bid * share, so revenue never exceeds the
# highest bid, and a bidder who bids their full value walks away with zero.
zero_utility = settle(exp_spec, (2.0, 1.0), (2.0, 0.5))
print("\nbidding one's value earns nothing:", zero_utility.utilities[0])
