"""Independent oracles shared by the test modules.

Everything here deliberately avoids the library's log-space machinery:
utilities are evaluated with raw weight formulas and maximizers are located
by plain grid search, so these paths can cross-check the bisection-based
implementation.
"""

import numpy as np

from qpauctions import weight_eval

# Root of b * e^(2b) = 1, i.e. half the principal branch value of the
# product-log at 2; frozen from a 200-step bisection on [0, 1] (and equal,
# to the last digit, to scipy.special.lambertw(2)/2). This is the symmetric
# two-bidder fixed point for the exponential weight with c = 2 and unit
# values: b = e^(-2b).
SYMMETRIC_EXP_C2_BID = 0.42630275100686277

# Closed-form best response for f(x) = x, v = 1, s = 0.5: the positive root
# of b^2 + 2 s b - v s = 0.
POWER_P1_V1_S05_BID = -0.5 + np.sqrt(0.75)


def utility(spec, value, rival_sum, bid):
    """(v - b) f(b) / (f(b) + s) with raw weights; fine away from overflow."""
    f = weight_eval(spec, bid)
    return (value - bid) * f / (f + rival_sum)


def grid_search_best_response(spec, value, rival_sum, coarse_points=10_001,
                              fine_resolution=1e-7):
    """Maximize the utility by exhaustive search at 1e-7 * v resolution.

    A coarse pass at 1e-4 * v resolution locates the peak, then the two
    neighboring cells are searched at the fine resolution; with a single
    interior maximum this finds the same argmax as a full fine grid.
    """
    bids = np.linspace(0.0, value, coarse_points)
    us = utility(spec, value, rival_sum, bids)
    k = int(np.argmax(us))
    lo = bids[max(k - 1, 0)]
    hi = bids[min(k + 1, coarse_points - 1)]
    count = int(np.ceil((hi - lo) / (fine_resolution * value))) + 1
    fine = np.linspace(lo, hi, count)
    uf = utility(spec, value, rival_sum, fine)
    return float(fine[int(np.argmax(uf))])


def bisect_root(fn, lo, hi, iters=200):
    """Plain bisection for a sign change of fn on [lo, hi]."""
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def symmetric_exp_fixed_point(c, n=2, value=1.0):
    """Symmetric equilibrium bid for exponential steepness c: with every
    share at 1/n, the first-order condition reads
    b = v - (1/c) (1 - e^(-c b)) * n/(n-1)."""
    factor = n / (n - 1.0)

    def residual(b):
        return b - (value - (1.0 - np.exp(-c * b)) * factor / c)

    return bisect_root(residual, 0.0, value)


def symmetric_power_fixed_point(p, n=2, value=1.0):
    """Symmetric equilibrium bid for power exponent p: v / (1 + n/(p(n-1)))."""
    return value / (1.0 + n / (p * (n - 1.0)))
