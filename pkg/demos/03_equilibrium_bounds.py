"""Walkthrough: equilibrium characterization and bid lower bounds.

At an interior equilibrium every bid satisfies a first-order equation;
``char_residual`` measures the deviation from it, so a dynamics fixed point
should drive the residual to zero. A self-supporting vector of lower
bounds w guarantees that best responses never drop below w, which makes
the box [w_i, v_i]^n invariant; ``box_mapping_probe`` tests that on
sampled bid vectors.
"""

import numpy as np

from qpauctions import (Exponential, ValuationProfile, bid_lower_bounds,
                        bound_condition, box_mapping_probe, char_residual,
                        run_dynamics)

# --- the characterization residual at and away from equilibrium --------------
spec = Exponential(1.5)
profile = ValuationProfile((2.0, 1.0, 1.0))

trace = run_dynamics(spec, profile)
print("dynamics residual:", trace.residual)
print("characterization residual at the fixed point:",
      np.round(char_residual(spec, profile, trace.final), 12))

off = (0.9, 0.5, 0.5)
print("characterization residual away from it:",
      np.round(char_residual(spec, profile, off), 4))

# --- canonical lower bounds ---------------------------------------------------
# With values sorted descending, everyone gets v_i - 2/c except the top
# bidder, who inherits the runner-up's bound. Clamped at zero when the
# steepness is too small for the bound to bite.
for c in (4.0, 1.5, 0.8):
    bounds = bid_lower_bounds(profile, c)
    print(f"\nc={c}: bounds={np.round(bounds.bounds, 4)} "
          f"premise_ok={bounds.premise_ok} degenerate={bounds.degenerate}")
    if bounds.premise_ok:
        cond = bound_condition(Exponential(c), profile, bounds.bounds)
        print("  condition per bidder:", list(cond))

# --- the box-mapping probe ------------------------------------------------------
# Sample bids uniformly from the box, best-respond, count drops below w.
bounds = bid_lower_bounds(profile, 4.0)
report = box_mapping_probe(Exponential(4.0), profile, bounds, samples=2000, seed=0)
print("\nprobe with 2000 samples:", report)
print("zero violations = the box maps into itself on every draw")

# The dynamics fixed point for the same steepness sits inside the box.
trace4 = run_dynamics(Exponential(4.0), profile)
inside = np.all(np.asarray(trace4.final.bids) >= bounds.as_array() - 1e-12)
print("fixed point for c=4 respects its bounds:", bool(inside))
