"""Walkthrough: response curves, best responses, and dynamics.

Against fixed rival bids a bidder's utility (v - b) f(b) / (f(b) + s) is
zero at b = 0 and b = v with a single hump in between; the best response is
the hump's peak. Iterating everyone's best response simultaneously
(b^(k+1) = BR(b^k)) from a flat start drives the bids to a fixed point --
a pure-strategy equilibrium candidate.
"""

from pathlib import Path

import numpy as np

from qpauctions import (Exponential, Power, ResponseProblem, ValuationProfile,
                        best_response, run_dynamics, settle, weight_eval)

OUT_DIR = Path(__file__).parent / "output"
OUT_DIR.mkdir(exist_ok=True)

# --- a single bidder's problem ----------------------------------------------
# Linear weights, value 1, rival weight mass 0.5: the first-order condition
# b^2 + 2 s b - v s = 0 has the closed-form root -s + sqrt(s^2 + v s).
problem = ResponseProblem(Power(1.0), value=1.0, rival_weight_sum=0.5)
b_star = best_response(problem)
print("best response:", b_star)
print("closed form:  ", -0.5 + np.sqrt(0.75))

# --- dynamics reach known fixed points ---------------------------------------
# Two symmetric bidders, linear weights: the fixed point is b = 1/3 each.
profile = ValuationProfile((1.0, 1.0))
trace = run_dynamics(Power(1.0), profile)
print("\nlinear weights, v=(1,1):")
print("  final bids:", trace.final.bids)
print("  residual:  ", trace.residual)
print("  revenue:   ", settle(Power(1.0), profile, trace.final).revenue, "(= 1/3)")

# Exponential c=2: the symmetric fixed point solves b = e^(-2b).
trace_exp = run_dynamics(Exponential(2.0), profile)
b = trace_exp.final.bids[0]
print("\nexponential c=2, v=(1,1):")
print("  final bid:", b, " check b*e^(2b) =", b * np.exp(2 * b), "(= 1)")

# --- convergence is fast from the flat start ---------------------------------
steps = [np.max(np.abs(np.subtract(a.bids, b.bids)))
         for a, b in zip(trace_exp.iterates, trace_exp.iterates[1:])]
print("\nsup-norm steps, first 8 rounds:", [f"{s:.2e}" for s in steps[:8]])

# --- asymmetric values: the strong bidder shades, the weak bidder fights -----
profile2 = ValuationProfile((3.0, 1.0))
for c in (0.5, 2.0, 8.0):
    tr = run_dynamics(Exponential(c), profile2)
    out = settle(Exponential(c), profile2, tr.final)
    print(f"c={c:4.1f}  bids=({tr.final.bids[0]:.4f}, {tr.final.bids[1]:.4f})  "
          f"top share={out.allocations[0]:.4f}  revenue={out.revenue:.4f}")

# --- picture: response curve and the located maximum -------------------------
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
else:
    spec = Exponential(2.0)
    v, rival_bid = 1.0, 0.4
    s = weight_eval(spec, rival_bid)
    bids = np.linspace(0.0, v, 400)
    f = weight_eval(spec, bids)
    utils = (v - bids) * f / (f + s)
    br = best_response(ResponseProblem(spec, v, s))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(bids, utils, label="utility (v - b) f(b) / (f(b) + s)")
    ax.axvline(br, color="crimson", ls="--", label=f"best response {br:.3f}")
    ax.set_xlabel("own bid")
    ax.set_ylabel("utility")
    ax.set_title("response curve: exponential c=2, v=1, rival at 0.4")
    ax.legend()
    fig.tight_layout()
    target = OUT_DIR / "response_curve.png"
    fig.savefig(target, dpi=120)
    print(f"\nwrote {target}")
