"""Acceptance suite: one test per criterion, each printed as a pass/fail
line (run with ``pytest -s tests/test_acceptance.py`` to see them).

The expensive fixtures are the full two-bidder sweep over the standard
alpha grid and the ten-bidder sweep over the grid extended to alpha = 200;
both run once per session and several criteria read from them.
"""

import time

import numpy as np
import pytest

from qpauctions import (Exponential, Power, ResponseProblem, ValuationProfile,
                        allocate, alpha_grid, best_response, bid_lower_bounds,
                        box_mapping_probe, default_steepness_grid, run_dynamics,
                        run_full_experiment, settle, weight_eval)
from qpauctions.experiments import steepness_resolution
from qpauctions.weights import log_weight

from oracles import (SYMMETRIC_EXP_C2_BID, grid_search_best_response, utility)

EXTENDED_ALPHAS = (120.0, 140.0, 160.0, 180.0, 200.0)


def _report(num, ok, detail):
    print(f"acceptance {num:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def n2_experiment():
    t0 = time.perf_counter()
    experiment = run_full_experiment(2)
    return experiment, time.perf_counter() - t0


@pytest.fixture(scope="module")
def n10_experiment():
    t0 = time.perf_counter()
    experiment = run_full_experiment(10, alphas=alpha_grid() + EXTENDED_ALPHAS)
    return experiment, time.perf_counter() - t0


def test_01_closed_form_equilibrium_oracles():
    t0 = time.perf_counter()
    linear = run_dynamics(Power(1.0), ValuationProfile((1.0, 1.0)))
    t_linear = time.perf_counter() - t0
    rev_linear = settle(Power(1.0), (1.0, 1.0), linear.final).revenue
    t0 = time.perf_counter()
    expo = run_dynamics(Exponential(2.0), ValuationProfile((1.0, 1.0)))
    t_expo = time.perf_counter() - t0
    bids_ok = (max(abs(b - 1.0 / 3.0) for b in linear.final.bids) < 1e-9
               and abs(rev_linear - 1.0 / 3.0) < 1e-9)
    expo_ok = max(abs(b - SYMMETRIC_EXP_C2_BID) for b in expo.final.bids) < 1e-9
    timing_ok = t_linear < 1.0 and t_expo < 1.0
    _report(1, bids_ok and expo_ok and timing_ok,
            f"linear-weight bids -> 1/3 (rev {rev_linear:.12f}), exponential bids -> "
            f"{SYMMETRIC_EXP_C2_BID:.10f}; {t_linear:.2f}s/{t_expo:.2f}s")


def test_02_best_response_matches_grid_search():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for family in ("exp", "pow"):
        for _ in range(100):
            par = float(np.exp(rng.uniform(np.log(0.1), np.log(50.0))))
            spec = Exponential(par) if family == "exp" else Power(par)
            v = float(rng.uniform(0.5, 10.0))
            rivals = rng.uniform(0.05, 1.0, size=int(rng.integers(1, 4))) * v
            s = float(np.sum(weight_eval(spec, rivals)))
            b = best_response(ResponseProblem(spec, v, s))
            oracle = grid_search_best_response(spec, v, s)
            worst = max(worst, abs(b - oracle) / v)
    elapsed = time.perf_counter() - t0
    _report(2, worst < 1e-5 and elapsed < 30.0,
            f"200 instances, worst |bisect - grid|/v = {worst:.2e}, {elapsed:.1f}s")


def test_03_characterization_residual_and_convergence(n2_experiment, n10_experiment):
    exp2, _ = n2_experiment
    exp10, _ = n10_experiment
    default_alphas = set(alpha_grid())
    base2 = [p for p in exp2.grid_points if p.stage == "grid"]
    base10 = [p for p in exp10.grid_points
              if p.stage == "grid" and p.alpha in default_alphas]
    conv_share2 = sum(p.converged for p in base2) / len(base2)
    conv_share10 = sum(p.converged for p in base10) / len(base10)
    nonconverged = ([p for p in base2 if not p.converged]
                    + [p for p in base10 if not p.converged])
    for p in nonconverged:
        print(f"  nonconverged: n? alpha={p.alpha} {p.family} "
              f"steepness={p.steepness:.6g} residual={p.residual:.3e}")
    worst_char = max(p.char_residual_max
                     for p in exp2.grid_points + exp10.grid_points if p.converged)
    ok = conv_share2 >= 0.99 and conv_share10 >= 0.99 and worst_char < 1e-8
    _report(3, ok,
            f"converged {conv_share2:.1%} (n=2) / {conv_share10:.1%} (n=10) of "
            f"default grid points, {len(nonconverged)} listed above; worst "
            f"characterization residual at converged points {worst_char:.2e}")


def test_04_box_mapping_probe_clean():
    t0 = time.perf_counter()
    reports = []
    profile = ValuationProfile((2.0, 1.0))
    reports.append(box_mapping_probe(
        Exponential(4.0), profile, bid_lower_bounds(profile, 4.0),
        samples=1000, seed=0))
    rng = np.random.default_rng(404)
    found = 0
    attempts = 0
    while found < 20:
        attempts += 1
        assert attempts < 2000, "could not find 20 self-supporting bound vectors"
        n = int(rng.integers(2, 7))
        v = rng.uniform(0.5, 10.0, size=n)
        c = float(np.exp(rng.uniform(np.log(0.3), np.log(20.0))))
        bounds = bid_lower_bounds(v, c)
        if not bounds.premise_ok:
            continue
        found += 1
        reports.append(box_mapping_probe(
            Exponential(c), ValuationProfile(tuple(v)), bounds,
            samples=1000, seed=1000 + found))
    elapsed = time.perf_counter() - t0
    violations = sum(r.violations for r in reports)
    worst = min(r.worst_margin for r in reports)
    _report(4, violations == 0 and elapsed < 60.0,
            f"{len(reports)} probes x 1000 samples: {violations} violations, "
            f"worst margin {worst:.3e}, {elapsed:.1f}s")


def test_05_two_bidder_revenue_crossover(n2_experiment):
    experiment, seconds = n2_experiment
    dominance = all(
        experiment.row(a, "exp").revenue > experiment.row(a, "pow").revenue
        for a in experiment.alphas if a <= 60.0)
    brackets = experiment.revenue_crossovers
    bracket_ok = (len(brackets) == 1
                  and 60.0 <= brackets[0][0] < brackets[0][1] <= 80.0)
    _report(5, dominance and bracket_ok and seconds < 300.0,
            f"exp > pow for every alpha <= 60; sign change bracketed in "
            f"{brackets}; sweep took {seconds:.0f}s")


def test_06_ten_bidder_dominance_and_late_crossover(n10_experiment):
    experiment, seconds = n10_experiment
    dominance = all(
        experiment.row(a, "exp").revenue > experiment.row(a, "pow").revenue
        for a in experiment.alphas if a <= 100.0)
    brackets = experiment.revenue_crossovers
    bracket_ok = (len(brackets) == 1
                  and 100.0 < brackets[0][0] < brackets[0][1] < 200.0)
    _report(6, dominance and bracket_ok and seconds < 900.0,
            f"exp > pow for every alpha <= 100; crossover bracketed in "
            f"{brackets} within (100, 200); sweep took {seconds:.0f}s")


def test_07_optimal_steepness_monotone_in_alpha(n2_experiment, n10_experiment):
    slack = 1.0 + 2.0 * steepness_resolution(default_steepness_grid())
    worst = []
    for experiment, label in ((n2_experiment[0], "n=2"), (n10_experiment[0], "n=10")):
        for family in ("exp", "pow"):
            series = [s for _, s in experiment.best_steepness_series(family)]
            ok = all(nxt <= prev * slack for prev, nxt in zip(series, series[1:]))
            if not ok:
                worst.append((label, family))
    _report(7, not worst,
            f"best steepness non-increasing in alpha for both families and "
            f"both bidder counts (ties within {slack - 1.0:.2%}); "
            f"violations: {worst or 'none'}")


def test_08_bid_gap_crossover(n2_experiment):
    experiment, _ = n2_experiment
    brackets = experiment.bid_gap_crossovers
    ok = len(brackets) == 1 and 30.0 <= brackets[0][0] < brackets[0][1] <= 70.0
    _report(8, ok,
            f"|high bid - low bid| difference between families changes sign "
            f"exactly once, bracketed in {brackets}")


def test_09_ten_bidder_steepness_below_two_bidder(n2_experiment, n10_experiment):
    best2 = dict(n2_experiment[0].best_steepness_series("exp"))
    best10 = dict(n10_experiment[0].best_steepness_series("exp"))
    bad = [a for a in alpha_grid() if not best10[a] < best2[a]]
    ratios = [best10[a] / best2[a] for a in alpha_grid()]
    _report(9, not bad,
            f"best exponential steepness for ten bidders below two bidders at "
            f"all 54 grid alphas (ratio range {min(ratios):.2f}-{max(ratios):.2f}); "
            f"violations: {bad or 'none'}")


def test_10a_simplex_and_swap_on_random_instances():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    specs = [Exponential(0.5), Exponential(5.0), Exponential(50.0),
             Power(0.5), Power(2.0), Power(8.0)]
    worst_gap = 0.0
    for _ in range(10_000):
        spec = specs[int(rng.integers(len(specs)))]
        n = int(rng.integers(2, 7))
        bids = rng.uniform(0.0, 3.0, size=n)
        bids[int(rng.integers(n))] = rng.uniform(0.2, 3.0)
        a = allocate(spec, bids)
        assert np.all(a >= 0.0)
        worst_gap = max(worst_gap, abs(float(a.sum()) - 1.0))
        i, j = rng.choice(n, size=2, replace=False)
        swapped = bids.copy()
        swapped[[i, j]] = swapped[[j, i]]
        a2 = allocate(spec, swapped)
        assert a2[i] == a[j] and a2[j] == a[i]
    elapsed = time.perf_counter() - t0
    _report(10, worst_gap < 1e-12 and elapsed < 30.0,
            f"(a) simplex within {worst_gap:.1e} and exact swap symmetry on "
            f"10,000 instances, {elapsed:.1f}s")


def test_10b_single_peak_condition_on_grids():
    t0 = time.perf_counter()
    params = np.geomspace(0.1, 100.0, 120)
    xs = np.geomspace(1e-4, 10.0, 120)[None, :]
    c = params[:, None]
    # exponential: log f + log f'' < log 2 + 2 log f', all positive
    lhs = np.array([log_weight(Exponential(ci), xs[0]) for ci in params])
    lhs += 2.0 * np.log(c) + c * xs
    rhs = np.log(2.0) + 2.0 * (np.log(c) + c * xs)
    exp_ok = np.all(lhs < rhs)
    # power: f'' <= 0 for p <= 1; otherwise compare in log space
    p = params[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        lhs_pow = (np.log(p * np.maximum(p - 1.0, 0.0)) + (2.0 * p - 2.0) * np.log(xs))
    rhs_pow = np.log(2.0) + 2.0 * (np.log(p) + (p - 1.0) * np.log(xs))
    pow_ok = np.all(np.where(p <= 1.0, True, lhs_pow < rhs_pow))
    elapsed = time.perf_counter() - t0
    _report(10, bool(exp_ok and pow_ok) and elapsed < 30.0,
            f"(b) f f'' < 2 f'^2 on 120x120 log grids for both families, {elapsed:.1f}s")


def test_10c_unimodality_witness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1234)
    for _ in range(200):
        par = float(np.exp(rng.uniform(np.log(0.1), np.log(50.0))))
        spec = Exponential(par) if rng.integers(2) == 0 else Power(par)
        v = float(rng.uniform(0.5, 10.0))
        s = weight_eval(spec, float(rng.uniform(0.05, 0.95)) * v)
        bids = np.linspace(0.0, v, 10_000)
        us = utility(spec, v, s, bids)
        inner = us[1:-1]
        count = int(np.count_nonzero((inner > us[:-2]) & (inner > us[2:])))
        assert count == 1, f"{spec} v={v} s={s}: {count} strict local maxima"
    elapsed = time.perf_counter() - t0
    _report(10, elapsed < 30.0,
            f"(c) exactly one strict interior maximum on 200 response curves "
            f"sampled at 10,000 points, {elapsed:.1f}s")


def test_10d_scale_invariance_contrast():
    rng = np.random.default_rng(55)
    for _ in range(200):
        n = int(rng.integers(2, 6))
        bids = rng.uniform(0.1, 2.0, size=n)
        lam = float(rng.uniform(0.2, 8.0))
        spec = Power(float(rng.uniform(0.3, 6.0)))
        np.testing.assert_allclose(allocate(spec, lam * bids),
                                   allocate(spec, bids), rtol=1e-12)
    witness_before = allocate(Exponential(1.0), (1.0, 2.0))
    witness_after = allocate(Exponential(1.0), (2.0, 4.0))
    contrast = abs(witness_after[0] - witness_before[0])
    _report(10, contrast > 0.01,
            f"(d) power shares scale-invariant (rel 1e-12); exponential witness "
            f"moves by {contrast:.3f} under doubling")


def test_10e_overflow_free_steep_allocation():
    a = allocate(Exponential(1000.0), (1.0, 0.999))
    r = np.exp(-1.0)
    expected = np.array([1.0 / (1.0 + r), r / (1.0 + r)])
    ok = bool(np.all(np.isfinite(a)) and np.max(np.abs(a - expected)) < 1e-9)
    _report(10, ok,
            f"(e) allocation at steepness 1000 finite and within "
            f"{np.max(np.abs(a - expected)):.1e} of the shifted-log value")
