"""Steepness sweeps: scenario construction, revenue maximization over a
parameter grid, and the exponential-vs-power comparison summaries.

The protocol per grid point: start every bid at 1/2, apply synchronous
best-response dynamics for 100 rounds, settle at the final bids, and record
revenue. A sweep evaluates a whole steepness grid at once (the dynamics
kernel broadcasts over grid points), takes the revenue argmax, and refines
it with two rounds of local log-spaced subdivision at 10x resolution each.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .auction import BidVector, ValuationProfile, normalized_shares, settle
from .equilibrium import _exp_char_rhs, _pow_char_rhs
from .response import (DEFAULT_DYNAMICS_ITERS, DEFAULT_START_BID,
                       bisect_best_responses, rival_log_weight_sums,
                       run_dynamics)
from .weights import family_log_functions

# a dynamics run counts as converged when max_i |b_i - BR_i(b)| < this
CONVERGENCE_RESIDUAL = 1e-10

DEFAULT_GRID_LO = 0.05
DEFAULT_GRID_HI = 500.0
DEFAULT_GRID_POINTS = 60

REFINEMENT_ROUNDS = 2
REFINEMENT_POINTS = 21  # two neighbor intervals split at 10x resolution

# small-bidder bids from a symmetric start should agree to far better than
# this; beyond it, fall back to the minimum as the representative low bid
SMALL_BIDDER_SYMMETRY_TOL = 1e-8

SWEEPABLE_FAMILIES = ("exp", "pow")


def default_steepness_grid():
    """60 log-spaced steepness values over [0.05, 500]."""
    return np.geomspace(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS)


def steepness_resolution(grid, rounds=REFINEMENT_ROUNDS):
    """Relative resolution of the best-steepness estimate after refinement."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        return 0.0
    ratio = (grid[-1] / grid[0]) ** (1.0 / (grid.size - 1))
    return ratio ** (1.0 / 10 ** rounds) - 1.0


def make_scenario(n, alpha) -> ValuationProfile:
    """Profile (alpha, 1, ..., 1): one strong bidder against unit-value rivals."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"need an integer bidder count >= 2, got {n}")
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    return ValuationProfile((alpha,) + (1.0,) * (int(n) - 1))


def alpha_grid():
    """The reference grid: 1.2, 1.4, ..., 10.0 joined with 20, 30, ..., 100."""
    fine = np.linspace(1.2, 10.0, 45)
    coarse = np.arange(20.0, 101.0, 10.0)
    return tuple(float(a) for a in np.concatenate([fine, coarse]))


@dataclass(frozen=True)
class ScenarioSpec:
    """One sweep: bidder count, value ratio, weight family and its grid."""

    n: int
    alpha: float
    family: str
    steepness_grid: tuple
    iters: int = DEFAULT_DYNAMICS_ITERS
    start_bid: float = DEFAULT_START_BID

    def __post_init__(self):
        if self.family not in SWEEPABLE_FAMILIES:
            raise ValueError(f"sweepable families are {SWEEPABLE_FAMILIES}, got {self.family!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"need an integer bidder count >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        alpha = float(self.alpha)
        if not np.isfinite(alpha) or alpha < 1.0:
            raise ValueError(f"alpha must be >= 1, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        grid = tuple(float(g) for g in self.steepness_grid)
        if not grid or any(g <= 0 or not np.isfinite(g) for g in grid):
            raise ValueError("steepness grid must be nonempty with positive finite entries")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("steepness grid must be strictly ascending")
        object.__setattr__(self, "steepness_grid", grid)
        if not isinstance(self.iters, (int, np.integer)) or self.iters < 0:
            raise ValueError(f"iters must be a nonnegative integer, got {self.iters}")
        object.__setattr__(self, "iters", int(self.iters))
        start = float(self.start_bid)
        if not 0.0 < start <= 1.0:
            raise ValueError(f"start bid must lie in (0, 1], got {start}")
        object.__setattr__(self, "start_bid", start)

    def profile(self) -> ValuationProfile:
        return make_scenario(self.n, self.alpha)


@dataclass(frozen=True)
class RevenuePoint:
    """Dynamics outcome at a single steepness value."""

    revenue: float
    bids: BidVector
    high_alloc: float
    residual: float


@dataclass(frozen=True)
class GridPoint:
    """Per-grid-point diagnostics collected during a sweep."""

    alpha: float
    family: str
    steepness: float
    revenue: float
    residual: float
    char_residual_max: float
    converged: bool
    stage: str  # "grid", "refine1", "refine2"


@dataclass(frozen=True)
class SweepRow:
    """Revenue-maximizing steepness and the outcome at it, per (alpha, family)."""

    alpha: float
    family: str
    best_steepness: float
    revenue: float
    high_alloc: float
    high_bid: float
    low_bid: float
    residual: float
    grid_argmax_interior: bool
    final_bids: tuple = None


@dataclass(frozen=True)
class SweepOutcome:
    row: SweepRow
    grid_points: tuple


def revenue_at(spec, profile, iters=DEFAULT_DYNAMICS_ITERS, start=DEFAULT_START_BID):
    """Run dynamics from a flat start and settle at the final bids.

    iters = 0 settles at the start vector itself (residual still reported).
    """
    if not isinstance(iters, (int, np.integer)) or iters < 0:
        raise ValueError(f"iters must be a nonnegative integer, got {iters}")
    start_vec = BidVector((float(start),) * profile.n)
    if iters == 0:
        trace = run_dynamics(spec, profile, start=start_vec, max_iters=1)
        final = start_vec
        residual = float(np.max(np.abs(start_vec.as_array() - trace.iterates[1].as_array())))
    else:
        trace = run_dynamics(spec, profile, start=start_vec, max_iters=int(iters))
        final = trace.final
        residual = trace.residual
    outcome = settle(spec, profile, final)
    return RevenuePoint(revenue=outcome.revenue, bids=final,
                        high_alloc=outcome.allocations[0], residual=residual)


def _batch_dynamics(family, grid, values, iters, start):
    """Dynamics for every steepness in ``grid`` at once.

    Returns (final bids (G, n), residual (G,), revenue (G,),
    high-bidder share (G,), max characterization residual (G,)).
    """
    base_f, base_fp = family_log_functions(family)
    par = np.asarray(grid, dtype=float)[:, None]
    log_f = lambda b: base_f(par, b)
    log_fp = lambda b: base_fp(par, b)
    v = np.asarray(values, dtype=float)[None, :]
    b = np.full((par.shape[0], v.shape[1]), float(start))
    for _ in range(int(iters)):
        log_s = rival_log_weight_sums(log_f, b)
        b = bisect_best_responses(log_f, log_fp, v, log_s)
    log_s = rival_log_weight_sums(log_f, b)
    nxt = bisect_best_responses(log_f, log_fp, v, log_s)
    residual = np.max(np.abs(b - nxt), axis=1)

    lw = log_f(b)
    shares = normalized_shares(lw)
    revenue = np.sum(shares * b, axis=1)

    lfs = np.logaddexp(lw, log_s)
    one_minus_a = np.exp(log_s - lfs)
    with np.errstate(divide="ignore"):
        rhs = (_exp_char_rhs(par, v, b, one_minus_a) if family == "exp"
               else _pow_char_rhs(par, v, b, one_minus_a))
    char_max = np.max(np.abs(b - rhs), axis=1)
    return b, residual, revenue, shares[:, 0], char_max


def sweep_steepness(scenario: ScenarioSpec) -> SweepOutcome:
    """Maximize revenue over the scenario's steepness grid.

    The argmax over the base grid is refined with up to two rounds of local
    log-spaced subdivision; a boundary argmax on the base grid is flagged
    (grid_argmax_interior False), not treated as an error.
    """
    grid = np.asarray(scenario.steepness_grid, dtype=float)
    v = scenario.profile().as_array()
    points = []

    def evaluate(par_grid, stage):
        bids, resid, rev, high, charm = _batch_dynamics(
            scenario.family, par_grid, v, scenario.iters, scenario.start_bid)
        for j in range(par_grid.size):
            points.append(GridPoint(
                alpha=scenario.alpha, family=scenario.family,
                steepness=float(par_grid[j]), revenue=float(rev[j]),
                residual=float(resid[j]), char_residual_max=float(charm[j]),
                converged=bool(resid[j] < CONVERGENCE_RESIDUAL), stage=stage))
        return bids, resid, rev, high

    bids, resid, rev, high = evaluate(grid, "grid")
    k = int(np.argmax(rev))
    interior = 0 < k < grid.size - 1
    best = (float(grid[k]), float(rev[k]), bids[k], float(resid[k]), float(high[k]))

    cur_grid, cur_k = grid, k
    for round_idx in range(REFINEMENT_ROUNDS):
        lo = cur_grid[max(cur_k - 1, 0)]
        hi = cur_grid[min(cur_k + 1, cur_grid.size - 1)]
        if not hi > lo:
            break
        sub = np.geomspace(lo, hi, REFINEMENT_POINTS)
        b2, r2, rev2, high2 = evaluate(sub, f"refine{round_idx + 1}")
        kk = int(np.argmax(rev2))
        if rev2[kk] > best[1]:
            best = (float(sub[kk]), float(rev2[kk]), b2[kk], float(r2[kk]), float(high2[kk]))
        cur_grid, cur_k = sub, kk

    steep, revenue, final_bids, residual, high_alloc = best
    high_bid = float(final_bids[0])
    small = final_bids[1:]
    if float(np.max(small)) - float(np.min(small)) <= SMALL_BIDDER_SYMMETRY_TOL:
        low_bid = float(small[0])
    else:
        low_bid = float(np.min(small))
    row = SweepRow(
        alpha=scenario.alpha, family=scenario.family, best_steepness=steep,
        revenue=revenue, high_alloc=high_alloc, high_bid=high_bid, low_bid=low_bid,
        residual=residual, grid_argmax_interior=interior,
        final_bids=tuple(float(x) for x in final_bids))
    return SweepOutcome(row=row, grid_points=tuple(points))


@dataclass(frozen=True)
class Experiment:
    """Full alpha x family sweep with crossover and convergence summaries.

    Crossover brackets are the grid intervals where the exponential-minus-
    power difference (of revenue, or of the |high bid - low bid| gap)
    changes sign; no root polishing is done across alpha.
    """

    n: int
    alphas: tuple
    families: tuple
    rows: tuple
    grid_points: tuple
    revenue_crossovers: tuple
    bid_gap_crossovers: tuple
    base_points_total: int
    base_points_converged: int
    nonconverged: tuple

    def row(self, alpha, family) -> SweepRow:
        for r in self.rows:
            if r.alpha == alpha and r.family == family:
                return r
        raise KeyError(f"no sweep row for alpha={alpha}, family={family}")

    def best_steepness_series(self, family):
        return tuple((r.alpha, r.best_steepness) for r in self.rows if r.family == family)


def _sign_change_brackets(alphas, diffs):
    out = []
    for a0, a1, d0, d1 in zip(alphas, alphas[1:], diffs, diffs[1:]):
        if d0 * d1 < 0.0:
            out.append((a0, a1))
    return tuple(out)


def _resolve_workers(max_workers):
    workers = max_workers if max_workers else min(os.cpu_count() or 1, 8)
    env = os.environ.get("QP_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"QP_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise ValueError(f"QP_THREADS must be >= 1, got {cap}")
        workers = min(workers, cap)
    return max(int(workers), 1)


def run_full_experiment(n, alphas=None, grids=None, iters=DEFAULT_DYNAMICS_ITERS,
                        start=DEFAULT_START_BID, max_workers=None) -> Experiment:
    """Sweep every (alpha, family) pair and summarize the comparison.

    ``grids`` maps family tag to its steepness grid (defaults: the standard
    log grid for both "exp" and "pow"). Scenarios are independent; they may
    run on a small thread pool (QP_THREADS caps it) and results are
    assembled in a fixed order either way.
    """
    alphas = tuple(sorted(float(a) for a in (alphas if alphas is not None else alpha_grid())))
    if grids is None:
        grids = {"exp": default_steepness_grid(), "pow": default_steepness_grid()}
    families = tuple(sorted(grids))
    scenarios = [ScenarioSpec(n, a, fam, tuple(float(g) for g in grids[fam]),
                              iters=iters, start_bid=start)
                 for a in alphas for fam in families]
    workers = _resolve_workers(max_workers)
    if workers == 1:
        outcomes = [sweep_steepness(s) for s in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(sweep_steepness, scenarios))

    rows = tuple(sorted((o.row for o in outcomes), key=lambda r: (r.alpha, r.family)))
    grid_points = tuple(p for o in outcomes for p in o.grid_points)

    revenue_crossovers = ()
    bid_gap_crossovers = ()
    if "exp" in families and "pow" in families:
        by_key = {(r.alpha, r.family): r for r in rows}
        rev_diff = [by_key[(a, "exp")].revenue - by_key[(a, "pow")].revenue for a in alphas]
        gap = lambda r: abs(r.high_bid - r.low_bid)
        gap_diff = [gap(by_key[(a, "exp")]) - gap(by_key[(a, "pow")]) for a in alphas]
        revenue_crossovers = _sign_change_brackets(alphas, rev_diff)
        bid_gap_crossovers = _sign_change_brackets(alphas, gap_diff)

    base = [p for p in grid_points if p.stage == "grid"]
    nonconverged = tuple(p for p in base if not p.converged)
    return Experiment(
        n=int(n), alphas=alphas, families=families, rows=rows, grid_points=grid_points,
        revenue_crossovers=revenue_crossovers, bid_gap_crossovers=bid_gap_crossovers,
        base_points_total=len(base), base_points_converged=len(base) - len(nonconverged),
        nonconverged=nonconverged)
