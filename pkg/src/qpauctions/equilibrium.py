"""Equilibrium characterization residuals, bid lower bounds, and the
box-mapping probe.

At an interior pure-strategy equilibrium every bid satisfies a first-order
condition. In generic form b = v - (f(b)/f'(b)) / (1 - a); for the
exponential family this becomes

    b = v - (1/c) (1 - e^(-c b)) / (1 - a),

and for the power family it solves to b = v / (1 + 1/(p (1 - a))).
``char_residual`` reports the deviation of a bid vector from the family's
equation.

A vector w of candidate lower bounds is self-supporting when

    w_i <= v_i - (1/c) (1 - e^(-c w_i)) / (1 - a_i(w))        (exponential)

holds for every bidder; then best responses map the box
[w_1, v_1] x ... x [w_n, v_n] into itself, which is what
``box_mapping_probe`` checks empirically on sampled bid vectors.
``bid_lower_bounds`` builds the canonical such w from the runner-up value:
w_i = v_i - 2/c for all i except the top bidder, who gets the runner-up's
bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auction import as_bid_vector, as_profile
from .response import bisect_best_responses, rival_log_weight_sums
from .weights import Exponential, Polynomial, Power, WeightSpec, log_weight

# an allocation share this close to 1 makes the 1/(1-a) factor meaningless
ALLOC_ONE_TOL = 1e-15

# slack when counting box-mapping violations: BR_i < w_i - PROBE_MARGIN_TOL
PROBE_MARGIN_TOL = 1e-9


@dataclass(frozen=True)
class BoundVector:
    """Candidate bid lower bounds, in the caller's original bidder order.

    ``premise_ok`` records whether the self-supporting inequality held at w;
    ``degenerate`` marks bound vectors with fewer than two positive entries
    (allocations at w undefined, premise not evaluable); ``order`` is the
    permutation that sorts the profile's values descending.
    """

    bounds: tuple
    premise_ok: bool
    degenerate: bool = False
    order: tuple = None

    def as_array(self):
        return np.asarray(self.bounds, dtype=float)


def _one_minus_shares(spec, bids):
    """1 - a_i for every bidder, computed as s_i / (f_i + s_i) in log space
    so no cancellation occurs even when a_i is within ulps of 1."""
    lw = np.asarray(log_weight(spec, bids), dtype=float)
    log_s = rival_log_weight_sums(spec.log_weight, bids)
    lfs = np.logaddexp(lw, log_s)
    return np.exp(log_s - lfs)


def _char_rhs_generic(spec, values, bids, one_minus_a):
    """Right-hand side b = v - (f/f') / (1-a), any weight family."""
    bids = np.asarray(bids, dtype=float)
    lw = np.asarray(log_weight(spec, bids), dtype=float)
    with np.errstate(invalid="ignore"):
        ratio = np.exp(lw - spec.log_weight_prime(np.where(bids > 0.0, bids, 1.0)))
    ratio = np.where(bids > 0.0, ratio, 0.0)  # f/f' -> 0 as b -> 0
    return values - ratio / one_minus_a


def char_residual(spec: WeightSpec, profile, bids):
    """Componentwise deviation of ``bids`` from the equilibrium equation.

    Zero exactly at bid vectors satisfying the first-order condition.
    Requires at least two positive bids and every share a_i < 1.
    """
    profile = as_profile(profile)
    bid_vec = as_bid_vector(bids)
    if bid_vec.n != profile.n:
        raise ValueError(
            f"bid vector has {bid_vec.n} entries but profile has {profile.n} bidders")
    b = bid_vec.as_array()
    if np.count_nonzero(b) < 2:
        raise ValueError("characterization needs at least two positive bids")
    v = profile.as_array()
    oma = _one_minus_shares(spec, b)
    if np.any(oma < ALLOC_ONE_TOL):
        raise ValueError("some allocation share is within 1e-15 of 1; "
                         "the characterization denominator vanishes")
    if isinstance(spec, Exponential):
        rhs = _exp_char_rhs(spec.c, v, b, oma)
    elif isinstance(spec, Power):
        rhs = _pow_char_rhs(spec.p, v, b, oma)
    elif isinstance(spec, Polynomial):
        rhs = _char_rhs_generic(spec, v, b, oma)
    else:
        raise TypeError(f"not a weight spec: {spec!r}")
    return b - rhs


def _exp_char_rhs(c, values, bids, one_minus_a):
    return values - (-np.expm1(-c * np.asarray(bids, dtype=float))) / (c * one_minus_a)


def _pow_char_rhs(p, values, bids, one_minus_a):
    return values / (1.0 + 1.0 / (p * one_minus_a))


def bound_condition(spec: Exponential, profile, w):
    """Componentwise truth of the self-supporting inequality at bids = w.

    Defined for exponential weights only. Needs at least two positive
    entries so the shares at w exist.
    """
    if not isinstance(spec, Exponential):
        raise TypeError("bid lower-bound condition is defined for exponential weights only")
    profile = as_profile(profile)
    w_arr = np.asarray([float(x) for x in w], dtype=float)
    if w_arr.size != profile.n:
        raise ValueError(
            f"bound vector has {w_arr.size} entries but profile has {profile.n} bidders")
    if np.any(w_arr < 0.0) or not np.all(np.isfinite(w_arr)):
        raise ValueError("bounds must be nonnegative and finite")
    if np.count_nonzero(w_arr) < 2:
        raise ValueError("bound condition needs at least two positive entries")
    v = profile.as_array()
    oma = _one_minus_shares(spec, w_arr)
    with np.errstate(divide="ignore"):
        rhs = _exp_char_rhs(spec.c, v, w_arr, oma)
    return w_arr <= rhs


def bid_lower_bounds(profile, c) -> BoundVector:
    """Canonical lower bounds from the runner-up value.

    With values sorted descending, the top bidder gets v_2 - 2/c and every
    other bidder i gets v_i - 2/c; results are mapped back to the caller's
    original bidder order and clamped at 0. Clamped-away (negative) bounds
    leave the vector degenerate when fewer than two entries stay positive.
    """
    profile = as_profile(profile)
    c = float(c)
    if not np.isfinite(c) or c <= 0.0:
        raise ValueError(f"steepness must be positive and finite, got {c}")
    v = profile.as_array()
    order = np.argsort(-v, kind="stable")
    v_sorted = v[order]
    w_sorted = np.concatenate(([v_sorted[1]], v_sorted[1:])) - 2.0 / c
    w_sorted = np.maximum(w_sorted, 0.0)
    w = np.empty_like(w_sorted)
    w[order] = w_sorted
    degenerate = np.count_nonzero(w) < 2
    if degenerate:
        premise_ok = False
    else:
        premise_ok = bool(np.all(bound_condition(Exponential(c), profile, w)))
    return BoundVector(
        bounds=tuple(float(x) for x in w),
        premise_ok=premise_ok,
        degenerate=degenerate,
        order=tuple(int(i) for i in order),
    )


@dataclass(frozen=True)
class BoxMappingReport:
    """Outcome of a sampled box-mapping probe."""

    violations: int
    worst_margin: float = None
    samples: int = 0
    seed: int = 0

    def as_record(self):
        """Flat key-value form for CSV/CLI output."""
        return {
            "violations": self.violations,
            "worst_margin": "" if self.worst_margin is None else self.worst_margin,
            "samples": self.samples,
            "seed": self.seed,
        }


def box_mapping_probe(spec: WeightSpec, profile, w, samples, seed,
                      margin_tol=PROBE_MARGIN_TOL) -> BoxMappingReport:
    """Sample bid vectors uniformly from the box [w_i, v_i]^n and count best
    responses that fall below their bound by more than ``margin_tol``.

    ``w`` must be a BoundVector with premise_ok, or a raw vector whose
    condition is verified here (exponential specs only). Zero violations is
    the empirical witness that BR maps the box into itself. Reproducible:
    all draws come from one seeded generator.
    """
    profile = as_profile(profile)
    v = profile.as_array()
    if isinstance(w, BoundVector):
        if not w.premise_ok:
            raise ValueError("bound vector does not satisfy the self-supporting condition")
        w_arr = w.as_array()
    else:
        w_arr = np.asarray([float(x) for x in w], dtype=float)
        if not np.all(bound_condition(spec, profile, w_arr)):
            raise ValueError("bounds do not satisfy the self-supporting condition")
    if w_arr.size != profile.n:
        raise ValueError(
            f"bound vector has {w_arr.size} entries but profile has {profile.n} bidders")
    if np.any(w_arr > v):
        raise ValueError("bounds must not exceed the corresponding values")
    samples = int(samples)
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    if samples == 0:
        return BoxMappingReport(violations=0, worst_margin=None, samples=0, seed=int(seed))
    rng = np.random.default_rng(int(seed))
    bids = w_arr + (v - w_arr) * rng.random((samples, profile.n))
    log_s = rival_log_weight_sums(spec.log_weight, bids)
    br = bisect_best_responses(spec.log_weight, spec.log_weight_prime, v[None, :], log_s)
    margins = br - w_arr[None, :]
    return BoxMappingReport(
        violations=int(np.count_nonzero(margins < -margin_tol)),
        worst_margin=float(np.min(margins)),
        samples=samples,
        seed=int(seed),
    )
