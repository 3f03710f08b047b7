"""Best responses and synchronous best-response dynamics.

A bidder facing rival weight mass s > 0 has utility
u(b) = (v - b) * f(b) / (f(b) + s), which is zero at b = 0 and b = v and
has a single interior maximum for the supported weight families. The
maximizer is located by bisecting the sign change of

    u'(b) = -a + (v - b) * (1 - a) * f'(b) / (f(b) + s),
    a = f(b) / (f(b) + s),

over (0, v). All quantities are assembled from log weights, so the search
is stable for arbitrarily steep weight functions; the elementwise kernel
broadcasts over arrays of values, rival sums and (via closures) weight
parameters, which is what the sweep engine builds on.

Dynamics follow the synchronous rule b^(k+1) = BR(b^k): every bidder
responds to the previous round at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auction import BidVector, DegenerateBidsError, as_bid_vector, as_profile
from .weights import WeightSpec

DEFAULT_BID_TOL = 1e-13
MAX_BISECT_ITERS = 200

DEFAULT_DYNAMICS_ITERS = 100
DEFAULT_START_BID = 0.5

# floor bid scale (times the bidder's value) substituted when every rival
# bids zero and rescue is enabled
RESCUE_FLOOR_SCALE = 1e-9


class NonConvergenceError(RuntimeError):
    """Bisection failed to shrink the bracket; the utility landscape is not
    the single-peak shape the search relies on (e.g. a pathological
    polynomial weight)."""


def rival_log_weight_sums(log_f, bids):
    """log sum_{j != i} f(b_j) for each bidder, along the last axis.

    ``log_f`` maps a bid array to elementwise log weights; ``bids`` may
    carry leading batch axes. Bidders whose rivals all bid zero get -inf.
    """
    bids = np.asarray(bids, dtype=float)
    lw = np.asarray(log_f(bids), dtype=float)
    n = bids.shape[-1]
    m_all = np.broadcast_to(lw[..., None, :], lw.shape[:-1] + (n, n)).copy()
    idx = np.arange(n)
    m_all[..., idx, idx] = -np.inf
    m = np.max(m_all, axis=-1)
    with np.errstate(invalid="ignore"):
        out = m + np.log(np.sum(np.exp(m_all - m[..., None]), axis=-1))
    return np.where(np.isneginf(m), -np.inf, out)


def bisect_best_responses(log_f, log_fprime, values, log_rival_sums,
                          tol=DEFAULT_BID_TOL, max_iter=MAX_BISECT_ITERS):
    """Elementwise best-response bids via sign-change bisection of u'.

    ``values`` and ``log_rival_sums`` broadcast against each other; the
    returned array has the broadcast shape. Every rival sum must be
    positive (finite log). u' > 0 near 0 and u' < 0 at v, so [0, v] always
    brackets the root; the bracket is halved until it is narrower than
    ``tol`` (an absolute bid tolerance).
    """
    v = np.asarray(values, dtype=float)
    log_s = np.asarray(log_rival_sums, dtype=float)
    if np.any(np.isneginf(log_s)):
        raise DegenerateBidsError("a bidder faces zero rival weight; best response undefined")
    shape = np.broadcast_shapes(v.shape, log_s.shape)
    lo = np.zeros(shape)
    hi = np.broadcast_to(v, shape).astype(float).copy()
    for _ in range(max_iter):
        if np.max(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        lf = log_f(mid)
        lfp = log_fprime(mid)
        lfs = np.logaddexp(lf, log_s)
        # u'(mid); the derivative factor is exponentiated in one go so no
        # intermediate ratio can overflow
        up = -np.exp(lf - lfs) + (v - mid) * np.exp(log_s + lfp - 2.0 * lfs)
        if np.any(np.isnan(up)):
            raise NonConvergenceError("utility derivative evaluated to NaN during bisection")
        pos = up > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    if np.max(hi - lo) > tol:
        raise NonConvergenceError(
            f"bisection bracket still wider than {tol} after {max_iter} iterations")
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ResponseProblem:
    """One bidder's maximization: weight spec, private value v > 0, and the
    rival weight mass s = sum_{j != i} f(b_j) > 0.

    ``from_log`` constructs a problem directly from log(s) for regimes
    where s itself overflows a double.
    """

    spec: WeightSpec
    value: float
    rival_weight_sum: float
    log_rival_weight_sum: float = None

    def __post_init__(self):
        v = float(self.value)
        if not np.isfinite(v) or v <= 0.0:
            raise ValueError(f"bidder value must be positive and finite, got {self.value}")
        object.__setattr__(self, "value", v)
        if self.log_rival_weight_sum is None:
            s = float(self.rival_weight_sum)
            if not np.isfinite(s) or s <= 0.0:
                raise ValueError(f"rival weight sum must be positive and finite, got {s}")
            object.__setattr__(self, "rival_weight_sum", s)
            object.__setattr__(self, "log_rival_weight_sum", float(np.log(s)))
        else:
            ls = float(self.log_rival_weight_sum)
            if not np.isfinite(ls):
                raise ValueError(f"log rival weight sum must be finite, got {ls}")
            object.__setattr__(self, "log_rival_weight_sum", ls)
            with np.errstate(over="ignore"):
                # display-only mirror; may round to inf for huge rival mass
                object.__setattr__(self, "rival_weight_sum", float(np.exp(ls)))

    @classmethod
    def from_log(cls, spec, value, log_rival_weight_sum):
        return cls(spec, value, rival_weight_sum=None,
                   log_rival_weight_sum=float(log_rival_weight_sum))


@dataclass(frozen=True)
class DynamicsTrace:
    """History of one synchronous best-response run.

    ``residual`` is max_i |b_i - BR_i(b)| at the final vector; ``converged``
    records residual < tol for the tol the run was given (with the default
    tol = 0 the flag stays False and the residual speaks for itself).
    ``rescued`` marks that some bidder faced zero rival weight at some
    round and was assigned the floor bid.
    """

    iterates: tuple
    final: BidVector
    iterations: int
    residual: float
    converged: bool
    rescued: bool = False


def best_response(problem: ResponseProblem, tol=DEFAULT_BID_TOL, max_iter=MAX_BISECT_ITERS):
    """The unique utility-maximizing bid in (0, value)."""
    spec = problem.spec
    out = bisect_best_responses(
        spec.log_weight, spec.log_weight_prime,
        np.asarray(problem.value), np.asarray(problem.log_rival_weight_sum),
        tol=tol, max_iter=max_iter)
    return float(out)


def _best_responses_raw(spec, v, b, rescue, rescue_floor_scale, tol):
    """Best-response array for all bidders at once; returns (bids, rescued)."""
    log_s = rival_log_weight_sums(spec.log_weight, b)
    degenerate = np.isneginf(log_s)
    if np.any(degenerate):
        if not rescue:
            raise DegenerateBidsError(
                "some bidder has no positive rival bid; enable rescue or fix the bids")
        safe_log_s = np.where(degenerate, 0.0, log_s)
        out = bisect_best_responses(spec.log_weight, spec.log_weight_prime, v, safe_log_s, tol=tol)
        out = np.where(degenerate, rescue_floor_scale * v, out)
        return out, True
    return bisect_best_responses(spec.log_weight, spec.log_weight_prime, v, log_s, tol=tol), False


def best_response_vector(spec: WeightSpec, profile, bids, rescue=False,
                         rescue_floor_scale=RESCUE_FLOOR_SCALE, tol=DEFAULT_BID_TOL):
    """Simultaneous best responses: component i maximizes against the other
    components of ``bids``.

    With ``rescue`` off (the default) a bidder facing all-zero rivals
    raises DegenerateBidsError; with it on, that bidder gets the floor bid
    ``rescue_floor_scale * value``.
    """
    profile = as_profile(profile)
    bid_vec = as_bid_vector(bids)
    if bid_vec.n != profile.n:
        raise ValueError(
            f"bid vector has {bid_vec.n} entries but profile has {profile.n} bidders")
    out, _ = _best_responses_raw(
        spec, profile.as_array(), bid_vec.as_array(), rescue, rescue_floor_scale, tol)
    return BidVector(tuple(float(x) for x in out))


def run_dynamics(spec: WeightSpec, profile, start=None, max_iters=DEFAULT_DYNAMICS_ITERS,
                 tol=0.0, rescue_floor_scale=RESCUE_FLOOR_SCALE,
                 bid_tol=DEFAULT_BID_TOL) -> DynamicsTrace:
    """Iterate b^(k+1) = BR(b^k) from a common start.

    Defaults follow the reference protocol: all bids start at 1/2 and the
    map is applied exactly 100 times (tol = 0 disables early stopping).
    A positive ``tol`` stops as soon as the sup-norm step falls below it.
    Start bids must lie in [0, v_i] with at least two positive entries.
    """
    profile = as_profile(profile)
    v = profile.as_array()
    if start is None:
        start = BidVector((DEFAULT_START_BID,) * profile.n)
    start = as_bid_vector(start)
    if start.n != profile.n:
        raise ValueError(
            f"start vector has {start.n} entries but profile has {profile.n} bidders")
    b = start.as_array()
    if np.any(b > v):
        raise ValueError("start bids must not exceed the corresponding values")
    if np.count_nonzero(b) < 2:
        raise ValueError("dynamics need at least two positive start bids")
    if not isinstance(max_iters, (int, np.integer)) or max_iters < 1:
        raise ValueError(f"max_iters must be a positive integer, got {max_iters}")

    iterates = [start]
    rescued = False
    for _ in range(max_iters):
        nxt, resc = _best_responses_raw(spec, v, b, True, rescue_floor_scale, bid_tol)
        rescued = rescued or resc
        iterates.append(BidVector(tuple(float(x) for x in nxt)))
        step = float(np.max(np.abs(nxt - b)))
        b = nxt
        if tol > 0.0 and step < tol:
            break
    nxt, resc = _best_responses_raw(spec, v, b, True, rescue_floor_scale, bid_tol)
    rescued = rescued or resc
    residual = float(np.max(np.abs(b - nxt)))
    return DynamicsTrace(
        iterates=tuple(iterates),
        final=iterates[-1],
        iterations=len(iterates) - 1,
        residual=residual,
        converged=residual < tol,
        rescued=rescued,
    )
