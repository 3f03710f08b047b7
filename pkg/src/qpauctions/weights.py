"""Bid weight functions for quasi-proportional auctions.

Three families, all with f(0) = 0 and strictly increasing on (0, inf):

* ``Exponential(c)``  --  f(x) = e^(c*x) - 1,  c > 0
* ``Power(p)``        --  f(x) = x^p,          p > 0
* ``Polynomial(coeffs)`` -- f(x) = sum_i c_i x^i for i = 1..d (no constant
  term), nonnegative coefficients, at least one positive, d <= 32

Steepness sweeps reach parameters where e^(c*x) overflows a double, so
every allocation-facing computation goes through the log forms below
(``log_weight`` and friends) instead of evaluating raw weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

MAX_POLYNOMIAL_DEGREE = 32

# e^x overflows float64 just above x = 709; stay clear of it.
EXP_OVERFLOW_THRESHOLD = 700.0


def _match(x, out):
    """Return a float for scalar input, an ndarray otherwise."""
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def _exp_log_f(c, x):
    """log(e^(c*x) - 1), safe for any c*x >= 0; -inf at x = 0.

    Uses log(e^t - 1) = t + log(1 - e^(-t)); the second factor is computed
    as log(-expm1(-t)), which is accurate for both tiny and huge t.
    """
    t = np.multiply(c, x)
    with np.errstate(divide="ignore"):
        return t + np.log(-np.expm1(-t))


def _exp_log_fprime(c, x):
    """log(c * e^(c*x))."""
    return np.log(c) + np.multiply(c, x)


def _pow_log_f(p, x):
    """log(x^p); -inf at x = 0."""
    with np.errstate(divide="ignore"):
        return np.multiply(p, np.log(x))


def _pow_log_fprime(p, x):
    """log(p * x^(p-1)); requires x > 0."""
    return np.log(p) + (np.asarray(p, dtype=float) - 1.0) * np.log(x)


def _poly_log_f(coeffs, x):
    """log(sum_i c_i x^i) via log-sum-exp over terms; -inf at x = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    terms = [np.log(ci) + i * lx
             for i, ci in enumerate(coeffs, start=1) if ci > 0.0]
    return _logsumexp_terms(terms)


def _poly_log_fprime(coeffs, x):
    """log(sum_i i c_i x^(i-1)); requires x > 0."""
    lx = np.log(np.asarray(x, dtype=float))
    terms = [np.log(i * ci) + (i - 1) * lx
             for i, ci in enumerate(coeffs, start=1) if ci > 0.0]
    return _logsumexp_terms(terms)


def _logsumexp_terms(terms):
    stacked = np.stack([np.asarray(t, dtype=float) for t in terms])
    m = np.max(stacked, axis=0)
    with np.errstate(invalid="ignore"):
        out = m + np.log(np.sum(np.exp(stacked - m), axis=0))
    # all terms -inf (x = 0): m - m above is nan, the true log-weight is -inf
    return np.where(np.isneginf(m), -np.inf, out)


@dataclass(frozen=True)
class Exponential:
    """Weight function f(x) = e^(c*x) - 1 with steepness c > 0."""

    c: float
    family: ClassVar[str] = "exp"

    def __post_init__(self):
        c = float(self.c)
        if not np.isfinite(c) or c <= 0.0:
            raise ValueError(f"exponential steepness must be positive and finite, got {self.c}")
        object.__setattr__(self, "c", c)

    def weight(self, x):
        return _match(x, np.expm1(np.multiply(self.c, x)))

    def weight_deriv(self, x, order=1):
        _check_order(order)
        return _match(x, self.c ** order * np.exp(np.multiply(self.c, x)))

    def log_weight(self, x):
        return _match(x, _exp_log_f(self.c, x))

    def log_weight_prime(self, x):
        return _match(x, _exp_log_fprime(self.c, x))


@dataclass(frozen=True)
class Power:
    """Weight function f(x) = x^p with exponent p > 0."""

    p: float
    family: ClassVar[str] = "pow"

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p <= 0.0:
            raise ValueError(f"power exponent must be positive and finite, got {self.p}")
        object.__setattr__(self, "p", p)

    def weight(self, x):
        return _match(x, np.power(np.asarray(x, dtype=float), self.p))

    def weight_deriv(self, x, order=1):
        _check_order(order)
        x_arr = np.asarray(x, dtype=float)
        if order == 1:
            if self.p == 1.0:
                return _match(x, np.ones_like(x_arr))
            with np.errstate(divide="ignore"):
                return _match(x, self.p * np.power(x_arr, self.p - 1.0))
        if self.p < 2.0 and np.any(x_arr == 0.0):
            raise ValueError(
                f"second derivative of x^p undefined at x=0 for p={self.p} < 2")
        if self.p == 2.0:
            return _match(x, np.full_like(x_arr, 2.0))
        return _match(x, self.p * (self.p - 1.0) * np.power(x_arr, self.p - 2.0))

    def log_weight(self, x):
        return _match(x, _pow_log_f(self.p, x))

    def log_weight_prime(self, x):
        return _match(x, _pow_log_fprime(self.p, x))


@dataclass(frozen=True)
class Polynomial:
    """Weight function f(x) = sum_i c_i x^i, i = 1..d, without constant term.

    Coefficients are indexed from degree 1, so ``coeffs=(1.0, 0.5)`` is
    f(x) = x + 0.5 x^2. Nonnegative coefficients keep f strictly increasing
    without per-instance checks; degree is capped at 32.
    """

    coeffs: tuple

    family: ClassVar[str] = "poly"

    def __post_init__(self):
        coeffs = tuple(float(ci) for ci in self.coeffs)
        if not 1 <= len(coeffs) <= MAX_POLYNOMIAL_DEGREE:
            raise ValueError(
                f"polynomial degree must be in [1, {MAX_POLYNOMIAL_DEGREE}], got {len(coeffs)}")
        if any(not np.isfinite(ci) or ci < 0.0 for ci in coeffs):
            raise ValueError("polynomial coefficients must be finite and nonnegative")
        if not any(ci > 0.0 for ci in coeffs):
            raise ValueError("polynomial needs at least one positive coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    def _highest_first(self, order):
        # coefficients of the order-th derivative, highest degree first,
        # ready for np.polyval (constant term included)
        d = len(self.coeffs)
        if order == 0:
            return [self.coeffs[i - 1] for i in range(d, 0, -1)] + [0.0]
        if order == 1:
            return [i * self.coeffs[i - 1] for i in range(d, 0, -1)]
        return [i * (i - 1) * self.coeffs[i - 1] for i in range(d, 1, -1)] or [0.0]

    def weight(self, x):
        return _match(x, np.polyval(self._highest_first(0), np.asarray(x, dtype=float)))

    def weight_deriv(self, x, order=1):
        _check_order(order)
        return _match(x, np.polyval(self._highest_first(order), np.asarray(x, dtype=float)))

    def log_weight(self, x):
        return _match(x, _poly_log_f(self.coeffs, x))

    def log_weight_prime(self, x):
        return _match(x, _poly_log_fprime(self.coeffs, x))


WeightSpec = Union[Exponential, Power, Polynomial]

_FAMILY_LOG_FUNCS = {
    "exp": (_exp_log_f, _exp_log_fprime),
    "pow": (_pow_log_f, _pow_log_fprime),
}


def _check_order(order):
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")


def family_log_functions(family):
    """(log f, log f') taking (parameter, x) arrays, for a sweepable family."""
    try:
        return _FAMILY_LOG_FUNCS[family]
    except KeyError:
        raise ValueError(f"unknown sweepable weight family {family!r}") from None


def make_spec(family, value):
    """Build an Exponential or Power spec from a family tag and parameter."""
    if family == "exp":
        return Exponential(value)
    if family == "pow":
        return Power(value)
    raise ValueError(f"unknown weight family {family!r}")


def weight_eval(spec, x):
    """Evaluate f(x); exact zero at x = 0 for every family."""
    return spec.weight(x)


def weight_deriv(spec, x, order=1):
    """Analytic first or second derivative of the weight function."""
    return spec.weight_deriv(x, order)


def log_weight(spec, x):
    """log f(x), overflow-safe; -inf at x = 0."""
    return spec.log_weight(x)


def log_weight_shifted(spec, x, shift):
    """log f(x) - shift without ever forming e^(c*x) raw."""
    return spec.log_weight(x) - shift


def parse_weight_spec(text):
    """Parse the textual weight form: ``exp:c=2``, ``pow:p=0.5``,
    ``poly:c1=1,c2=0.5``."""
    head, sep, body = text.partition(":")
    if not sep or not body:
        raise ValueError(f"malformed weight spec {text!r}; expected family:params")
    pairs = {}
    for item in body.split(","):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"malformed weight parameter {item!r} in {text!r}")
        try:
            pairs[key.strip()] = float(val)
        except ValueError:
            raise ValueError(f"non-numeric weight parameter {item!r} in {text!r}") from None
    if head == "exp":
        if set(pairs) != {"c"}:
            raise ValueError(f"exp weight takes exactly the parameter c, got {sorted(pairs)}")
        return Exponential(pairs["c"])
    if head == "pow":
        if set(pairs) != {"p"}:
            raise ValueError(f"pow weight takes exactly the parameter p, got {sorted(pairs)}")
        return Power(pairs["p"])
    if head == "poly":
        degree = len(pairs)
        expected = {f"c{i}" for i in range(1, degree + 1)}
        if set(pairs) != expected:
            raise ValueError(
                f"poly weight takes contiguous parameters c1..c{degree}, got {sorted(pairs)}")
        return Polynomial(tuple(pairs[f"c{i}"] for i in range(1, degree + 1)))
    raise ValueError(f"unknown weight family {head!r} in {text!r}")


def format_weight_spec(spec):
    """Inverse of parse_weight_spec, with full float precision."""
    if isinstance(spec, Exponential):
        return f"exp:c={spec.c!r}"
    if isinstance(spec, Power):
        return f"pow:p={spec.p!r}"
    if isinstance(spec, Polynomial):
        body = ",".join(f"c{i}={ci!r}" for i, ci in enumerate(spec.coeffs, start=1))
        return f"poly:{body}"
    raise TypeError(f"not a weight spec: {spec!r}")
