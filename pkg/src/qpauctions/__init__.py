"""Quasi-proportional winners-pay auctions: weight families, allocation and
settlement, best-response dynamics, equilibrium characterization, and
revenue-maximizing steepness sweeps."""

from .auction import (AuctionOutcome, BidVector, DegenerateBidsError,
                      ValuationProfile, allocate, settle)
from .equilibrium import (BoundVector, BoxMappingReport, bid_lower_bounds,
                          bound_condition, box_mapping_probe, char_residual)
from .experiments import (Experiment, GridPoint, RevenuePoint, ScenarioSpec,
                          SweepOutcome, SweepRow, alpha_grid,
                          default_steepness_grid, make_scenario, revenue_at,
                          run_full_experiment, sweep_steepness)
from .response import (DynamicsTrace, NonConvergenceError, ResponseProblem,
                       best_response, best_response_vector, run_dynamics)
from .weights import (Exponential, Polynomial, Power, WeightSpec,
                      format_weight_spec, log_weight, log_weight_shifted,
                      parse_weight_spec, weight_deriv, weight_eval)

__version__ = "0.1.0"

__all__ = [
    "AuctionOutcome", "BidVector", "BoundVector", "BoxMappingReport",
    "DegenerateBidsError", "DynamicsTrace", "Experiment", "Exponential",
    "GridPoint", "NonConvergenceError", "Polynomial", "Power",
    "ResponseProblem", "RevenuePoint", "ScenarioSpec", "SweepOutcome",
    "SweepRow", "ValuationProfile", "WeightSpec", "allocate", "alpha_grid",
    "best_response", "best_response_vector", "bid_lower_bounds",
    "bound_condition", "box_mapping_probe", "char_residual",
    "default_steepness_grid", "format_weight_spec", "log_weight",
    "log_weight_shifted", "make_scenario", "parse_weight_spec", "revenue_at",
    "run_dynamics", "run_full_experiment", "settle", "sweep_steepness",
    "weight_deriv", "weight_eval",
]
