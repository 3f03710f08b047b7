"""Command-line front end: single auctions, dynamics, sweeps, bounds and
box-mapping verification, with CSV output.

Defaults encode the reference protocol, so ``qpauction sweep --n 2`` with no
other flags runs the standard two-bidder experiment. Floats in CSV files are
rendered with 12 significant digits; repeated runs with identical flags and
seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .auction import BidVector, ValuationProfile, settle
from .equilibrium import (BoxMappingReport, bid_lower_bounds, bound_condition,
                          box_mapping_probe)
from .experiments import (DEFAULT_GRID_HI, DEFAULT_GRID_LO, DEFAULT_GRID_POINTS,
                          SWEEPABLE_FAMILIES, SweepRow, run_full_experiment)
from .response import DynamicsTrace, run_dynamics
from .weights import Exponential, parse_weight_spec

SWEEP_HEADER = "alpha,family,best_steepness,revenue,high_alloc,high_bid,low_bid,residual,boundary_flag"


@dataclass(frozen=True)
class RunConfig:
    """Validated CLI invocation."""

    verb: str
    weight: object = None
    values: tuple = None
    bids: tuple = None
    n: int = 2
    alpha: float = None
    alphas: tuple = None
    families: tuple = ("exp", "pow")
    c_grid: tuple = (DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS)
    p_grid: tuple = (DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS)
    iters: int = 100
    start: float = 0.5
    tol: float = 0.0
    samples: int = 1000
    seed: int = 0
    c: float = None
    out: str = None


def _weight_arg(text):
    try:
        return parse_weight_spec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats_arg(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from None


def _families_arg(text):
    fams = tuple(f.strip() for f in text.split(","))
    for f in fams:
        if f not in SWEEPABLE_FAMILIES:
            raise argparse.ArgumentTypeError(
                f"unknown family {f!r}; choose from {','.join(SWEEPABLE_FAMILIES)}")
    if len(set(fams)) != len(fams):
        raise argparse.ArgumentTypeError("duplicate family")
    return fams


def _grid_arg(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected LO,HI,COUNT, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI,COUNT numbers, got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError(f"grid needs 0 < LO < HI, got {text!r}")
    if count < 2:
        raise argparse.ArgumentTypeError(f"grid needs COUNT >= 2, got {text!r}")
    return (lo, hi, count)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qpauction",
        description="Quasi-proportional winners-pay auctions: best responses, "
                    "dynamics, equilibrium checks and steepness sweeps.")
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="settle a single auction at given bids")
    run.add_argument("--weight", type=_weight_arg, required=True,
                     help="weight spec, e.g. exp:c=2, pow:p=1, poly:c1=1,c2=0.5")
    run.add_argument("--values", type=_floats_arg, required=True)
    run.add_argument("--bids", type=_floats_arg, required=True)
    run.add_argument("--out", default=None)

    dyn = sub.add_parser("dynamics", help="run synchronous best-response dynamics")
    dyn.add_argument("--weight", type=_weight_arg, required=True)
    dyn.add_argument("--values", type=_floats_arg, default=None)
    dyn.add_argument("--n", type=int, default=None)
    dyn.add_argument("--alpha", type=float, default=None)
    dyn.add_argument("--iters", type=int, default=100)
    dyn.add_argument("--start", type=float, default=0.5)
    dyn.add_argument("--tol", type=float, default=0.0)
    dyn.add_argument("--out", default=None)

    sweep = sub.add_parser("sweep", help="revenue-maximizing steepness sweep")
    sweep.add_argument("--n", type=int, default=2)
    sweep.add_argument("--families", type=_families_arg, default=("exp", "pow"))
    sweep.add_argument("--alphas", type=_floats_arg, default=None,
                       help="override the default alpha grid")
    sweep.add_argument("--c-grid", type=_grid_arg,
                       default=(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS),
                       help="exponential grid LO,HI,COUNT (log-spaced)")
    sweep.add_argument("--p-grid", type=_grid_arg,
                       default=(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS),
                       help="power grid LO,HI,COUNT (log-spaced)")
    sweep.add_argument("--iters", type=int, default=100)
    sweep.add_argument("--start", type=float, default=0.5)
    sweep.add_argument("--out", default=None)

    bounds = sub.add_parser("bounds", help="canonical bid lower bounds for exp:c")
    bounds.add_argument("--values", type=_floats_arg, required=True)
    bounds.add_argument("--c", type=float, required=True)
    bounds.add_argument("--out", default=None)

    verify = sub.add_parser("verify", help="sampled box-mapping check of the bounds")
    verify.add_argument("--values", type=_floats_arg, required=True)
    verify.add_argument("--c", type=float, required=True)
    verify.add_argument("--samples", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default=None)

    return parser


def parse_args(argv) -> RunConfig:
    """Parse and validate argv into a RunConfig; exits with a usage error
    naming the offending flag otherwise."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    verb = ns.verb

    def bail(msg):
        parser.error(msg)

    if verb in ("dynamics", "sweep"):
        if ns.iters < (1 if verb == "dynamics" else 0):
            bail(f"--iters must be >= 1 for {verb}" if verb == "dynamics"
                 else "--iters must be >= 0")
        if not 0.0 < ns.start:
            bail("--start must be positive")
        cap = min(ns.values) if getattr(ns, "values", None) else 1.0
        if ns.start > cap:
            bail("--start must not exceed the smallest value")
    if verb == "dynamics":
        if ns.tol < 0.0:
            bail("--tol must be >= 0")
        if ns.values is None and (ns.n is None or ns.alpha is None):
            bail("dynamics needs --values or both --n and --alpha")
        if ns.values is not None and (ns.n is not None or ns.alpha is not None):
            bail("give either --values or --n/--alpha, not both")
        if ns.n is not None and ns.n < 2:
            bail("--n must be >= 2")
        if ns.alpha is not None and ns.alpha < 1.0:
            bail("--alpha must be >= 1")
    if verb == "sweep":
        if ns.n < 2:
            bail("--n must be >= 2")
        if ns.alphas is not None and any(a < 1.0 for a in ns.alphas):
            bail("--alphas entries must be >= 1")
    if verb in ("bounds", "verify"):
        if ns.c <= 0.0 or not np.isfinite(ns.c):
            bail("--c must be positive and finite")
        if any(v <= 0.0 for v in ns.values):
            bail("--values entries must be positive")
    if verb == "verify" and ns.samples < 0:
        bail("--samples must be >= 0")
    if verb == "run":
        if any(v <= 0.0 for v in ns.values):
            bail("--values entries must be positive")
        if any(b < 0.0 for b in ns.bids):
            bail("--bids entries must be nonnegative")

    kwargs = {k: v for k, v in vars(ns).items() if v is not None}
    return RunConfig(**kwargs)


def _fmt(x):
    if isinstance(x, bool):
        return "True" if x else "False"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _write_lines(path, lines):
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _sweep_lines(rows):
    lines = [SWEEP_HEADER]
    for r in sorted(rows, key=lambda r: (r.alpha, r.family)):
        lines.append(",".join([
            _fmt(r.alpha), r.family, _fmt(r.best_steepness), _fmt(r.revenue),
            _fmt(r.high_alloc), _fmt(r.high_bid), _fmt(r.low_bid), _fmt(r.residual),
            _fmt(not r.grid_argmax_interior)]))
    return lines


def _dynamics_lines(trace, spec, profile):
    n = profile.n
    header = "iter," + ",".join(f"b_{i}" for i in range(1, n + 1)) + ",revenue,residual"
    lines = [header]
    iterates = trace.iterates
    for k, bid_vec in enumerate(iterates):
        outcome = settle(spec, profile, bid_vec)
        if k + 1 < len(iterates):
            step = float(np.max(np.abs(iterates[k + 1].as_array() - bid_vec.as_array())))
        else:
            step = trace.residual
        lines.append(",".join([str(k)] + [_fmt(b) for b in bid_vec.bids]
                              + [_fmt(outcome.revenue), _fmt(step)]))
    return lines


def _record_lines(record):
    lines = ["key,value"]
    for key, value in record.items():
        lines.append(f"{key},{_fmt(value)}")
    return lines


def write_csv(obj, path, spec=None, profile=None):
    """Write sweep rows, a dynamics trace (needs spec and profile), or a
    flat key-value record to ``path``."""
    if isinstance(obj, DynamicsTrace):
        if spec is None or profile is None:
            raise ValueError("writing a dynamics trace needs spec= and profile=")
        lines = _dynamics_lines(obj, spec, profile)
    elif isinstance(obj, BoxMappingReport):
        lines = _record_lines(obj.as_record())
    elif isinstance(obj, dict):
        lines = _record_lines(obj)
    elif isinstance(obj, (list, tuple)) and all(isinstance(r, SweepRow) for r in obj):
        lines = _sweep_lines(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to CSV")
    _write_lines(path, lines)


def read_sweep_csv(path):
    """Parse a sweep CSV back into SweepRow records (final bids are not
    stored in the file)."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != SWEEP_HEADER:
        raise ValueError(f"{path} is not a sweep CSV (bad header)")
    rows = []
    for ln in lines[1:]:
        fields = ln.split(",")
        if len(fields) != 9:
            raise ValueError(f"malformed sweep CSV row: {ln!r}")
        rows.append(SweepRow(
            alpha=float(fields[0]), family=fields[1], best_steepness=float(fields[2]),
            revenue=float(fields[3]), high_alloc=float(fields[4]), high_bid=float(fields[5]),
            low_bid=float(fields[6]), residual=float(fields[7]),
            grid_argmax_interior=fields[8] == "False"))
    return tuple(rows)


def _cmd_run(config):
    profile = ValuationProfile(config.values)
    bids = BidVector(config.bids)
    outcome = settle(config.weight, profile, bids)
    record = {}
    for i in range(profile.n):
        record[f"allocation_{i + 1}"] = outcome.allocations[i]
        record[f"payment_{i + 1}"] = outcome.payments[i]
        record[f"utility_{i + 1}"] = outcome.utilities[i]
    record["revenue"] = outcome.revenue
    print("i value bid allocation payment utility")
    for i in range(profile.n):
        print(f"{i + 1} {_fmt(profile.values[i])} {_fmt(bids.bids[i])} "
              f"{_fmt(outcome.allocations[i])} {_fmt(outcome.payments[i])} "
              f"{_fmt(outcome.utilities[i])}")
    print(f"revenue {_fmt(outcome.revenue)}")
    if config.out:
        write_csv(record, config.out)
    return 0


def _cmd_dynamics(config):
    if config.values is not None:
        profile = ValuationProfile(config.values)
    else:
        profile = ValuationProfile((config.alpha,) + (1.0,) * (config.n - 1))
    start = BidVector((config.start,) * profile.n)
    trace = run_dynamics(config.weight, profile, start=start,
                         max_iters=config.iters, tol=config.tol)
    outcome = settle(config.weight, profile, trace.final)
    print(f"iterations {trace.iterations}")
    print("final_bids " + ",".join(_fmt(b) for b in trace.final.bids))
    print(f"revenue {_fmt(outcome.revenue)}")
    print(f"residual {_fmt(trace.residual)}")
    if trace.rescued:
        print("warning: some bidder faced zero rival weight and got the floor bid")
    if config.out:
        write_csv(trace, config.out, spec=config.weight, profile=profile)
    return 0


def _log_grid(lo_hi_count):
    lo, hi, count = lo_hi_count
    return np.geomspace(lo, hi, int(count))


def _cmd_sweep(config):
    grids = {}
    if "exp" in config.families:
        grids["exp"] = _log_grid(config.c_grid)
    if "pow" in config.families:
        grids["pow"] = _log_grid(config.p_grid)
    experiment = run_full_experiment(
        config.n, alphas=config.alphas, grids=grids,
        iters=config.iters, start=config.start)
    lines = _sweep_lines(experiment.rows)
    if config.out:
        _write_lines(config.out, lines)
        print(f"wrote {len(experiment.rows)} rows to {config.out}")
    else:
        for ln in lines:
            print(ln)
    if experiment.revenue_crossovers:
        for lo, hi in experiment.revenue_crossovers:
            print(f"revenue_crossover_bracket {_fmt(lo)},{_fmt(hi)}")
    if experiment.bid_gap_crossovers:
        for lo, hi in experiment.bid_gap_crossovers:
            print(f"bid_gap_crossover_bracket {_fmt(lo)},{_fmt(hi)}")
    print(f"converged_grid_points {experiment.base_points_converged}/{experiment.base_points_total}")
    for p in experiment.nonconverged:
        print(f"nonconverged alpha={_fmt(p.alpha)} family={p.family} "
              f"steepness={_fmt(p.steepness)} residual={_fmt(p.residual)}")
    return 0


def _cmd_bounds(config):
    profile = ValuationProfile(config.values)
    bv = bid_lower_bounds(profile, config.c)
    record = {f"w_{i + 1}": b for i, b in enumerate(bv.bounds)}
    record["premise_ok"] = bv.premise_ok
    record["degenerate"] = bv.degenerate
    print("bounds " + ",".join(_fmt(b) for b in bv.bounds))
    if not bv.degenerate:
        cond = bound_condition(Exponential(config.c), profile, bv.bounds)
        print("condition " + ",".join(_fmt(bool(x)) for x in cond))
    print(f"premise_ok {_fmt(bv.premise_ok)}")
    print(f"degenerate {_fmt(bv.degenerate)}")
    if config.out:
        write_csv(record, config.out)
    return 0


def _cmd_verify(config):
    profile = ValuationProfile(config.values)
    bv = bid_lower_bounds(profile, config.c)
    if not bv.premise_ok:
        print("premise_ok False")
        print("verification failed: bounds do not satisfy the self-supporting condition")
        return 1
    report = box_mapping_probe(Exponential(config.c), profile, bv,
                               samples=config.samples, seed=config.seed)
    for key, value in report.as_record().items():
        print(f"{key} {_fmt(value)}")
    if config.out:
        write_csv(report, config.out)
    return 0 if report.violations == 0 else 1


_COMMANDS = {
    "run": _cmd_run,
    "dynamics": _cmd_dynamics,
    "sweep": _cmd_sweep,
    "bounds": _cmd_bounds,
    "verify": _cmd_verify,
}


def main(argv=None):
    config = parse_args(sys.argv[1:] if argv is None else list(argv))
    try:
        return _COMMANDS[config.verb](config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
