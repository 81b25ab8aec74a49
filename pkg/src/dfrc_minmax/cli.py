"""Command-line front end: run, sweep, and trace verbs.

Every verb writes a UTF-8 CSV with a header row and, unless --no-plot is
given, a PNG figure next to it.  Exit codes: 0 success, 2 config problems,
3 infeasible allocation.  Set DFRC_MINMAX_LOG=DEBUG|INFO|WARNING to control
log verbosity.
"""

import argparse
import csv
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .allocate import SolverParams, check_feasible, validate_result
from .config import load_scenario, load_sweep_spec
from .errors import (ConfigError, ConvergenceError, FloorViolationError,
                     InfeasibleError, UnequalPayloadsError)
from .scenario import run_slot, run_slots, slot_links

log = logging.getLogger("dfrc_minmax")

RUN_COLUMNS = ("slot", "vehicle", "power_w", "delay_s", "pcrb_theta",
               "pcrb_dist", "max_delay_s", "iterations", "converged")
SWEEP_COLUMNS = ("axis_value", "policy", "seed", "max_delay_s", "feasible")
BOUNDARY_COLUMNS = ("axis_value", "min_feasible_p_max_w")
TRACE_COLUMNS = ("iter", "t_lower_s", "t_upper_s")

_BOUNDARY_CAP_W = 2.0 ** 40


def _setup_logging():
    level_name = os.environ.get("DFRC_MINMAX_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _solver_params(args) -> SolverParams:
    return SolverParams(eps_delay=args.eps_delay, eps_power=args.eps_power)


def _load_scenario(args):
    scenario = load_scenario(args.config)
    if getattr(args, "seed", None) is not None:
        scenario = replace(scenario, seed=args.seed)
    return scenario


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _figure_path(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def cmd_run(args) -> int:
    scenario = _load_scenario(args)
    params = _solver_params(args)
    records = run_slots(scenario, args.policy, params)
    rows = []
    for record in records:
        validate_result(record.result, record.links, scenario.p_max)
        for k in range(len(scenario.vehicles)):
            rows.append((record.slot, k,
                         float(record.result.powers[k]),
                         float(record.result.delays[k]),
                         record.pcrb_theta[k], record.pcrb_dist[k],
                         record.result.max_delay, record.result.iterations,
                         record.result.converged))
    _write_csv(args.out, RUN_COLUMNS, rows)
    log.info("wrote %d rows to %s", len(rows), args.out)
    if not args.no_plot:
        from . import plots
        plots.render_run(records, args.policy, _figure_path(args.out))
    return 0


def _apply_axis(scenario, axis, value):
    def as_count(v):
        if float(v) != int(v) or int(v) < 1:
            raise ConfigError(f"axis value {v!r} must be a positive integer")
        return int(v)

    if axis == "p_max":
        if not value > 0:
            raise ConfigError("p_max axis values must be > 0")
        return replace(scenario, p_max=float(value))
    if axis == "n_vehicles":
        k = as_count(value)
        if k > len(scenario.vehicles):
            raise ConfigError(
                f"n_vehicles value {k} exceeds the {len(scenario.vehicles)} "
                "vehicles defined in the scenario")
        return replace(scenario, vehicles=scenario.vehicles[:k])
    field = {"n_tx": "n_tx", "n_rx": "n_rx", "n_veh_antennas": "n_veh"}[axis]
    arrays = replace(scenario.arrays, **{field: as_count(value)})
    return replace(scenario, arrays=arrays)


def _alg1_boundary(scenario) -> float:
    """Minimum p_max making alg1's relaxed floors feasible, by bisection."""
    links = slot_links(scenario, 0, "relaxed")
    total = sum(link.power_floor for link in links)
    if math.isinf(total):
        return math.inf

    def feasible(p_max):
        return check_feasible(links, p_max).feasible

    hi = 1.0
    while not feasible(hi):
        hi *= 2.0
        if hi > _BOUNDARY_CAP_W:
            return math.inf
    lo = 0.0
    while hi - lo > max(1e-12, 1e-6 * hi):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    spec = load_sweep_spec(args.sweep_spec)
    params = _solver_params(args)
    base_seed = scenario.seed
    rows = []
    boundary_rows = []
    for value in spec.values:
        swept = _apply_axis(scenario, spec.axis, value)
        for policy in spec.policies:
            for rep in range(spec.repetitions):
                seed = base_seed + rep
                point = replace(swept, seed=seed)
                try:
                    record = run_slot(point, 0, policy, params)
                    rows.append((value, policy, seed,
                                 record.result.max_delay, True))
                except (InfeasibleError, FloorViolationError) as exc:
                    log.info("axis=%s value=%s policy=%s seed=%d infeasible: %s",
                             spec.axis, value, policy, seed, exc)
                    rows.append((value, policy, seed, math.nan, False))
                except UnequalPayloadsError as exc:
                    raise ConfigError(
                        f"policy 'closed_form' cannot run this scenario: {exc}") from exc
        boundary_rows.append((value, _alg1_boundary(replace(swept, seed=base_seed))))
    _write_csv(args.out, SWEEP_COLUMNS, rows)
    boundary_path = _boundary_path(args.out)
    _write_csv(boundary_path, BOUNDARY_COLUMNS, boundary_rows)
    log.info("wrote %d sweep rows to %s and %d boundary rows to %s",
             len(rows), args.out, len(boundary_rows), boundary_path)
    if not args.no_plot:
        from . import plots
        plots.render_sweep(rows, boundary_rows, spec.axis, _figure_path(args.out))
    return 0


def _boundary_path(out_path) -> Path:
    out = Path(out_path)
    return out.with_name(out.stem + "_boundary" + out.suffix)


def cmd_trace(args) -> int:
    scenario = _load_scenario(args)
    params = _solver_params(args)
    record = run_slot(scenario, 0, "alg1", params)
    rows = [(i, lower, upper)
            for i, (lower, upper) in enumerate(record.result.bracket_trace)]
    _write_csv(args.out, TRACE_COLUMNS, rows)
    log.info("wrote %d trace rows to %s", len(rows), args.out)
    if not args.no_plot:
        from . import plots
        plots.render_trace(rows, _figure_path(args.out))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfrc-minmax",
        description="Min-max transmit-delay power allocation experiments")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, with_policy=False, with_eps_power=True):
        p.add_argument("--config", required=True, help="scenario YAML file")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
        p.add_argument("--eps-delay", type=float, default=1e-9,
                       help="bisection termination width in seconds")
        if with_eps_power:
            p.add_argument("--eps-power", type=float, default=1e-9,
                           help="transfer-step termination in watts")
        if with_policy:
            p.add_argument("--policy", default="alg1",
                           choices=("epa", "closed_form", "alg1", "alg2"),
                           help="allocation policy")
        p.add_argument("--no-plot", action="store_true",
                       help="skip the PNG figure next to the CSV")

    run_p = sub.add_parser("run", help="run every slot under one policy")
    common(run_p, with_policy=True)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="grid experiment over one axis")
    common(sweep_p)
    sweep_p.add_argument("--sweep-spec", required=True, help="sweep YAML file")
    sweep_p.set_defaults(func=cmd_sweep)

    trace_p = sub.add_parser("trace", help="bisection bracket trajectory on slot 0")
    common(trace_p, with_eps_power=False)
    trace_p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "eps_power"):
        args.eps_power = 1e-9
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, FloorViolationError) as exc:
        deficit = getattr(exc, "deficit", None)
        report = f"infeasible: {exc}"
        if deficit is not None:
            report += f" (deficit {deficit:.6g} W)"
        print(report, file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
