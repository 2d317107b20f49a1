"""
Command line interface: simulate, check and plot.

    simulate --config <path> --out <dir>
    check --suite <name> [--fixture <path>] [--seed N] [--report <path>]
    plot --in <csv> --cols <list> --out <svg> [--x <column>]

Exit codes: 0 ok, 1 usage or configuration, 2 numerical failure,
3 invariant violation.
"""

import argparse
import concurrent.futures
import hashlib
import json
import logging
import os
import sys

import numpy as np

from .constants import (
    CSV_FLOAT_FORMAT,
    EXIT_INVARIANT,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    THREADS_ENV_VAR,
    VERSION,
)
from .conservation import classical_angular_momentum, s1_momentum_map, semiclassical_angular_momentum
from .config import load_config
from .dynamics import classical_hamiltonian, reduced_hamiltonian
from .errors import ConfigError, GWPError, InvariantViolation, NumericalFailure
from .geometry import so_components, so_index_pairs
from .integrators import STATE_KINDS, build_initial_state, integrate, make_stepper
from .plotting import plot_csv
from .suites import SUITES, run_suite
from .wavepacket import as_reduced

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors surface as ConfigError."""

    def error(self, message):
        raise ConfigError(message)


def configure_logging(verbosity=0, log_file=None):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    handler = logging.FileHandler(log_file) if log_file else logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def _component_names(base, d):
    if d == 2:
        return [base]
    if d == 3:
        return [f"{base}_{i}" for i in range(1, 4)]
    return [f"{base}_{j + 1}{k + 1}" for j, k in so_index_pairs(d)]


def trajectory_invariants(cfg, model):
    """
    Ordered invariants recorded along a simulate run, with their column names.

    Returns:
        list: (series name, column names, callable(state))
    """
    d = cfg.dimension
    kind = STATE_KINDS[cfg.integrator]
    if kind == "classical":
        entries = [("H0", ["H0"], lambda s: classical_hamiltonian(s.q, s.p, model, cfg))]
        if d >= 2:
            entries.append(
                ("J0", _component_names("J0", d), lambda s: so_components(classical_angular_momentum(s.q, s.p)))
            )
        return entries
    entries = [
        ("H1", ["H1"], lambda s: reduced_hamiltonian(as_reduced(s), model, cfg, "asymptotic")),
    ]
    if d >= 2:
        entries.append(
            (
                "J_hbar",
                _component_names("J_hbar", d),
                lambda s: so_components(semiclassical_angular_momentum(as_reduced(s), cfg.hbar)),
            )
        )
        entries.append(
            ("J0", _component_names("J0", d), lambda s: so_components(classical_angular_momentum(s.q, s.p)))
        )
    if cfg.integrator == "rk4_exact":
        entries.append(("H_exact", ["H_exact"], lambda s: reduced_hamiltonian(s, model, cfg, "exact")))
    if kind == "full":
        entries.append(("phi", ["phi"], lambda s: s.phi))
        entries.append(("delta", ["delta"], lambda s: s.delta))
        entries.append(("J_M", ["J_M"], lambda s: s1_momentum_map(s, cfg)))
    if kind == "hagedorn":
        entries.append(("S", ["S"], lambda s: s.S))
        entries.append(("residuals", ["r1", "r2"], lambda s: s.residuals()))
    return entries


def trajectory_columns(cfg):
    """CSV header names for a simulate run of cfg."""
    d = cfg.dimension
    idx = range(1, d + 1)
    names = ["t"]
    names += [f"q{i}" for i in idx]
    names += [f"p{i}" for i in idx]
    if STATE_KINDS[cfg.integrator] != "classical":
        names += [f"A{i}{j}" for i in idx for j in idx]
        names += [f"B{i}{j}" for i in idx for j in idx]
    for _, columns, _ in trajectory_invariants(cfg, None):
        names += columns
    if STATE_KINDS[cfg.integrator] == "hagedorn":
        names.append("arg_det_Q")
    return names


def trajectory_table(record, cfg, model):
    """Rows of the trajectory CSV as a float array."""
    n = len(record)
    blocks = [np.asarray(record.times, dtype=float).reshape(n, 1)]
    classical = STATE_KINDS[cfg.integrator] == "classical"
    states = record.states if classical else [as_reduced(s) for s in record.states]
    blocks.append(np.array([s.q for s in states]).reshape(n, -1))
    blocks.append(np.array([s.p for s in states]).reshape(n, -1))
    if not classical:
        blocks.append(np.array([w.A for w in states]).reshape(n, -1))
        blocks.append(np.array([w.B for w in states]).reshape(n, -1))
    for name, _, _ in trajectory_invariants(cfg, model):
        blocks.append(np.real(record[name].as_array()).reshape(n, -1))
    if "arg_det_Q" in record.series:
        blocks.append(record["arg_det_Q"].as_array().reshape(n, 1))
    return np.hstack(blocks)


def config_hash(cfg):
    payload = json.dumps(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def run_simulation(cfg, out_dir, stem="trajectory"):
    """
    Integrate cfg and write <stem>.csv and <stem>.json into out_dir.

    Returns:
        str: Path of the CSV file
    """
    model = cfg.model()
    entries = trajectory_invariants(cfg, model)
    stepper = make_stepper(cfg.integrator, model, cfg)
    record = integrate(stepper, build_initial_state(cfg), cfg, {name: fn for name, _, fn in entries})
    columns = trajectory_columns(cfg)
    table = trajectory_table(record, cfg, model)

    csv_path = os.path.join(out_dir, f"{stem}.csv")
    np.savetxt(csv_path, table, fmt=CSV_FLOAT_FORMAT, delimiter=",", header=",".join(columns), comments="")
    metadata = {
        "version": VERSION,
        "config": cfg.to_dict(),
        "records": len(record),
        "columns": columns,
    }
    with open(os.path.join(out_dir, f"{stem}.json"), "w") as f:
        json.dump(metadata, f, sort_keys=True, indent=2)
        f.write("\n")
    logger.info("Wrote %s (%d records)", csv_path, len(record))
    return csv_path


def _worker_count(n_runs):
    value = os.environ.get(THREADS_ENV_VAR)
    if value is None:
        limit = os.cpu_count() or 1
    else:
        try:
            limit = int(value)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got '{value}'")
        if limit < 1:
            raise ConfigError(f"{THREADS_ENV_VAR} must be positive, got {limit}")
    return max(1, min(n_runs, limit))


def run_sweep(cfg, out_dir):
    """
    One run per swept value, written to run-<hash>.csv/.json.

    Returns:
        list: CSV paths in sweep order
    """
    (key, values), = cfg.sweep.items()
    runs = [cfg.resolved(**{key: value}) for value in values]
    workers = _worker_count(len(runs))
    logger.info("Sweeping %s over %d values with %d workers", key, len(runs), workers)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_simulation, run, out_dir, f"run-{config_hash(run)}") for run in runs]
        return [future.result() for future in futures]


def cmd_simulate(args):
    cfg = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    if cfg.sweep:
        run_sweep(cfg, args.out)
    else:
        run_simulation(cfg, args.out)
    return EXIT_OK


def cmd_check(args):
    report = run_suite(args.suite, fixture=args.fixture, seed=args.seed)
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    if args.report:
        with open(args.report, "w") as f:
            f.write(text + "\n")
    print(text)
    if not report.passed:
        worst = report.failures()[0]
        raise InvariantViolation(worst.quantity, worst.observed, worst.threshold)
    return EXIT_OK


def cmd_plot(args):
    cols = [c.strip() for c in args.cols.split(",") if c.strip()]
    plot_csv(args.input, cols, args.out, x_col=args.x)
    return EXIT_OK


def build_parser():
    parser = ArgumentParser(prog="gwp", description="Semiclassical Gaussian wave packet dynamics")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Increase log verbosity")
    parser.add_argument("--log-file", help="Write log records to this file instead of stderr")
    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    sub.required = True

    simulate = sub.add_parser("simulate", help="Integrate a configured trajectory")
    simulate.add_argument("--config", required=True, help="JSON configuration file")
    simulate.add_argument("--out", required=True, help="Output directory")
    simulate.set_defaults(handler=cmd_simulate)

    check = sub.add_parser("check", help="Run a property suite")
    check.add_argument("--suite", required=True, choices=list(SUITES), help="Suite name")
    check.add_argument("--fixture", help="Configuration replacing the suite's default fixtures")
    check.add_argument("--seed", type=int, default=None, help="Random seed for sampled suites")
    check.add_argument("--report", help="Also write the JSON report to this file")
    check.set_defaults(handler=cmd_check)

    plot = sub.add_parser("plot", help="Plot trajectory CSV columns as SVG")
    plot.add_argument("--in", dest="input", required=True, help="Trajectory CSV")
    plot.add_argument("--cols", required=True, help="Comma separated column names")
    plot.add_argument("--out", required=True, help="SVG output path")
    plot.add_argument("--x", default="t", help="Abscissa column (default t)")
    plot.set_defaults(handler=cmd_plot)
    return parser


def main(argv=None):
    """
    Entry point. Returns the process exit code.
    """
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose, args.log_file)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as e:
        logger.error("Numerical failure: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvariantViolation as e:
        logger.error("Invariant violation: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except GWPError as e:
        logger.error("Failed: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
