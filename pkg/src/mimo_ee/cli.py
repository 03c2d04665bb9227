"""Command-line front end: figure-style CSV exports and the validation suite.

Exit codes: 0 success (all checks pass), 1 validation failure, 2 config
error, 3 runtime error.
"""

import argparse
import sys

from . import channel, checks, mc, optimize
from .config import RunConfig, load_config
from .errors import ConfigError, MimoEeError
from .optimize import EeContext


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _context(rc: RunConfig, snr_db: float, delta: float) -> EeContext:
    return EeContext(snr=10.0 ** (snr_db / 10.0), impairment=delta,
                     coherence=rc.coherence, power=rc.power)


def cmd_se_curve(rc: RunConfig) -> int:
    """Monte Carlo vs deterministic spectral efficiency over an n_t sweep."""
    if rc.sweep.variable != "n_t":
        raise ConfigError("se-curve requires [sweep] variable = n_t")
    n_t_values = rc.sweep.integer_values()
    beta = rc.n_r / rc.n_t
    rows = []
    per_delta = {}
    for delta in rc.deltas:
        template = channel.SystemConfig(
            n_t=rc.n_t, n_r=rc.n_r, coherence=rc.coherence,
            training_len=rc.training_len, snr=rc.snr, impairment=delta)
        per_delta[delta] = mc.convergence_sweep(
            template, n_t_values, beta, rc.trials, rc.seed, workers=rc.threads)
    for i, n_t in enumerate(n_t_values):
        for delta in rc.deltas:
            r = per_delta[delta][i]
            rows.append((r.n_t, r.n_r, rc.snr_db, delta, r.mc_rate,
                         r.mc_stderr, r.det_rate, r.rel_error))
    _write_csv(rc.output,
               ["n_t", "n_r", "snr_db", "delta", "mc_rate", "mc_stderr",
                "det_rate", "rel_error"], rows)
    return 0


def cmd_optimize(rc: RunConfig) -> int:
    """Optimal training length and antenna configuration over an SNR sweep."""
    if rc.sweep.variable != "snr_db":
        raise ConfigError("optimize requires [sweep] variable = snr_db")
    rows = []
    for snr_db in rc.sweep.values():
        for delta in rc.deltas:
            ctx = _context(rc, snr_db, delta)
            res = optimize.iterate(rc.optimizer, optimize.default_initial(ctx), ctx)
            rows.append((snr_db, delta, res.t_p_star, res.t_a_star,
                         res.n_t_star, res.n_r_star, res.beta_star,
                         res.ee_star, res.iterations, res.converged))
    _write_csv(rc.output,
               ["snr_db", "delta", "t_p_star", "t_a_star", "n_t_star",
                "n_r_star", "beta_star", "ee_star", "iterations", "converged"],
               rows)
    return 0


def cmd_compare_oracle(rc: RunConfig) -> int:
    """Iterative optimizer vs exhaustive lattice search over an SNR sweep."""
    if rc.sweep.variable != "snr_db":
        raise ConfigError("compare-oracle requires [sweep] variable = snr_db")
    rows = []
    for snr_db in rc.sweep.values():
        for delta in rc.deltas:
            ctx = _context(rc, snr_db, delta)
            res = optimize.iterate(rc.optimizer, optimize.default_initial(ctx), ctx)
            oracle = optimize.grid_search(ctx, rc.nt_max, rc.nr_max, rc.tp_max)
            gap = (oracle.ee_star - res.ee_star) / oracle.ee_star
            rows.append((snr_db, delta, res.ee_star, oracle.ee_star, gap))
    _write_csv(rc.output,
               ["snr_db", "delta", "ee_iterative", "ee_grid", "rel_gap"], rows)
    return 0


def cmd_validate(rc: RunConfig) -> int:
    """Run the invariant suite; exit 0 only when every check passes."""
    results = checks.run_all_checks(rc.seed)
    rows = [(r.name, r.measured, r.threshold, r.passed) for r in results]
    _write_csv(rc.output, ["check", "measured", "threshold", "pass"], rows)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}: {r.measured:.6g} (threshold {r.threshold:.6g})")
    return 0 if all(r.passed for r in results) else 1


_COMMANDS = {
    "se-curve": cmd_se_curve,
    "optimize": cmd_optimize,
    "compare-oracle": cmd_compare_oracle,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-ee-opt",
        description="Energy-efficiency analysis and optimization for "
                    "training-based large-scale MIMO links with residual "
                    "transmit impairments.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="INI-style run configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override a single config value (repeatable)")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--seed", type=int, help="RNG seed override")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials override")
    parser.add_argument("--threads", type=int, help="worker thread count override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = load_config(args.config, args.overrides)
        if args.out is not None:
            rc.output = args.out
        if args.seed is not None:
            rc.seed = args.seed
        if args.trials is not None:
            rc.trials = args.trials
        if args.threads is not None:
            rc.threads = args.threads
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](rc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (MimoEeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
