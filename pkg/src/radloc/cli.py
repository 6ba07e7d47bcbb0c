"""Command-line entry point: ``radloc {solve,repro,sweep,axes}``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from radloc import __version__
from radloc.config import SCHEMA_VERSION, load_scenario, load_sweep_config
from radloc.costs import BaselineCost, ConvexCost, assemble_quadratic
from radloc.errors import ConfigError, InvalidScenario, LocalizationError
from radloc.geometry import sequential_axes
from radloc.harness import (
    emit_csv,
    emit_table_csv,
    emit_trajectory_csv,
    run_sweep,
    spurious_runs,
)
from radloc.solver import SolverConfig, auto_step, descend, solve_direct

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt_point(p):
    return f"[{float(p[0])!r}, {float(p[1])!r}]"


def cmd_solve(args) -> int:
    job = load_scenario(args.config, seed=args.seed)
    sc = job.scenario
    if job.algorithm == "direct":
        estimate = solve_direct(assemble_quadratic(ConvexCost.from_scenario(sc)))
        print("algorithm: direct")
        print(f"estimate: {_fmt_point(estimate)}")
    else:
        if job.algorithm == "convex":
            cost = ConvexCost.from_scenario(sc)
        else:
            cost = BaselineCost.from_scenario(sc, job.weights)
        mu = args.mu if args.mu is not None else job.mu
        if job.auto_step and args.mu is None:
            if job.algorithm != "convex":
                raise ConfigError("auto_step is only defined for the convex cost")
            mu = auto_step(assemble_quadratic(cost))
        cfg = SolverConfig(
            mu=mu,
            max_iters=args.max_iters if args.max_iters is not None else job.max_iters,
            grad_tol=job.grad_tol,
            initial=job.initial,
            record_trajectory=args.out is not None,
        )
        res = descend(cost, cfg)
        estimate = res.estimate
        print(f"algorithm: {job.algorithm}")
        print(f"mu: {mu!r}")
        print(f"estimate: {_fmt_point(estimate)}")
        print(f"iterations: {res.iterations}")
        print(f"converged: {str(res.converged).lower()}")
        print(f"final_cost: {res.final_cost!r}")
        if args.out is not None:
            path = emit_trajectory_csv(res, args.out)
            print(f"trajectory: {path}")
    if sc.source is not None:
        err = estimate - sc.source
        print(f"sq_error: {float(err @ err)!r}")
    return EXIT_OK


def cmd_repro(args) -> int:
    mu = args.mu if args.mu is not None else 0.001
    runs = spurious_runs(mu=mu, record_trajectory=args.out is not None)
    for name in ("baseline", "convex"):
        r = runs[name]
        print(f"{name}: estimate {_fmt_point(r.estimate)} after {r.iterations} iterations"
              f" (converged={str(r.converged).lower()})")
    if args.out is not None:
        out = Path(args.out)
        for name in ("baseline", "convex"):
            path = emit_trajectory_csv(runs[name], out / f"spurious_{name}_trajectory.csv")
            print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.mu is not None:
        overrides["mu"] = args.mu
    if args.max_iters is not None:
        overrides["max_iters"] = args.max_iters
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.auto_step:
        overrides["auto_step"] = True
    if overrides:
        try:
            cfg = replace(cfg, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    records, table = run_sweep(cfg)
    out = Path(args.out or ".")
    rec_path = emit_csv(records, out / "records.csv")
    tab_path = emit_table_csv(table, out / "summary.csv")
    print("sigma_db,algorithm,class,mean_sq_error,trial_count")
    for row in table:
        print(f"{row['sigma_db']!r},{row['algorithm']},{row['class']},{row['mean_sq_error']!r},{row['trial_count']}")
    print(f"wrote {rec_path}")
    print(f"wrote {tab_path}")
    return EXIT_OK


def cmd_axes(args) -> int:
    job = load_scenario(args.config, seed=args.seed)
    print("pair,foot_x,foot_y,dir_x,dir_y")
    for k, ax in enumerate(sequential_axes(job.scenario), start=1):
        f, e = ax.foot.tolist(), ax.direction.tolist()
        print(f"{k},{f[0]!r},{f[1]!r},{e[0]!r},{e[1]!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    common.add_argument("--out", default=None, help="output file (solve) or directory")
    common.add_argument("--mu", type=float, default=None, help="override the step size")
    common.add_argument("--max-iters", type=int, default=None, help="override the iteration cap")

    parser = _Parser(prog="radloc", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"radloc {__version__} (config schema {SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="localize one scenario from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("repro", parents=[common], help="reproduce a built-in experiment")
    p.add_argument("experiment", choices=["spurious"])
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo shadowing-noise sweep")
    p.add_argument("config")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--auto-step", action="store_true", help="convex step size from the Hessian bound")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("axes", parents=[common], help="print the radical axes of a scenario")
    p.add_argument("config")
    p.set_defaults(func=cmd_axes)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("radloc: a subcommand is required (solve, repro, sweep, axes)")
        return args.func(args)
    except (UsageError, ConfigError, InvalidScenario) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LocalizationError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
