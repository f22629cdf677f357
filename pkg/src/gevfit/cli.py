"""Command-line interface: ``gevfit fit|profile|simulate|verify``.

Exit status: 0 on success, 1 on usage or input errors, 2 on numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import lab
from .core import GevParams, draw
from .errors import (
    BracketFailure,
    ConvergenceFailure,
    DegenerateData,
    DomainError,
    GevError,
    NoCandidate,
    ParseError,
    PreconditionViolated,
    SingularInformation,
)
from .io import BlockSpec, block_maxima, ingest_csv, to_json, values_csv, write_text
from .mle import SearchConfig, fit
from .profile import DEFAULT_TOL, curve

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (BracketFailure, ConvergenceFailure, NoCandidate, SingularInformation)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", default="-", help="CSV file, '-' or absent for stdin")
    p.add_argument("--column", default=None, help="column name or 0-based index")
    p.add_argument("--block-size", type=int, default=None,
                   help="reduce the series to maxima of blocks of this length")


def _add_output_args(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gevfit", description="Global maximum-likelihood GEV fitting.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a GEV distribution to one CSV column")
    _add_data_args(p)
    p.add_argument("--xi-min", type=float, default=-0.99)
    p.add_argument("--xi-max", type=float, default=None)
    p.add_argument("--grid", type=int, default=256, help="coarse shape grid size")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_output_args(p, "json")

    p = sub.add_parser("profile", help="profile log-likelihood on a shape grid")
    _add_data_args(p)
    p.add_argument("--xi-min", type=float, default=-0.9)
    p.add_argument("--xi-max", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=191)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_output_args(p, "csv")

    p = sub.add_parser("simulate", help="draw a seeded GEV sample as CSV")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_output_args(p, "csv")

    p = sub.add_parser("verify", help="run a verification experiment")
    p.add_argument("experiment", choices=sorted(lab.EXPERIMENTS))
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=20.0)
    p.add_argument("--xi", type=float, default=0.2)
    p.add_argument("--n", type=int, nargs="+", default=None, help="sample-size grid")
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--alpha-min", type=float, default=-1.0)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--input", default=None, help="data for the boundary experiment")
    p.add_argument("--column", default=None)
    p.add_argument("--outdir", default=None,
                   help="also write <name>_report.json and <name>_raw.csv here")
    _add_output_args(p, "json")
    return parser


def _load(args):
    data = ingest_csv(args.input, args.column)
    if args.block_size is not None:
        data = block_maxima(data, BlockSpec(args.block_size))
    return data


def _cmd_fit(args) -> str:
    data = _load(args)
    cfg = SearchConfig(xi_lower=args.xi_min, xi_upper=args.xi_max,
                       coarse_grid_size=args.grid, beta_tol=args.tol)
    res = fit(data, cfg)
    if args.format == "csv":
        t = res.theta_hat
        se = res.se or (float("nan"),) * 3
        header = "tau,mu,xi,beta,loglik,se_mu,se_tau,se_xi\n"
        vals = (t.tau, t.mu, t.xi, res.beta_hat, res.loglik, *se)
        return header + ",".join(format(v, ".17g") for v in vals) + "\n"
    return to_json(res.to_dict())


def _cmd_profile(args) -> str:
    data = _load(args)
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    if not args.xi_min < args.xi_max and args.grid > 1:
        raise UsageError("--xi-min must be below --xi-max")
    grid = np.linspace(args.xi_min, args.xi_max, args.grid)
    crv = curve(data, grid, args.tol)
    for xi, msg in crv.errors:
        print(f"gevfit: xi={xi:.17g}: {msg}", file=sys.stderr)
    if args.format == "json":
        return to_json({"n": crv.n, "fingerprint": crv.fingerprint,
                        "points": [{"xi": p.xi, "beta_n": p.beta_n, "tau_n": p.tau_n,
                                    "mu_n": p.mu_n, "pl": p.pl, "pl_deriv": p.pl_deriv,
                                    "iters": p.solver_iterations} for p in crv.points],
                        "errors": [{"xi": x, "message": m} for x, m in crv.errors]})
    return crv.to_csv()


def _cmd_simulate(args) -> str:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    theta = GevParams(args.tau, args.mu, args.xi)
    y = draw(theta, args.n, np.random.default_rng(args.seed))
    if args.format == "json":
        return to_json({"tau": args.tau, "mu": args.mu, "xi": args.xi, "seed": args.seed,
                        "values": y.tolist()})
    return values_csv(y)


_DEFAULT_N = {
    "rate": (10**3, 10**4, 10**5, 10**6),
    "pseudo-lln": (10**3, 10**4, 4 * 10**4),
    "uniform": (10**3, 10**4),
    "figure2": (1000,),
    "concavity": (1000,),
    "coverage": (1000,),
}
_DEFAULT_REPS = {"rate": 200, "pseudo-lln": 100, "uniform": 100, "figure2": 50,
                 "concavity": 50, "coverage": 500}


def _cmd_verify(args) -> tuple[str, bool]:
    name = args.experiment
    if name in _DEFAULT_N:
        cfg = lab.ExperimentConfig(
            theta0=GevParams(args.tau, args.mu, args.xi),
            n_grid=tuple(args.n) if args.n else _DEFAULT_N[name],
            replicates=args.replicates or _DEFAULT_REPS[name],
            seed=args.seed, gamma=args.gamma, b=args.b,
            alpha_interval=(args.alpha_min, args.alpha_max))
        if name == "pseudo-lln":
            report = lab.pseudo_lln_experiment(cfg, args.k, args.a, args.b)
        else:
            report = lab.EXPERIMENTS[name](cfg)
    elif name == "boundary":
        data = ingest_csv(args.input, args.column) if args.input else lab.BOUNDARY_DATA
        report = lab.boundary_divergence_check(data)
    elif name == "seitz":
        report = lab.seitz_experiment(args.replicates or 1000, args.seed)
    elif name == "global":
        report = lab.global_optimality_experiment(
            n_values=tuple(args.n) if args.n else (50, 200),
            restarts=args.replicates or 200, seed=args.seed)
    else:  # score
        report = lab.score_residual_experiment(args.replicates or 100, args.seed)
    if args.outdir:
        report.write(args.outdir)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    return text, report.passed


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.command == "fit":
            text = _cmd_fit(args)
        elif args.command == "profile":
            text = _cmd_profile(args)
        elif args.command == "simulate":
            text = _cmd_simulate(args)
        else:
            text, passed = _cmd_verify(args)
            if not passed:
                print(f"gevfit: verify {args.experiment}: some verdicts failed", file=sys.stderr)
        write_text(text, args.output)
    except UsageError as exc:
        print(f"gevfit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, DegenerateData, PreconditionViolated, FileNotFoundError,
            IsADirectoryError, PermissionError) as exc:
        print(f"gevfit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"gevfit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, GevError) as exc:
        print(f"gevfit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, OverflowError, ArithmeticError) as exc:
        print(f"gevfit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
