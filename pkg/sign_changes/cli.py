"""
Command-line interface.

    ar1-sign-changes constants --rho 0.5
    ar1-sign-changes curve --n 4 --rho-min -0.99 --rho-max 0.99 --step 0.005 --out fig1.csv
    ar1-sign-changes verify [--tol 1e-12] [--fast]
    ar1-sign-changes simulate --n 4 --rho 0.5 --paths 1000000 --seed 42 [--csv]
    ar1-sign-changes orthant --pattern 1010 --rho 0.5 --method closed|qmc

Exit codes: 0 success, 1 verification or convergence failure, 2 usage or
domain error. Tables and CSV go to stdout, logs and errors to stderr.
"""

import argparse
import csv
import logging
import sys
from typing import List, Optional, TextIO

from sign_changes.domain import Rho, SignPattern, check_rho
from sign_changes.errors import ConvergenceError, DomainError
from sign_changes.iia import iia_variance
from sign_changes.mc import SimConfig, simulate
from sign_changes.moments import pattern_probability, variance_exact
from sign_changes.mvn import QMCConfig, ar1_matrix, orthant_qmc
from sign_changes.orthant import four_point_constants, outlier_orthant, p11111, q_pattern_4of5
from sign_changes.verify import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

CURVE_HEADER = ("rho", "theory_var", "model_var", "model_var_abs")
FOUR_POINT_NAMES = ("f(r,r)", "g(r,r)", "f(r,-r)", "g(r,-r)", "f(-r,r)", "f(-r,-r)")


def fmt(value: float) -> str:
    """17 significant digits, locale independent."""
    return f"{value:.17g}"


def cmd_constants(args: argparse.Namespace, out: TextIO) -> int:
    rho = Rho(args.rho)
    rows = [
        (name, value, "closed-form")
        for name, value in zip(FOUR_POINT_NAMES, four_point_constants(rho))
    ]
    rows += [
        ("V(S_4)", variance_exact(4, rho), "closed-form"),
        ("q_1245", q_pattern_4of5((1, 2, 4, 5), rho), "closed-form"),
        ("q_1235", outlier_orthant(rho), "quadrature"),
    ]
    out.write(f"# rho = {fmt(float(rho))}\n")
    for name, value, method in rows:
        out.write(f"{name:<10} {fmt(value):<24} {method}\n")
    return EXIT_OK


def curve_grid(rho_min: float, rho_max: float, step: float) -> List[float]:
    """Points rho_min, rho_min + step, ... up to rho_max, rounded to kill drift."""
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    check_rho(rho_min)
    check_rho(rho_max)
    if rho_max < rho_min:
        raise DomainError(f"rho-max {rho_max} is below rho-min {rho_min}")
    count = int(round((rho_max - rho_min) / step)) + 1
    grid = [round(rho_min + i * step, 12) for i in range(count)]
    return [r for r in grid if r <= rho_max + 1e-12]


def cmd_curve(args: argparse.Namespace, out: TextIO) -> int:
    if args.n != 4:
        raise DomainError(f"the exact variance curve is available for n = 4 only, got {args.n}")
    grid = curve_grid(args.rho_min, args.rho_max, args.step)

    def write(stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        for rho in grid:
            writer.writerow((
                fmt(rho),
                fmt(variance_exact(4, rho)),
                fmt(iia_variance(4, rho)),
                fmt(iia_variance(4, rho, symmetrized=True)),
            ))

    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            write(handle)
        logger.info("wrote %d rows to %s", len(grid), args.out)
    else:
        write(out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    report = run_verification(tol=args.tol, fast=args.fast, seed=args.seed)
    out.write(report.summary() + "\n")
    failure = report.first_failure
    if failure is not None:
        sys.stderr.write(f"verification failed: {failure.name}\n")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, out: TextIO) -> int:
    cfg = SimConfig(n=args.n, rho=args.rho, paths=args.paths, seed=args.seed, workers=args.workers)
    result = simulate(cfg)
    if args.csv:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("n", "rho", "paths", "seed", "mean_hat", "se_mean", "var_hat", "se_var"))
        writer.writerow((
            cfg.n, fmt(cfg.rho), cfg.paths, cfg.seed,
            fmt(result.mean_hat), fmt(result.se_mean), fmt(result.var_hat), fmt(result.se_var),
        ))
    else:
        out.write(result.summary() + "\n")
    return EXIT_OK


def cmd_orthant(args: argparse.Namespace, out: TextIO) -> int:
    pattern = SignPattern.parse(args.pattern)
    rho = Rho(args.rho)
    if args.method == "closed":
        if len(pattern) <= 4:
            estimate = pattern_probability(pattern, rho)
            value, error, method = estimate.value, estimate.error, estimate.method.value
        elif len(pattern) == 5 and len(set(pattern.bits)) == 1:
            # p_00000 = p_11111
            value, error, method = p11111(rho), 0.0, "closed-form"
        else:
            raise DomainError(
                f"no closed form for pattern {pattern}; closed forms cover n <= 4 and 11111/00000"
            )
    else:
        estimate = orthant_qmc(
            ar1_matrix(rho, len(pattern)), pattern,
            tol=args.tol, seed=args.seed, config=QMCConfig(tol=args.tol, workers=args.workers),
        )
        value, error, method = estimate.value, estimate.error, estimate.method.value
        if not estimate.converged:
            out.write(f"{pattern} {fmt(value)} {error:.3g} {method} not_converged\n")
            return EXIT_FAILURE
    out.write(f"{pattern} {fmt(value)} {error:.3g} {method}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ar1-sign-changes",
        description="Moments of the number of sign changes in AR(1) segments",
    )
    parser.add_argument(
        "--log-level", default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level for messages on stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="Four-point and appendix constants at one rho")
    p.add_argument("--rho", type=float, required=True)
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("curve", help="Exact and IIA variance of S_4 on a rho grid, as CSV")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--rho-min", type=float, default=-0.99)
    p.add_argument("--rho-max", type=float, default=0.99)
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--out", default=None, help="Output file (default stdout)")
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("verify", help="Run the verification suite")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--fast", action="store_true", help="Reduced budgets for QMC and Monte Carlo")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo moments of S_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("orthant", help="Probability of one sign pattern")
    p.add_argument("--pattern", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--method", choices=["closed", "qmc"], default="closed")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_orthant)

    return parser


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    out = out or sys.stdout
    try:
        return args.handler(args, out)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
