"""Command line orchestration: one subcommand per experiment.

Every subcommand reads a JSON problem config, writes CSV/JSON artifacts into
an output directory (``--out``, else ``DEBOND_OUT``, else ``./debond_out``),
and exits 0 on success, 1 on invalid input, 2 on numerical failure.  Errors
are emitted to stderr as one-line JSON objects.  Artifacts contain no
timestamps or runtimes, so identical configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .dynamic_solver import fd_oracle_solve, solve_coupled
from .energy_diagnostics import (
    balance_residual,
    boundary_work_identity_check,
    compute_energies,
    decay_envelope_check,
)
from .errors import DebondError
from .experiments import (
    DEFAULT_EPS_LIST,
    SweepReport,
    epsilon_sweep,
    initial_jump,
    verify_suite,
    write_csv,
    write_json,
)
from .model import Problem
from .quasistatic import quasistatic_front, verify_quasistatic_griffith

logger = logging.getLogger(__name__)

SERIES_HEADER = ("t", "ell", "elldot", "G0", "E", "A", "W", "balance_residual")
FRONT_HEADER = ("t", "ell")
FIELD_HEADER = ("t", "x", "u", "u_t", "u_x")
QS_HEADER = ("t", "lam", "stability_residual", "complementarity_residual")
SWEEP_FRONTS_HEADER = ("epsilon", "t", "ell", "etilde")
LEGS_HEADER = ("epsilon", "t", "ell")
ORACLE_HEADER = ("t", "ell", "ell_fd")


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get("DEBOND_OUT")
    return Path(env) if env else Path("debond_out")


def _energy_summary(decay, balance, intparts, result) -> dict:
    return {
        "m": decay.m,
        "mu0": decay.mu0,
        "mu1": decay.mu1,
        "empirical_C_T": decay.C_T,
        "decay_applicable": decay.applicable,
        "max_residuals": {
            "balance_raw": balance.max_raw,
            "balance_rel": balance.max_rel,
            "intparts": intparts.max_residual,
            "bc_load": result.bc_residual_load,
            "bc_front": result.bc_residual_front,
        },
    }


def cmd_simulate(args: argparse.Namespace) -> int:
    problem = Problem.from_json(args.config)
    out = _out_dir(args)
    result = solve_coupled(problem)
    series = compute_energies(result)
    balance = balance_residual(series, problem.toughness, result.front)
    intparts = boundary_work_identity_check(result)
    L_T = max(np.pi, float(np.max(result.ell)))
    decay = decay_envelope_check(series, problem.params, result.front, L_T)

    write_csv(out / "series.csv", SERIES_HEADER,
              zip(result.t, result.ell, result.rate, result.G0,
                  series.E, series.A, series.W, balance.raw))
    write_csv(out / "front.csv", FRONT_HEADER, zip(result.t, result.ell))
    if args.dump_field:
        def field_rows():
            dx = problem.params.dx
            for k in range(result.t.size):
                for j in range(int(result.support[k])):
                    yield (result.t[k], j * dx, result.u[k, j],
                           result.u_t[k, j], result.u_x[k, j])
        write_csv(out / "field.csv", FIELD_HEADER, field_rows())

    summary = _energy_summary(decay, balance, intparts, result)
    summary.update(ell_end=float(result.ell[-1]), config=problem.to_json())
    write_json(out / "summary.json", summary)
    logger.info("simulate: ell_end=%.6f balance_rel=%.3e",
                result.ell[-1], balance.max_rel)
    return 0


def cmd_quasistatic(args: argparse.Namespace) -> int:
    problem = Problem.from_json(args.config)
    out = _out_dir(args)
    params = problem.params
    grid = params.ds * np.arange(params.n_steps + 1)
    ev = quasistatic_front(problem.toughness, problem.loading, grid,
                           start=args.start)
    report = verify_quasistatic_griffith(ev)

    excess = 0.5 * ev.w ** 2 / ev.lam ** 2 - problem.toughness.kappa(ev.lam)
    stability = np.maximum(excess, 0.0)
    rate = np.diff(ev.lam) / np.diff(ev.t)
    compl = np.append(np.abs(rate * excess[:-1]), 0.0)
    write_csv(out / "quasistatic.csv", QS_HEADER,
              zip(ev.t, ev.lam, stability, compl))
    write_json(out / "summary.json", {
        "lam_end": float(ev.lam[-1]),
        "max_negative_slope": report.max_negative_slope,
        "max_stability": report.max_stability,
        "max_complementarity": report.max_complementarity,
        "config": problem.to_json(),
    })
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    problem = Problem.from_json(args.config)
    out = _out_dir(args)
    eps_list = (tuple(float(tok) for tok in args.eps.split(","))
                if args.eps else DEFAULT_EPS_LIST)
    report = epsilon_sweep(problem, eps_list, strict=not args.control,
                           start=args.start)

    write_csv(out / "sweep.csv", SweepReport.CSV_HEADER,
              (e.metrics_row() for e in report.entries))

    def front_rows():
        for entry in report.entries:
            for k in range(entry.t.size):
                yield (entry.epsilon, entry.t[k], entry.ell[k], entry.etilde[k])
    write_csv(out / "fronts.csv", SWEEP_FRONTS_HEADER, front_rows())
    write_csv(out / "front_qs.csv", ("t", "lam"), zip(report.lam_t, report.lam))

    summary = report.summary()
    summary.pop("runtime_s", None)
    summary["config"] = problem.to_json()
    write_json(out / "summary.json", summary)
    logger.info("sweep: %d entries, monotone=%s", len(report.entries),
                report.monotone)
    return 0


def cmd_jump(args: argparse.Namespace) -> int:
    problem = Problem.from_json(args.config)
    out = _out_dir(args)
    report = initial_jump(problem, t_max=args.t_max)

    write_csv(out / "jump.csv", FRONT_HEADER, zip(report.t, report.ell))

    def leg_rows():
        for eps, t, ell in report.legs:
            for k in range(t.size):
                yield (eps, t[k], ell[k])
    write_csv(out / "jump_legs.csv", LEGS_HEADER, leg_rows())

    summary = report.summary()
    summary["config"] = problem.to_json()
    write_json(out / "summary.json", summary)
    logger.info("jump: ell1=%.6f converged=%s", report.ell1, report.converged)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    problem = Problem.from_json(args.config)
    out = _out_dir(args)
    result = solve_coupled(problem)
    report, ok = verify_suite(result, seed=args.seed)
    write_json(out / "verify.json", report)
    if not ok:
        failing = sorted(name for name, chk in report["checks"].items()
                         if not chk["pass"])
        sys.stderr.write(json.dumps(
            {"error": "NumericalError",
             "message": f"verification failed: {', '.join(failing)}"},
            sort_keys=True) + "\n")
        return 2
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    problem = Problem.from_json(args.config)
    out = _out_dir(args)
    result = solve_coupled(problem)
    oracle = fd_oracle_solve(problem)

    front_diff = np.abs(result.ell - oracle.ell)
    # oracle columns sit on every second solver column (dx_fd = 2 ds/eps)
    n_fd = oracle.x.size
    field_sup = 0.0
    for k in range(result.t.size):
        interior = min(float(result.ell[k]), float(oracle.ell[k]))
        m = min(int(np.searchsorted(oracle.x, interior)), n_fd,
                (int(result.support[k]) + 1) // 2)
        if m > 0:
            field_sup = max(field_sup, float(np.max(
                np.abs(result.u[k, 0:2 * m:2] - oracle.u[k, :m]))))

    write_csv(out / "oracle.csv", ORACLE_HEADER,
              zip(result.t, result.ell, oracle.ell))
    write_json(out / "summary.json", {
        "front_sup_diff": float(np.max(front_diff)),
        "front_end_diff": float(front_diff[-1]),
        "field_sup_diff": field_sup,
        "config": problem.to_json(),
    })
    logger.info("oracle: front_sup=%.3e field_sup=%.3e",
                float(np.max(front_diff)), field_sup)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="debond",
        description="Dynamic thin-film debonding: simulation and verification.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON problem config")
        p.add_argument("--out", default=None,
                       help="output directory (default: $DEBOND_OUT or ./debond_out)")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "one coupled dynamic run")
    p.add_argument("--dump-field", action="store_true",
                   help="also write the full field as field.csv")

    p = add("quasistatic", cmd_quasistatic, "closed-form quasistatic front")
    p.add_argument("--start", type=float, default=None,
                   help="start the front at this position instead of ell0")

    p = add("sweep", cmd_sweep, "epsilon convergence sweep")
    p.add_argument("--eps", default=None,
                   help="comma-separated epsilon list (default 0.2,0.1,0.05,0.025)")
    p.add_argument("--control", action="store_true",
                   help="control sweep: skip damping and monotonicity gates")
    p.add_argument("--start", type=float, default=None,
                   help="quasistatic reference start (right limit for jump data)")

    p = add("jump", cmd_jump, "unrescaled initial-jump characterization")
    p.add_argument("--t-max", type=float, default=200.0,
                   help="give-up horizon for plateau detection")

    p = add("verify", cmd_verify, "identity and invariant suite on one run")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the random sample points")

    add("oracle", cmd_oracle, "independent finite-difference cross-check")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except DebondError as exc:
        sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
