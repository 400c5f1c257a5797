"""Convergence experiments and report emission.

Two experiment drivers measure the quasistatic limit:

* :func:`epsilon_sweep` solves the dynamic problem for a decreasing list of
  epsilon values with fixed data and compares each run against the
  closed-form quasistatic front: sup-norm front error, kinetic energy,
  boundary-trace defect, and a continuity modulus of the front, all away
  from the initial layer.
* :func:`initial_jump` runs the unrescaled problem (epsilon = 1, loading
  frozen at its initial value) until the front plateaus, and characterizes
  the jump: limit position, limit energy, dissipated gap, and agreement
  with the quasistatic right limit extrapolated from small-epsilon runs.

The module also carries the artifact writers shared by the command line:
CSV with a fixed ``%.17g`` float format and LF line endings, JSON with
sorted keys, both free of timestamps so identical configs produce
byte-identical outputs.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import json

import numpy as np

from .dynamic_solver import (
    SimResult,
    fd_oracle_solve,
    magic_identity_residual,
    solve_coupled,
)
from .energy_diagnostics import (
    EnergySeries,
    balance_residual,
    boundary_work_identity_check,
    compute_energies,
    decay_envelope_check,
    griffith_residuals,
)
from .errors import NumericalError, PreconditionError
from .model import InitialData, LoadingProfile, Problem, check_conditions
from .quasistatic import quasistatic_front, verify_quasistatic_griffith

__all__ = [
    "JumpReport",
    "SweepEntry",
    "SweepReport",
    "continuity_modulus",
    "epsilon_sweep",
    "initial_jump",
    "verify_suite",
    "write_csv",
    "write_json",
]

logger = logging.getLogger(__name__)

DEFAULT_EPS_LIST = (0.2, 0.1, 0.05, 0.025)
MONOTONE_SLACK = 1.1
CONTINUITY_WIDTH = 0.05


# -- deterministic artifact writers ------------------------------------------

def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: str | Path, header: Sequence[str], rows) -> Path:
    """RFC-4180 CSV with LF endings and '%.17g' floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_json(path: str | Path, obj: dict) -> Path:
    """UTF-8 JSON with sorted keys; no timestamps, so outputs are stable."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8", newline="\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if np.isfinite(value) else None
    return obj


# -- sweep -------------------------------------------------------------------

def continuity_modulus(t: np.ndarray, ell: np.ndarray, t_min: float,
                       width: float = CONTINUITY_WIDTH) -> float:
    """Largest increment of ell over any window of the given width.

    Restricted to windows inside [t_min, t[-1]]; measures how close the
    front is to a continuous limit (a jump survives as an O(1) modulus no
    matter how small the window).
    """
    mask = t >= t_min - 1e-12
    ts, ys = t[mask], ell[mask]
    hi = np.searchsorted(ts, ts + width, side="right") - 1
    return float(np.max(ys[hi] - ys))


@dataclass(frozen=True)
class SweepEntry:
    """Metrics of one dynamic run against the quasistatic front."""

    epsilon: float
    ds: float
    front_err_rel: float
    kinetic_max: float
    trace_l2: float
    etilde_max: float
    energy_bound: float
    continuity_mod: float
    decay_m: float
    runtime_s: float
    t: np.ndarray = field(repr=False)
    ell: np.ndarray = field(repr=False)
    etilde: np.ndarray = field(repr=False)

    def metrics_row(self) -> tuple:
        return (self.epsilon, self.ds, self.front_err_rel, self.kinetic_max,
                self.trace_l2, self.etilde_max, self.energy_bound,
                self.continuity_mod, self.decay_m)


@dataclass(frozen=True)
class SweepReport:
    """Per-epsilon metrics plus the shared quasistatic reference."""

    entries: list[SweepEntry]
    lam_t: np.ndarray
    lam: np.ndarray
    t_min: float
    monotone: dict[str, bool]

    CSV_HEADER = ("epsilon", "ds", "front_err_rel", "kinetic_max", "trace_l2",
                  "etilde_max", "energy_bound", "continuity_mod", "decay_m")

    def summary(self) -> dict[str, Any]:
        return {
            "epsilon": [e.epsilon for e in self.entries],
            "front_err_rel": [e.front_err_rel for e in self.entries],
            "kinetic_max": [e.kinetic_max for e in self.entries],
            "trace_l2": [e.trace_l2 for e in self.entries],
            "etilde_max": [e.etilde_max for e in self.entries],
            "energy_bound": [e.energy_bound for e in self.entries],
            "continuity_mod": [e.continuity_mod for e in self.entries],
            "decay_m": [e.decay_m for e in self.entries],
            "runtime_s": [e.runtime_s for e in self.entries],
            "t_min": self.t_min,
            "monotone": dict(self.monotone),
        }


def _monotone_ok(values: Sequence[float], slack: float = MONOTONE_SLACK) -> bool:
    return all(values[i + 1] <= slack * values[i] + 1e-15
               for i in range(len(values) - 1))


def epsilon_sweep(problem: Problem, eps_list: Sequence[float] = DEFAULT_EPS_LIST,
                  t_min_frac: float = 0.1, strict: bool = True,
                  start: float | None = None) -> SweepReport:
    """Dynamic runs over a decreasing epsilon list, compared to quasistatic.

    Every run reuses the problem's toughness, loading, initial data, and
    horizon; ``ds`` is set to ``epsilon*ell0/16`` per run.  Metrics are
    taken on [t_min, T] with ``t_min = t_min_frac*T``, excluding the
    initial layer where a front jump concentrates.  The quasistatic
    reference starts at ``start`` when given (use the right limit from
    :func:`initial_jump` for data that jump at time zero), else at ell0.
    With ``strict`` (and nu > 0) each error metric must decrease along the
    list within 10% slack, else :class:`NumericalError`; pass
    ``strict=False`` for control sweeps (for example nu = 0) that are
    expected not to converge.
    """
    eps_list = [float(e) for e in eps_list]
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise NumericalError("epsilon list must be strictly decreasing")
    params = problem.params
    if strict:
        if params.nu <= 0.0:
            raise PreconditionError("NU", "convergence sweep needs damping nu > 0")
        check_conditions(problem.toughness, problem.loading,
                         params.t_end).require("K0", "K3")
    t_min = t_min_frac * params.t_end

    entries: list[SweepEntry] = []
    lam_t = lam = None
    for eps in eps_list:
        run_params = dataclasses.replace(params, epsilon=eps,
                                         ds=eps * params.ell0 / 16.0)
        run_problem = Problem(run_params, problem.toughness, problem.loading,
                              problem.initial)
        tic = time.perf_counter()
        result = solve_coupled(run_problem)
        runtime = time.perf_counter() - tic
        series = compute_energies(result)
        qs = quasistatic_front(problem.toughness, problem.loading, result.t,
                               start=start)
        mask = result.t >= t_min - 1e-12
        front_err = float(np.max(np.abs(result.ell - qs.lam)[mask] / qs.lam[mask]))
        kinetic = float(np.max(series.kinetic[mask]))
        defect = series.ux0 + series.w / qs.lam
        trace_l2 = float(np.sqrt(np.trapezoid(defect[mask] ** 2, result.t[mask])))
        etilde_max = float(np.max(series.Etilde[mask]))
        bound = float(np.max(series.E + series.A + problem.toughness.kappa_int(
            params.ell0, series.ell)))
        modulus = continuity_modulus(result.t, result.ell, t_min)
        L_T = max(np.pi, float(np.max(result.ell)))
        decay = decay_envelope_check(series, run_params, result.front, L_T)
        entries.append(SweepEntry(
            epsilon=eps, ds=run_params.ds, front_err_rel=front_err,
            kinetic_max=kinetic, trace_l2=trace_l2, etilde_max=etilde_max,
            energy_bound=bound, continuity_mod=modulus,
            decay_m=decay.m if decay.applicable else float("nan"),
            runtime_s=runtime, t=result.t, ell=result.ell,
            etilde=series.Etilde))
        logger.info("sweep eps=%g: front_err=%.3e kinetic=%.3e trace=%.3e",
                    eps, front_err, kinetic, trace_l2)
        if lam is None:
            lam_t, lam = result.t, qs.lam

    monotone = {
        "front_err_rel": _monotone_ok([e.front_err_rel for e in entries]),
        "kinetic_max": _monotone_ok([e.kinetic_max for e in entries]),
        "trace_l2": _monotone_ok([e.trace_l2 for e in entries]),
        "continuity_mod": _monotone_ok([e.continuity_mod for e in entries]),
    }
    if strict and not all(monotone.values()):
        failing = sorted(k for k, ok in monotone.items() if not ok)
        raise NumericalError(f"sweep metrics not monotone within slack: {failing}")
    return SweepReport(entries=entries, lam_t=lam_t, lam=lam, t_min=t_min,
                       monotone=monotone)


# -- initial jump ------------------------------------------------------------

@dataclass(frozen=True)
class JumpReport:
    """Long-time unrescaled run and its quasistatic right-limit checks."""

    ell1: float
    plateau_time: float
    converged: bool
    stability_margin: float
    energy_limit_err: float
    energy_gap_rel: float
    ell_plus_estimate: float
    extrapolation_rel_err: float
    oracle_ell1: float
    oracle_rel_err: float
    t: np.ndarray = field(repr=False)
    ell: np.ndarray = field(repr=False)
    legs: tuple = field(repr=False, default=())

    def summary(self) -> dict[str, Any]:
        return {
            "ell1": self.ell1,
            "plateau_time": self.plateau_time,
            "converged": self.converged,
            "stability_margin": self.stability_margin,
            "energy_limit_err": self.energy_limit_err,
            "energy_gap_rel": self.energy_gap_rel,
            "ell_plus_estimate": self.ell_plus_estimate,
            "extrapolation_rel_err": self.extrapolation_rel_err,
            "oracle_ell1": self.oracle_ell1,
            "oracle_rel_err": self.oracle_rel_err,
        }


def _plateau_time(t: np.ndarray, ell: np.ndarray, tol: float) -> float | None:
    # first time whose trailing unit interval moved the front less than tol
    lo = np.searchsorted(t, t - 1.0, side="left")
    ok = np.flatnonzero((ell - ell[lo] < tol) & (t >= t[0] + 1.0))
    return float(t[ok[0]]) if ok.size else None


def initial_jump(problem: Problem, t_max: float = 200.0, plateau_tol: float = 1e-6,
                 cross_check_eps: Sequence[float] = (0.05, 0.025),
                 cross_check_t_min: float = 0.2, legs_nodes: int = 32,
                 oracle_refine: int = 2) -> JumpReport:
    """Characterize the initial jump of the quasistatic limit.

    Runs the unrescaled problem (epsilon = 1, loading frozen at w(0), zero
    initial velocity) on the configured horizon, doubling it up to ``t_max``
    until the front moves less than ``plateau_tol`` over a trailing unit
    interval, then checks with ell1 = ell(t_end):

    * static stability at ell1 (``stability_margin = kappa - w0^2/(2 ell1^2)``);
    * the energy settles at ``w(0)^2 / (2 ell1)``;
    * the dissipated energy matches the jump's energy gap
      ``int (u0')^2/2 - w(0)^2/(2 ell1) - int kappa``;
    * linear extrapolation in epsilon of rescaled fronts read at
      ``cross_check_t_min`` (past the initial layer, where the front sits at
      the right limit up to O(eps)) reproduces ell1;
    * an independent finite-difference run reproduces ell1 to first order.

    The cross-check legs resolve the rescaled timescale with ``legs_nodes``
    steps per ``eps*ell0`` and stop just past the read point: the read value
    is causal, so a longer horizon cannot change it.

    No plateau by ``t_max`` is reported (``converged=False``), not raised.
    """
    check_conditions(problem.toughness, problem.loading,
                     problem.params.t_end).require("K0")
    if problem.params.nu <= 0.0:
        raise PreconditionError("NU", "the long-time limit needs damping nu > 0")
    w0 = float(problem.loading.w(0.0))
    frozen = LoadingProfile.constant(w0)
    initial = InitialData(problem.initial.xs, problem.initial.u0_vals)

    result = None
    plateau = None
    horizon = problem.params.t_end
    while True:
        horizon = min(horizon, t_max)
        params = dataclasses.replace(problem.params, epsilon=1.0, t_end=horizon)
        run = Problem(params, problem.toughness, frozen, initial)
        result = solve_coupled(run)
        plateau = _plateau_time(result.t, result.ell, plateau_tol)
        if plateau is not None or horizon >= t_max:
            break
        horizon *= 2.0
    converged = plateau is not None
    ell1 = float(result.ell[-1])
    logger.info("jump run: horizon=%g plateau=%s ell1=%.6f",
                horizon, plateau, ell1)

    tough = problem.toughness
    margin = float(tough.kappa(ell1) - 0.5 * w0 ** 2 / ell1 ** 2)
    series = compute_energies(result)
    energy_err = float(abs(series.E[-1] - 0.5 * w0 ** 2 / ell1))
    xs = np.linspace(0.0, problem.params.ell0, 4097)
    slope_sq = np.asarray(initial.du0(xs), dtype=float) ** 2
    gap = (0.5 * float(np.trapezoid(slope_sq, xs)) - 0.5 * w0 ** 2 / ell1
           - float(tough.kappa_int(problem.params.ell0, ell1)))
    # stable starts have gap = 0 = A up to round-off; floor the denominator
    gap_floor = 1e-9 * max(1.0, float(abs(series.E[0])))
    gap_rel = float(abs(series.A[-1] - gap) / max(abs(gap), gap_floor))

    fronts = []
    legs = []
    for eps in cross_check_eps:
        params = dataclasses.replace(problem.params, epsilon=float(eps),
                                     t_end=2.0 * cross_check_t_min,
                                     ds=float(eps) * problem.params.ell0 / legs_nodes)
        run = Problem(params, tough, frozen, initial)
        res = solve_coupled(run, compute_traces=False)
        fronts.append(float(np.interp(cross_check_t_min, res.t, res.ell)))
        legs.append((float(eps), res.t, res.ell))
    e1, e2 = [float(e) for e in cross_check_eps[:2]]
    estimate = fronts[1] + (fronts[0] - fronts[1]) * e2 / (e2 - e1)
    extr_err = float(abs(estimate - ell1) / ell1)

    oracle_params = dataclasses.replace(problem.params, epsilon=1.0,
                                        t_end=min(problem.params.t_end, t_max),
                                        ds=problem.params.ds / oracle_refine)
    oracle = fd_oracle_solve(Problem(oracle_params, tough, frozen, initial))
    oracle_ell1 = float(oracle.ell[-1])
    oracle_rel = float(abs(ell1 - oracle_ell1) / oracle_ell1)
    return JumpReport(ell1=ell1, plateau_time=float(plateau) if converged else float("nan"),
                      converged=converged, stability_margin=margin,
                      energy_limit_err=energy_err, energy_gap_rel=gap_rel,
                      ell_plus_estimate=estimate, extrapolation_rel_err=extr_err,
                      oracle_ell1=oracle_ell1, oracle_rel_err=oracle_rel,
                      t=result.t, ell=result.ell, legs=tuple(legs))


# -- verification suite ------------------------------------------------------

VERIFY_TOLS = {
    "balance_rel_per_ds": 5.0,
    "intparts_per_ds": 0.5,
    "magic": 1e-8,
    "griffith_stability": 1e-10,
    "griffith_complementarity": 1e-10,
    "dissipation_drop": -1e-12,
}


def verify_suite(result: SimResult, seed: int = 0,
                 n_magic: int = 50) -> tuple[dict[str, Any], bool]:
    """Every identity and invariant check on one dynamic run.

    Returns a JSON-able report and an overall pass flag.  The magic-identity
    sample points are drawn from a seeded generator, so a fixed seed gives
    byte-identical reports.
    """
    params = result.params
    series = compute_energies(result)
    balance = balance_residual(series, result.problem.toughness, result.front)
    intparts = boundary_work_identity_check(result)
    decay = decay_envelope_check(series, params, result.front, np.pi)
    griffith = griffith_residuals(result)

    rng = np.random.default_rng(seed)
    s_hi = 0.9 * float(result.front.phi(params.t_end))
    s_pts = rng.uniform(0.0, max(s_hi, 1e-6), size=n_magic)
    magic = max(abs(magic_identity_residual(result.front, lambda tau, sigma: 1.0,
                                            float(s), params.ds))
                for s in s_pts)

    min_a_step = float(np.min(np.diff(series.A))) if series.A.size > 1 else 0.0
    checks = {
        "balance_rel": (balance.max_rel,
                        VERIFY_TOLS["balance_rel_per_ds"] * params.ds),
        "intparts": (intparts.max_residual,
                     VERIFY_TOLS["intparts_per_ds"] * params.ds),
        "magic": (magic, VERIFY_TOLS["magic"]),
        "griffith_stability": (griffith.max_stability,
                               VERIFY_TOLS["griffith_stability"]),
        "griffith_complementarity": (griffith.max_complementarity,
                                     VERIFY_TOLS["griffith_complementarity"]),
        "bc_residual_load": (result.bc_residual_load, 1e-10),
        "bc_residual_front": (result.bc_residual_front,
                              50.0 * params.ds * result.problem.data_lipschitz_bound()),
    }
    report: dict[str, Any] = {"seed": seed, "checks": {}}
    ok = True
    for name, (value, tol) in checks.items():
        passed = bool(value <= tol)
        ok = ok and passed
        report["checks"][name] = {"value": float(value), "tol": float(tol),
                                  "pass": passed}
    a_ok = bool(min_a_step >= VERIFY_TOLS["dissipation_drop"])
    ok = ok and a_ok
    report["checks"]["dissipation_nondecreasing"] = {
        "value": min_a_step, "tol": VERIFY_TOLS["dissipation_drop"], "pass": a_ok}
    report["decay"] = {"applicable": decay.applicable, "mu0": decay.mu0,
                       "mu1": decay.mu1, "m": decay.m, "C_T": decay.C_T}
    if decay.applicable:
        finite = bool(np.isfinite(decay.C_T))
        ok = ok and finite
        report["checks"]["decay_envelope_finite"] = {
            "value": decay.C_T, "tol": float("inf"), "pass": finite}
    report["pass"] = ok
    return report, ok


def energy_series_rows(series: EnergySeries, balance_raw: np.ndarray):
    for k in range(series.t.size):
        yield (series.t[k], series.ell[k], series.E[k], series.A[k],
               series.W[k], series.Etilde[k], balance_raw[k])


ENERGY_CSV_HEADER = ("t", "ell", "E", "A", "W", "Etilde", "balance_residual")
