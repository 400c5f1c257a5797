"""Unit tests for the experiment drivers and artifact writers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from debond.dynamic_solver import solve_coupled
from debond.errors import NumericalError, PreconditionError
from debond.experiments import (
    ENERGY_CSV_HEADER,
    SweepReport,
    continuity_modulus,
    energy_series_rows,
    epsilon_sweep,
    initial_jump,
    verify_suite,
    write_csv,
    write_json,
)
from debond.energy_diagnostics import balance_residual, compute_energies
from debond.model import LoadingProfile, Problem, SimParams, ToughnessModel

# -- shared configurations ---------------------------------------------------
# jump: kappa0 = 0.1, w = 1, affine u0; the front jumps past sqrt(5) = 2.2360

TOUGH_JUMP = ToughnessModel.constant(0.1, 1.0)
LOAD_UNIT = LoadingProfile.constant(1.0)


@pytest.fixture(scope="module")
def ramp_sweep():
    params = SimParams(epsilon=0.2, nu=1.0, ell0=1.0, t_end=1.5, ds=0.0125)
    problem = Problem.equilibrium(params, ToughnessModel.constant(0.5, 1.0),
                                  LoadingProfile.ramp(1.0, 1.6, 1.0))
    return epsilon_sweep(problem, eps_list=(0.2, 0.1))


@pytest.fixture(scope="module")
def small_jump():
    params = SimParams(epsilon=1.0, nu=1.0, ell0=1.0, t_end=6.0, ds=1.0 / 16)
    return initial_jump(Problem.equilibrium(params, TOUGH_JUMP, LOAD_UNIT))


@pytest.fixture(scope="module")
def verify_run():
    params = SimParams(epsilon=0.1, nu=1.0, ell0=1.0, t_end=0.8, ds=2e-3)
    problem = Problem.equilibrium(params, ToughnessModel.constant(0.5, 1.0),
                                  LoadingProfile.constant(0.9))
    return solve_coupled(problem)


# -- artifact writers --------------------------------------------------------

def test_csv_writer_format_and_determinism(tmp_path):
    rows = [(0.1, 1, True), (2.0 / 3.0, -4, False)]
    p1 = write_csv(tmp_path / "a.csv", ("x", "n", "flag"), rows)
    p2 = write_csv(tmp_path / "b.csv", ("x", "n", "flag"), rows)
    data = p1.read_bytes()
    assert data == p2.read_bytes()
    lines = data.decode("ascii").split("\n")
    assert lines[0] == "x,n,flag"
    # %.17g round-trips doubles exactly; ints and bools stay unquoted
    assert lines[1] == "0.10000000000000001,1,true"
    assert lines[2].endswith(",-4,false")
    assert data.endswith(b"\n") and b"\r" not in data


def test_json_writer_sorted_and_non_finite(tmp_path):
    obj = {"b": 1.5, "a": {"z": float("nan"), "y": float("inf")},
           "arr": np.array([1.0, 2.0])}
    p1 = write_json(tmp_path / "a.json", obj)
    text = p1.read_text()
    assert text.index('"a"') < text.index('"arr"') < text.index('"b"')
    assert "NaN" not in text and "Infinity" not in text  # nulls instead
    assert text == write_json(tmp_path / "b.json", obj).read_text()


def test_energy_rows_match_header(verify_run):
    series = compute_energies(verify_run)
    balance = balance_residual(series, verify_run.problem.toughness,
                               verify_run.front)
    rows = list(energy_series_rows(series, balance.raw))
    assert len(rows) == verify_run.t.size
    assert len(rows[0]) == len(ENERGY_CSV_HEADER)


# -- continuity modulus ------------------------------------------------------

def test_continuity_modulus_step_and_slope():
    t = np.linspace(0.0, 2.0, 2001)
    ramp = 0.3 * t
    # linear front: modulus = slope * width
    assert continuity_modulus(t, ramp, 0.0, width=0.1) == pytest.approx(0.03, rel=1e-6)
    step = np.where(t < 1.0, 1.0, 1.25)
    assert continuity_modulus(t, step, 0.0, width=0.05) == pytest.approx(0.25)
    # restriction drops the jump when it sits before t_min
    assert continuity_modulus(t, step, 1.5, width=0.05) == pytest.approx(0.0)


# -- epsilon sweep -----------------------------------------------------------

def test_sweep_metrics_decrease(ramp_sweep):
    assert all(ramp_sweep.monotone.values())
    front = [e.front_err_rel for e in ramp_sweep.entries]
    # first-order limit: halving epsilon roughly halves the front error
    assert front[1] < 0.7 * front[0]
    assert ramp_sweep.entries[0].ds == pytest.approx(0.2 / 16)
    assert ramp_sweep.t_min == pytest.approx(0.15)


def test_sweep_quasistatic_reference(ramp_sweep):
    # kappa0 = 0.5: capacity lam^2/2 = max(running max w^2/2, 1/2)
    w = np.minimum(1.0 + 0.6 * ramp_sweep.lam_t, 1.6)
    ref = np.maximum(w, 1.0)
    assert float(np.max(np.abs(ramp_sweep.lam - ref))) < 1e-10


def test_sweep_summary_and_rows(ramp_sweep):
    summary = ramp_sweep.summary()
    assert summary["epsilon"] == [0.2, 0.1]
    assert len(summary["front_err_rel"]) == 2
    row = ramp_sweep.entries[0].metrics_row()
    assert len(row) == len(SweepReport.CSV_HEADER)


def test_sweep_rejects_unordered_epsilons(ramp_sweep):
    params = SimParams(epsilon=0.2, nu=1.0, ell0=1.0, t_end=0.5, ds=0.0125)
    problem = Problem.equilibrium(params, ToughnessModel.constant(0.5, 1.0),
                                  LoadingProfile.constant(0.9))
    with pytest.raises(NumericalError):
        epsilon_sweep(problem, eps_list=(0.1, 0.2))


def test_sweep_strict_needs_damping():
    params = SimParams(epsilon=0.2, nu=0.0, ell0=1.0, t_end=0.5, ds=0.0125)
    problem = Problem.equilibrium(params, ToughnessModel.constant(0.5, 1.0),
                                  LoadingProfile.constant(0.9))
    with pytest.raises(PreconditionError):
        epsilon_sweep(problem, eps_list=(0.2, 0.1))
    report = epsilon_sweep(problem, eps_list=(0.2, 0.1), strict=False)
    assert len(report.entries) == 2


# -- initial jump ------------------------------------------------------------

def test_jump_stable_start_is_exact():
    # kappa0 = 0.5, w = 0.9: w^2/2 = 0.405 < capacity(1) = 0.5, no motion
    params = SimParams(epsilon=1.0, nu=1.0, ell0=1.0, t_end=3.0, ds=1.0 / 32)
    problem = Problem.equilibrium(params, ToughnessModel.constant(0.5, 1.0),
                                  LoadingProfile.constant(0.9))
    report = initial_jump(problem)
    assert report.ell1 == 1.0
    assert report.converged and report.plateau_time == 1.0
    assert report.stability_margin == pytest.approx(0.5 - 0.405)
    assert report.energy_limit_err == 0.0
    assert report.energy_gap_rel < 1e-6
    assert report.ell_plus_estimate == 1.0
    assert report.oracle_ell1 == 1.0


def test_jump_past_stability_bound(small_jump):
    # settled value at this resolution, measured once and frozen: 2.477537
    assert small_jump.converged
    assert 3.5 < small_jump.plateau_time < 6.0
    assert small_jump.ell1 > math.sqrt(5.0)
    assert small_jump.ell1 == pytest.approx(2.477537, abs=2e-3)
    assert small_jump.stability_margin > 0.0
    assert small_jump.energy_limit_err < 5e-3
    assert small_jump.energy_gap_rel < 0.06
    # legs are exactly rescale-equivalent, so the estimate is resolution-tied
    assert small_jump.ell_plus_estimate == pytest.approx(2.434409, abs=2e-3)
    assert small_jump.extrapolation_rel_err < 0.05
    assert small_jump.oracle_rel_err < 0.05


def test_jump_report_legs(small_jump):
    eps = [leg[0] for leg in small_jump.legs]
    assert eps == [0.05, 0.025]
    for _, t, ell in small_jump.legs:
        assert t[-1] == pytest.approx(0.4)
        assert ell[0] == 1.0 and np.all(np.diff(ell) >= 0.0)


def test_jump_non_convergence_reported_not_raised():
    params = SimParams(epsilon=1.0, nu=1.0, ell0=1.0, t_end=2.0, ds=1.0 / 16)
    problem = Problem.equilibrium(params, TOUGH_JUMP, LOAD_UNIT)
    report = initial_jump(problem, t_max=2.0, cross_check_eps=(0.2, 0.1))
    assert not report.converged
    assert math.isnan(report.plateau_time)
    assert report.ell1 > 2.0  # still mid-transient at this horizon


def test_jump_needs_damping():
    params = SimParams(epsilon=1.0, nu=0.0, ell0=1.0, t_end=2.0, ds=1.0 / 16)
    problem = Problem.equilibrium(params, TOUGH_JUMP, LOAD_UNIT)
    with pytest.raises(PreconditionError):
        initial_jump(problem)


def test_rescale_equivalence_is_exact():
    # eps-run at matched relative ds is the unrescaled run in rescaled time
    pa = SimParams(epsilon=1.0, nu=1.0, ell0=1.0, t_end=2.0, ds=1.0 / 8)
    ra = solve_coupled(Problem.equilibrium(pa, TOUGH_JUMP, LOAD_UNIT))
    pb = SimParams(epsilon=0.5, nu=1.0, ell0=1.0, t_end=1.0, ds=1.0 / 16)
    rb = solve_coupled(Problem.equilibrium(pb, TOUGH_JUMP, LOAD_UNIT))
    assert float(ra.ell[-1]) == float(rb.ell[-1])


# -- verification suite ------------------------------------------------------

def test_verify_suite_passes_on_equilibrium(verify_run):
    report, ok = verify_suite(verify_run)
    assert ok and report["pass"]
    names = set(report["checks"])
    assert {"balance_rel", "intparts", "magic", "griffith_stability",
            "griffith_complementarity", "dissipation_nondecreasing",
            "decay_envelope_finite"} <= names
    assert report["decay"]["applicable"]


def test_verify_suite_seeded_determinism(verify_run):
    rep1, _ = verify_suite(verify_run, seed=7)
    rep2, _ = verify_suite(verify_run, seed=7)
    assert rep1 == rep2
    rep3, ok3 = verify_suite(verify_run, seed=8)
    assert ok3 and rep3["seed"] == 8
