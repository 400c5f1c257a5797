"""Unit tests for the closed-form quasistatic front and its checkers."""

from __future__ import annotations

import numpy as np
import pytest

from debond.errors import PreconditionError, ValidationError
from debond.model import LoadingProfile, ToughnessModel
from debond.quasistatic import (
    QuasistaticEvolution,
    detect_jumps,
    quasistatic_displacement,
    quasistatic_front,
    quasistatic_front_ode,
    verify_energy_balance_qs,
    verify_global_stability,
    verify_quasistatic_griffith,
)

# -- shared configurations ---------------------------------------------------
# ramp: kappa0 = 0.5, w = 1 + t; capacity lam^2/2 = (1+t)^2/2 gives lam = 1+t

TOUGH_CONST = ToughnessModel.constant(0.5, 1.0)
LOAD_RAMP = LoadingProfile.polynomial([1.0, 1.0])


@pytest.fixture(scope="module")
def ramp_ev():
    grid = np.linspace(0.0, 1.0, 1001)
    return quasistatic_front(TOUGH_CONST, LOAD_RAMP, grid)


# -- closed-form front -------------------------------------------------------

def test_ramp_closed_form(ramp_ev):
    assert float(np.max(np.abs(ramp_ev.lam - (1.0 + ramp_ev.t)))) < 1e-10


def test_stationary_under_subcritical_load():
    # kappa(x) = x: capacity x^3 = 1 at the start exceeds w^2/2 = 1/2
    tough = ToughnessModel.power(1.0, 1.0, 1.0, x_max=8.0)
    grid = np.linspace(0.0, 2.0, 201)
    ev = quasistatic_front(tough, LoadingProfile.constant(1.0), grid)
    assert float(np.max(np.abs(ev.lam - 1.0))) == 0.0


def test_oscillating_load_never_exceeds_capacity():
    # w = sin t: running max of w^2/2 peaks at exactly capacity(1) = 1/2
    grid = np.linspace(0.0, 3.0, 3001)
    ev = quasistatic_front(TOUGH_CONST, LoadingProfile.sinusoid(0.0, 1.0, 1.0), grid)
    assert float(np.max(np.abs(ev.lam - 1.0))) < 1e-10


def test_start_beyond_ell0(ramp_ev):
    # resuming at 1.5: front waits until the load catches up at t = 0.5
    grid = ramp_ev.t
    ev = quasistatic_front(TOUGH_CONST, LOAD_RAMP, grid, start=1.5)
    ref = np.maximum(1.5, 1.0 + grid)
    assert float(np.max(np.abs(ev.lam - ref))) < 1e-10


def test_grid_refinement_only_interpolates():
    load = LoadingProfile.sinusoid(1.0, 0.4, 2.0)
    coarse = np.linspace(0.0, 3.0, 301)
    fine = np.linspace(0.0, 3.0, 601)
    ev_c = quasistatic_front(TOUGH_CONST, load, coarse)
    ev_f = quasistatic_front(TOUGH_CONST, load, fine)
    step = coarse[1] - coarse[0]
    assert float(np.max(np.abs(ev_c.lam - ev_f.lam[::2]))) <= 2.0 * step


def test_precondition_errors_name_the_flag():
    flat = ToughnessModel.power(0.5, -2.0, 1.0, x_max=8.0)   # constant capacity
    grid = np.linspace(0.0, 1.0, 11)
    with pytest.raises(PreconditionError) as exc:
        quasistatic_front(flat, LoadingProfile.constant(1.0), grid)
    assert exc.value.flag == "K3"
    overload = LoadingProfile.constant(3.0)                  # w^2/2 = 4.5 > cap 2
    small = ToughnessModel.constant(0.5, 1.0, x_max=2.0)
    with pytest.raises(PreconditionError) as exc:
        quasistatic_front(small, overload, grid)
    assert exc.value.flag == "KW"


def test_evolution_invariants_enforced(ramp_ev):
    grid = np.linspace(0.0, 1.0, 11)
    with pytest.raises(ValidationError):
        QuasistaticEvolution(t=grid, lam=np.linspace(2.0, 1.0, 11),
                             toughness=TOUGH_CONST, loading=LOAD_RAMP, start=1.0)
    with pytest.raises(ValidationError):                     # unstable: lam too small
        QuasistaticEvolution(t=grid, lam=np.full(11, 1.0),
                             toughness=TOUGH_CONST,
                             loading=LoadingProfile.constant(2.0), start=1.0)
    with pytest.raises(ValidationError):
        ramp_ev.lam_at(5.0)


# -- displacement ------------------------------------------------------------

def test_displacement_affine_with_cutoff(ramp_ev):
    # t = 0.5: lam = 1.5, w = 1.5
    assert quasistatic_displacement(ramp_ev, 0.5, 0.0) == pytest.approx(1.5, abs=1e-12)
    assert quasistatic_displacement(ramp_ev, 0.5, 1.5) == pytest.approx(0.0, abs=1e-12)
    assert quasistatic_displacement(ramp_ev, 0.5, 0.75) == pytest.approx(0.75, abs=1e-12)
    assert quasistatic_displacement(ramp_ev, 0.5, 2.0) == 0.0
    vals = quasistatic_displacement(ramp_ev, 0.5, np.array([0.0, 3.0]))
    assert vals.shape == (2,) and vals[1] == 0.0


# -- Griffith criterion ------------------------------------------------------

def test_griffith_residuals_ramp(ramp_ev):
    report = verify_quasistatic_griffith(ramp_ev)
    assert report.max_negative_slope <= 1e-8
    assert report.max_stability <= 1e-8
    assert report.max_complementarity <= 1e-8
    assert report.details["max_rate"] == pytest.approx(1.0, abs=1e-8)


def test_griffith_residuals_stationary():
    tough = ToughnessModel.power(1.0, 1.0, 1.0, x_max=8.0)
    grid = np.linspace(0.0, 2.0, 201)
    ev = quasistatic_front(tough, LoadingProfile.constant(1.0), grid)
    report = verify_quasistatic_griffith(ev)
    assert report.max_complementarity == 0.0


def test_griffith_flags_perturbed_front(ramp_ev):
    # +0.01 keeps the front stable and monotone but breaks complementarity
    bumped = QuasistaticEvolution(t=ramp_ev.t, lam=ramp_ev.lam + 0.01,
                                  toughness=TOUGH_CONST, loading=LOAD_RAMP,
                                  start=1.0)
    report = verify_quasistatic_griffith(bumped)
    assert report.max_stability == 0.0
    assert report.max_complementarity > 1e-3


# -- global stability --------------------------------------------------------

def test_global_stability_ramp(ramp_ev):
    report = verify_global_stability(ramp_ev)
    assert report.passed
    assert report.min_margin == 0.0        # equality at lam_hat = lam(t)


def test_global_stability_flat_capacity():
    # kappa = 1/(2 x^2): capacity is constant (K1 holds, K2 fails) and the
    # total energy w^2/(2x) + int kappa is literally constant in x at w = 1
    flat = ToughnessModel.power(0.5, -2.0, 1.0, x_max=8.0)
    grid = np.linspace(0.0, 1.0, 101)
    ev = QuasistaticEvolution(t=grid, lam=np.full(101, 1.3), toughness=flat,
                              loading=LoadingProfile.constant(1.0), start=1.0)
    report = verify_global_stability(ev)
    assert abs(report.min_margin) < 1e-12


def test_global_stability_requires_k1():
    # kappa = 1/x^3: capacity 1/x decreasing, so minimality has no basis
    falling = ToughnessModel.power(1.0, -3.0, 1.0, x_max=8.0)
    grid = np.linspace(0.0, 1.0, 11)
    ev = QuasistaticEvolution(t=grid, lam=np.full(11, 1.0), toughness=falling,
                              loading=LoadingProfile.constant(1.0), start=1.0)
    with pytest.raises(PreconditionError) as exc:
        verify_global_stability(ev)
    assert exc.value.flag == "K1"


# -- energy balance ----------------------------------------------------------

def test_balance_stationary_exact():
    tough = ToughnessModel.power(1.0, 1.0, 1.0, x_max=8.0)
    grid = np.linspace(0.0, 2.0, 201)
    ev = quasistatic_front(tough, LoadingProfile.constant(1.0), grid)
    res = verify_energy_balance_qs(ev)
    assert float(np.max(np.abs(res))) == 0.0


def test_balance_ramp_small(ramp_ev):
    res = verify_energy_balance_qs(ramp_ev)
    assert float(np.max(np.abs(res))) <= 1e-6


def test_balance_quarters_on_curved_config():
    # kappa(x) = x, w = sqrt(2)(1+t): lam = (1+t)^(2/3), work integrand
    # smooth, so the trapezoid residual is second order in the grid step
    tough = ToughnessModel.power(1.0, 1.0, 1.0, x_max=8.0)
    load = LoadingProfile.polynomial([np.sqrt(2.0), np.sqrt(2.0)])
    maxes = []
    for n in (1001, 2001):
        grid = np.linspace(0.0, 1.0, n)
        ev = quasistatic_front(tough, load, grid)
        assert float(np.max(np.abs(ev.lam - (1.0 + grid) ** (2.0 / 3.0)))) < 1e-10
        maxes.append(float(np.max(np.abs(verify_energy_balance_qs(ev)))))
    assert maxes[0] <= 1e-6
    assert maxes[0] / maxes[1] > 3.2


def test_balance_detects_injected_jump(ramp_ev):
    lam = ramp_ev.lam.copy()
    lam[500:] += 0.05
    ev = QuasistaticEvolution(t=ramp_ev.t, lam=lam, toughness=TOUGH_CONST,
                              loading=LOAD_RAMP, start=1.0)
    res = verify_energy_balance_qs(ev)
    assert float(np.max(np.abs(res[:500]))) <= 1e-6
    assert float(np.min(np.abs(res[510:]))) > 1e-4


# -- uniqueness surrogate ----------------------------------------------------

def test_ode_surrogate_matches_closed_form(ramp_ev):
    lam = quasistatic_front_ode(TOUGH_CONST, LOAD_RAMP, ramp_ev.t)
    assert float(np.max(np.abs(lam - ramp_ev.lam))) <= 1e-6
    tough = ToughnessModel.power(1.0, 1.0, 1.0, x_max=8.0)
    load = LoadingProfile.polynomial([np.sqrt(2.0), np.sqrt(2.0)])
    grid = np.linspace(0.0, 1.0, 1001)
    ev = quasistatic_front(tough, load, grid)
    lam2 = quasistatic_front_ode(tough, load, grid)
    assert float(np.max(np.abs(lam2 - ev.lam))) <= 1e-6


def test_ode_surrogate_handles_rest_and_onset():
    grid = np.linspace(0.0, 3.0, 3001)
    lam = quasistatic_front_ode(TOUGH_CONST, LoadingProfile.sinusoid(0.0, 1.0, 1.0), grid)
    assert float(np.max(np.abs(lam - 1.0))) <= 1e-6
    # onset between grid nodes: w = 0.83 + t crosses capacity at t = 0.17
    grid2 = np.linspace(0.0, 1.0, 701)
    load = LoadingProfile.polynomial([0.83, 1.0])
    lam2 = quasistatic_front_ode(TOUGH_CONST, load, grid2)
    ref = np.maximum(1.0, 0.83 + grid2)
    assert float(np.max(np.abs(lam2 - ref))) <= 1e-6


# -- jump detection ----------------------------------------------------------

def test_detect_jumps(ramp_ev):
    assert detect_jumps(ramp_ev) == []
    lam = ramp_ev.lam.copy()
    lam[500:] += 0.05
    ev = QuasistaticEvolution(t=ramp_ev.t, lam=lam, toughness=TOUGH_CONST,
                              loading=LOAD_RAMP, start=1.0)
    assert detect_jumps(ev) == [500]


def test_detect_jumps_ignores_activation_onset():
    grid = np.linspace(0.0, 1.0, 1001)
    ev = quasistatic_front(TOUGH_CONST, LoadingProfile.polynomial([0.8, 1.0]), grid)
    assert detect_jumps(ev) == []
