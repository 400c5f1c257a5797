"""Unit tests for problem data: toughness, loading, initial data, conditions."""

from __future__ import annotations

import json

import numpy as np
import pytest

from debond import (
    InitialData,
    LoadingProfile,
    NumericalError,
    PreconditionError,
    Problem,
    SimParams,
    ToughnessModel,
    ValidationError,
    check_conditions,
    initial_right_limit,
)


# -- SimParams ---------------------------------------------------------------

def test_params_accept_valid():
    p = SimParams(epsilon=0.1, nu=1.0, ell0=1.0, t_end=2.0, ds=1e-3)
    assert p.dx == pytest.approx(1e-2)
    assert p.n_steps == 2000


def test_params_reject_coarse_ds():
    # ds must not exceed eps*ell0/8 = 0.0125
    with pytest.raises(ValidationError) as err:
        SimParams(epsilon=0.1, nu=1.0, ell0=1.0, t_end=2.0, ds=0.02)
    assert err.value.pointer == "/params/ds"


def test_params_reject_negative_nu():
    with pytest.raises(ValidationError):
        SimParams(epsilon=0.1, nu=-1.0, ell0=1.0, t_end=2.0, ds=1e-3)


# -- ToughnessModel ----------------------------------------------------------

def test_constant_toughness_values():
    tough = ToughnessModel.constant(0.5, ell0=1.0)
    assert tough.kappa(2.0) == 0.5
    assert tough.kappa_int(1.0, 3.0) == pytest.approx(1.0)
    assert tough.capacity(2.0) == pytest.approx(2.0)
    # inverse of capacity 0.5*x^2 at 2.0 is exactly 2.0
    assert tough.capacity_inverse(2.0) == pytest.approx(2.0, abs=1e-11)
    assert tough.x_max == 64.0


def test_affine_toughness_values():
    tough = ToughnessModel.affine(0.5, 0.1, ell0=1.0)
    # integral over [1,3]: 0.5*2 + 0.05*(9-1) = 1.4
    assert tough.kappa_int(1.0, 3.0) == pytest.approx(1.4)
    # capacity derivative at 2: 2*0.5*2 + 3*0.1*4 = 3.2
    assert tough.capacity_deriv(2.0) == pytest.approx(3.2)


def test_power_toughness_values():
    tough = ToughnessModel.power(1.0, -1.0, ell0=1.0)
    assert tough.kappa(2.0) == pytest.approx(0.5)
    assert tough.kappa_int(1.0, np.e) == pytest.approx(1.0)
    assert tough.capacity(3.0) == pytest.approx(3.0)


def test_sampled_toughness_values():
    tough = ToughnessModel.sampled([1.0, 2.0], [0.5, 0.7], ell0=1.0)
    # linear interpolation at midpoint: 0.6
    assert tough.kappa(1.5) == pytest.approx(0.6)
    # exact trapezoid integral over the full cell: 0.6
    assert tough.kappa_int(1.0, 2.0) == pytest.approx(0.6)
    # capacity derivative: 2*1.5*0.6 + 1.5^2*0.2 = 2.25
    assert tough.capacity_deriv(1.5) == pytest.approx(2.25)
    assert tough.x_max == 2.0


def test_sampled_toughness_rejects_unsorted():
    with pytest.raises(ValidationError):
        ToughnessModel.sampled([1.0, 0.5], [0.5, 0.7], ell0=1.0)


def test_toughness_domain_guard():
    tough = ToughnessModel.constant(0.5, ell0=1.0, x_max=4.0)
    with pytest.raises(NumericalError):
        tough.kappa(5.0)
    with pytest.raises(NumericalError):
        tough.capacity_inverse(100.0)


def test_capacity_inverse_round_trip():
    rng = np.random.default_rng(0)
    for tough in (ToughnessModel.constant(0.5, 1.0),
                  ToughnessModel.affine(0.3, 0.05, 1.0),
                  ToughnessModel.power(0.4, 1.5, 1.0, x_max=8.0),
                  ToughnessModel.sampled([1.0, 2.0, 5.0], [0.5, 0.7, 0.9], 1.0)):
        lo = tough.capacity(tough.ell0)
        hi = tough.capacity(tough.x_max)
        ys = lo + (hi - lo) * rng.random(50)
        for y in ys:
            x = tough.capacity_inverse(y)
            assert abs(tough.capacity(x) - y) <= 1e-10 * (1.0 + abs(y))


# -- LoadingProfile ----------------------------------------------------------

def test_ramp_loading():
    load = LoadingProfile.ramp(1.0, 1.5, t_ramp_end=2.0)
    assert load.w(1.0) == pytest.approx(1.25)
    assert load.wdot(1.0) == pytest.approx(0.25)
    # left rule at the start knot, zero after the ramp ends
    assert load.wdot(0.0) == 0.0
    assert load.wdot(2.0) == pytest.approx(0.25)
    assert load.w(2.5) == pytest.approx(1.5)
    assert load.wdot(2.5) == 0.0


def test_polynomial_loading():
    load = LoadingProfile.polynomial([1.0, 1.0])
    assert load.w(0.5) == pytest.approx(1.5)
    assert load.wdot(3.0) == pytest.approx(1.0)


def test_sinusoid_loading():
    load = LoadingProfile.sinusoid(offset=1.0, amplitude=0.5, angular_frequency=2.0)
    assert load.w(np.pi / 4) == pytest.approx(1.5)
    assert load.wdot(0.0) == pytest.approx(1.0)


def test_sampled_loading_is_c1():
    load = LoadingProfile.sampled([0.0, 1.0, 2.0], [1.0, 2.0, 2.0])
    # interpolates the samples exactly
    for t, w in [(0.0, 1.0), (1.0, 2.0), (2.0, 2.0)]:
        assert load.w(t) == pytest.approx(w)
    # value and derivative continuous across the interior knot
    h = 1e-9
    assert load.w(1.0 - h) == pytest.approx(load.w(1.0 + h), abs=1e-7)
    assert load.wdot(1.0 - h) == pytest.approx(load.wdot(1.0 + h), abs=1e-6)


def test_sampled_loading_with_slopes():
    load = LoadingProfile.sampled([0.0, 1.0], [0.0, 1.0], wdots=[0.0, 0.0])
    # cubic Hermite with zero end slopes: w(1/2) = 1/2, wdot(0) = 0
    assert load.w(0.5) == pytest.approx(0.5)
    assert load.wdot(0.0) == pytest.approx(0.0)


def test_max_w_squared():
    load = LoadingProfile.ramp(1.0, 1.5, t_ramp_end=2.0)
    assert load.max_w_squared(2.0) == pytest.approx(2.25)


# -- InitialData -------------------------------------------------------------

def test_equilibrium_initial_data():
    init = InitialData.equilibrium(0.9, 1.0)
    assert init.u0(0.5) == pytest.approx(0.45)
    assert init.du0(0.7) == pytest.approx(-0.9)
    # elastic energy (1/2)*0.81
    assert init.elastic_energy() == pytest.approx(0.405)
    assert init.kinetic_energy(0.1) == 0.0
    assert init.u1_cum(0.8) == 0.0


def test_constant_velocity_integral():
    init = InitialData([0.0, 1.0], [1.0, 0.0], u1_vals=[2.0, 2.0])
    assert init.u1_cum(0.3) == pytest.approx(0.6)
    # kinetic energy (1/2)*eps^2*4*1
    assert init.kinetic_energy(0.5) == pytest.approx(0.5)


def test_compatibility_enforced():
    load = LoadingProfile.constant(1.0)
    init = InitialData([0.0, 1.0], [0.9, 0.0])
    with pytest.raises(ValidationError) as err:
        init.validate_compatibility(load, 1.0)
    assert err.value.pointer == "/initial/u0"
    init2 = InitialData([0.0, 1.0], [1.0, 0.1])
    with pytest.raises(ValidationError):
        init2.validate_compatibility(load, 1.0)


# -- condition flags ---------------------------------------------------------

def test_conditions_constant_toughness():
    tough = ToughnessModel.constant(0.5, ell0=1.0)
    load = LoadingProfile.constant(0.9)
    rep = check_conditions(tough, load, t_end=2.0)
    assert rep.K0 and rep.K1 and rep.K2 and rep.K3 and rep.KW


def test_conditions_flat_capacity_counterexample():
    # kappa = 1/(2 x^2) makes the capacity constant: monotone but not strict,
    # and the toughness is integrable at infinity.
    tough = ToughnessModel.power(0.5, -2.0, ell0=1.0)
    load = LoadingProfile.constant(0.9)
    rep = check_conditions(tough, load, t_end=1.0)
    assert rep.K1
    assert not rep.K2
    assert not rep.K3
    assert not rep.K0


def test_conditions_kw_start_clause():
    # weak toughness: the start position cannot sustain the load statically
    tough = ToughnessModel.constant(0.1, ell0=1.0)
    load = LoadingProfile.constant(1.0)
    rep = check_conditions(tough, load, t_end=1.0)
    assert not rep.KW
    assert rep.details["kw_cap_clause"]
    assert not rep.details["kw_start_clause"]
    # after the jump to sqrt(5) the same data is statically stable
    rep2 = check_conditions(tough, load, t_end=1.0, start=np.sqrt(5.0))
    assert rep2.KW
    with pytest.raises(PreconditionError) as err:
        rep.require("K2", "KW")
    assert err.value.flag == "KW"


def test_initial_right_limit_jump():
    # capacity 0.1*x^2 = 0.5 at x = sqrt(5): the load w=1 forces that jump
    tough = ToughnessModel.constant(0.1, ell0=1.0)
    load = LoadingProfile.constant(1.0)
    assert initial_right_limit(tough, load) == pytest.approx(np.sqrt(5.0), abs=1e-9)


def test_initial_right_limit_stable_start():
    tough = ToughnessModel.constant(0.5, ell0=1.0)
    load = LoadingProfile.constant(0.9)
    assert initial_right_limit(tough, load) == pytest.approx(1.0, abs=1e-12)


# -- Problem JSON ------------------------------------------------------------

def _config() -> dict:
    return {
        "params": {"epsilon": 0.1, "nu": 1.0, "ell0": 1.0, "t_end": 2.0, "ds": 1e-3},
        "toughness": {"kind": "constant", "kappa0": 0.5},
        "loading": {"kind": "constant", "value": 0.9},
        "initial": {"kind": "equilibrium"},
    }


def test_problem_from_json_round_trip(tmp_path):
    cfg = _config()
    problem = Problem.from_json(cfg)
    assert problem.params.epsilon == 0.1
    assert problem.initial.u0(0.0) == pytest.approx(0.9)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(problem.to_json()), encoding="utf-8")
    again = Problem.from_json(path)
    assert again.params == problem.params
    assert again.toughness.kappa(2.0) == 0.5


def test_problem_json_pointer_errors():
    cfg = _config()
    del cfg["params"]
    with pytest.raises(ValidationError) as err:
        Problem.from_json(cfg)
    assert err.value.pointer == "/params"

    cfg = _config()
    cfg["toughness"]["kind"] = "weird"
    with pytest.raises(ValidationError) as err:
        Problem.from_json(cfg)
    assert err.value.pointer == "/toughness/kind"

    cfg = _config()
    cfg["params"]["ds"] = 0.5
    with pytest.raises(ValidationError) as err:
        Problem.from_json(cfg)
    assert err.value.pointer == "/params/ds"

    cfg = _config()
    cfg["loading"] = {"kind": "ramp", "start": 1.0}
    with pytest.raises(ValidationError) as err:
        Problem.from_json(cfg)
    assert err.value.pointer.startswith("/loading")


def test_error_json_objects():
    cfg = _config()
    cfg["params"] = 3
    try:
        Problem.from_json(cfg)
    except ValidationError as err:
        obj = err.to_json()
        assert obj["error"] == "ValidationError"
        assert obj["path"] == "/params"
    else:  # pragma: no cover
        raise AssertionError("expected ValidationError")
