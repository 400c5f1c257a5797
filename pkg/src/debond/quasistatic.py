"""Closed-form quasistatic front evolution and its verification suite.

Under a strictly increasing static capacity ``x -> x^2 kappa(x)`` the
rate-independent debonding front is explicit: the front sits at the smallest
statically stable position reachable from its start, which is the capacity
inverse of the running maximum of ``w^2 / 2``.  This module builds that
evolution on a time grid and checks, numerically, the defining properties the
closed form is supposed to satisfy:

* :func:`verify_quasistatic_griffith` -- monotone front, static stability,
  and complementarity between front speed and the energy-release deficit;
* :func:`verify_global_stability` -- the sampled total energy
  ``w^2/(2 x) + int kappa`` is globally minimized at the front;
* :func:`verify_energy_balance_qs` -- the quasistatic work balance holds up
  to quadrature error;
* :func:`quasistatic_front_ode` -- an independent reconstruction of the front
  by integrating its speed law, used as a uniqueness surrogate.

All checks are pure functions of a :class:`QuasistaticEvolution`; none of
them trusts the closed form they are checking.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ValidationError
from .model import LoadingProfile, ToughnessModel, check_conditions

__all__ = [
    "GlobalStabilityReport",
    "QsGriffithReport",
    "QuasistaticEvolution",
    "detect_jumps",
    "quasistatic_displacement",
    "quasistatic_front",
    "quasistatic_front_ode",
    "verify_energy_balance_qs",
    "verify_global_stability",
    "verify_quasistatic_griffith",
]

logger = logging.getLogger(__name__)

# static stability may be saturated while the front moves; the invariant
# check only guards against violations beyond inversion tolerance
_STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class QuasistaticEvolution:
    """Front position samples lam on a time grid, with their data.

    Attributes
    ----------
    t : ndarray
        Strictly increasing time grid starting at 0.
    lam : ndarray
        Front positions, nondecreasing, ``lam[0] >= start >= ell0``.
    toughness, loading : model ingredients the evolution solves for.
    start : float
        Position the evolution started from (``ell0`` unless resuming after
        an initial jump).
    """

    t: np.ndarray
    lam: np.ndarray
    toughness: ToughnessModel
    loading: LoadingProfile
    start: float

    def __post_init__(self):
        if self.t.shape != self.lam.shape or self.t.ndim != 1 or self.t.size < 2:
            raise ValidationError("/grid", "time grid and lam must be equal-length 1d arrays")
        if float(np.min(np.diff(self.t))) <= 0.0:
            raise ValidationError("/grid", "time grid must be strictly increasing")
        if float(np.min(np.diff(self.lam))) < -1e-12:
            raise ValidationError("/lam", "front positions must be nondecreasing")
        if self.lam[0] < self.toughness.ell0 * (1 - 1e-12):
            raise ValidationError("/lam", "front must start at or beyond ell0")
        w = self.loading.w(self.t)
        excess = 0.5 * w ** 2 / self.lam ** 2 - self.toughness.kappa(self.lam)
        if float(np.max(excess)) > _STABILITY_TOL:
            raise ValidationError("/lam", "static stability violated on the grid")

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.loading.w(self.t), dtype=float)

    def lam_at(self, t) -> np.ndarray | float:
        """Front position at arbitrary times by linear interpolation."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self.t[0] - 1e-12) or np.any(t_arr > self.t[-1] + 1e-12):
            raise ValidationError("/t", "query time outside the evolution grid")
        out = np.interp(t_arr, self.t, self.lam)
        return out if np.ndim(t) else float(out)


def quasistatic_front(toughness: ToughnessModel, loading: LoadingProfile,
                      grid: np.ndarray, start: float | None = None) -> QuasistaticEvolution:
    """Closed-form quasistatic front on a time grid.

    Per node, ``lam = capacity^{-1}(max(running_max(w^2/2), capacity(start)))``.
    The running maximum makes lam nondecreasing even under unloading; the
    capacity floor keeps it at or beyond ``start``.

    Parameters
    ----------
    toughness, loading : model ingredients.
    grid : ndarray
        Strictly increasing times starting at 0.
    start : float, optional
        Initial front position, ``>= ell0``; defaults to ``ell0``.  Pass a
        post-jump position to continue an evolution after an initial jump.

    Raises
    ------
    PreconditionError
        If condition K3 (positive capacity derivative) or KW (load stays
        below the capacity cap) fails.
    """
    grid = np.asarray(grid, dtype=float)
    start = toughness.ell0 if start is None else float(start)
    if start < toughness.ell0 * (1 - 1e-12):
        raise ValidationError("/start", f"start={start} below ell0={toughness.ell0}")
    report = check_conditions(toughness, loading, float(grid[-1]), start=start)
    report.require("K3", "KW")
    w_sq = np.asarray(loading.w(grid), dtype=float) ** 2
    target = np.maximum(np.maximum.accumulate(0.5 * w_sq), toughness.capacity(start))
    lam = toughness.capacity_inverse(target)
    logger.info("quasistatic front: %d nodes, lam in [%g, %g]",
                grid.size, lam[0], lam[-1])
    return QuasistaticEvolution(t=grid, lam=lam, toughness=toughness,
                                loading=loading, start=start)


def quasistatic_displacement(evolution: QuasistaticEvolution, t, x):
    """Displacement ``w(t) (1 - x/lam(t))`` on [0, lam(t)], zero beyond.

    Scalar or array ``x``; ``t`` scalar within the grid range.
    """
    lam = evolution.lam_at(t)
    w = float(evolution.loading.w(float(t)))
    x_arr = np.asarray(x, dtype=float)
    vals = w * np.clip(1.0 - x_arr / lam, 0.0, None)
    return vals if np.ndim(x) else float(vals)


# -- verification ------------------------------------------------------------

@dataclass(frozen=True)
class QsGriffithReport:
    """Residuals of the quasistatic Griffith criterion on the grid.

    All three are maxima over nodes and nonnegative; zero means the
    criterion holds exactly at grid resolution.
    """

    max_negative_slope: float
    max_stability: float
    max_complementarity: float
    details: dict[str, Any] = field(default_factory=dict)


def verify_quasistatic_griffith(evolution: QuasistaticEvolution) -> QsGriffithReport:
    """Check monotonicity, static stability, and complementarity.

    The front speed is estimated by forward difference quotients; the
    complementarity residual pairs each quotient with the energy-release
    deficit ``w^2/(2 lam^2) - kappa(lam)`` at the interval's left node, which
    is where the flow rule constrains the speed.
    """
    t, lam = evolution.t, evolution.lam
    w = evolution.w
    rate = np.diff(lam) / np.diff(t)
    excess = 0.5 * w ** 2 / lam ** 2 - evolution.toughness.kappa(lam)
    neg = float(np.max(np.maximum(-rate, 0.0)))
    stab = float(np.max(np.maximum(excess, 0.0)))
    compl = float(np.max(np.abs(rate * excess[:-1])))
    return QsGriffithReport(max_negative_slope=neg, max_stability=stab,
                            max_complementarity=compl,
                            details={"max_rate": float(np.max(rate))})


@dataclass(frozen=True)
class GlobalStabilityReport:
    """Sampled check that the front globally minimizes the total energy."""

    min_margin: float
    argmin_t: float
    n_time: int
    n_positions: int

    @property
    def passed(self) -> bool:
        return self.min_margin >= -1e-9


def verify_global_stability(evolution: QuasistaticEvolution, n_time: int = 20,
                            n_positions: int = 50) -> GlobalStabilityReport:
    """Check ``E_t(lam_hat) >= E_t(lam(t))`` for sampled t and lam_hat.

    ``E_t(x) = w(t)^2 / (2 x) + int_{ell0}^{x} kappa``, sampled at
    ``n_positions`` points of [lam(t), x_max] for ``n_time`` grid times.
    Requires K1 (nondecreasing capacity); without it the energy can dip
    below its value at the front and no minimality holds.
    """
    tough = evolution.toughness
    report = check_conditions(tough, evolution.loading, float(evolution.t[-1]),
                              start=evolution.start)
    report.require("K1")
    idx = np.unique(np.linspace(0, evolution.t.size - 1, n_time).astype(int))
    min_margin = np.inf
    arg_t = float(evolution.t[0])
    for k in idx:
        lam_k = float(evolution.lam[k])
        w_sq = float(evolution.w[k]) ** 2
        hats = np.linspace(lam_k, tough.x_max, n_positions)
        energy = 0.5 * w_sq / hats + tough.kappa_int(tough.ell0, hats)
        margin = float(np.min(energy - energy[0]))
        if margin < min_margin:
            min_margin, arg_t = margin, float(evolution.t[k])
    return GlobalStabilityReport(min_margin=min_margin, argmin_t=arg_t,
                                 n_time=len(idx), n_positions=n_positions)


def verify_energy_balance_qs(evolution: QuasistaticEvolution) -> np.ndarray:
    """Residual series of the quasistatic energy balance.

    Per node: ``w^2/(2 lam) + int_{ell0}^{lam} kappa - int_0^t wdot w / lam
    - w(0)^2 / (2 ell0)``, the work integral by trapezoid on the grid.  On a
    continuous evolution from ell0 the residual is quadrature error, second
    order in the step on smooth branches; a front jump leaves a finite
    residual equal to the energy dropped in the jump.
    """
    tough = evolution.toughness
    t, lam, w = evolution.t, evolution.lam, evolution.w
    wdot = np.asarray(evolution.loading.wdot(t), dtype=float)
    power = wdot * w / lam
    work = np.concatenate(([0.0], np.cumsum(
        0.5 * np.diff(t) * (power[1:] + power[:-1]))))
    stored = 0.5 * w ** 2 / lam + tough.kappa_int(tough.ell0, lam)
    return stored - work - 0.5 * w[0] ** 2 / tough.ell0


# -- independent reconstruction and jump detection ---------------------------

def quasistatic_front_ode(toughness: ToughnessModel, loading: LoadingProfile,
                          grid: np.ndarray, start: float | None = None) -> np.ndarray:
    """Front positions by event-driven RK4 integration of the speed law.

    While the load presses against the capacity the front moves with
    ``lam' = max(w wdot, 0) / capacity'(lam)``; this law preserves contact
    (``capacity(lam) = w^2/2``) exactly, so within a contact step the stages
    need no gating.  A resting front activates when the growing load reaches
    its stored capacity; the onset time is located by bisection inside the
    step.  Independent of :func:`quasistatic_front`: no capacity inversion
    and no running maximum.  Used as a uniqueness surrogate; on smooth
    loadings the two agree to the integration error.
    """
    grid = np.asarray(grid, dtype=float)
    start = toughness.ell0 if start is None else float(start)
    report = check_conditions(toughness, loading, float(grid[-1]), start=start)
    report.require("K3", "KW")
    slack = 1e-9 * max(1.0, float(toughness.capacity(start)))

    def rate(tau: float, pos: float) -> float:
        drive = float(loading.w(tau)) * float(loading.wdot(tau))
        if drive <= 0.0:
            return 0.0
        pos = min(max(pos, toughness.ell0), toughness.x_max)
        return drive / toughness.capacity_deriv(pos)

    def rk4(t0: float, y: float, h: float) -> float:
        k1 = rate(t0, y)
        k2 = rate(t0 + 0.5 * h, y + 0.5 * h * k1)
        k3 = rate(t0 + 0.5 * h, y + 0.5 * h * k2)
        k4 = rate(t0 + h, y + h * k3)
        return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0

    lam = np.empty_like(grid)
    lam[0] = start
    for k in range(grid.size - 1):
        t0, t1 = float(grid[k]), float(grid[k + 1])
        y = lam[k]
        cap = float(toughness.capacity(min(max(y, toughness.ell0), toughness.x_max)))
        if cap - 0.5 * float(loading.w(t0)) ** 2 <= slack:
            lam[k + 1] = rk4(t0, y, t1 - t0)
        elif 0.5 * float(loading.w(t1)) ** 2 >= cap:
            # the load reaches the stored capacity inside this step; rest
            # until the bisected onset time, then integrate the remainder
            lo, hi = t0, t1
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if 0.5 * float(loading.w(mid)) ** 2 >= cap:
                    hi = mid
                else:
                    lo = mid
            lam[k + 1] = rk4(hi, y, t1 - hi)
        else:
            lam[k + 1] = y
    return lam


def detect_jumps(evolution: QuasistaticEvolution, factor: float = 10.0) -> list[int]:
    """Indices of grid nodes where the front jumps.

    A node is flagged when its incoming difference quotient exceeds
    ``factor`` times the local Lipschitz estimate, taken as the larger of
    the trailing two quotients and the mean quotient of the whole run.  The
    mean floor keeps activation onsets (rate stepping from zero to its
    smooth value) from being flagged.
    """
    t, lam = evolution.t, evolution.lam
    rate = np.diff(lam) / np.diff(t)
    span = float(t[-1] - t[0])
    floor = max((float(lam[-1] - lam[0])) / span, 1e-12)
    flags = []
    for k in range(rate.size):
        trailing = rate[max(0, k - 2):k]
        local = max(float(np.max(trailing)) if trailing.size else 0.0, floor)
        if rate[k] > factor * local:
            flags.append(k + 1)
    return flags
