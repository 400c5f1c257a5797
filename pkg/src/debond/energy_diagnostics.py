"""Energy functionals of a coupled run and the balances they must satisfy.

All quantities are trapezoid quadratures of solver output, with the front
point appended to each spatial row so the integrals really cover [0, ell(t)].
The modified energy uses the affine reference connecting (0, w(t)) to
(ell(t), 0); its cross term is evaluated analytically, which makes the
defining identity Etilde = E - w^2/(2 ell) exact in float.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .dynamic_solver import SimResult, energy_release
from .front_kinematics import Front
from .model import SimParams, ToughnessModel

logger = logging.getLogger(__name__)

GAUSS4_NODES = np.array([-0.8611363115940526, -0.3399810435848563,
                         0.3399810435848563, 0.8611363115940526])
GAUSS4_WEIGHTS = np.array([0.3478548451374538, 0.6521451548625461,
                           0.6521451548625461, 0.3478548451374538])


@dataclass(frozen=True)
class EnergySeries:
    """Per-node energy functionals of one run.

    E = kinetic + potential; A is the cumulative frictional dissipation,
    W the cumulative loading work; Etilde the modified energy against the
    affine reference.  ux0 and wdot ride along for the decay envelope.
    """

    t: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    E: np.ndarray
    A: np.ndarray
    W: np.ndarray
    Etilde: np.ndarray
    ux0: np.ndarray
    wdot: np.ndarray
    w: np.ndarray
    ell: np.ndarray


@dataclass(frozen=True)
class BalanceReport:
    kappa_int: np.ndarray
    raw: np.ndarray
    rel: np.ndarray
    max_raw: float
    max_rel: float


@dataclass(frozen=True)
class DecayReport:
    applicable: bool
    mu0: float
    mu1: float
    m: float
    C_T: float
    Etilde0: float


@dataclass(frozen=True)
class IntpartsReport:
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray
    max_residual: float


@dataclass(frozen=True)
class GriffithReport:
    min_slope: float
    max_stability: float
    max_complementarity: float


def _cumtrapz(y: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * dt * (y[1:] + y[:-1]), out=out[1:])
    return out


def _row_integral(row: np.ndarray, count: int, ell: float, dx: float,
                  front_value: float) -> float:
    # trapezoid over the grid nodes plus the cut panel to the front
    inner = dx * (np.sum(row[:count]) - 0.5 * (row[0] + row[count - 1]))
    gap = ell - dx * (count - 1)
    return inner + 0.5 * gap * (row[count - 1] + front_value)


def compute_energies(result: SimResult) -> EnergySeries:
    """Energy functionals E, A, W, Etilde of one coupled run.

    Spatial integrals are trapezoids with the front trace appended; A and W
    are cumulative trapezoids in time.  The potential part of Etilde expands
    (u_x - r_x)^2 with the cross integral of u_x evaluated exactly as
    u(ell) - u(0) = -w, so the squares identity holds to roundoff.
    """
    params = result.params
    eps = params.epsilon
    nu = params.nu
    dx = params.dx
    n = result.t.size
    loading = result.problem.loading

    fr_ux = result.front_trace_ux()
    fr_ut = result.front_trace_ut()
    kin = np.empty(n)
    pot = np.empty(n)
    pot_tilde = np.empty(n)
    w = np.asarray(loading.w(result.t), dtype=float)
    wdot = np.asarray(loading.wdot(result.t), dtype=float)
    for k in range(n):
        count = int(result.support[k])
        ell = float(result.ell[k])
        ut_sq = result.u_t[k, :count] ** 2
        ux_sq = result.u_x[k, :count] ** 2
        kin[k] = 0.5 * eps ** 2 * _row_integral(ut_sq, count, ell, dx,
                                                float(fr_ut[k]) ** 2)
        int_ux2 = _row_integral(ux_sq, count, ell, dx, float(fr_ux[k]) ** 2)
        pot[k] = 0.5 * int_ux2
        r_x = -w[k] / ell
        # integral of (u_x - r_x)^2 with the cross term exact:
        # int u_x dx = -w, so -2 r_x int u_x = -2 w^2/ell
        pot_tilde[k] = 0.5 * (int_ux2 - 2.0 * r_x * (-w[k]) + r_x ** 2 * ell)
    E = kin + pot
    Etilde = kin + pot_tilde

    diss = np.empty(n)
    for k in range(n):
        count = int(result.support[k])
        diss[k] = nu * eps * _row_integral(result.u_t[k, :count] ** 2, count,
                                           float(result.ell[k]), dx,
                                           float(fr_ut[k]) ** 2)
    A = _cumtrapz(diss, params.ds)
    W = _cumtrapz(wdot * result.ux0, params.ds)
    return EnergySeries(t=result.t, kinetic=kin, potential=pot, E=E, A=A,
                        W=W, Etilde=Etilde, ux0=result.ux0.copy(),
                        wdot=wdot, w=w, ell=result.ell.copy())


def balance_residual(series: EnergySeries, tough: ToughnessModel,
                     front: Front) -> BalanceReport:
    """Residual of the energy-dissipation balance, raw and relative.

    residual(t) = E(t) + A(t) + int_{ell0}^{ell(t)} kappa + W(t) - E(0).
    """
    ell0 = float(series.ell[0])
    kap = np.asarray(tough.kappa_int(ell0, series.ell), dtype=float)
    raw = series.E + series.A + kap + series.W - series.E[0]
    rel = raw / (series.E[0] + 1.0)
    return BalanceReport(kappa_int=kap, raw=raw, rel=rel,
                         max_raw=float(np.max(np.abs(raw))),
                         max_rel=float(np.max(np.abs(rel))))


def decay_envelope_check(series: EnergySeries, params: SimParams,
                         front: Front, L_T: float) -> DecayReport:
    """Exponential decay envelope for the modified energy (damped case).

    With mu0 = L_T/pi, mu1 = nu (L_T/pi)^2 and
    m = (1/2) min{1/(2 mu0), nu/2, 1/(mu0 + mu1)}, finds the smallest C_T
    with  Etilde(t) <= 4 Etilde(0) e^{-mt/eps}
                       + C_T int_0^t (elldot + wdot^2 + ux0^2 + 1)
                         e^{-m(t-tau)/eps} dtau.
    nu = 0 makes the envelope trivial: reported as not applicable.
    """
    nu = params.nu
    mu0 = L_T / math.pi
    mu1 = nu * (L_T / math.pi) ** 2
    if nu <= 0.0:
        return DecayReport(applicable=False, mu0=mu0, mu1=mu1, m=0.0,
                           C_T=float("nan"), Etilde0=float(series.Etilde[0]))
    m = 0.5 * min(1.0 / (2.0 * mu0), nu / 2.0, 1.0 / (mu0 + mu1))
    eps = params.epsilon
    dt = float(series.t[1] - series.t[0])
    elldot = np.asarray(front.elldot(series.t), dtype=float)
    g = elldot + series.wdot ** 2 + series.ux0 ** 2 + 1.0
    fade = math.exp(-m * dt / eps)
    conv = np.empty_like(g)
    conv[0] = 0.0
    for k in range(1, g.size):
        conv[k] = fade * conv[k - 1] + 0.5 * dt * (g[k] + fade * g[k - 1])
    excess = series.Etilde - 4.0 * series.Etilde[0] * np.exp(
        -m * series.t / eps)
    C_T = float(np.max(np.maximum(excess[1:], 0.0) / conv[1:]))
    return DecayReport(applicable=True, mu0=mu0, mu1=mu1, m=m, C_T=C_T,
                       Etilde0=float(series.Etilde[0]))


def _cutoff_h(y: np.ndarray) -> np.ndarray:
    # quintic smoothstep complement on [0,1]: h(0)=1, h(1)=0, C^2 at both ends
    return 1.0 - y ** 3 * (10.0 - 15.0 * y + 6.0 * y ** 2)


def _cutoff_hdot(y: np.ndarray, ell0: float) -> np.ndarray:
    return -(30.0 * y ** 2 - 60.0 * y ** 3 + 30.0 * y ** 4) / ell0


def boundary_work_identity_check(result: SimResult) -> IntpartsReport:
    """Both sides of the boundary-trace identity recovered by parts.

    (1/2) int_0^t (eps^2 wdot^2 + ux0^2)
      = -(1/2) int_0^t int_0^{ell0} hdot (eps^2 u_t^2 + u_x^2)
        - nu int_0^t int_0^{ell0} h eps u_t u_x
        - eps [ int_0^{ell0} h eps u_t(t) u_x(t)
                - int_0^{ell0} h eps u1 du0 ].

    Spatial integrals use 4-point Gauss per grid cell on the quintic cutoff
    times linearly interpolated field products (exact per cell for the
    polynomial factor); time integrals are cumulative trapezoids.
    """
    params = result.params
    eps = params.epsilon
    nu = params.nu
    ell0 = params.ell0
    dx = params.dx
    initial = result.problem.initial

    # Gauss nodes of every cell of [0, ell0], including a partial last cell
    n_full = int(math.floor(ell0 / dx + 1e-9))
    edges = [dx * j for j in range(n_full + 1)]
    if edges[-1] < ell0 - 1e-12 * ell0:
        edges.append(ell0)
    edges = np.asarray(edges)
    lo = edges[:-1]
    hi = edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    xg = (mid[:, None] + half[:, None] * GAUSS4_NODES[None, :]).ravel()
    wg = (half[:, None] * GAUSS4_WEIGHTS[None, :]).ravel()
    j_lo = np.minimum((xg / dx).astype(np.int64), result.u.shape[1] - 2)
    alpha = xg / dx - j_lo
    y = xg / ell0
    h_g = _cutoff_h(y)
    hdot_g = _cutoff_hdot(y, ell0)

    def at_gauss(rows: np.ndarray) -> np.ndarray:
        return (1.0 - alpha) * rows[:, j_lo] + alpha * rows[:, j_lo + 1]

    ut_g = at_gauss(result.u_t)
    ux_g = at_gauss(result.u_x)
    quad = (eps ** 2 * ut_g ** 2 + ux_g ** 2) @ (wg * hdot_g)
    mixed = (ut_g * ux_g) @ (wg * h_g)
    u1_g = np.asarray(initial.u1(xg), dtype=float)
    du0_g = np.asarray(initial.du0(xg), dtype=float)
    init_term = float((u1_g * du0_g) @ (wg * h_g))

    lhs = 0.5 * _cumtrapz(eps ** 2 * result.problem.loading.wdot(result.t) ** 2
                          + result.ux0 ** 2, params.ds)
    rhs = (-0.5 * _cumtrapz(quad, params.ds)
           - nu * eps * _cumtrapz(mixed, params.ds)
           - eps * (eps * mixed - eps * init_term))
    residual = np.abs(lhs - rhs)
    return IntpartsReport(lhs=lhs, rhs=rhs, residual=residual,
                          max_residual=float(np.max(residual)))


def griffith_residuals(result: SimResult) -> GriffithReport:
    """Residuals of the dynamic flow rule along the run.

    Per step k -> k+1 the rate-adjusted release G_{eps*rate} formed from
    b(t_k) must sit at or below kappa(ell(t_k)), with equality whenever the
    rate is positive; the slope itself must be nonnegative.
    """
    eps = result.params.epsilon
    tough = result.problem.toughness
    adj = energy_release(result.b[:-1], eps, alpha=result.rate[1:])
    kap = np.asarray(tough.kappa(result.ell[:-1]), dtype=float)
    stability = float(np.max(np.maximum(adj - kap, 0.0)))
    compl = float(np.max(np.abs(result.rate[1:] * (adj - kap))))
    return GriffithReport(min_slope=float(np.min(result.rate)),
                          max_stability=stability,
                          max_complementarity=compl)
