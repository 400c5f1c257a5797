"""Piecewise-linear debonding fronts and their characteristic maps.

The front t -> ell(t) is stored as a piecewise-linear graph with slopes in
[0, 1/eps).  Three exact maps organize the method of characteristics:

* ``phi(t) = t - eps*ell(t)``  (value carried by the forward family),
* ``psi(t) = t + eps*ell(t)``  (value carried by the backward family),
* ``omega = phi o psi^{-1}``   (one bounce off the front: the forward value a
  backward characteristic acquires after reflecting at the tip).

All maps and inverses are evaluated segment-exactly (affine algebra, float
round-off only), which is what lets the solver meet 1e-8-level oracle
tolerances.  Slope-type quantities (elldot, omega-derivative) use the left
segment at knots; the theory only needs them almost everywhere.

Iterating omega pulls any characteristic value back to the data region:
``count_to_seed`` counts bounces until [-eps*ell0, eps*ell0) (used by the
f-extension and the forcing kernel g), ``count_to_initial_zero`` counts until
[0, omega^{-1}(0)) (used by the x=0 trace of the memory term H).
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import NumericalError

logger = logging.getLogger(__name__)

# Hard cap on reflection counts; exceeding it means runaway iteration.
MAX_REFLECTIONS = 10 ** 6


class Front:
    """Nondecreasing piecewise-linear front with slopes in [0, 1/eps).

    Parameters
    ----------
    knots : array
        Strictly increasing times, starting at 0.
    values : array
        Front positions at the knots, nondecreasing.
    epsilon : float
        Wave-speed scale; segment slopes must stay strictly below 1/epsilon.
    validate : bool
        Disable only when the caller guarantees the invariants (hot loops).
    """

    __slots__ = ("knots", "values", "epsilon", "_phi_knots", "_psi_knots",
                 "_slopes", "_omega_inv_zero")

    def __init__(self, knots, values, epsilon: float, validate: bool = True):
        self.knots = np.asarray(knots, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.epsilon = float(epsilon)
        if validate:
            if self.knots.ndim != 1 or self.knots.shape != self.values.shape or self.knots.size < 1:
                raise NumericalError("front arrays must be 1-d and of equal length >= 1")
            if self.knots[0] != 0.0:
                raise NumericalError("front must start at t = 0")
            if self.knots.size > 1:
                dt = np.diff(self.knots)
                if np.any(dt <= 0):
                    raise NumericalError("front knots must be strictly increasing")
                dv = np.diff(self.values)
                if np.any(dv < 0):
                    raise NumericalError("front must be nondecreasing")
                slopes = dv / dt
                if np.any(slopes * self.epsilon >= 1.0):
                    worst = float(np.max(slopes))
                    raise NumericalError(
                        f"front slope {worst} reaches the characteristic speed 1/eps="
                        f"{1.0 / self.epsilon}; shrink ds")
        self._phi_knots = self.knots - self.epsilon * self.values
        self._psi_knots = self.knots + self.epsilon * self.values
        if self.knots.size > 1:
            self._slopes = np.diff(self.values) / np.diff(self.knots)
        else:
            self._slopes = np.zeros(0)
        self._omega_inv_zero = None

    @staticmethod
    def constant(ell0: float, t_end: float, epsilon: float) -> "Front":
        return Front(np.array([0.0, float(t_end)]), np.array([float(ell0)] * 2), epsilon)

    # -- basic queries ------------------------------------------------------

    @property
    def ell0(self) -> float:
        return float(self.values[0])

    @property
    def t_end(self) -> float:
        return float(self.knots[-1])

    @property
    def eps_ell0(self) -> float:
        return self.epsilon * float(self.values[0])

    def _segment(self, grid: np.ndarray, x: np.ndarray, name: str) -> np.ndarray:
        if grid.size < 2:
            raise NumericalError(f"{name}: front has a single knot; maps need a segment")
        lo, hi = grid[0], grid[-1]
        tol = 1e-9 * (1.0 + abs(hi))
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            flat = np.asarray(x).ravel()
            bad = flat[np.argmax((flat < lo - tol) | (flat > hi + tol))]
            raise NumericalError(
                f"{name} queried at {bad} outside [{lo}, {hi}] (front known up to t={self.t_end})")
        # Left rule: a query equal to an interior grid point uses the segment
        # ending there, so slope-type outputs are left-continuous.
        return np.clip(np.searchsorted(grid, x, side="left"), 1, grid.size - 1) - 1

    def ell(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.knots.size == 1:
            out = np.full_like(t_arr, self.values[0])
        else:
            idx = self._segment(self.knots, t_arr, "front")
            out = self.values[idx] + self._slopes[idx] * (t_arr - self.knots[idx])
        return out if np.ndim(t) else float(out)

    def elldot(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.knots.size == 1:
            out = np.zeros_like(t_arr)
        else:
            idx = self._segment(self.knots, t_arr, "front")
            out = self._slopes[idx]
        return out if np.ndim(t) else float(out)

    # -- characteristic maps ------------------------------------------------

    def phi(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = t_arr - self.epsilon * np.asarray(self.ell(t_arr))
        return out if np.ndim(t) else float(out)

    def psi(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = t_arr + self.epsilon * np.asarray(self.ell(t_arr))
        return out if np.ndim(t) else float(out)

    def _inv(self, grid: np.ndarray, s, name: str):
        s_arr = np.asarray(s, dtype=float)
        idx = self._segment(grid, s_arr, name)
        denom = grid[idx + 1] - grid[idx]
        frac = (s_arr - grid[idx]) / denom
        out = self.knots[idx] + frac * (self.knots[idx + 1] - self.knots[idx])
        return out if np.ndim(s) else float(out)

    def phi_inv(self, s):
        """Inverse of phi; domain [-eps*ell0, phi(t_end)]."""
        return self._inv(self._phi_knots, s, "phi_inv")

    def psi_inv(self, s):
        """Inverse of psi; domain [eps*ell0, psi(t_end)]."""
        return self._inv(self._psi_knots, s, "psi_inv")

    def omega(self, s):
        """One bounce: phi(psi_inv(s)), defined for s in [eps*ell0, psi(t_end)]."""
        return self.phi(self.psi_inv(s))

    def omega_inv(self, s):
        """Inverse bounce: psi(phi_inv(s)), defined for s in [-eps*ell0, phi(t_end)]."""
        return self.psi(self.phi_inv(s))

    def omega_deriv(self, s):
        """a.e. derivative of omega: (1 - eps*elldot)/(1 + eps*elldot) at psi_inv(s)."""
        s_arr = np.asarray(s, dtype=float)
        idx = self._segment(self._psi_knots, s_arr, "omega_deriv")
        m = self._slopes[idx] if self._slopes.size else np.zeros(s_arr.shape)
        out = (1.0 - self.epsilon * m) / (1.0 + self.epsilon * m)
        return out if np.ndim(s) else float(out)

    def omega_inv_zero(self) -> float:
        """omega^{-1}(0) = psi(phi_inv(0)), the threshold of the x=0 trace count."""
        if self._omega_inv_zero is None:
            self._omega_inv_zero = float(self.omega_inv(0.0))
        return self._omega_inv_zero

    # -- iterated maps ------------------------------------------------------

    def omega_iter(self, s, j: int):
        """j-fold composition omega^j(s); raises if an iterate exits the domain."""
        cur = np.asarray(s, dtype=float).copy()
        for step in range(j):
            if np.any(cur < self.eps_ell0 - 1e-12 * (1.0 + self.eps_ell0)):
                bad = float(np.min(cur))
                raise NumericalError(
                    f"omega iterate {step} of {j} reached {bad} below eps*ell0={self.eps_ell0}")
            cur = np.asarray(self.omega(cur))
        return cur if np.ndim(s) else float(cur)

    def omega_iter_deriv(self, s, j: int):
        """a.e. derivative of omega^j at s (product of segment slopes along the orbit)."""
        cur = np.asarray(s, dtype=float).copy()
        fac = np.ones_like(cur)
        for _ in range(j):
            fac = fac * np.asarray(self.omega_deriv(cur))
            cur = np.asarray(self.omega(cur))
        return fac if np.ndim(s) else float(fac)

    def count_to_seed(self, s: float) -> int:
        """Number n of bounces until omega^n(s) lands in [-eps*ell0, eps*ell0)."""
        cur = float(s)
        lo = -self.eps_ell0
        if cur < lo - 1e-12 * (1.0 + abs(lo)):
            raise NumericalError(f"count_to_seed start {cur} below -eps*ell0={lo}")
        n = 0
        while cur >= self.eps_ell0:
            cur = float(self.omega(cur))
            n += 1
            if n > MAX_REFLECTIONS:
                raise NumericalError(f"count_to_seed exceeded {MAX_REFLECTIONS} reflections")
        return n

    def count_to_initial_zero(self, t: float) -> int:
        """Number m of bounces until omega^m(t) lands in [0, omega^{-1}(0))."""
        cur = float(t)
        if cur < -1e-12:
            raise NumericalError(f"count_to_initial_zero start {cur} is negative")
        if self._phi_knots[-1] < 0.0:
            # phi < 0 on the whole known range: every backward characteristic
            # reaches the initial line before completing a bounce to x = 0
            return 0
        threshold = self.omega_inv_zero()
        m = 0
        while cur >= threshold:
            cur = float(self.omega(cur))
            m += 1
            if m > MAX_REFLECTIONS:
                raise NumericalError(f"count_to_initial_zero exceeded {MAX_REFLECTIONS} reflections")
        if cur < 0.0:
            raise NumericalError(
                f"count_to_initial_zero orbit left [0, {threshold}) at {cur}")
        return m

    # -- growth -------------------------------------------------------------

    def extended(self, new_knots, new_values) -> "Front":
        """New front with extra knots appended after t_end."""
        nk = np.asarray(new_knots, dtype=float)
        nv = np.asarray(new_values, dtype=float)
        if nk.size and nk[0] <= self.t_end:
            raise NumericalError("extension knots must lie beyond the current t_end")
        return Front(np.concatenate([self.knots, nk]),
                     np.concatenate([self.values, nv]), self.epsilon)
