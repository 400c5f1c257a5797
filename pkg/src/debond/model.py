"""Problem data for the thin-film debonding laboratory.

A scalar displacement u(t, x) lives on the growing interval [0, ell(t)] and
obeys a damped wave equation ``eps^2 u_tt - u_xx + nu*eps*u_t = 0`` with a
prescribed load ``u(t, 0) = w(t)`` and a free end ``u(t, ell(t)) = 0``.  The
debonding front ell(t) advances by a Griffith criterion against a toughness
field kappa.  This module holds the immutable ingredients of a run:

* :class:`SimParams` -- discretization and scaling parameters;
* :class:`ToughnessModel` -- kappa on [ell0, x_max], its exact integral, the
  static capacity ``x -> x^2 kappa(x)`` and its inverse (the closed-form
  quasistatic front is ``capacity^{-1}(max(w^2/2, capacity(start)))``);
* :class:`LoadingProfile` -- the boundary load w and its derivative;
* :class:`InitialData` -- piecewise-linear initial profiles u0, u1;
* :class:`Problem` -- the validated bundle, with JSON (de)serialization that
  reports errors as JSON-pointer tagged :class:`~debond.errors.ValidationError`.

Condition flags (``K0``..``K3``, ``KW``) summarize the qualitative hypotheses
the quasistatic theory needs; see :func:`check_conditions`.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

# Grid size used for condition surrogates and loading extrema.
_CONDITION_GRID = 4096
# Bisection never narrows the bracket below this absolute width.
_BISECTION_XTOL = 1e-13


def _as_float(obj: dict, key: str, pointer: str, *, minimum: float | None = None,
              strict: bool = False) -> float:
    """Read a finite float from a JSON object, with pointer-tagged errors."""
    if key not in obj:
        raise ValidationError(f"{pointer}/{key}", "missing required field")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{pointer}/{key}", f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{pointer}/{key}", "value must be finite")
    if minimum is not None:
        if strict and value <= minimum:
            raise ValidationError(f"{pointer}/{key}", f"value must be > {minimum}")
        if not strict and value < minimum:
            raise ValidationError(f"{pointer}/{key}", f"value must be >= {minimum}")
    return value


def _as_array(obj: dict, key: str, pointer: str) -> np.ndarray:
    if key not in obj:
        raise ValidationError(f"{pointer}/{key}", "missing required field")
    try:
        arr = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{pointer}/{key}", f"expected a numeric array: {exc}") from None
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError(f"{pointer}/{key}", "expected a 1-d array with at least 2 entries")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{pointer}/{key}", "array entries must be finite")
    return arr


@dataclass(frozen=True)
class SimParams:
    """Scaling and discretization parameters of one dynamic run.

    Attributes
    ----------
    epsilon : float
        Wave-speed scale; characteristic speed is 1/epsilon.
    nu : float
        Damping coefficient (nu >= 0; nu = 0 switches the solver to the
        undamped explicit path).
    ell0 : float
        Initial front position.
    t_end : float
        Final time of the run.
    ds : float
        Step of the characteristic grid.  The invariant ``ds <= epsilon*ell0/8``
        guarantees several grid cells per wave transit.
    """

    epsilon: float
    nu: float
    ell0: float
    t_end: float
    ds: float

    def __post_init__(self):
        for name in ("epsilon", "ell0", "t_end", "ds"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValidationError(f"/params/{name}", "value must be a finite positive number")
        if not (isinstance(self.nu, (int, float)) and math.isfinite(self.nu) and self.nu >= 0):
            raise ValidationError("/params/nu", "value must be a finite number >= 0")
        cap = self.epsilon * self.ell0 / 8.0
        if self.ds > cap * (1 + 1e-12):
            raise ValidationError(
                "/params/ds",
                f"ds={self.ds} exceeds epsilon*ell0/8={cap} (too few cells per transit)")

    @property
    def dx(self) -> float:
        """Spatial step of the natural grid, ds/epsilon."""
        return self.ds / self.epsilon

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.ds))

    @staticmethod
    def from_json(obj: dict, pointer: str = "/params") -> "SimParams":
        if not isinstance(obj, dict):
            raise ValidationError(pointer, "expected an object")
        return SimParams(
            epsilon=_as_float(obj, "epsilon", pointer, minimum=0.0, strict=True),
            nu=_as_float(obj, "nu", pointer, minimum=0.0),
            ell0=_as_float(obj, "ell0", pointer, minimum=0.0, strict=True),
            t_end=_as_float(obj, "t_end", pointer, minimum=0.0, strict=True),
            ds=_as_float(obj, "ds", pointer, minimum=0.0, strict=True),
        )

    def to_json(self) -> dict[str, Any]:
        return {"epsilon": self.epsilon, "nu": self.nu, "ell0": self.ell0,
                "t_end": self.t_end, "ds": self.ds}


class ToughnessModel:
    """Toughness field kappa on [ell0, x_max] with exact integral and capacity.

    Kinds
    -----
    ``constant``   kappa(x) = kappa0
    ``affine``     kappa(x) = a + b*x
    ``power``      kappa(x) = c * x**p
    ``sampled``    piecewise-linear through given (x, kappa) samples

    The capacity ``x -> x^2 kappa(x)`` controls quasistatic equilibria: a load
    w is sustainable at front position x iff ``w^2/2 <= capacity(x)``.  Its
    bisection inverse drives the closed-form quasistatic front.  The front of
    a dynamic run aborts if it reaches ``x_max`` (default ``64*ell0``).
    """

    KINDS = ("constant", "affine", "power", "sampled")

    def __init__(self, kind: str, ell0: float, x_max: float | None = None, *,
                 kappa0: float | None = None, a: float | None = None, b: float | None = None,
                 c: float | None = None, p: float | None = None,
                 xs: np.ndarray | None = None, ks: np.ndarray | None = None,
                 pointer: str = "/toughness"):
        if kind not in self.KINDS:
            raise ValidationError(f"{pointer}/kind", f"unknown kind {kind!r}; expected one of {self.KINDS}")
        self.kind = kind
        self.ell0 = float(ell0)
        if self.ell0 <= 0 or not math.isfinite(self.ell0):
            raise ValidationError(f"{pointer}/ell0", "ell0 must be finite and positive")
        self._pointer = pointer

        if kind == "sampled":
            if xs is None or ks is None:
                raise ValidationError(f"{pointer}/x", "sampled toughness needs arrays x and kappa")
            xs = np.asarray(xs, dtype=float)
            ks = np.asarray(ks, dtype=float)
            if xs.ndim != 1 or xs.size < 2 or xs.shape != ks.shape:
                raise ValidationError(f"{pointer}/x", "x and kappa must be 1-d arrays of equal length >= 2")
            if np.any(np.diff(xs) <= 0):
                raise ValidationError(f"{pointer}/x", "sample positions must be strictly increasing")
            if xs[0] > self.ell0 * (1 + 1e-12):
                raise ValidationError(f"{pointer}/x", f"samples must start at or below ell0={self.ell0}")
            if np.any(ks <= 0):
                raise ValidationError(f"{pointer}/kappa", "toughness samples must be positive")
            self.xs = xs
            self.ks = ks
            self._slopes = np.diff(ks) / np.diff(xs)
            # Exact cumulative integral at the knots (trapezoid is exact).
            self._cum = np.concatenate(([0.0], np.cumsum(0.5 * (ks[1:] + ks[:-1]) * np.diff(xs))))
            default_x_max = float(xs[-1])
        else:
            default_x_max = 64.0 * self.ell0

        self.x_max = float(x_max) if x_max is not None else default_x_max
        if not (self.x_max > self.ell0):
            raise ValidationError(f"{pointer}/x_max", f"x_max must exceed ell0={self.ell0}")
        if kind == "sampled" and self.x_max > float(self.xs[-1]) * (1 + 1e-12):
            raise ValidationError(f"{pointer}/x_max", "x_max must not exceed the last sample position")

        if kind == "constant":
            if kappa0 is None:
                raise ValidationError(f"{pointer}/kappa0", "missing required field")
            self.kappa0 = float(kappa0)
            if not (self.kappa0 > 0 and math.isfinite(self.kappa0)):
                raise ValidationError(f"{pointer}/kappa0", "kappa0 must be finite and positive")
        elif kind == "affine":
            if a is None or b is None:
                raise ValidationError(f"{pointer}/a", "affine toughness needs fields a and b")
            self.a = float(a)
            self.b = float(b)
            if min(self.a + self.b * self.ell0, self.a + self.b * self.x_max) <= 0:
                raise ValidationError(f"{pointer}/a", "kappa must stay positive on [ell0, x_max]")
        elif kind == "power":
            if c is None or p is None:
                raise ValidationError(f"{pointer}/c", "power toughness needs fields c and p")
            self.c = float(c)
            self.p = float(p)
            if self.c <= 0:
                raise ValidationError(f"{pointer}/c", "coefficient c must be positive")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(kappa0: float, ell0: float, x_max: float | None = None) -> "ToughnessModel":
        return ToughnessModel("constant", ell0, x_max, kappa0=kappa0)

    @staticmethod
    def affine(a: float, b: float, ell0: float, x_max: float | None = None) -> "ToughnessModel":
        return ToughnessModel("affine", ell0, x_max, a=a, b=b)

    @staticmethod
    def power(c: float, p: float, ell0: float, x_max: float | None = None) -> "ToughnessModel":
        return ToughnessModel("power", ell0, x_max, c=c, p=p)

    @staticmethod
    def sampled(xs, ks, ell0: float, x_max: float | None = None) -> "ToughnessModel":
        return ToughnessModel("sampled", ell0, x_max, xs=xs, ks=ks)

    # -- evaluation ---------------------------------------------------------

    def _check_domain(self, x: np.ndarray):
        lo = self.ell0 * (1 - 1e-9) if self.kind != "sampled" else float(self.xs[0]) * (1 - 1e-9)
        hi = self.x_max * (1 + 1e-9)
        if np.any(x < lo) or np.any(x > hi):
            bad = float(np.asarray(x).ravel()[np.argmax((x < lo) | (x > hi))])
            raise NumericalError(
                f"toughness queried at x={bad} outside [{self.ell0}, {self.x_max}]")

    def kappa(self, x):
        """Toughness kappa(x) for x in [ell0, x_max] (scalar or array)."""
        x_arr = np.asarray(x, dtype=float)
        self._check_domain(x_arr)
        if self.kind == "constant":
            out = np.full_like(x_arr, self.kappa0)
        elif self.kind == "affine":
            out = self.a + self.b * x_arr
        elif self.kind == "power":
            out = self.c * np.power(x_arr, self.p)
        else:
            out = np.interp(x_arr, self.xs, self.ks)
        return out if np.ndim(x) else float(out)

    def kappa_int(self, a, b):
        """Exact integral of kappa over [a, b] (scalar or array endpoints)."""
        a_arr = np.asarray(a, dtype=float)
        b_arr = np.asarray(b, dtype=float)
        self._check_domain(a_arr)
        self._check_domain(b_arr)
        if self.kind == "constant":
            out = self.kappa0 * (b_arr - a_arr)
        elif self.kind == "affine":
            out = self.a * (b_arr - a_arr) + 0.5 * self.b * (b_arr ** 2 - a_arr ** 2)
        elif self.kind == "power":
            if self.p == -1.0:
                out = self.c * (np.log(b_arr) - np.log(a_arr))
            else:
                q = self.p + 1.0
                out = self.c / q * (np.power(b_arr, q) - np.power(a_arr, q))
        else:
            out = self._sampled_cum(b_arr) - self._sampled_cum(a_arr)
        return out if (np.ndim(a) or np.ndim(b)) else float(out)

    def _sampled_cum(self, x: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, self.xs.size - 2)
        dxs = x - self.xs[idx]
        return self._cum[idx] + self.ks[idx] * dxs + 0.5 * self._slopes[idx] * dxs ** 2

    def capacity(self, x):
        """Static capacity x^2 * kappa(x)."""
        x_arr = np.asarray(x, dtype=float)
        out = x_arr ** 2 * np.asarray(self.kappa(x_arr))
        return out if np.ndim(x) else float(out)

    def capacity_deriv(self, x):
        """Exact a.e. derivative of the capacity (left rule at sample knots)."""
        x_arr = np.asarray(x, dtype=float)
        self._check_domain(x_arr)
        if self.kind == "constant":
            out = 2.0 * self.kappa0 * x_arr
        elif self.kind == "affine":
            out = 2.0 * self.a * x_arr + 3.0 * self.b * x_arr ** 2
        elif self.kind == "power":
            out = (2.0 + self.p) * self.c * np.power(x_arr, 1.0 + self.p)
        else:
            idx = np.clip(np.searchsorted(self.xs, x_arr, side="left") - 1, 0, self.xs.size - 2)
            out = 2.0 * x_arr * np.interp(x_arr, self.xs, self.ks) + x_arr ** 2 * self._slopes[idx]
        return out if np.ndim(x) else float(out)

    def capacity_inverse(self, y):
        """Bisection inverse of the capacity on [ell0, x_max].

        Requires the capacity to be nondecreasing (condition K1); under K2 the
        preimage is unique.  Values below capacity(ell0) clamp to ell0; values
        above capacity(x_max) raise :class:`NumericalError` (the front would
        leave the toughness table).
        """
        y_arr = np.atleast_1d(np.asarray(y, dtype=float))
        lo_val = self.capacity(self.ell0)
        hi_val = self.capacity(self.x_max)
        if np.any(y_arr > hi_val * (1 + 1e-12) + 1e-300):
            raise NumericalError(
                f"capacity inverse queried at {float(np.max(y_arr))} above capacity(x_max)={hi_val}")
        lo = np.full(y_arr.shape, self.ell0)
        hi = np.full(y_arr.shape, self.x_max)
        done_lo = y_arr <= lo_val
        hi[done_lo] = self.ell0
        n_iter = max(1, int(math.ceil(math.log2(max(2.0, (self.x_max - self.ell0) / _BISECTION_XTOL)))))
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            below = self.capacity(mid) < y_arr
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        out[done_lo] = self.ell0
        return out if np.ndim(y) else float(out[0])

    def lipschitz_bound(self) -> float:
        """Upper bound for |kappa'| on the domain (grid surrogate for analytic kinds)."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "sampled":
            return float(np.max(np.abs(self._slopes)))
        grid = np.linspace(self.ell0, self.x_max, _CONDITION_GRID)
        if self.kind == "affine":
            return abs(self.b)
        return float(np.max(np.abs(self.c * self.p * np.power(grid, self.p - 1.0))))

    # -- serialization ------------------------------------------------------

    @staticmethod
    def from_json(obj: dict, ell0: float, pointer: str = "/toughness") -> "ToughnessModel":
        if not isinstance(obj, dict):
            raise ValidationError(pointer, "expected an object")
        kind = obj.get("kind")
        if kind not in ToughnessModel.KINDS:
            raise ValidationError(f"{pointer}/kind",
                                  f"unknown kind {kind!r}; expected one of {ToughnessModel.KINDS}")
        x_max = obj.get("x_max")
        if x_max is not None:
            x_max = _as_float(obj, "x_max", pointer, minimum=0.0, strict=True)
        if kind == "constant":
            return ToughnessModel(kind, ell0, x_max,
                                  kappa0=_as_float(obj, "kappa0", pointer), pointer=pointer)
        if kind == "affine":
            return ToughnessModel(kind, ell0, x_max, a=_as_float(obj, "a", pointer),
                                  b=_as_float(obj, "b", pointer), pointer=pointer)
        if kind == "power":
            return ToughnessModel(kind, ell0, x_max, c=_as_float(obj, "c", pointer),
                                  p=_as_float(obj, "p", pointer), pointer=pointer)
        return ToughnessModel(kind, ell0, x_max, xs=_as_array(obj, "x", pointer),
                              ks=_as_array(obj, "kappa", pointer), pointer=pointer)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "x_max": self.x_max}
        if self.kind == "constant":
            out["kappa0"] = self.kappa0
        elif self.kind == "affine":
            out.update(a=self.a, b=self.b)
        elif self.kind == "power":
            out.update(c=self.c, p=self.p)
        else:
            out.update(x=self.xs.tolist(), kappa=self.ks.tolist())
        return out


class LoadingProfile:
    """Boundary load w(t) with derivative, for t >= 0.

    Kinds
    -----
    ``constant``    w = value
    ``ramp``        linear from (t_start, start) to (t_ramp_end, end), clamped
    ``polynomial``  w = sum(coeffs[k] * t**k)
    ``sinusoid``    w = offset + amplitude * sin(angular_frequency*t + phase)
    ``sampled``     cubic Hermite through (t, w) samples; C1 by construction
                    (slopes given explicitly or Catmull-Rom defaults)

    The derivative is taken left-continuous at kink points (ramp ends, sample
    knots), matching the left-rule convention used for front slopes.
    """

    KINDS = ("constant", "ramp", "polynomial", "sinusoid", "sampled")

    def __init__(self, kind: str, *, value: float | None = None,
                 start: float | None = None, end: float | None = None,
                 t_start: float = 0.0, t_ramp_end: float | None = None,
                 coeffs: np.ndarray | None = None,
                 offset: float | None = None, amplitude: float | None = None,
                 angular_frequency: float | None = None, phase: float = 0.0,
                 ts: np.ndarray | None = None, ws: np.ndarray | None = None,
                 wdots: np.ndarray | None = None, pointer: str = "/loading"):
        if kind not in self.KINDS:
            raise ValidationError(f"{pointer}/kind", f"unknown kind {kind!r}; expected one of {self.KINDS}")
        self.kind = kind
        if kind == "constant":
            if value is None:
                raise ValidationError(f"{pointer}/value", "missing required field")
            self.value = float(value)
        elif kind == "ramp":
            if start is None or end is None or t_ramp_end is None:
                raise ValidationError(f"{pointer}/start", "ramp needs fields start, end, t_ramp_end")
            self.start = float(start)
            self.end = float(end)
            self.t_start = float(t_start)
            self.t_ramp_end = float(t_ramp_end)
            if not self.t_ramp_end > self.t_start:
                raise ValidationError(f"{pointer}/t_ramp_end", "t_ramp_end must exceed t_start")
            self.slope = (self.end - self.start) / (self.t_ramp_end - self.t_start)
        elif kind == "polynomial":
            if coeffs is None:
                raise ValidationError(f"{pointer}/coeffs", "missing required field")
            self.coeffs = np.asarray(coeffs, dtype=float)
            if self.coeffs.ndim != 1 or self.coeffs.size == 0:
                raise ValidationError(f"{pointer}/coeffs", "expected a non-empty 1-d array")
        elif kind == "sinusoid":
            if offset is None or amplitude is None or angular_frequency is None:
                raise ValidationError(f"{pointer}/offset",
                                      "sinusoid needs offset, amplitude, angular_frequency")
            self.offset = float(offset)
            self.amplitude = float(amplitude)
            self.angular_frequency = float(angular_frequency)
            self.phase = float(phase)
        else:
            if ts is None or ws is None:
                raise ValidationError(f"{pointer}/t", "sampled loading needs arrays t and w")
            ts = np.asarray(ts, dtype=float)
            ws = np.asarray(ws, dtype=float)
            if ts.ndim != 1 or ts.size < 2 or ts.shape != ws.shape:
                raise ValidationError(f"{pointer}/t", "t and w must be 1-d arrays of equal length >= 2")
            if np.any(np.diff(ts) <= 0):
                raise ValidationError(f"{pointer}/t", "sample times must be strictly increasing")
            if ts[0] > 0.0:
                raise ValidationError(f"{pointer}/t", "samples must start at t <= 0")
            self.ts = ts
            self.ws = ws
            if wdots is None:
                # Catmull-Rom slopes give a C1 interpolant without extra data.
                wd = np.gradient(ws, ts)
            else:
                wd = np.asarray(wdots, dtype=float)
                if wd.shape != ts.shape:
                    raise ValidationError(f"{pointer}/wdot", "wdot must match t in shape")
            self.wdots = wd

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(value: float) -> "LoadingProfile":
        return LoadingProfile("constant", value=value)

    @staticmethod
    def ramp(start: float, end: float, t_ramp_end: float, t_start: float = 0.0) -> "LoadingProfile":
        return LoadingProfile("ramp", start=start, end=end, t_ramp_end=t_ramp_end, t_start=t_start)

    @staticmethod
    def polynomial(coeffs) -> "LoadingProfile":
        return LoadingProfile("polynomial", coeffs=coeffs)

    @staticmethod
    def sinusoid(offset: float, amplitude: float, angular_frequency: float,
                 phase: float = 0.0) -> "LoadingProfile":
        return LoadingProfile("sinusoid", offset=offset, amplitude=amplitude,
                              angular_frequency=angular_frequency, phase=phase)

    @staticmethod
    def sampled(ts, ws, wdots=None) -> "LoadingProfile":
        return LoadingProfile("sampled", ts=ts, ws=ws, wdots=wdots)

    # -- evaluation ---------------------------------------------------------

    def w(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.full_like(t_arr, self.value)
        elif self.kind == "ramp":
            frac = np.clip((t_arr - self.t_start) / (self.t_ramp_end - self.t_start), 0.0, 1.0)
            out = self.start + (self.end - self.start) * frac
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(t_arr, self.coeffs)
        elif self.kind == "sinusoid":
            out = self.offset + self.amplitude * np.sin(self.angular_frequency * t_arr + self.phase)
        else:
            out = self._hermite(t_arr, derivative=False)
        return out if np.ndim(t) else float(out)

    def wdot(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.zeros_like(t_arr)
        elif self.kind == "ramp":
            inside = (t_arr > self.t_start) & (t_arr <= self.t_ramp_end)
            out = np.where(inside, self.slope, 0.0)
        elif self.kind == "polynomial":
            der = np.polynomial.polynomial.polyder(self.coeffs)
            out = np.polynomial.polynomial.polyval(t_arr, der) if der.size else np.zeros_like(t_arr)
        elif self.kind == "sinusoid":
            out = self.amplitude * self.angular_frequency * np.cos(
                self.angular_frequency * t_arr + self.phase)
        else:
            out = self._hermite(t_arr, derivative=True)
        return out if np.ndim(t) else float(out)

    def _hermite(self, t: np.ndarray, derivative: bool) -> np.ndarray:
        ts, ws, wd = self.ts, self.ws, self.wdots
        t_cl = np.clip(t, ts[0], ts[-1])
        idx = np.clip(np.searchsorted(ts, t_cl, side="left"), 1, ts.size - 1) - 1
        h = ts[idx + 1] - ts[idx]
        s = (t_cl - ts[idx]) / h
        h00 = 2 * s ** 3 - 3 * s ** 2 + 1
        h10 = s ** 3 - 2 * s ** 2 + s
        h01 = -2 * s ** 3 + 3 * s ** 2
        h11 = s ** 3 - s ** 2
        if not derivative:
            return (h00 * ws[idx] + h10 * h * wd[idx]
                    + h01 * ws[idx + 1] + h11 * h * wd[idx + 1])
        d00 = (6 * s ** 2 - 6 * s) / h
        d10 = (3 * s ** 2 - 4 * s + 1)
        d01 = (-6 * s ** 2 + 6 * s) / h
        d11 = (3 * s ** 2 - 2 * s)
        out = d00 * ws[idx] + d10 * wd[idx] + d01 * ws[idx + 1] + d11 * wd[idx + 1]
        # Constant extension outside the table.
        return np.where((t < ts[0]) | (t > ts[-1]), 0.0, out)

    def max_w_squared(self, t_end: float) -> float:
        """max of w(t)^2 over [0, t_end] on the condition grid."""
        grid = np.linspace(0.0, t_end, _CONDITION_GRID)
        return float(np.max(self.w(grid) ** 2))

    def lipschitz_bound(self, t_end: float) -> float:
        grid = np.linspace(0.0, t_end, _CONDITION_GRID)
        return float(np.max(np.abs(self.wdot(grid))))

    # -- serialization ------------------------------------------------------

    @staticmethod
    def from_json(obj: dict, pointer: str = "/loading") -> "LoadingProfile":
        if not isinstance(obj, dict):
            raise ValidationError(pointer, "expected an object")
        kind = obj.get("kind")
        if kind not in LoadingProfile.KINDS:
            raise ValidationError(f"{pointer}/kind",
                                  f"unknown kind {kind!r}; expected one of {LoadingProfile.KINDS}")
        if kind == "constant":
            return LoadingProfile(kind, value=_as_float(obj, "value", pointer), pointer=pointer)
        if kind == "ramp":
            return LoadingProfile(
                kind, start=_as_float(obj, "start", pointer), end=_as_float(obj, "end", pointer),
                t_ramp_end=_as_float(obj, "t_ramp_end", pointer),
                t_start=float(obj.get("t_start", 0.0)), pointer=pointer)
        if kind == "polynomial":
            raw = obj.get("coeffs")
            if raw is None:
                raise ValidationError(f"{pointer}/coeffs", "missing required field")
            try:
                coeffs = np.asarray(raw, dtype=float)
            except (TypeError, ValueError):
                raise ValidationError(f"{pointer}/coeffs", "expected a numeric array") from None
            if coeffs.ndim != 1 or coeffs.size == 0 or not np.all(np.isfinite(coeffs)):
                raise ValidationError(f"{pointer}/coeffs", "expected a non-empty finite 1-d array")
            return LoadingProfile(kind, coeffs=coeffs, pointer=pointer)
        if kind == "sinusoid":
            return LoadingProfile(
                kind, offset=_as_float(obj, "offset", pointer),
                amplitude=_as_float(obj, "amplitude", pointer),
                angular_frequency=_as_float(obj, "angular_frequency", pointer),
                phase=float(obj.get("phase", 0.0)), pointer=pointer)
        wdots = obj.get("wdot")
        return LoadingProfile(kind, ts=_as_array(obj, "t", pointer), ws=_as_array(obj, "w", pointer),
                              wdots=None if wdots is None else _as_array(obj, "wdot", pointer),
                              pointer=pointer)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "constant":
            out["value"] = self.value
        elif self.kind == "ramp":
            out.update(start=self.start, end=self.end,
                       t_start=self.t_start, t_ramp_end=self.t_ramp_end)
        elif self.kind == "polynomial":
            out["coeffs"] = self.coeffs.tolist()
        elif self.kind == "sinusoid":
            out.update(offset=self.offset, amplitude=self.amplitude,
                       angular_frequency=self.angular_frequency, phase=self.phase)
        else:
            out.update(t=self.ts.tolist(), w=self.ws.tolist(), wdot=self.wdots.tolist())
        return out


class InitialData:
    """Piecewise-linear initial profiles u0 (position) and u1 (velocity) on [0, ell0].

    Compatibility ``u0(0) = w(0)`` and ``u0(ell0) = 0`` is enforced at
    validation time (tolerance 1e-12 relative); it is what keeps the
    characteristic seed continuous.
    """

    def __init__(self, xs, u0_vals, u1_vals=None, xs1=None, pointer: str = "/initial"):
        xs = np.asarray(xs, dtype=float)
        u0_vals = np.asarray(u0_vals, dtype=float)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != u0_vals.shape:
            raise ValidationError(f"{pointer}/x", "x and u0 must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ValidationError(f"{pointer}/x", "positions must be strictly increasing")
        if abs(xs[0]) > 1e-12:
            raise ValidationError(f"{pointer}/x", "first position must be 0")
        self.xs = xs
        self.u0_vals = u0_vals
        self._u0_slopes = np.diff(u0_vals) / np.diff(xs)
        if xs1 is None:
            xs1 = xs
        xs1 = np.asarray(xs1, dtype=float)
        if u1_vals is None:
            u1_vals = np.zeros_like(xs1)
        u1_vals = np.asarray(u1_vals, dtype=float)
        if xs1.shape != u1_vals.shape or xs1.ndim != 1 or xs1.size < 2:
            raise ValidationError(f"{pointer}/u1", "u1 must match its position array in shape")
        if np.any(np.diff(xs1) <= 0):
            raise ValidationError(f"{pointer}/x1", "positions must be strictly increasing")
        self.xs1 = xs1
        self.u1_vals = u1_vals
        self._u1_slopes = np.diff(u1_vals) / np.diff(xs1)
        self._u1_cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (u1_vals[1:] + u1_vals[:-1]) * np.diff(xs1))))
        self.ell0 = float(xs[-1])

    @staticmethod
    def equilibrium(w0: float, ell0: float) -> "InitialData":
        """Affine equilibrium profile w0*(1 - x/ell0) with zero velocity."""
        return InitialData([0.0, ell0], [w0, 0.0])

    def validate_compatibility(self, loading: LoadingProfile, ell0: float,
                               pointer: str = "/initial"):
        if abs(self.ell0 - ell0) > 1e-12 * max(1.0, ell0):
            raise ValidationError(f"{pointer}/x", f"last position {self.ell0} must equal ell0={ell0}")
        w0 = loading.w(0.0)
        if abs(self.u0_vals[0] - w0) > 1e-12 * (1.0 + abs(w0)):
            raise ValidationError(f"{pointer}/u0",
                                  f"u0(0)={self.u0_vals[0]} must match the load w(0)={w0}")
        if abs(self.u0_vals[-1]) > 1e-12:
            raise ValidationError(f"{pointer}/u0", f"u0(ell0)={self.u0_vals[-1]} must vanish")
        if abs(self.xs1[0]) > 1e-12 or abs(self.xs1[-1] - ell0) > 1e-12 * max(1.0, ell0):
            raise ValidationError(f"{pointer}/x1", "u1 must be sampled on [0, ell0]")

    # -- evaluation (left rule at knots for slopes) -------------------------

    def u0(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.xs, self.u0_vals)
        return out if np.ndim(x) else float(out)

    def du0(self, x):
        x_arr = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.xs, x_arr, side="left"), 1, self.xs.size - 1) - 1
        out = self._u0_slopes[idx]
        return out if np.ndim(x) else float(out)

    def u1(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.xs1, self.u1_vals)
        return out if np.ndim(x) else float(out)

    def u1_cum(self, x):
        """Exact integral of u1 from 0 to x (piecewise quadratic)."""
        x_arr = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.xs1, x_arr, side="right") - 1, 0, self.xs1.size - 2)
        d = x_arr - self.xs1[idx]
        out = self._u1_cum[idx] + self.u1_vals[idx] * d + 0.5 * self._u1_slopes[idx] * d ** 2
        return out if np.ndim(x) else float(out)

    def elastic_energy(self) -> float:
        """Exact (1/2) integral of (du0/dx)^2 over [0, ell0]."""
        return float(0.5 * np.sum(self._u0_slopes ** 2 * np.diff(self.xs)))

    def kinetic_energy(self, epsilon: float) -> float:
        """Exact (1/2) integral of eps^2 u1^2 over [0, ell0]."""
        a = self.u1_vals[:-1]
        b = self.u1_vals[1:]
        # integral of a linear segment squared: h*(a^2 + a*b + b^2)/3
        seg = (a ** 2 + a * b + b ** 2) / 3.0 * np.diff(self.xs1)
        return float(0.5 * epsilon ** 2 * np.sum(seg))

    def max_slope(self) -> float:
        return float(max(np.max(np.abs(self._u0_slopes)), np.max(np.abs(self._u1_slopes)), 0.0))

    # -- serialization ------------------------------------------------------

    @staticmethod
    def from_json(obj: dict, loading: LoadingProfile, ell0: float,
                  pointer: str = "/initial") -> "InitialData":
        if not isinstance(obj, dict):
            raise ValidationError(pointer, "expected an object")
        if obj.get("kind") == "equilibrium":
            data = InitialData.equilibrium(loading.w(0.0), ell0)
        else:
            xs = _as_array(obj, "x", pointer)
            u0 = _as_array(obj, "u0", pointer)
            u1 = obj.get("u1")
            xs1 = obj.get("x1")
            data = InitialData(xs, u0,
                               None if u1 is None else _as_array(obj, "u1", pointer),
                               None if xs1 is None else _as_array(obj, "x1", pointer),
                               pointer=pointer)
        data.validate_compatibility(loading, ell0, pointer)
        return data

    def to_json(self) -> dict[str, Any]:
        return {"x": self.xs.tolist(), "u0": self.u0_vals.tolist(),
                "x1": self.xs1.tolist(), "u1": self.u1_vals.tolist()}


@dataclass(frozen=True)
class ConditionReport:
    """Flags for the qualitative toughness/loading hypotheses.

    K0: kappa is not integrable at infinity (the front cannot run away).
    K1: the capacity x^2 kappa(x) is nondecreasing.
    K2: the capacity is strictly increasing.
    K3: K2 and the capacity derivative stays positive (grid surrogate:
        all difference quotients exceed 1e-12).
    KW: the capacity cap exceeds the running load (sup capacity > max w^2/2)
        and the start position is statically stable (capacity(start) >= w(0)^2/2).
    """

    K0: bool
    K1: bool
    K2: bool
    K3: bool
    KW: bool
    details: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {"K0": self.K0, "K1": self.K1, "K2": self.K2, "K3": self.K3,
                "KW": self.KW, "details": self.details}

    def require(self, *flags: str):
        """Raise :class:`PreconditionError` naming the first failed flag."""
        from .errors import PreconditionError
        meanings = {
            "K0": "toughness must not be integrable at infinity",
            "K1": "capacity x^2*kappa must be nondecreasing",
            "K2": "capacity x^2*kappa must be strictly increasing",
            "K3": "capacity x^2*kappa must have a positive derivative",
            "KW": "load must stay below the capacity cap and the start must be stable",
        }
        for flag in flags:
            if not getattr(self, flag):
                raise PreconditionError(flag, meanings[flag])


def check_conditions(toughness: ToughnessModel, loading: LoadingProfile,
                     t_end: float, start: float | None = None) -> ConditionReport:
    """Evaluate the K0..K3 and KW condition flags.

    Parameters
    ----------
    toughness, loading : model ingredients.
    t_end : float
        Horizon over which the load enters KW.
    start : float, optional
        Front position whose static stability KW's second clause checks;
        defaults to ell0.  Pass a post-jump position to re-check KW there.
    """
    start = toughness.ell0 if start is None else float(start)
    grid = np.linspace(toughness.ell0, toughness.x_max, _CONDITION_GRID + 1)
    cap_vals = toughness.capacity(grid)
    quotients = np.diff(cap_vals) / np.diff(grid)
    min_q = float(np.min(quotients))
    k1 = bool(min_q >= -1e-12)
    k2 = bool(np.all(np.diff(cap_vals) > 0))
    k3 = bool(min_q > 1e-12)

    if toughness.kind == "constant":
        k0 = True
    elif toughness.kind == "affine":
        # Continuation beyond x_max keeps the slope: non-integrable iff b >= 0.
        k0 = bool(toughness.b >= 0 and toughness.kappa(toughness.x_max) > 0)
    elif toughness.kind == "power":
        k0 = bool(toughness.p >= -1.0)
    else:
        # Compact table: judge by constant continuation beyond the last sample.
        k0 = bool(toughness.ks[-1] > 0)

    max_w_sq = loading.max_w_squared(t_end)
    cap_sup = float(cap_vals[-1]) if k1 else float(np.max(cap_vals))
    kw_cap = bool(cap_sup > 0.5 * max_w_sq)
    w0 = loading.w(0.0)
    kw_start = bool(toughness.capacity(start) >= 0.5 * w0 ** 2 * (1 - 1e-12))
    kw = kw_cap and kw_start

    details = {
        "min_capacity_quotient": min_q,
        "capacity_sup": cap_sup,
        "max_w_squared": max_w_sq,
        "kw_cap_clause": kw_cap,
        "kw_start_clause": kw_start,
        "start": start,
    }
    return ConditionReport(K0=k0, K1=k1, K2=k2, K3=k3, KW=kw, details=details)


def initial_right_limit(toughness: ToughnessModel, loading: LoadingProfile) -> float:
    """Right limit at t = 0 of the closed-form quasistatic front.

    Equals capacity^{-1}(max(w(0)^2/2, capacity(ell0))): the smallest statically
    stable position reachable from ell0 under the initial load.  The limit of
    the dynamic evolutions can jump past this value (kinetic energy carries the
    front beyond the first stable position); stability only forces it to lie at
    or above this one.  Use the long-time unrescaled run for the dynamic value.
    """
    w0 = loading.w(0.0)
    target = max(0.5 * w0 ** 2, toughness.capacity(toughness.ell0))
    return toughness.capacity_inverse(target)


@dataclass(frozen=True)
class Problem:
    """Validated bundle of one run's ingredients."""

    params: SimParams
    toughness: ToughnessModel
    loading: LoadingProfile
    initial: InitialData

    def __post_init__(self):
        if abs(self.toughness.ell0 - self.params.ell0) > 1e-12 * max(1.0, self.params.ell0):
            raise ValidationError("/toughness", "toughness domain must start at params.ell0")
        self.initial.validate_compatibility(self.loading, self.params.ell0)

    @staticmethod
    def equilibrium(params: SimParams, toughness: ToughnessModel,
                    loading: LoadingProfile) -> "Problem":
        """Problem starting from the static equilibrium profile of w(0)."""
        return Problem(params, toughness, loading,
                       InitialData.equilibrium(loading.w(0.0), params.ell0))

    @staticmethod
    def from_json(obj: dict | str | Path) -> "Problem":
        if isinstance(obj, (str, Path)):
            try:
                obj = json.loads(Path(obj).read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ValidationError("", f"malformed JSON: {exc}") from None
            except OSError as exc:
                raise ValidationError("", f"cannot read config: {exc}") from None
        if not isinstance(obj, dict):
            raise ValidationError("", "top-level config must be an object")
        for key in ("params", "toughness", "loading"):
            if key not in obj:
                raise ValidationError(f"/{key}", "missing required section")
        params = SimParams.from_json(obj["params"])
        toughness = ToughnessModel.from_json(obj["toughness"], params.ell0)
        loading = LoadingProfile.from_json(obj["loading"])
        initial = InitialData.from_json(obj.get("initial", {"kind": "equilibrium"}),
                                        loading, params.ell0)
        return Problem(params, toughness, loading, initial)

    def to_json(self) -> dict[str, Any]:
        return {"params": self.params.to_json(), "toughness": self.toughness.to_json(),
                "loading": self.loading.to_json(), "initial": self.initial.to_json()}

    def conditions(self, start: float | None = None) -> ConditionReport:
        return check_conditions(self.toughness, self.loading, self.params.t_end, start)

    def data_lipschitz_bound(self) -> float:
        """Common Lipschitz scale of the data (used by boundary-residual bounds)."""
        return max(self.loading.lipschitz_bound(self.params.t_end),
                   self.initial.max_slope(), 1.0)
