"""Explicit ODE integration over flat state vectors.

Two methods: a fixed-step classical RK4 and an adaptive Dormand-Prince 5(4)
pair with FSAL reuse and a standard step controller.  Output is sampled on
an even grid; the stepper lands on each sample time exactly by clipping the
step, so trajectories are reproducible bit for bit.

Vector fields are autonomous callables f(x) -> dx/dt operating on 1-d
float arrays, as produced by model.make_vector_field.  Time is measured in
days throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, NumericalError

RK4_FIXED = "rk4-fixed"
RK45_ADAPTIVE = "rk45-adaptive"

# Dormand-Prince 5(4) tableau.  c-nodes, stage coefficients, 5th-order
# weights and the difference to the embedded 4th-order solution.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

_SAFETY = 0.9
_SHRINK = 0.2
_GROW = 5.0
_ORDER_EXP = 0.2  # 1/5 for the 5(4) pair


@dataclass(frozen=True)
class IntegrationConfig:
    """How to integrate and how to sample the result. Times are days."""

    t_start: float
    t_end: float
    sample_interval: float
    method: str = RK45_ADAPTIVE
    step: float | None = None  # rk4-fixed only
    abs_tol: float = 1e-10  # rk45-adaptive only
    rel_tol: float = 1e-10
    max_step: float | None = None

    def __post_init__(self):
        if self.method not in (RK4_FIXED, RK45_ADAPTIVE):
            raise ConfigError(
                f"method must be {RK4_FIXED!r} or {RK45_ADAPTIVE!r}, got {self.method!r}"
            )
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ConfigError("t_start and t_end must be finite")
        if self.t_end < self.t_start:
            raise ConfigError(
                f"t_end must not precede t_start, got [{self.t_start}, {self.t_end}]"
            )
        if not (self.sample_interval > 0):
            raise ConfigError(f"sample_interval must be > 0, got {self.sample_interval}")
        if self.method == RK4_FIXED:
            if self.step is None or not (self.step > 0):
                raise ConfigError(f"rk4-fixed needs step > 0, got {self.step}")
        else:
            if not (self.abs_tol > 0 and self.rel_tol > 0):
                raise ConfigError(
                    f"tolerances must be > 0, got abs_tol={self.abs_tol} rel_tol={self.rel_tol}"
                )
            if self.max_step is not None and not (self.max_step > 0):
                raise ConfigError(f"max_step must be > 0, got {self.max_step}")

    def sample_times(self) -> np.ndarray:
        span = self.t_end - self.t_start
        if span == 0.0:
            return np.array([self.t_start])
        k = int(round(span / self.sample_interval))
        if k < 1 or abs(k * self.sample_interval - span) > 1e-9 * max(1.0, abs(span)):
            raise ConfigError(
                f"sample_interval {self.sample_interval} does not divide the span {span}"
            )
        times = self.t_start + self.sample_interval * np.arange(k + 1, dtype=float)
        times[-1] = self.t_end  # exact endpoint, no float accumulation
        return times


@dataclass(frozen=True)
class Trajectory:
    """Evenly sampled solution: times (k+1,), states (k+1, dim)."""

    times: np.ndarray
    states: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _clamp(x: np.ndarray, tol: float) -> np.ndarray:
    # round sample-point dips in (-tol, 0) up to exactly 0; the stepper
    # itself never sees the clamped values
    if tol <= 0.0:
        return x.copy()
    return np.where((x < 0.0) & (x > -tol), 0.0, x)


def _check_finite(x: np.ndarray, t: float, what: str):
    if not np.all(np.isfinite(x)):
        raise NumericalError(f"non-finite {what} at t={t!r}")


def _initial_step(rhs, x0, f0, scale, span):
    # standard starting-step heuristic: compare the state scale with the
    # derivative scale, probe one Euler step, back the size out of the
    # observed second-derivative estimate
    d0 = float(np.sqrt(np.mean((x0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = np.asarray(rhs(x0 + h0 * f0), dtype=float)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** _ORDER_EXP
    return min(100.0 * h0, h1, span)


def _integrate_rk4(rhs, x0, cfg: IntegrationConfig, times):
    out = np.empty((len(times), len(x0)))
    out[0] = _clamp(x0, 0.0)
    x = x0.copy()
    for j in range(1, len(times)):
        t0, t1 = times[j - 1], times[j]
        span = t1 - t0
        m = max(1, int(math.ceil(span / cfg.step - 1e-9)))
        h = span / m
        t = t0
        for _ in range(m):
            k1 = np.asarray(rhs(x), dtype=float)
            k2 = np.asarray(rhs(x + 0.5 * h * k1), dtype=float)
            k3 = np.asarray(rhs(x + 0.5 * h * k2), dtype=float)
            k4 = np.asarray(rhs(x + h * k3), dtype=float)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
            _check_finite(x, t, "state")
        out[j] = _clamp(x, 0.0)
    return out


def _integrate_dp54(rhs, x0, cfg: IntegrationConfig, times):
    dim = len(x0)
    out = np.empty((len(times), dim))
    out[0] = _clamp(x0, cfg.abs_tol)

    x = x0.copy()
    t = float(times[0])
    f_cur = np.asarray(rhs(x), dtype=float)
    _check_finite(f_cur, t, "derivative")

    scale0 = cfg.abs_tol + cfg.rel_tol * np.abs(x)
    total_span = float(times[-1] - times[0])
    h_prop = _initial_step(rhs, x, f_cur, scale0, total_span)
    if cfg.max_step is not None:
        h_prop = min(h_prop, cfg.max_step)

    k = np.empty((7, dim))
    for j in range(1, len(times)):
        ts = float(times[j])
        while t < ts:
            hits_sample = h_prop >= ts - t  # clip and land on ts exactly
            h = ts - t if hits_sample else h_prop
            if h < 1e-14 * max(1.0, abs(t)):
                raise NumericalError(f"step size underflow at t={t!r}")

            k[0] = f_cur
            for s in range(1, 7):
                xs = x + h * (k[:s].T @ _DP_A[s])
                k[s] = rhs(xs)
            x_new = x + h * (k.T @ _DP_B5)
            err_vec = h * (k.T @ _DP_E)

            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(x), np.abs(x_new))
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

            if not math.isfinite(err):
                # overflowing trial step: retry smaller, the underflow guard
                # above turns a genuine blow-up into an error with its time
                h_prop = h * _SHRINK
                continue
            if err <= 1.0:
                t = ts if hits_sample else t + h
                x = x_new
                _check_finite(x, t, "state")
                f_cur = k[6].copy()  # FSAL: last stage is f at the new point
            factor = _GROW if err == 0.0 else min(
                _GROW, max(_SHRINK, _SAFETY * err ** (-_ORDER_EXP))
            )
            h_prop = h * factor
            if cfg.max_step is not None:
                h_prop = min(h_prop, cfg.max_step)
        out[j] = _clamp(x, cfg.abs_tol)
    return out


def integrate(rhs, x0, cfg: IntegrationConfig) -> Trajectory:
    """Integrate dx/dt = rhs(x) and sample on the config's even grid.

    The last sample lands on t_end exactly.  Components that dip below
    zero by less than abs_tol are clamped to zero in the sampled output
    only (adaptive method; the fixed-step method does not clamp).

    Raises NumericalError when the state or derivative turns non-finite,
    reporting the offending time, or when the adaptive step underflows.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1:
        raise DomainError(f"x0 must be a flat vector, got shape {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise DomainError("x0 must be finite")
    times = cfg.sample_times()
    if len(times) == 1:
        tol = cfg.abs_tol if cfg.method == RK45_ADAPTIVE else 0.0
        return Trajectory(times=times, states=_clamp(x0, tol)[None, :])
    if cfg.method == RK4_FIXED:
        states = _integrate_rk4(rhs, x0, cfg, times)
    else:
        states = _integrate_dp54(rhs, x0, cfg, times)
    return Trajectory(times=times, states=states)
