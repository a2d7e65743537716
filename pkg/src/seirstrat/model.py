"""Model state containers and vector fields.

The package tracks an SEIRS epidemic twice over: once at the macroscopic
level (four compartments, or five counting the derived total), and once
stratified by how many times each individual has been infected.  Stratified
("micro") states hold one S/E/I/R block per reinfection index i = 1..n next
to the macroscopic totals; the force of infection that drives every block is
always read from the macro part, so truncating at n is exact for the first
n blocks.

Raw systems count individuals and let the total population drift; normalized
systems track fractions of the (possibly growing or shrinking) total and are
independent of the natural mortality rate.  A small SIS variant with a
single stratified block supports the identification module.

All vector fields evaluate in per-day units internally.  Parameters declared
per-year are converted on entry, so derivatives returned by the rhs_*
functions are always per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

UNIT_FACTOR = 365.0  # days per year, used for every unit conversion

PER_DAY = "per-day"
PER_YEAR = "per-year"

SYSTEMS = ("macro", "micro", "normalized-macro", "normalized-micro", "sis")

_RATE_FIELDS = ("beta", "sigma", "gamma", "omega", "nu", "b", "mu")


@dataclass(frozen=True)
class ModelParams:
    """Rate constants of the model, tagged with their time unit."""

    beta: float  # contact rate
    sigma: float  # latency exit rate
    gamma: float  # recovery rate
    omega: float  # immunity waning rate
    nu: float = 0.0  # infection-induced mortality
    b: float = 0.0  # birth rate
    mu: float = 0.0  # natural mortality
    time_unit: str = PER_DAY

    def __post_init__(self):
        if self.time_unit not in (PER_DAY, PER_YEAR):
            raise DomainError(
                f"time_unit must be {PER_DAY!r} or {PER_YEAR!r}, got {self.time_unit!r}"
            )
        for name in _RATE_FIELDS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"rate {name} must be finite, got {value!r}")
            if value < 0:
                raise DomainError(f"rate {name} must be nonnegative, got {value!r}")

    def _scaled(self, factor: float, unit: str) -> "ModelParams":
        return replace(
            self,
            **{name: getattr(self, name) * factor for name in _RATE_FIELDS},
            time_unit=unit,
        )

    def per_day(self) -> "ModelParams":
        if self.time_unit == PER_DAY:
            return self
        return self._scaled(1.0 / UNIT_FACTOR, PER_DAY)

    def per_year(self) -> "ModelParams":
        if self.time_unit == PER_YEAR:
            return self
        return self._scaled(UNIT_FACTOR, PER_YEAR)


@dataclass(frozen=True)
class MacroState:
    """Macroscopic compartments; N is derived, never stored."""

    S: float
    E: float
    I: float
    R: float

    @property
    def N(self) -> float:
        return self.S + self.E + self.I + self.R

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.E, self.I, self.R], dtype=float)

    @classmethod
    def from_array(cls, x) -> "MacroState":
        S, E, I, R = (float(v) for v in x)
        return cls(S, E, I, R)


@dataclass(frozen=True)
class MicroState:
    """Reinfection-stratified state: n blocks plus the macro totals.

    Sequences are indexed by reinfection count, entry j holding block
    i = j + 1.  The same container carries raw counts or normalized
    fractions; which one is meant is determined by the vector field
    applied to it.
    """

    n: int
    S_seq: np.ndarray
    E_seq: np.ndarray
    I_seq: np.ndarray
    R_seq: np.ndarray
    macro: MacroState

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"truncation depth must be >= 1, got {self.n}")
        for name in ("S_seq", "E_seq", "I_seq", "R_seq"):
            seq = np.asarray(getattr(self, name), dtype=float)
            if seq.shape != (self.n,):
                raise DomainError(
                    f"{name} must have shape ({self.n},), got {seq.shape}"
                )
            object.__setattr__(self, name, seq)

    def as_array(self) -> np.ndarray:
        # layout: macro S,E,I,R then per-block S_i,E_i,I_i,R_i
        blocks = np.stack([self.S_seq, self.E_seq, self.I_seq, self.R_seq], axis=1)
        return np.concatenate([self.macro.as_array(), blocks.ravel()])

    @classmethod
    def from_array(cls, n: int, x) -> "MicroState":
        x = np.asarray(x, dtype=float)
        if x.shape != (4 + 4 * n,):
            raise DomainError(f"expected flat state of length {4 + 4 * n}, got {x.shape}")
        blocks = x[4:].reshape(n, 4)
        return cls(
            n=n,
            S_seq=blocks[:, 0].copy(),
            E_seq=blocks[:, 1].copy(),
            I_seq=blocks[:, 2].copy(),
            R_seq=blocks[:, 3].copy(),
            macro=MacroState.from_array(x[:4]),
        )


@dataclass(frozen=True)
class SisState:
    """SIS fractions with a single first-infection block."""

    S: float
    I: float
    S1: float
    I1: float

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.I, self.S1, self.I1], dtype=float)

    @classmethod
    def from_array(cls, x) -> "SisState":
        S, I, S1, I1 = (float(v) for v in x)
        return cls(S, I, S1, I1)


# ---------------------------------------------------------------------------
# vector fields on flat arrays (integration backend)
# ---------------------------------------------------------------------------


def _macro_field(p: ModelParams):
    pd = p.per_day()
    beta, sigma, gamma, omega, nu, b, mu = (
        pd.beta, pd.sigma, pd.gamma, pd.omega, pd.nu, pd.b, pd.mu,
    )

    def f(x: np.ndarray) -> np.ndarray:
        S, E, I, R = x
        N = S + E + I + R
        if N <= 0.0:
            raise DomainError(f"total population must be positive, got N={N!r}")
        lam = beta * I / N
        return np.array(
            [
                b * N - lam * S + omega * R - mu * S,
                lam * S - (sigma + mu) * E,
                sigma * E - (gamma + mu + nu) * I,
                gamma * I - (omega + mu) * R,
            ]
        )

    return f


def _micro_field(p: ModelParams, n: int):
    pd = p.per_day()
    beta, sigma, gamma, omega, nu, b, mu = (
        pd.beta, pd.sigma, pd.gamma, pd.omega, pd.nu, pd.b, pd.mu,
    )
    macro_f = _macro_field(p)

    def f(x: np.ndarray) -> np.ndarray:
        macro = x[:4]
        N = macro.sum()
        I = macro[2]
        dx = np.empty_like(x)
        dx[:4] = macro_f(macro)
        lam = beta * I / N  # macro drive, identical for every block
        Si, Ei, Ii, Ri = x[4::4], x[5::4], x[6::4], x[7::4]
        inflow = np.empty(n)
        inflow[0] = b * N  # newborn recruitment plays the role of omega*R_0
        inflow[1:] = omega * Ri[:-1]
        dx[4::4] = inflow - lam * Si - mu * Si
        dx[5::4] = lam * Si - (sigma + mu) * Ei
        dx[6::4] = sigma * Ei - (gamma + mu + nu) * Ii
        dx[7::4] = gamma * Ii - (omega + mu) * Ri
        return dx

    return f


def _normalized_macro_field(p: ModelParams):
    pd = p.per_day()
    beta, sigma, gamma, omega, nu, b = (
        pd.beta, pd.sigma, pd.gamma, pd.omega, pd.nu, pd.b,
    )

    def f(x: np.ndarray) -> np.ndarray:
        S, E, I, R = x
        return np.array(
            [
                b - (beta - nu) * S * I + omega * R - b * S,
                beta * S * I - (sigma + b) * E + nu * I * E,
                sigma * E - (gamma + b + nu) * I + nu * I * I,
                gamma * I - (omega + b) * R + nu * I * R,
            ]
        )

    return f


def _normalized_micro_field(p: ModelParams, n: int):
    pd = p.per_day()
    beta, sigma, gamma, omega, nu, b = (
        pd.beta, pd.sigma, pd.gamma, pd.omega, pd.nu, pd.b,
    )
    macro_f = _normalized_macro_field(p)

    def f(x: np.ndarray) -> np.ndarray:
        dx = np.empty_like(x)
        dx[:4] = macro_f(x[:4])
        I = x[2]
        Si, Ei, Ii, Ri = x[4::4], x[5::4], x[6::4], x[7::4]
        inflow = np.empty(n)
        inflow[0] = b
        inflow[1:] = omega * Ri[:-1]
        dx[4::4] = inflow - (beta - nu) * Si * I - b * Si
        dx[5::4] = beta * Si * I - (sigma + b) * Ei + nu * I * Ei
        dx[6::4] = sigma * Ei - (gamma + b + nu) * Ii + nu * I * Ii
        dx[7::4] = gamma * Ii - (omega + b) * Ri + nu * I * Ri
        return dx

    return f


def _sis_field(p: ModelParams):
    pd = p.per_day()
    beta, gamma, mu = pd.beta, pd.gamma, pd.mu

    def f(x: np.ndarray) -> np.ndarray:
        S, I, S1, I1 = x
        return np.array(
            [
                mu - beta * S * I - mu * S + gamma * I,
                beta * S * I - (mu + gamma) * I,
                mu - beta * S1 * I - mu * S1,
                beta * S1 * I - (mu + gamma) * I1,
            ]
        )

    return f


def make_vector_field(p: ModelParams, system: str, n: int | None = None):
    """Flat-array vector field f(x) -> dx/dt (per day) for a named system.

    Micro systems need a truncation depth n; the flat layout is the one
    produced by MicroState.as_array.  Returns (f, dim).
    """
    if system == "macro":
        return _macro_field(p), 4
    if system == "normalized-macro":
        return _normalized_macro_field(p), 4
    if system == "sis":
        return _sis_field(p), 4
    if system in ("micro", "normalized-micro"):
        if n is None or n < 1:
            raise DomainError(f"system {system!r} needs a truncation depth n >= 1")
        field = _micro_field(p, n) if system == "micro" else _normalized_micro_field(p, n)
        return field, 4 + 4 * n
    raise DomainError(f"unknown system {system!r}; expected one of {SYSTEMS}")


# ---------------------------------------------------------------------------
# dataclass front ends
# ---------------------------------------------------------------------------


def rhs_macro(p: ModelParams, x: MacroState) -> MacroState:
    """Time derivative of the raw macroscopic system, per day.

    The component sum equals (b - mu)*N - nu*I, so the derived N property of
    the returned state is exactly the drift of the total population.
    """
    return MacroState.from_array(_macro_field(p)(x.as_array()))


def rhs_micro(p: ModelParams, x: MicroState) -> MicroState:
    """Time derivative of the raw stratified system, per day.

    Block 1 is fed by newborn recruitment b*N; block i >= 2 by immunity
    waning out of block i-1.  The macro part evolves by rhs_macro and
    supplies the force of infection for every block.
    """
    return MicroState.from_array(x.n, _micro_field(p, x.n)(x.as_array()))


def rhs_normalized_macro(p: ModelParams, x: MacroState) -> MacroState:
    """Time derivative of the normalized macroscopic system, per day.

    Independent of mu.  On the unit simplex the components sum to zero; off
    the simplex the sum is (b - nu*I)*(1 - S - E - I - R), which pulls the
    total back toward one.
    """
    return MacroState.from_array(_normalized_macro_field(p)(x.as_array()))


def rhs_normalized_micro(p: ModelParams, x: MicroState) -> MicroState:
    """Time derivative of the normalized stratified system, per day.

    Independent of mu.  Block 1 inflow is b; with nu = 0 each block reduces
    to the raw equations with b in place of mu.
    """
    return MicroState.from_array(x.n, _normalized_micro_field(p, x.n)(x.as_array()))


def rhs_sis(p: ModelParams, x: SisState) -> SisState:
    """Time derivative of the SIS system with one first-infection block.

    Uses beta, gamma and mu only; S + I is conserved.
    """
    return SisState.from_array(_sis_field(p)(x.as_array()))
