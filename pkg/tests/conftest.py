"""Shared fixtures and numerical oracles.

Tests check the hand-rolled numerics against independent routes: numpy's
eigensolver, finite differences, brute-force series summation, and closed
forms. Production code never imports these oracles.
"""

from __future__ import annotations

import numpy as np
import pytest

from seirstrat import ModelParams, compute_r0, solve_endemic
from seirstrat.errors import DomainError, NoEndemicEquilibriumError, NumericalError

DAYS_PER_YEAR = 365.0
LIFE = 76.0 * 365.0  # preset mean lifetime, days


def preset_params(time_unit="per-day") -> ModelParams:
    gamma = 1.0 / 14.0
    sigma = 1.0 / 7.0
    omega = 1.0 / 365.0
    b = 1.0 / LIFE
    beta = 3.0 * (gamma + b) * (sigma + b) / sigma
    p = ModelParams(beta=beta, sigma=sigma, gamma=gamma, omega=omega, nu=0.0, b=b, mu=b)
    return p if time_unit == "per-day" else p.per_year()


@pytest.fixture
def params_day() -> ModelParams:
    return preset_params("per-day")


@pytest.fixture
def params_year() -> ModelParams:
    return preset_params("per-year")


@pytest.fixture
def params_nu_year() -> ModelParams:
    # lethal-infection variant used throughout: R0 = 2.7518, i_star = 0.02289
    return ModelParams(
        beta=80.0, sigma=52.0, gamma=26.0, omega=1.0, nu=2.0, b=0.013, mu=0.013,
        time_unit="per-year",
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260818)


def fd_jacobian(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Fourth-order central finite-difference Jacobian of f at x."""
    n = len(x)
    fx = np.asarray(f(x), dtype=float)
    jac = np.empty((len(fx), n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        fp1 = np.asarray(f(x + h * e), dtype=float)
        fm1 = np.asarray(f(x - h * e), dtype=float)
        fp2 = np.asarray(f(x + 2 * h * e), dtype=float)
        fm2 = np.asarray(f(x - 2 * h * e), dtype=float)
        jac[:, j] = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    return jac


def random_admissible_params(
    rng: np.random.Generator, count: int, with_nu: bool = True
) -> list[ModelParams]:
    """Per-year parameter sets with a solvable endemic equilibrium."""
    out: list[ModelParams] = []
    while len(out) < count:
        p = ModelParams(
            beta=float(rng.uniform(20.0, 150.0)),
            sigma=float(rng.uniform(10.0, 100.0)),
            gamma=float(rng.uniform(5.0, 50.0)),
            omega=float(rng.uniform(0.05, 5.0)),
            nu=float(rng.uniform(0.1, 3.0)) if with_nu and rng.random() < 0.5 else 0.0,
            b=float(rng.uniform(0.005, 0.1)),
            mu=float(rng.uniform(0.005, 0.1)),
            time_unit="per-year",
        )
        try:
            if compute_r0(p) <= 1.0 + 1e-9:
                continue
            solve_endemic(p)
        except (DomainError, NoEndemicEquilibriumError, NumericalError):
            continue
        out.append(p)
    return out
