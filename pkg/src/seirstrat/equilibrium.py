"""Endemic equilibrium of the normalized system and related spectral data.

The normalized SEIRS flow with reinfection stratification has, above the
epidemic threshold, a unique endemic equilibrium whose stratified blocks
form a geometric sequence: block i equals phi^(i-1) times block 1, with a
common ratio phi in (0, 1).  This module solves the scalar balance equation
for the equilibrium infected fraction, assembles the remaining compartments
and block 1, classifies the long-run fate of the raw total population, and
provides the two 4x4 Jacobian blocks together with a small self-contained
eigenvalue routine.

Everything here computes in per-year units internally (spectra are easier
to read on that scale and the balance equation is better conditioned);
inputs declared per-day convert on entry.  Jacobian entries and eigenvalues
are therefore per year.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    NoEndemicEquilibriumError,
    NumericalError,
)
from .model import MacroState, MicroState, ModelParams

_BALANCE_TOL = 1e-12
_ROOT_XTOL = 1e-14
_ROOT_MAX_ITER = 200
_SCAN_POINTS = 4096
_FATE_BOUNDARY_TOL = 1e-12  # per year


@dataclass(frozen=True)
class EndemicEquilibrium:
    """Normalized endemic equilibrium plus its stratified block 1.

    zeta is only defined for nu = 0 (the closed-form regime) and is None
    otherwise.  block1 holds (s1, e1, i1, r1); block i is phi^(i-1) times
    block1 component-wise.
    """

    r0: float
    i_star: float
    s_star: float
    e_star: float
    r_star: float
    phi: float
    block1: tuple[float, float, float, float]
    zeta: float | None = None

    def block(self, i: int) -> tuple[float, float, float, float]:
        if i < 1:
            raise DomainError(f"block index must be >= 1, got {i}")
        w = self.phi ** (i - 1)
        return tuple(w * v for v in self.block1)


@dataclass(frozen=True)
class FateClass:
    """Long-run behavior of the raw total population.

    outcome is one of "N-vanishes", "N-constant", "N-converges-positive",
    "N-diverges", or "indeterminate" on the boundaries the classification
    theorem leaves open.  case is the matching label (1, 2a, 2b-i, 2b-ii,
    3a, 3b, or "boundary").  net_growth = b - mu and nu_i_star are per
    year; nu_i_star is None when no endemic equilibrium was needed.
    """

    outcome: str
    case: str
    r0: float
    net_growth: float
    nu_i_star: float | None = None


def compute_r0(p: ModelParams) -> float:
    """Basic reproduction number sigma/(sigma+b) * beta/(gamma+nu+b).

    Independent of mu, omega, and of the declared time unit.
    """
    py = p.per_year()
    if py.sigma + py.b <= 0 or py.gamma + py.nu + py.b <= 0:
        raise DomainError(
            "compute_r0 needs sigma+b > 0 and gamma+nu+b > 0, got "
            f"sigma+b={py.sigma + py.b}, gamma+nu+b={py.gamma + py.nu + py.b}"
        )
    return py.sigma / (py.sigma + py.b) * py.beta / (py.gamma + py.nu + py.b)


def balance_residual(p: ModelParams, i_star: float) -> float:
    """Scalar balance equation for the endemic infected fraction.

    Returns LHS - RHS of

        ((beta-nu)/b * i + 1) * (1 - nu*i/(sigma+b)) * (1 - nu*i/(gamma+nu+b))
          = R0 * (1 + (gamma/b) * omega*i / (omega+b - nu*i)),

    which vanishes exactly at the equilibrium infected fraction.  The
    residual is dimensionless and unit-invariant.
    """
    py = p.per_year()
    if py.b <= 0:
        raise DomainError(f"balance equation divides by b, got b={py.b}")
    return _residual_core(py, compute_r0(p), i_star)


def _residual_core(py: ModelParams, r0: float, i):
    # elementwise arithmetic only: i may be a float or an ndarray, and the
    # scalar path must match the vectorized path bit for bit
    lhs = (
        ((py.beta - py.nu) / py.b * i + 1.0)
        * (1.0 - py.nu * i / (py.sigma + py.b))
        * (1.0 - py.nu * i / (py.gamma + py.nu + py.b))
    )
    rhs = r0 * (1.0 + (py.gamma / py.b) * py.omega * i / (py.omega + py.b - py.nu * i))
    return lhs - rhs


def _admissible_upper(py: ModelParams) -> float:
    # keep every factor and denominator of the balance equation positive
    if py.nu == 0.0:
        return 1.0
    return min(
        1.0,
        (py.omega + py.b) / py.nu,
        (py.sigma + py.b) / py.nu,
        (py.gamma + py.nu + py.b) / py.nu,
    )


def _deflated_balance(py: ModelParams, r0: float, i):
    # The balance residual F has one spurious sign change at i = b/nu
    # (where the raw population drift b - nu*i changes sign), which is not
    # an equilibrium of the normalized flow.  Dividing it out leaves a
    # function whose sign changes only at genuine roots, and keeps the
    # bracketing well posed even when the genuine root sits close to b/nu.
    i = np.asarray(i, dtype=float)
    f = np.atleast_1d(_residual_core(py, r0, i))
    d = py.b - py.nu * np.atleast_1d(i)
    tiny = np.abs(d) < 1e-300
    d = np.where(tiny, 1e-300, d)
    g = f / d
    return g if i.ndim else float(g[0])


def solve_endemic(p: ModelParams) -> EndemicEquilibrium:
    """Solve the balance equation and assemble the endemic equilibrium.

    Requires R0 > 1 (raises NoEndemicEquilibriumError otherwise) and b > 0.
    The root is bracketed on the admissible interval, refined by bisection
    with secant acceleration to 1e-14, and verified: the balance residual
    at the returned i_star is below 1e-12 and the assembled compartments
    sum to 1 within 1e-10.
    """
    py = p.per_year()
    if py.b <= 0:
        raise DomainError(f"endemic equilibrium needs b > 0, got b={py.b}")
    r0 = compute_r0(p)
    if r0 <= 1.0:
        raise NoEndemicEquilibriumError(
            f"no endemic equilibrium: R0 = {r0!r} does not exceed 1"
        )

    i_max = _admissible_upper(py)
    grid = np.linspace(0.0, i_max, _SCAN_POINTS + 2)[1:-1]
    if py.nu > 0:
        # nudge any grid point that lands on the deflation pole
        pole = py.b / py.nu
        hit = np.isclose(grid, pole, rtol=0.0, atol=1e-13 * i_max)
        grid[hit] += 0.5 * i_max / (_SCAN_POINTS + 2)
    g = _deflated_balance(py, r0, grid)

    sign = np.sign(g)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(sign == 0)[0]
    if len(flips) + len(exact) == 0:
        raise NumericalError(
            "endemic balance root not bracketed in the admissible interval "
            f"(0, {i_max!r}); R0 = {r0!r}, residual at midpoint = "
            f"{_residual_core(py, r0, 0.5 * i_max)!r}"
        )
    if len(flips) + len(exact) > 1:
        raise NumericalError(
            f"expected a unique admissible root, found {len(flips) + len(exact)} "
            f"sign changes on a {_SCAN_POINTS}-point scan of (0, {i_max!r})"
        )

    if len(exact):
        i_star = float(grid[exact[0]])
    else:
        lo, hi = float(grid[flips[0]]), float(grid[flips[0] + 1])
        i_star = _bisect_secant(lambda v: _deflated_balance(py, r0, v), lo, hi)

    # polish on the undeflated residual with secant steps until they stop
    # helping: downstream quantities like 1/(1 - phi) amplify any leftover
    # root error, so the last ulp here is worth having
    f0 = _residual_core(py, r0, i_star)
    for _ in range(8):
        if f0 == 0.0:
            break
        h = 1e-9 * max(i_star, 1e-6)
        f1 = _residual_core(py, r0, i_star + h)
        if f1 == f0:
            break
        cand = i_star - f0 * h / (f1 - f0)
        if not (0.0 < cand < i_max):
            break
        f_cand = _residual_core(py, r0, cand)
        if abs(f_cand) >= abs(f0):
            break
        i_star, f0 = cand, f_cand

    resid = _residual_core(py, r0, i_star)
    if abs(resid) > _BALANCE_TOL:
        raise NumericalError(
            f"balance residual {resid!r} at i_star={i_star!r} exceeds {_BALANCE_TOL}"
        )

    return _assemble(py, r0, i_star)


def _bisect_secant(fun, lo: float, hi: float) -> float:
    f_lo, f_hi = fun(lo), fun(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    x_prev, f_prev = lo, f_lo
    x_cur, f_cur = hi, f_hi
    for _ in range(_ROOT_MAX_ITER):
        if hi - lo <= _ROOT_XTOL:
            break
        # secant proposal, bisection fallback when it leaves the bracket
        x_new = None
        if f_cur != f_prev:
            cand = x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev)
            if lo < cand < hi:
                x_new = cand
        if x_new is None:
            x_new = 0.5 * (lo + hi)
        f_new = fun(x_new)
        if f_new == 0.0:
            return x_new
        if f_lo * f_new < 0:
            hi, f_hi = x_new, f_new
        else:
            lo, f_lo = x_new, f_new
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = x_new, f_new
    return 0.5 * (lo + hi)


def _assemble(py: ModelParams, r0: float, i_star: float) -> EndemicEquilibrium:
    beta, sigma, gamma, omega, nu, b = (
        py.beta, py.sigma, py.gamma, py.omega, py.nu, py.b,
    )
    s_star = (gamma + b + nu - nu * i_star) / sigma * (sigma + b - nu * i_star) / beta
    e_star = (gamma + nu + b - nu * i_star) / sigma * i_star
    r_star = gamma / (omega + b - nu * i_star) * i_star

    total = s_star + e_star + i_star + r_star
    if abs(total - 1.0) > 1e-10:
        raise NumericalError(
            f"assembled equilibrium sums to {total!r}, expected 1 within 1e-10 "
            f"(i_star={i_star!r})"
        )

    phi = (
        omega / ((beta - nu) * i_star + b)
        * gamma / (omega + b - nu * i_star)
        * i_star / s_star
    )
    if not (0.0 < phi < 1.0):
        raise NumericalError(f"geometric ratio phi={phi!r} outside (0, 1)")

    s1 = b / ((beta - nu) * i_star + b)
    e1 = beta * i_star / (sigma + b - nu * i_star) * s1
    i1 = i_star / s_star * s1
    r1 = gamma / (omega + b - nu * i_star) * i_star / s_star * s1

    zeta = None
    if nu == 0.0:
        zeta = ((gamma + b) * (sigma + b) * (omega + b) - omega * gamma * sigma) / (
            sigma * b * (omega + b)
        )

    return EndemicEquilibrium(
        r0=r0,
        i_star=i_star,
        s_star=s_star,
        e_star=e_star,
        r_star=r_star,
        phi=phi,
        block1=(s1, e1, i1, r1),
        zeta=zeta,
    )


def closed_form_nu0(p: ModelParams) -> tuple[float, float, float]:
    """Closed-form (zeta, i_star, phi) for the nu = 0 regime.

    zeta is the number of critical stability; i_star = (R0-1)/(R0*zeta);
    phi = gamma*omega*(R0-1) / (beta*(omega+b) - gamma*omega).  Requires
    nu = 0, b > 0 and R0 > 1.
    """
    py = p.per_year()
    if py.nu != 0.0:
        raise DomainError(f"closed form requires nu = 0, got nu={p.nu!r} ({p.time_unit})")
    if py.b <= 0:
        raise DomainError(f"closed form requires b > 0, got b={py.b}")
    r0 = compute_r0(p)
    if r0 <= 1.0:
        raise NoEndemicEquilibriumError(
            f"no endemic equilibrium: R0 = {r0!r} does not exceed 1"
        )
    beta, sigma, gamma, omega, b = py.beta, py.sigma, py.gamma, py.omega, py.b
    zeta = ((gamma + b) * (sigma + b) * (omega + b) - omega * gamma * sigma) / (
        sigma * b * (omega + b)
    )
    i_star = (r0 - 1.0) / (r0 * zeta)
    phi = gamma * omega * (r0 - 1.0) / (beta * (omega + b) - gamma * omega)
    return zeta, i_star, phi


def equilibrium_micro_state(eq: EndemicEquilibrium, n: int) -> MicroState:
    """Geometric equilibrium of the normalized stratified system, depth n."""
    if n < 1:
        raise DomainError(f"truncation depth must be >= 1, got {n}")
    weights = eq.phi ** np.arange(n)
    s1, e1, i1, r1 = eq.block1
    return MicroState(
        n=n,
        S_seq=s1 * weights,
        E_seq=e1 * weights,
        I_seq=i1 * weights,
        R_seq=r1 * weights,
        macro=MacroState(eq.s_star, eq.e_star, eq.i_star, eq.r_star),
    )


def classify_fate(p: ModelParams) -> FateClass:
    """Long-run fate of the raw total population.

    Case 1: b < mu, the population vanishes.  Case 2 (b = mu): constant
    when nu = 0; with nu > 0 it converges to a positive limit below the
    epidemic threshold and vanishes above it.  Case 3 (b > mu): diverges
    when the demographic surplus b - mu exceeds the endemic mortality
    load nu*i_star, vanishes when it falls short.  Boundaries not covered
    by the classification (b - mu = nu*i_star, or R0 = 1 in case 2) come
    back as outcome "indeterminate" rather than an error.
    """
    py = p.per_year()
    net = py.b - py.mu

    try:
        r0 = compute_r0(p)
    except DomainError:
        r0 = math.nan  # only tolerable in the cases that never look at R0

    if net < 0.0:
        return FateClass(outcome="N-vanishes", case="1", r0=r0, net_growth=net)

    if net == 0.0:
        if py.nu == 0.0:
            return FateClass(outcome="N-constant", case="2a", r0=r0, net_growth=net)
        if math.isnan(r0):
            compute_r0(p)  # re-raise with the real message
        if r0 < 1.0:
            return FateClass(
                outcome="N-converges-positive", case="2b-i", r0=r0, net_growth=net
            )
        if r0 > 1.0:
            return FateClass(outcome="N-vanishes", case="2b-ii", r0=r0, net_growth=net)
        return FateClass(outcome="indeterminate", case="boundary", r0=r0, net_growth=net)

    # b > mu
    if math.isnan(r0):
        compute_r0(p)
    if py.nu == 0.0 or r0 <= 1.0:
        # no endemic mortality load; surplus wins
        return FateClass(
            outcome="N-diverges", case="3a", r0=r0, net_growth=net, nu_i_star=0.0
        )
    eq = solve_endemic(p)
    load = py.nu * eq.i_star
    gap = net - load
    if abs(gap) < _FATE_BOUNDARY_TOL:
        return FateClass(
            outcome="indeterminate", case="boundary", r0=r0, net_growth=net,
            nu_i_star=load,
        )
    if gap > 0:
        return FateClass(
            outcome="N-diverges", case="3a", r0=r0, net_growth=net, nu_i_star=load
        )
    return FateClass(
        outcome="N-vanishes", case="3b", r0=r0, net_growth=net, nu_i_star=load
    )


# ---------------------------------------------------------------------------
# Jacobians and spectra (per-year entries)
# ---------------------------------------------------------------------------


def jacobian_macro(p: ModelParams, eq: EndemicEquilibrium) -> np.ndarray:
    """Jacobian of the normalized macroscopic flow at the equilibrium.

    State order (S, E, I, R); entries per year.
    """
    py = p.per_year()
    beta, sigma, gamma, omega, nu, b = (
        py.beta, py.sigma, py.gamma, py.omega, py.nu, py.b,
    )
    s, e, i, r = eq.s_star, eq.e_star, eq.i_star, eq.r_star
    return np.array(
        [
            [-(beta - nu) * i - b, 0.0, -(beta - nu) * s, omega],
            [beta * i, -(sigma + b) + nu * i, beta * s + nu * e, 0.0],
            [0.0, sigma, -(gamma + b + nu) + 2.0 * nu * i, 0.0],
            [0.0, 0.0, gamma + nu * r, -(omega + b) + nu * i],
        ]
    )


def jacobian_micro_block(p: ModelParams, eq: EndemicEquilibrium) -> np.ndarray:
    """Diagonal block of the stratified Jacobian at the equilibrium.

    The stratified Jacobian is block lower triangular and every diagonal
    block is this same matrix, so its spectrum (the diagonal, the block
    being lower triangular itself) decides the stability of the whole
    stratified linearization.  Entries per year.
    """
    py = p.per_year()
    beta, sigma, gamma, omega, nu, b = (
        py.beta, py.sigma, py.gamma, py.omega, py.nu, py.b,
    )
    i = eq.i_star
    return np.array(
        [
            [-(beta - nu) * i - b, 0.0, 0.0, 0.0],
            [beta * i, -(sigma + b) + nu * i, 0.0, 0.0],
            [0.0, sigma, -(gamma + b + nu) + nu * i, 0.0],
            [0.0, 0.0, gamma, -(omega + b) + nu * i],
        ]
    )


def _char_poly(m: np.ndarray) -> np.ndarray:
    # Faddeev-LeVerrier recursion; returns monic coefficients
    # [1, c1, c2, c3, c4] of det(lambda*I - m)
    n = 4
    eye = np.eye(n)
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    aux = np.zeros((n, n))
    for k in range(1, n + 1):
        aux = m @ aux + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(m @ aux) / k
    return coeffs


def _durand_kerner(coeffs: np.ndarray) -> np.ndarray:
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    z = radius * (0.4 + 0.9j) ** np.arange(1, 5)
    poly = np.polynomial.Polynomial(coeffs[::-1])
    for _ in range(500):
        delta = np.empty_like(z)
        for k in range(4):
            diff = z[k] - np.delete(z, k)
            delta[k] = poly(z[k]) / np.prod(diff)
        z = z - delta
        if np.max(np.abs(delta)) <= 1e-13 * max(1.0, float(np.max(np.abs(z)))):
            break
    return z


def eigenvalues_4x4(m) -> np.ndarray:
    """Eigenvalues of a real 4x4 matrix via its characteristic polynomial.

    Coefficients come from the Faddeev-LeVerrier recursion, roots from
    Durand-Kerner iteration.  Each root is validated against a backward
    error bound on the polynomial; conjugate pairs are symmetrized and
    returned adjacent, sorted by descending real part.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix entries must be finite")

    coeffs = _char_poly(m)
    roots = _durand_kerner(coeffs)

    # backward error: |p(z)| against the coefficient-magnitude scale at z
    poly = np.polynomial.Polynomial(coeffs[::-1])
    for z in roots:
        powers = np.abs(z) ** np.arange(4, -1, -1)
        scale = float(np.abs(coeffs) @ powers)
        if abs(poly(z)) > 1e-10 * max(1.0, scale):
            raise NumericalError(
                f"eigenvalue iteration failed to converge: residual {abs(poly(z))!r} "
                f"at root {z!r}"
            )

    # a real matrix has a conjugate-symmetric spectrum: collapse noise
    # imaginary parts, then average the remaining roots into exact pairs
    cleaned = np.where(
        np.abs(roots.imag) < 1e-8 * (1.0 + np.abs(roots)), roots.real + 0j, roots
    )
    complex_part = sorted(
        (z for z in cleaned if z.imag != 0.0), key=lambda z: (z.real, z.imag)
    )
    paired: list[complex] = [z for z in cleaned if z.imag == 0.0]
    if len(complex_part) % 2 != 0:
        raise NumericalError("unpaired complex eigenvalue for a real matrix")
    for lo_i in range(0, len(complex_part), 2):
        a, c = complex_part[lo_i], complex_part[lo_i + 1]
        re = 0.5 * (a.real + c.real)
        im = 0.5 * (abs(a.imag) + abs(c.imag))
        paired.extend([complex(re, im), complex(re, -im)])

    out = np.array(
        sorted(paired, key=lambda z: (-z.real, abs(z.imag), -z.imag)), dtype=complex
    )
    return out
