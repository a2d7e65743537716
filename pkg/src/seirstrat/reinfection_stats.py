"""Asymptotic mean numbers of past infections at the endemic equilibrium.

Because the stratified equilibrium blocks form a geometric sequence of
ratio phi, the mean number of infections undergone by a susceptible, by a
non-susceptible (E/I/R, all three share the same mean), and by a member of
the whole population have closed forms.  This module evaluates them three
ways: from a solved equilibrium, from the nu = 0 closed forms in the raw
rates, and empirically from a truncated stratified state.

A susceptible in block i has undergone i-1 infections (block 1 holds the
never-infected); an exposed, infectious or recovered individual in block i
has undergone i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InconsistentInputError
from .equilibrium import EndemicEquilibrium, compute_r0
from .model import MicroState, ModelParams


@dataclass(frozen=True)
class ReinfectionStats:
    mean_susceptible: float  # past infections among susceptibles
    mean_infected_class: float  # infection count among E/I/R individuals
    mean_population: float  # population-wide mean
    tail_mass: float | None = None  # truncation remainder, empirical route only


def stats_analytic(eq: EndemicEquilibrium, p: ModelParams) -> ReinfectionStats:
    """Closed-form means at a solved equilibrium.

    mean_susceptible = phi/(1-phi), mean_infected_class = 1/(1-phi), and
    the population-wide mean is

        1/(1-phi)^2 * (b - b*phi - nu*i1_star)/(b - nu*i_star) - s_star.

    Because the blocks are geometric, i_star = i1_star/(1-phi), so the
    middle ratio is identically 1-phi: the apparent pole at b = nu*i_star
    is removable, and the expression reduces to 1/(1-phi) - s_star.  The
    reduced form is what gets evaluated; it is exact for every state the
    equilibrium solver can produce and stays finite where the raw ratio
    would hit 0/0.
    """
    phi = eq.phi
    if not (0.0 < phi < 1.0):
        raise DomainError(f"geometric ratio must lie in (0, 1), got phi={phi!r}")
    mean_s = phi / (1.0 - phi)
    mean_eir = 1.0 / (1.0 - phi)
    mean_pop = 1.0 / (1.0 - phi) - eq.s_star
    return ReinfectionStats(mean_s, mean_eir, mean_pop)


def stats_closed_form_nu0(p: ModelParams) -> ReinfectionStats:
    """The nu = 0 means straight from the rates, no equilibrium solve.

    Requires R0 > 1.  The shared denominator beta*(omega+b) - gamma*omega*R0
    must be positive; a nonpositive value would put phi outside (0, 1),
    which the equilibrium theory rules out, so it is reported as
    inconsistent parameters.
    """
    py = p.per_year()
    if py.nu != 0.0:
        raise DomainError(
            f"closed-form means require nu = 0, got nu={p.nu!r} ({p.time_unit})"
        )
    r0 = compute_r0(p)
    if r0 <= 1.0:
        raise DomainError(f"means are defined above threshold only, R0 = {r0!r}")
    beta, gamma, omega, b = py.beta, py.gamma, py.omega, py.b
    denom = beta * (omega + b) - gamma * omega * r0
    if denom <= 0.0:
        raise InconsistentInputError(
            f"beta*(omega+b) - gamma*omega*R0 = {denom!r} is not positive; "
            "no admissible geometric ratio exists for these rates"
        )
    mean_s = gamma * omega * (r0 - 1.0) / denom
    mean_eir = (beta * (omega + b) - gamma * omega) / denom
    mean_pop = beta * (omega + b) * (r0 - 1.0) / (denom * r0)
    return ReinfectionStats(mean_s, mean_eir, mean_pop)


def stats_empirical(x: MicroState) -> ReinfectionStats:
    """Measure the three means from a truncated stratified state.

    Sums run over the stored blocks i = 1..n only; the ignored remainder
    is reported as tail_mass = 1 - (sum of all block entries)/(macro
    total), so callers can bound the truncation error themselves.
    """
    idx = np.arange(1, x.n + 1, dtype=float)
    s_tot = float(x.S_seq.sum())
    eir_tot = float((x.E_seq + x.I_seq + x.R_seq).sum())
    if s_tot <= 0.0:
        raise DomainError("empirical mean undefined: susceptible blocks sum to 0")
    if eir_tot <= 0.0:
        raise DomainError("empirical mean undefined: E/I/R blocks sum to 0")

    s_weighted = float(((idx - 1.0) * x.S_seq).sum())
    eir_weighted = float((idx * (x.E_seq + x.I_seq + x.R_seq)).sum())

    macro_total = x.macro.N
    if macro_total <= 0.0:
        raise DomainError("empirical tail mass undefined: macro totals sum to 0")
    micro_total = s_tot + eir_tot

    return ReinfectionStats(
        mean_susceptible=s_weighted / s_tot,
        mean_infected_class=eir_weighted / eir_tot,
        mean_population=(s_weighted + eir_weighted) / micro_total,
        tail_mass=1.0 - micro_total / macro_total,
    )
