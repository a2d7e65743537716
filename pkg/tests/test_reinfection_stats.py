"""Mean infection counts: analytic vs brute force vs closed forms."""

from __future__ import annotations

import numpy as np
import pytest

from seirstrat import (
    EndemicEquilibrium,
    MicroState,
    equilibrium_micro_state,
    solve_endemic,
    stats_analytic,
    stats_closed_form_nu0,
    stats_empirical,
)
from seirstrat.errors import DomainError

from conftest import random_admissible_params


def brute_force_means(eq: EndemicEquilibrium, i_max: int = 10**4):
    """Literal geometric sums over blocks 1..i_max."""
    i = np.arange(1, i_max + 1, dtype=float)
    w = eq.phi ** (i - 1.0)
    s1, e1, i1, r1 = eq.block1
    S = s1 * w
    EIR = (e1 + i1 + r1) * w
    mean_s = ((i - 1.0) * S).sum() / S.sum()
    mean_eir = (i * EIR).sum() / EIR.sum()
    mean_pop = (((i - 1.0) * S).sum() + (i * EIR).sum()) / (S.sum() + EIR.sum())
    return mean_s, mean_eir, mean_pop


def test_analytic_equals_brute_force_on_grid(rng):
    for p in random_admissible_params(rng, 40):
        eq = solve_endemic(p)
        st = stats_analytic(eq, p)
        bs, beir, bpop = brute_force_means(eq)
        assert abs(st.mean_susceptible - bs) < 1e-10 * max(1.0, bs), p
        assert abs(st.mean_infected_class - beir) < 1e-10 * max(1.0, beir), p
        assert abs(st.mean_population - bpop) < 1e-10 * max(1.0, bpop), p
        # E/I/R individuals have exactly one more infection than the
        # susceptibles they will wane into
        assert st.mean_infected_class - st.mean_susceptible == pytest.approx(1.0)


def test_displayed_population_form_agrees_away_from_its_pole(rng):
    # the raw displayed expression has a removable 0/0 at b = nu*i_star;
    # elsewhere it must equal the reduced form the module evaluates
    checked = 0
    for p in random_admissible_params(rng, 30):
        py = p.per_year()
        eq = solve_endemic(p)
        denom = py.b - py.nu * eq.i_star
        if abs(denom) < 1e-4:
            continue
        raw = (
            1.0 / (1.0 - eq.phi) ** 2
            * (py.b - py.b * eq.phi - py.nu * eq.block1[2]) / denom
            - eq.s_star
        )
        st = stats_analytic(eq, p)
        assert raw == pytest.approx(st.mean_population, rel=1e-9)
        checked += 1
    assert checked >= 25


def test_closed_form_nu0_route(rng):
    for p in random_admissible_params(rng, 30, with_nu=False):
        eq = solve_endemic(p)
        st = stats_analytic(eq, p)
        cf = stats_closed_form_nu0(p)
        assert abs(st.mean_susceptible - cf.mean_susceptible) < 1e-9 * max(
            1.0, st.mean_susceptible
        )
        assert abs(st.mean_infected_class - cf.mean_infected_class) < 1e-9 * max(
            1.0, st.mean_infected_class
        )
        assert abs(st.mean_population - cf.mean_population) < 1e-9 * max(
            1.0, st.mean_population
        )


def test_closed_form_rejects_lethal_or_subthreshold(params_nu_year, params_day):
    with pytest.raises(DomainError):
        stats_closed_form_nu0(params_nu_year)
    from dataclasses import replace

    with pytest.raises(DomainError):
        stats_closed_form_nu0(replace(params_day, beta=params_day.beta / 4))


def test_empirical_matches_truncated_sums(params_day):
    n = 1000
    eq = solve_endemic(params_day)
    st_state = equilibrium_micro_state(eq, n)
    emp = stats_empirical(st_state)
    # with phi^n ~ 1e-9 the truncated means lag the full ones negligibly
    full = stats_analytic(eq, params_day)
    assert emp.mean_susceptible == pytest.approx(full.mean_susceptible, abs=1e-5)
    assert emp.mean_population == pytest.approx(full.mean_population, abs=1e-5)
    assert emp.tail_mass == pytest.approx(eq.phi**n, rel=1e-3)
    # against a literal loop over the stored blocks
    s_num = sum((i - 1) * st_state.S_seq[i - 1] for i in range(1, n + 1))
    assert emp.mean_susceptible == pytest.approx(s_num / st_state.S_seq.sum(), rel=1e-12)


def test_empirical_degenerate_states():
    from seirstrat import MacroState

    zero_eir = MicroState(
        n=2,
        S_seq=[0.5, 0.25],
        E_seq=[0.0, 0.0],
        I_seq=[0.0, 0.0],
        R_seq=[0.0, 0.0],
        macro=MacroState(S=0.75, E=0.0, I=0.0, R=0.0),
    )
    with pytest.raises(DomainError):
        stats_empirical(zero_eir)


def test_mean_population_lies_between_class_means(rng):
    for p in random_admissible_params(rng, 15):
        eq = solve_endemic(p)
        st = stats_analytic(eq, p)
        assert st.mean_susceptible < st.mean_population < st.mean_infected_class
