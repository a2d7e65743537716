"""Vector fields: conservation identities, block structure, units.

The stratified fields are cross-checked against a deliberately naive
scalar-loop rendition of the same flows written here in the test.
"""

from __future__ import annotations

import numpy as np
import pytest

from seirstrat import (
    MacroState,
    MicroState,
    ModelParams,
    SisState,
    make_vector_field,
    rhs_macro,
    rhs_micro,
    rhs_normalized_macro,
    rhs_sis,
)
from seirstrat.errors import DomainError

from dataclasses import replace as dc_replace

from conftest import preset_params


def _random_micro(rng, n, scale=1.0):
    blocks = rng.uniform(0.0, scale / n, size=(n, 4))
    macro = blocks.sum(axis=0) + rng.uniform(0.0, 0.3 * scale, size=4)
    return np.concatenate([macro, blocks.ravel()])


def _loop_micro_rhs(p: ModelParams, x: np.ndarray, n: int, normalized: bool):
    """Scalar-loop oracle for the stratified field (per-day rates expected)."""
    beta, sigma, gamma, omega, nu, b, mu = (
        p.beta, p.sigma, p.gamma, p.omega, p.nu, p.b, p.mu,
    )
    S, E, I, R = x[0], x[1], x[2], x[3]
    out = np.empty_like(x)
    if normalized:
        force = beta * I  # unit population; I is already a fraction
        drain = b - nu * I  # net outflow that keeps the simplex invariant
        out[0] = b - force * S + omega * R - drain * S
        out[1] = force * S - (sigma + b) * E + nu * I * E
        out[2] = sigma * E - (gamma + b + nu) * I + nu * I * I
        out[3] = gamma * I - (omega + b) * R + nu * I * R
        first_inflow = b
    else:
        N = S + E + I + R
        force = beta * I / N
        out[0] = b * N - force * S + omega * R - mu * S
        out[1] = force * S - (sigma + mu) * E
        out[2] = sigma * E - (gamma + mu + nu) * I
        out[3] = gamma * I - (omega + mu) * R
        first_inflow = b * N
    for i in range(n):
        si, ei, ii, ri = x[4 + 4 * i : 8 + 4 * i]
        inflow = first_inflow if i == 0 else omega * x[4 + 4 * (i - 1) + 3]
        if normalized:
            out[4 + 4 * i] = inflow - force * si - (b - nu * I) * si
            out[5 + 4 * i] = force * si - (sigma + b) * ei + nu * I * ei
            out[6 + 4 * i] = sigma * ei - (gamma + b + nu) * ii + nu * I * ii
            out[7 + 4 * i] = gamma * ii - (omega + b) * ri + nu * I * ri
        else:
            out[4 + 4 * i] = inflow - force * si - mu * si
            out[5 + 4 * i] = force * si - (sigma + mu) * ei
            out[6 + 4 * i] = sigma * ei - (gamma + mu + nu) * ii
            out[7 + 4 * i] = gamma * ii - (omega + mu) * ri
    return out


@pytest.mark.parametrize("normalized", [False, True])
def test_micro_field_matches_scalar_loop(rng, normalized):
    p = ModelParams(
        beta=0.3, sigma=0.14, gamma=0.08, omega=0.004, nu=0.01, b=5e-5, mu=4e-5
    )
    n = 7
    system = "normalized-micro" if normalized else "micro"
    f, dim = make_vector_field(p, system, n)
    assert dim == 4 + 4 * n
    for _ in range(20):
        x = _random_micro(rng, n)
        if normalized:
            x = x / x[:4].sum()  # simplex for the normalized variant
        np.testing.assert_allclose(
            f(x), _loop_micro_rhs(p, x, n, normalized), rtol=1e-13, atol=1e-16
        )


def test_macro_conservation_raw(rng):
    p = ModelParams(beta=0.25, sigma=0.2, gamma=0.1, omega=0.01, nu=0.02, b=1e-4, mu=2e-4)
    f, _ = make_vector_field(p, "macro")
    for _ in range(25):
        x = rng.uniform(0.01, 2.0, size=4)
        dx = f(x)
        # compartment-sum identity: dN/dt = (b - mu) N - nu I
        assert dx.sum() == pytest.approx((p.b - p.mu) * x.sum() - p.nu * x[2], rel=1e-12)


def test_normalized_macro_keeps_the_simplex(rng):
    p = dc_replace(preset_params(), nu=0.003)
    f, _ = make_vector_field(p, "normalized-macro")
    for _ in range(25):
        x = rng.uniform(0.0, 1.0, size=4)
        x /= x.sum()
        dx = f(x)
        assert abs(dx.sum()) < 1e-15
    # off the simplex the defect contracts toward it
    x = np.array([0.5, 0.2, 0.2, 0.2])
    dx = f(x)
    assert dx.sum() == pytest.approx((p.b - p.nu * x[2]) * (1.0 - x.sum()), rel=1e-12)


def test_micro_macro_part_is_the_macro_field(rng):
    p = dc_replace(preset_params(), nu=0.001)
    fm, _ = make_vector_field(p, "macro")
    fj, _ = make_vector_field(p, "micro", 6)
    for _ in range(10):
        x = _random_micro(rng, 6)
        np.testing.assert_allclose(fj(x)[:4], fm(x[:4]), rtol=1e-13)


def test_block_sums_reproduce_macro_when_tail_is_empty(rng):
    # all mass inside the tracked blocks: summed block flows equal the macro
    # flows except for the waning leak out of the last block's R
    p = dc_replace(preset_params(), nu=0.002)
    n = 5
    f, _ = make_vector_field(p, "micro", n)
    for _ in range(10):
        blocks = rng.uniform(0.0, 0.2, size=(n, 4))
        x = np.concatenate([blocks.sum(axis=0), blocks.ravel()])
        dx = f(x)
        leak = np.zeros(4)
        leak[0] = p.omega * blocks[-1, 3]  # would feed S_{n+1}
        np.testing.assert_allclose(
            dx[4:].reshape(n, 4).sum(axis=0) + leak, dx[:4], rtol=1e-12, atol=1e-18
        )


def test_unit_declaration_does_not_change_the_field(rng):
    p_day = dc_replace(preset_params(), nu=0.005)
    p_year = p_day.per_year()
    assert p_year.beta == pytest.approx(p_day.beta * 365.0, rel=1e-15)
    for system, n in (("macro", None), ("normalized-micro", 4), ("sis", None)):
        fd, _ = make_vector_field(p_day, system, n)
        fy, _ = make_vector_field(p_year, system, n)
        dim = 4 if n is None else 4 + 4 * n
        x = rng.uniform(0.01, 0.3, size=dim)
        np.testing.assert_allclose(fd(x), fy(x), rtol=1e-13)


def test_sis_field():
    p = ModelParams(beta=0.3, sigma=0.0, gamma=0.1, omega=0.0, mu=0.02)
    f, dim = make_vector_field(p, "sis")
    assert dim == 4
    S, I, S1, I1 = 0.7, 0.3, 0.4, 0.1
    dS, dI, dS1, dI1 = f(np.array([S, I, S1, I1]))
    assert dS == pytest.approx(p.mu - p.beta * S * I - p.mu * S + p.gamma * I, rel=1e-14)
    assert dI == pytest.approx(p.beta * S * I - (p.mu + p.gamma) * I, rel=1e-14)
    assert dS1 == pytest.approx(p.mu - p.beta * S1 * I - p.mu * S1, rel=1e-14)
    assert dI1 == pytest.approx(p.beta * S1 * I - (p.mu + p.gamma) * I1, rel=1e-14)
    # unit population is invariant
    assert dS + dI == pytest.approx(0.0, abs=1e-17)


def test_raw_macro_rejects_nonpositive_population():
    f, _ = make_vector_field(preset_params(), "macro")
    with pytest.raises(DomainError):
        f(np.zeros(4))


def test_params_validation():
    with pytest.raises(DomainError):
        ModelParams(beta=-0.1, sigma=0.1, gamma=0.1, omega=0.1)
    with pytest.raises(DomainError):
        ModelParams(beta=float("nan"), sigma=0.1, gamma=0.1, omega=0.1)
    with pytest.raises(DomainError):
        ModelParams(beta=0.1, sigma=0.1, gamma=0.1, omega=0.1, time_unit="per-week")
    p = ModelParams(beta=0.2, sigma=0.1, gamma=0.1, omega=0.01)
    assert p.per_day() is p
    assert p.per_year().per_day().beta == pytest.approx(p.beta, rel=1e-15)


def test_state_round_trips(rng):
    m = MacroState(S=0.4, E=0.1, I=0.2, R=0.3)
    assert m.N == pytest.approx(1.0)
    assert MacroState.from_array(m.as_array()) == m

    x = _random_micro(rng, 3)
    st = MicroState.from_array(3, x)
    np.testing.assert_allclose(st.as_array(), x)
    assert st.n == 3

    s = SisState(S=0.9, I=0.1, S1=0.8, I1=0.05)
    assert SisState.from_array(s.as_array()) == s


def test_dataclass_front_ends_agree_with_flat_fields(rng):
    p = dc_replace(preset_params(), nu=0.004)
    m = MacroState(S=0.5, E=0.1, I=0.15, R=0.25)
    f, _ = make_vector_field(p, "macro")
    np.testing.assert_allclose(rhs_macro(p, m).as_array(), f(m.as_array()), rtol=1e-14)
    f, _ = make_vector_field(p, "normalized-macro")
    np.testing.assert_allclose(
        rhs_normalized_macro(p, m).as_array(), f(m.as_array()), rtol=1e-14
    )
    x = _random_micro(rng, 4)
    st = MicroState.from_array(4, x)
    f, _ = make_vector_field(p, "micro", 4)
    np.testing.assert_allclose(rhs_micro(p, st).as_array(), f(x), rtol=1e-14)
    sp = ModelParams(beta=0.3, sigma=0.0, gamma=0.1, omega=0.0, mu=0.02)
    s = SisState(S=0.7, I=0.3, S1=0.4, I1=0.1)
    f, _ = make_vector_field(sp, "sis")
    np.testing.assert_allclose(rhs_sis(sp, s).as_array(), f(s.as_array()), rtol=1e-14)


def test_make_vector_field_rejects_bad_requests():
    p = preset_params()
    with pytest.raises(DomainError):
        make_vector_field(p, "micro")  # missing truncation
    with pytest.raises(DomainError):
        make_vector_field(p, "mezzo")
