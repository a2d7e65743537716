"""Config validation, CSV round trips, and the CLI end to end."""

from __future__ import annotations

import numpy as np
import pytest

from seirstrat import (
    compute_r0,
    format_float,
    parse_config,
    preset_scenario,
    read_table,
    render_table,
    solve_endemic,
    system_columns,
    write_table,
)
from seirstrat.cli import main, run_scenario
from seirstrat.errors import ConfigError

BASE = """
params:
  beta: 0.3
  sigma: 0.14
  gamma: 0.07
  omega: 0.003
  b: 3.6e-5
  mu: 3.6e-5
  time_unit: per-day
system: normalized-macro
initial:
  macro: {S: 0.999, E: 0.0, I: 0.001, R: 0.0}
integration:
  t_end: 100.0
  sample_interval: 1.0
"""


def test_parse_minimal_config():
    cfg = parse_config(BASE)
    assert cfg.system == "normalized-macro"
    assert cfg.truncation is None
    assert cfg.params.beta == 0.3
    assert cfg.integration.t_start == 0.0
    assert cfg.outputs[0].csv == "trajectory.csv"
    assert cfg.columns[0] == "t"


@pytest.mark.parametrize(
    "mangle,fragment",
    [
        (lambda s: s.replace("beta", "beda"), "beda"),
        (lambda s: s.replace("system: normalized-macro", "system: mezzo"), "system"),
        (lambda s: s.replace("t_end: 100.0", "t_end: 100.0\n  steps: 4"), "steps"),
        (lambda s: s.replace("S: 0.999, E: 0.0, I: 0.001", "S: 1.0, E: 0.0, I: 0.0"), "infected"),
        (lambda s: s.replace("sample_interval: 1.0", "sample_interval: 0.3"), "divide"),
        (lambda s: s + "truncation: 5\n", "truncation"),
        (lambda s: s.replace("S: 0.999", "S: 0.5"), "sum"),
        (lambda s: s + "observation: {alpha: 0.5}\n", "sis"),
    ],
)
def test_config_rejections(mangle, fragment):
    with pytest.raises(ConfigError) as err:
        parse_config(mangle(BASE))
    assert fragment in str(err.value)


def test_empty_and_malformed_documents():
    with pytest.raises(ConfigError):
        parse_config("")
    with pytest.raises(ConfigError):
        parse_config("- just\n- a\n- list\n")
    with pytest.raises(ConfigError):
        parse_config("params: {beta: [0.1]}\nsystem: sis\n")


def test_micro_config_needs_truncation_and_blocks():
    doc = BASE.replace("system: normalized-macro", "system: normalized-micro")
    with pytest.raises(ConfigError, match="truncation"):
        parse_config(doc)
    doc = doc.replace("system: normalized-micro", "system: normalized-micro\ntruncation: 3")
    with pytest.raises(ConfigError, match="blocks"):
        parse_config(doc)
    doc = doc.replace(
        "  macro: {S: 0.999, E: 0.0, I: 0.001, R: 0.0}",
        "  macro: {S: 0.999, E: 0.0, I: 0.001, R: 0.0}\n"
        "  blocks:\n    S: [0.999, 0.0, 0.0]\n    I: [0.001, 0.0, 0.0]",
    )
    cfg = parse_config(doc)
    assert cfg.truncation == 3
    assert len(cfg.x0) == 16
    assert cfg.x0[4] == 0.999


def test_preset_scenario_matches_headline_numbers():
    cfg = preset_scenario()
    assert cfg.system == "normalized-micro"
    assert cfg.truncation == 10
    assert compute_r0(cfg.params) == pytest.approx(3.0, abs=1e-12)
    assert cfg.integration.t_end == pytest.approx(25.0 * 365.0)
    assert cfg.params.time_unit == "per-day"


def test_system_columns():
    cols = system_columns("normalized-micro", 2, with_observation=False)
    assert cols == (
        "t", "S", "E", "I", "R", "N",
        "S1", "S2", "E1", "E2", "I1", "I2", "R1", "R2",
    )
    assert system_columns("sis", None, True) == ("t", "S", "I", "S1", "I1", "y", "y1")


def test_csv_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    t = np.linspace(0.0, 1.0, 7)
    v = np.pi * t**3 + 1e-17
    write_table(path, ("t", "v"), (t, v))
    back = read_table(path)
    np.testing.assert_array_equal(back["t"], t)  # 17g round-trips doubles exactly
    np.testing.assert_array_equal(back["v"], v)


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,4.0\n")
    with pytest.raises(ConfigError, match="header"):
        read_table(path)
    path.write_text("t,y\n0.0,1.0\n1.0\n")
    with pytest.raises(ConfigError, match="line 3"):
        read_table(path)
    path.write_text("t,y\n0.0,apple\n")
    with pytest.raises(ConfigError):
        read_table(path)
    with pytest.raises(ConfigError):
        render_table(("a", "b"), (np.ones(3),))


def test_run_scenario_writes_selected_quantities(tmp_path):
    doc = BASE + "outputs:\n  - csv: slim.csv\n    quantities: [t, I, N]\n"
    cfg = parse_config(doc)
    summary = run_scenario(cfg, tmp_path)
    table = read_table(tmp_path / "slim.csv")
    assert list(table) == ["t", "I", "N"]
    assert len(table["t"]) == summary.samples
    assert summary.conservation_defect < 1e-12


def test_cli_simulate_and_identify_round_trip(tmp_path, capsys):
    sis_doc = """
params: {beta: 0.3, gamma: 0.1, mu: 0.02, time_unit: per-day}
system: sis
initial:
  sis: {S: 0.98, I: 0.02, S1: 0.98, I1: 0.02}
integration: {t_end: 160.0, sample_interval: 0.1}
observation: {alpha: 0.6}
outputs:
  - {csv: sis.csv, quantities: [t, y, y1]}
"""
    cfg_path = tmp_path / "sis.yaml"
    cfg_path.write_text(sis_doc)
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path)]) == 0
    capsys.readouterr()

    code = main(
        ["identify", str(tmp_path / "sis.csv"), "--mu", "0.02",
         "--window", "5:60", "--out", str(tmp_path)]
    )
    out = capsys.readouterr().out
    assert code == 0
    got = {}
    for line in out.splitlines():
        if "=" in line:
            key, _, val = line.partition("=")
            try:
                got[key.strip()] = float(val)
            except ValueError:
                pass
    assert got["beta"] == pytest.approx(0.3, rel=1e-2)
    assert got["gamma"] == pytest.approx(0.1, rel=1e-2)
    assert got["alpha"] == pytest.approx(0.6, rel=1e-2)
    recon = read_table(tmp_path / "reconstructed.csv")
    assert list(recon) == ["t", "S", "I", "S1", "I1", "w"]
    assert abs(recon["S"][len(recon["S"]) // 2] + recon["I"][len(recon["I"]) // 2] - 1.0) < 1e-2


def test_cli_identify_without_y1_refuses_full_recovery(tmp_path, capsys):
    t = np.arange(0.0, 40.0, 0.5)
    y = 0.01 * np.exp(0.1 * t)
    y = np.minimum(y, 0.5)
    write_table(tmp_path / "y.csv", ("t", "y"), (t, y))
    code = main(["identify", str(tmp_path / "y.csv"), "--mu", "0.02", "--window", "0:25"])
    out = capsys.readouterr().out
    assert code == 0
    assert "beta/alpha" in out
    assert "not identifiable" in out
    assert "\n  alpha =" not in out  # no full-recovery block


def test_cli_equilibrium_report_is_bit_identical_to_library(capsys):
    assert main(["equilibrium", "--preset", "bjornstad-svi"]) == 0
    out = capsys.readouterr().out
    eq = solve_endemic(preset_scenario().params)
    assert f"  i_star = {format_float(eq.i_star)}" in out
    assert f"  phi = {format_float(eq.phi)}" in out
    assert f"  zeta = {format_float(eq.zeta)}" in out
    assert "hurwitz = yes" in out
    # headline ratio present with both routes of the report agreeing
    s1 = eq.block1[0]
    assert f"  s1_star / s_star = {format_float(s1 / eq.s_star)}" in out


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(BASE.replace("beta", "beda"))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "beda" in capsys.readouterr().err

    low = tmp_path / "low.yaml"
    low.write_text(BASE.replace("beta: 0.3", "beta: 0.05"))
    assert main(["stats", "--config", str(low)]) == 2
    assert "R0" in capsys.readouterr().err

    assert main(["equilibrium", "--config", str(low)]) == 0
    out = capsys.readouterr().out
    assert "no endemic report" in out

    assert main(["simulate", "--config", str(tmp_path / "nope.yaml")]) == 2
    capsys.readouterr()


def test_cli_fate(capsys):
    assert main(["fate", "--preset", "bjornstad-svi"]) == 0
    out = capsys.readouterr().out
    assert "fate case = 2a" in out
    assert "N-constant" in out


def test_simulate_is_deterministic(tmp_path):
    doc = BASE + "outputs:\n  - csv: a.csv\n    quantities: all\n"
    cfg = parse_config(doc)
    run_scenario(cfg, tmp_path / "r1")
    run_scenario(cfg, tmp_path / "r2")
    b1 = (tmp_path / "r1" / "a.csv").read_bytes()
    b2 = (tmp_path / "r2" / "a.csv").read_bytes()
    assert b1 == b2 and len(b1) > 1000
