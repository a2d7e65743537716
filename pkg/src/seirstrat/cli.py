"""Command-line front end.

Subcommands:

* simulate: integrate a scenario and write trajectory CSVs;
* equilibrium: print the endemic-equilibrium report (and optional CSV);
* stats: print the mean reinfection counts;
* fate: print the long-run classification of the total population;
* identify: estimate SIS rates from an observed-series CSV.

Exit codes: 0 success, 2 domain or validation error, 3 numerical failure.
All printed floats carry 17 significant digits so that report values match
direct library calls bit for bit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import equilibrium as eqm
from . import identification as idn
from . import reinfection_stats as rstats
from .config import PRESET_NAMES, ScenarioConfig, parse_config, preset_scenario
from .csvio import format_float, read_table, write_table
from .errors import ConfigError, DomainError, NumericalError
from .integrate import Trajectory, integrate
from .model import UNIT_FACTOR, make_vector_field

_MICRO_SYSTEMS = ("micro", "normalized-micro")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunSummary:
    system: str
    truncation: int | None
    samples: int
    final: dict[str, float]
    conservation_defect: float | None
    tail_mass: float | None
    csv_paths: tuple[str, ...]
    trajectory: Trajectory


def compute_columns(cfg: ScenarioConfig, traj: Trajectory) -> dict[str, np.ndarray]:
    """All named quantities of a run, keyed per the CSV schema, t first."""
    x = traj.states
    cols: dict[str, np.ndarray] = {"t": traj.times}
    if cfg.system == "sis":
        for j, name in enumerate(("S", "I", "S1", "I1")):
            cols[name] = x[:, j]
        if cfg.observation_alpha is not None:
            cols["y"] = cfg.observation_alpha * x[:, 1]
            cols["y1"] = cfg.observation_alpha * x[:, 3]
        return cols
    for j, name in enumerate(("S", "E", "I", "R")):
        cols[name] = x[:, j]
    cols["N"] = x[:, :4].sum(axis=1)
    if cfg.system in _MICRO_SYSTEMS:
        for off, comp in enumerate(("S", "E", "I", "R")):
            for i in range(1, cfg.truncation + 1):
                cols[f"{comp}{i}"] = x[:, 4 + 4 * (i - 1) + off]
    return cols


def run_scenario(cfg: ScenarioConfig, out_dir=".") -> RunSummary:
    """Integrate the configured system and write the configured CSVs."""
    field, dim = make_vector_field(cfg.params, cfg.system, cfg.truncation)
    if len(cfg.x0) != dim:
        raise ConfigError(
            f"initial state has {len(cfg.x0)} components, the {cfg.system} system needs {dim}"
        )
    traj = integrate(field, cfg.x0, cfg.integration)
    cols = compute_columns(cfg, traj)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for spec in cfg.outputs:
        path = out / spec.csv
        write_table(path, spec.quantities, [cols[name] for name in spec.quantities])
        paths.append(str(path))

    final = {name: float(cols[name][-1]) for name in cfg.columns if name != "t"}

    defect = None
    if cfg.system.startswith("normalized"):
        defect = float(np.max(np.abs(traj.states[:, :4].sum(axis=1) - 1.0)))
    elif cfg.system == "sis":
        defect = float(np.max(np.abs(traj.states[:, 0] + traj.states[:, 1] - 1.0)))

    tail = None
    if cfg.system in _MICRO_SYSTEMS:
        macro_total = float(traj.final[:4].sum())
        tail = 1.0 - float(traj.final[4:].sum()) / macro_total

    return RunSummary(
        system=cfg.system,
        truncation=cfg.truncation,
        samples=len(traj.times),
        final=final,
        conservation_defect=defect,
        tail_mass=tail,
        csv_paths=tuple(paths),
        trajectory=traj,
    )


def _print_run_summary(cfg: ScenarioConfig, summary: RunSummary):
    n_note = f", n={summary.truncation}" if summary.truncation else ""
    t0, t1 = cfg.integration.t_start, cfg.integration.t_end
    print(f"system: {summary.system}{n_note}")
    print(f"samples: {summary.samples}, t in [{format_float(t0)}, {format_float(t1)}] days")
    macro_names = ("S", "I", "S1", "I1") if cfg.system == "sis" else ("S", "E", "I", "R", "N")
    parts = [f"{k}={format_float(summary.final[k])}" for k in macro_names]
    print("final state: " + " ".join(parts))
    if summary.conservation_defect is not None:
        print(f"conservation defect: {format_float(summary.conservation_defect)}")
    if summary.tail_mass is not None:
        print(f"tail mass beyond block {summary.truncation}: {format_float(summary.tail_mass)}")
    for path in summary.csv_paths:
        print(f"wrote {path}")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _fmt_eig(z: complex) -> str:
    if z.imag == 0.0:
        return format_float(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{format_float(z.real)} {sign} {format_float(abs(z.imag))}j"


def _fate_lines(fate: eqm.FateClass) -> list[str]:
    lines = [
        f"fate case = {fate.case}",
        f"fate outcome = {fate.outcome}",
        f"net growth b - mu (per year) = {format_float(fate.net_growth)}",
    ]
    if fate.nu_i_star is not None:
        lines.append(f"nu * i_star (per year) = {format_float(fate.nu_i_star)}")
    return lines


def equilibrium_report(cfg: ScenarioConfig) -> list[str]:
    """Assemble the equilibrium report lines (printed by the subcommand)."""
    p = cfg.params
    r0 = eqm.compute_r0(p)
    lines = [f"r0 = {format_float(r0)}"]
    lines += _fate_lines(eqm.classify_fate(p))
    if r0 <= 1.0:
        lines.append("r0 does not exceed 1: the disease-free state is the only "
                     "equilibrium; no endemic report")
        return lines

    eq = eqm.solve_endemic(p)
    lines.append("endemic equilibrium (fractions):")
    lines.append(f"  i_star = {format_float(eq.i_star)}")
    lines.append(f"  s_star = {format_float(eq.s_star)}")
    lines.append(f"  e_star = {format_float(eq.e_star)}")
    lines.append(f"  r_star = {format_float(eq.r_star)}")
    lines.append(f"  phi = {format_float(eq.phi)}")
    if eq.zeta is not None:
        lines.append(f"  zeta = {format_float(eq.zeta)}")
    s1, e1, i1, r1 = eq.block1
    lines.append(f"  s1_star = {format_float(s1)}")
    lines.append(f"  e1_star = {format_float(e1)}")
    lines.append(f"  i1_star = {format_float(i1)}")
    lines.append(f"  r1_star = {format_float(r1)}")
    lines.append(f"  s1_star / s_star = {format_float(s1 / eq.s_star)}")

    st = rstats.stats_analytic(eq, p)
    lines.append("mean infection counts:")
    lines.append(f"  mean_susceptible = {format_float(st.mean_susceptible)}")
    lines.append(f"  mean_infected_class = {format_float(st.mean_infected_class)}")
    lines.append(f"  mean_population = {format_float(st.mean_population)}")

    macro_eig = eqm.eigenvalues_4x4(eqm.jacobian_macro(p, eq))
    micro_eig = eqm.eigenvalues_4x4(eqm.jacobian_micro_block(p, eq))
    lines.append("macro Jacobian spectrum (per year):")
    for z in macro_eig:
        lines.append(f"  {_fmt_eig(z)}")
    lines.append(f"  hurwitz = {'yes' if all(z.real < 0 for z in macro_eig) else 'no'}")
    lines.append("stratified block spectrum (per year):")
    for z in micro_eig:
        lines.append(f"  {_fmt_eig(z)}")
    lines.append(f"  hurwitz = {'yes' if all(z.real < 0 for z in micro_eig) else 'no'}")
    return lines


def _numeric_report_rows(lines: list[str]) -> tuple[list[str], list[float]]:
    keys, vals = [], []
    for line in lines:
        if "=" not in line:
            continue
        key, _, value = line.partition("=")
        try:
            vals.append(float(value.strip()))
        except ValueError:
            continue
        keys.append(key.strip())
    return keys, vals


def stats_report(cfg: ScenarioConfig) -> list[str]:
    p = cfg.params
    eq = eqm.solve_endemic(p)
    st = rstats.stats_analytic(eq, p)
    lines = [
        f"mean_susceptible = {format_float(st.mean_susceptible)}",
        f"mean_infected_class = {format_float(st.mean_infected_class)}",
        f"mean_population = {format_float(st.mean_population)}",
    ]
    if p.nu == 0.0:
        cf = rstats.stats_closed_form_nu0(p)
        lines.append("closed-form route (nu = 0):")
        lines.append(f"  mean_susceptible = {format_float(cf.mean_susceptible)}")
        lines.append(f"  mean_infected_class = {format_float(cf.mean_infected_class)}")
        lines.append(f"  mean_population = {format_float(cf.mean_population)}")
    return lines


# ---------------------------------------------------------------------------
# identify
# ---------------------------------------------------------------------------


def _series_from_csv(path: str) -> idn.ObservedSeries:
    cols = read_table(path)
    if "t" not in cols or "y" not in cols:
        raise ConfigError(
            f"{path}: needs columns t and y (optional y1); found: {', '.join(cols)}"
        )
    return idn.ObservedSeries(times=cols["t"], y=cols["y"], y1=cols.get("y1"))


def _identify_command(args) -> int:
    factor = UNIT_FACTOR if args.units == "year" else 1.0
    mu_day = args.mu / factor
    unit_label = f"per {args.units}"

    series = _series_from_csv(args.csv)
    if args.window:
        t0, t1 = _parse_window(args.window)
        series = series.window(t0, t1)
    print(
        f"window: [{format_float(series.times[0])}, {format_float(series.times[-1])}] "
        f"days, {len(series.times)} samples, dt = {format_float(series.dt)} days"
    )

    boa, bmg = idn.identify_from_y_only(series, mu_day)
    print(f"y-only estimates ({unit_label}):")
    print(f"  beta/alpha = {format_float(boa * factor)}")
    print(f"  beta-gamma = {format_float(bmg * factor)}")

    if series.y1 is None:
        print(
            "alpha, beta, gamma are not identifiable from y alone: "
            "returning beta/alpha and beta-gamma only (no y1 column)"
        )
        return 0

    res = idn.identify_full(series, mu_day)
    print(f"full recovery ({unit_label}):")
    print(f"  alpha = {format_float(res.alpha)}")
    print(f"  beta = {format_float(res.beta * factor)}")
    print(f"  gamma = {format_float(res.gamma * factor)}")
    print(f"  r0 = {format_float(res.r0)}")
    print(f"  theta = {format_float(res.theta)}")
    print(f"  residual = {format_float(res.residual * factor)}")

    if args.out is not None:
        states = idn.reconstruct_states(series, res, mu_day)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "reconstructed.csv"
        write_table(
            path,
            ("t", "S", "I", "S1", "I1", "w"),
            (
                series.times,
                np.array([st.S for st in states]),
                np.array([st.I for st in states]),
                np.array([st.S1 for st in states]),
                np.array([st.I1 for st in states]),
                res.w_series,
            ),
        )
        print(f"wrote {path}")
    return 0


def _parse_window(text: str) -> tuple[float, float]:
    try:
        left, _, right = text.partition(":")
        t0, t1 = float(left), float(right)
    except ValueError as exc:
        raise ConfigError(f"--window expects t0:t1 in days, got {text!r}") from exc
    if not t1 > t0:
        raise ConfigError(f"--window needs t1 > t0, got {text!r}")
    return t0, t1


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def _load_scenario(args) -> ScenarioConfig:
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        return parse_config(path.read_text(encoding="utf-8"))
    return preset_scenario(args.preset)


def _add_scenario_source(sp):
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", metavar="PATH", help="scenario YAML file")
    group.add_argument(
        "--preset", choices=PRESET_NAMES, help="shipped scenario preset"
    )


def _report_command(args, build) -> int:
    cfg = _load_scenario(args)
    lines = build(cfg)
    for line in lines:
        print(line)
    if getattr(args, "out", None) is not None:
        keys, vals = _numeric_report_rows(lines)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = "equilibrium.csv" if build is equilibrium_report else "stats.csv"
        path = out / name
        # key,value rows; one row per numeric report line
        Path(path).write_text(
            "key,value\n"
            + "".join(f"{k},{format_float(v)}\n" for k, v in zip(keys, vals)),
            encoding="ascii",
        )
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="seirstrat",
        description="Reinfection-stratified SEIRS dynamics: simulation, "
        "equilibria, reinfection statistics, SIS identification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="integrate a scenario and write CSVs")
    _add_scenario_source(sp)
    sp.add_argument("--out", default=".", metavar="DIR", help="output directory")

    sp = sub.add_parser("equilibrium", help="endemic equilibrium report")
    _add_scenario_source(sp)
    sp.add_argument("--out", default=None, metavar="DIR", help="also write equilibrium.csv")

    sp = sub.add_parser("stats", help="mean reinfection counts")
    _add_scenario_source(sp)
    sp.add_argument("--out", default=None, metavar="DIR", help="also write stats.csv")

    sp = sub.add_parser("fate", help="long-run total-population classification")
    _add_scenario_source(sp)

    sp = sub.add_parser("identify", help="estimate SIS rates from an observed CSV")
    sp.add_argument("csv", help="CSV with columns t,y and optionally y1")
    sp.add_argument("--mu", type=float, required=True, help="known natural mortality rate")
    sp.add_argument("--window", default=None, metavar="T0:T1", help="restrict to [t0, t1] days")
    sp.add_argument(
        "--units", choices=("day", "year"), default="day",
        help="unit of --mu and of printed rates (default: day)",
    )
    sp.add_argument("--out", default=None, metavar="DIR", help="write reconstructed.csv")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = _load_scenario(args)
            summary = run_scenario(cfg, args.out)
            _print_run_summary(cfg, summary)
            return 0
        if args.command == "equilibrium":
            return _report_command(args, equilibrium_report)
        if args.command == "stats":
            return _report_command(args, stats_report)
        if args.command == "fate":
            cfg = _load_scenario(args)
            fate = eqm.classify_fate(cfg.params)
            print(f"r0 = {format_float(fate.r0)}")
            for line in _fate_lines(fate):
                print(line)
            return 0
        if args.command == "identify":
            return _identify_command(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
