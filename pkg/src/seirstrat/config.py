"""Scenario configuration: schema, validation, and the shipped preset.

A scenario is described by a single YAML document (or an equivalent dict).
Unknown keys are hard errors with the path to the offending key, since a
typo in a rate name would otherwise silently fall back to a default.

Schema (rates in the declared time unit, times in days):

    params:                     # required
      beta, sigma, gamma, omega, b, mu: rate     # required
      nu: rate                                   # optional, default 0
      time_unit: per-day | per-year              # required
      # for system: sis only beta, gamma, mu, time_unit are accepted
      # (latency, waning, births, and infection deaths do not apply)
    system: macro | micro | normalized-macro | normalized-micro | sis
    truncation: int             # required for micro systems, forbidden otherwise
    initial:                    # required; one of the three forms
      preset: bjornstad-svi     # named initial condition
      macro: {S, E, I, R}       # macro systems, and the macro part of micro
      blocks: {S: [..], E: [..], I: [..], R: [..]}   # micro systems, length n
      sis: {S, I, S1, I1}       # sis only
    integration:                # required
      t_end: days               # required
      sample_interval: days     # required
      t_start: days             # default 0
      method: rk45-adaptive | rk4-fixed          # default rk45-adaptive
      step: days                # rk4-fixed only
      abs_tol, rel_tol: float   # default 1e-10
      max_step: days            # optional
    observation:                # optional, sis only
      alpha: fraction in (0, 1]
    outputs:                    # optional; default one CSV named trajectory.csv
      - csv: filename
        quantities: all | [column names]

Epidemic scenarios must start with some exposed or infected mass (the
macro E + I must be positive; for sis, I > 0): without it the run would
be the disease-free constant and every downstream question degenerates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import ConfigError, DomainError
from .integrate import IntegrationConfig
from .model import SYSTEMS, ModelParams

PRESET_NAMES = ("bjornstad-svi",)

_TOP_KEYS = {"params", "system", "truncation", "initial", "integration", "observation", "outputs"}
_PARAM_KEYS = {"beta", "sigma", "gamma", "omega", "nu", "b", "mu", "time_unit"}
_REQUIRED_PARAM_KEYS = {"beta", "sigma", "gamma", "omega", "b", "mu", "time_unit"}
_SIS_PARAM_KEYS = {"beta", "gamma", "mu", "time_unit"}
_INTEGRATION_KEYS = {
    "method", "step", "abs_tol", "rel_tol", "max_step", "t_start", "t_end", "sample_interval",
}
_MICRO_SYSTEMS = ("micro", "normalized-micro")


@dataclass(frozen=True)
class OutputSpec:
    csv: str
    quantities: tuple[str, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    system: str
    truncation: int | None
    x0: np.ndarray  # flat initial state in the system's layout
    integration: IntegrationConfig
    outputs: tuple[OutputSpec, ...]
    observation_alpha: float | None
    columns: tuple[str, ...]  # every quantity the run can emit, t first


def system_columns(system: str, n: int | None, with_observation: bool) -> tuple[str, ...]:
    if system == "sis":
        cols = ["t", "S", "I", "S1", "I1"]
        if with_observation:
            cols += ["y", "y1"]
        return tuple(cols)
    cols = ["t", "S", "E", "I", "R", "N"]
    if system in _MICRO_SYSTEMS:
        for comp in ("S", "E", "I", "R"):
            cols += [f"{comp}{i}" for i in range(1, (n or 0) + 1)]
    return tuple(cols)


def _require_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def _reject_unknown(node: dict, allowed, path: str):
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        raise ConfigError(
            f"{path}: unknown key {unknown[0]!r} (allowed: {', '.join(sorted(allowed))})"
        )


def _number(node, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {node!r}")
    v = float(node)
    if not math.isfinite(v):
        raise ConfigError(f"{path}: must be finite, got {v!r}")
    return v


def _preset_initial(system: str, n: int | None) -> np.ndarray:
    # a small seed of infection, everything else susceptible and
    # never-infected; in micro systems the whole population sits in block 1
    i0 = 1e-3
    s0 = 1.0 - i0
    if system == "sis":
        return np.array([s0, i0, s0, i0])
    macro = [s0, 0.0, i0, 0.0]
    if system not in _MICRO_SYSTEMS:
        return np.array(macro)
    blocks = np.zeros(4 * n)
    blocks[0] = s0  # S1
    blocks[2] = i0  # I1
    return np.concatenate([macro, blocks])


def _parse_initial(node, system: str, n: int | None) -> np.ndarray:
    node = _require_mapping(node, "initial")
    _reject_unknown(node, {"preset", "macro", "blocks", "sis"}, "initial")
    if "preset" in node:
        if len(node) > 1:
            raise ConfigError("initial: preset cannot be combined with explicit values")
        name = node["preset"]
        if name not in PRESET_NAMES:
            raise ConfigError(
                f"initial.preset: unknown preset {name!r} (available: {', '.join(PRESET_NAMES)})"
            )
        return _preset_initial(system, n)

    if system == "sis":
        if "sis" not in node:
            raise ConfigError("initial: sis system needs the key initial.sis")
        if "macro" in node or "blocks" in node:
            raise ConfigError("initial: macro/blocks do not apply to the sis system")
        sub = _require_mapping(node["sis"], "initial.sis")
        _reject_unknown(sub, {"S", "I", "S1", "I1"}, "initial.sis")
        vals = [_number(sub.get(k, 0.0), f"initial.sis.{k}") for k in ("S", "I", "S1", "I1")]
        x0 = np.array(vals)
        _check_bounds(x0, "initial.sis")
        if abs(x0[0] + x0[1] - 1.0) > 1e-6:
            raise ConfigError(
                f"initial.sis: S + I = {x0[0] + x0[1]!r}, must be 1 (unit population)"
            )
        if x0[2] > x0[0] + 1e-9 or x0[3] > x0[1] + 1e-9:
            raise ConfigError("initial.sis: needs S1 <= S and I1 <= I")
        return x0

    if "sis" in node:
        raise ConfigError(f"initial: sis values do not apply to the {system} system")
    if "macro" not in node:
        raise ConfigError("initial: needs the key initial.macro (or a preset)")
    sub = _require_mapping(node["macro"], "initial.macro")
    _reject_unknown(sub, {"S", "E", "I", "R"}, "initial.macro")
    macro = np.array(
        [_number(sub.get(k, 0.0), f"initial.macro.{k}") for k in ("S", "E", "I", "R")]
    )
    _check_bounds(macro, "initial.macro")
    if system.startswith("normalized") and abs(macro.sum() - 1.0) > 1e-6:
        raise ConfigError(
            f"initial.macro: components sum to {macro.sum()!r}; a normalized "
            "system starts on the unit simplex"
        )

    if system not in _MICRO_SYSTEMS:
        if "blocks" in node:
            raise ConfigError(f"initial: blocks do not apply to the {system} system")
        return macro

    if "blocks" not in node:
        raise ConfigError("initial: micro systems need the key initial.blocks")
    blk = _require_mapping(node["blocks"], "initial.blocks")
    _reject_unknown(blk, {"S", "E", "I", "R"}, "initial.blocks")
    seqs = {}
    for comp in ("S", "E", "I", "R"):
        raw = blk.get(comp, [0.0] * n)
        if not isinstance(raw, list) or len(raw) != n:
            raise ConfigError(
                f"initial.blocks.{comp}: expected a list of length {n}, got {raw!r}"
            )
        seqs[comp] = np.array(
            [_number(v, f"initial.blocks.{comp}[{j}]") for j, v in enumerate(raw)]
        )
        _check_bounds(seqs[comp], f"initial.blocks.{comp}")
        if seqs[comp].sum() > macro[("S", "E", "I", "R").index(comp)] + 1e-9:
            raise ConfigError(
                f"initial.blocks.{comp}: block sum {seqs[comp].sum()!r} exceeds the "
                f"macro total {macro[('S', 'E', 'I', 'R').index(comp)]!r}"
            )
    blocks = np.stack([seqs["S"], seqs["E"], seqs["I"], seqs["R"]], axis=1).ravel()
    return np.concatenate([macro, blocks])


def _check_bounds(x: np.ndarray, path: str):
    if np.any(x < 0):
        raise ConfigError(f"{path}: negative component {float(x.min())!r}")


def parse_config(doc) -> ScenarioConfig:
    """Validate a YAML string (or pre-parsed dict) into a ScenarioConfig."""
    if isinstance(doc, str):
        try:
            doc = yaml.safe_load(doc)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if doc is None:
        raise ConfigError(
            "empty config; required keys: params, system, initial, integration"
        )
    doc = _require_mapping(doc, "config")
    _reject_unknown(doc, _TOP_KEYS, "config")
    for key in ("params", "system", "initial", "integration"):
        if key not in doc:
            raise ConfigError(
                f"config: missing required key {key!r} "
                "(required: params, system, initial, integration)"
            )

    system = doc["system"]
    if system not in SYSTEMS:
        raise ConfigError(f"system: expected one of {', '.join(SYSTEMS)}, got {system!r}")

    pnode = _require_mapping(doc["params"], "params")
    if system == "sis":
        # the two-rate system: latency, waning, births, and infection deaths
        # have no meaning there, so their keys are typos by definition
        _reject_unknown(pnode, _SIS_PARAM_KEYS, "params")
        required = _SIS_PARAM_KEYS
    else:
        _reject_unknown(pnode, _PARAM_KEYS, "params")
        required = _REQUIRED_PARAM_KEYS
    missing = sorted(required - set(pnode))
    if missing:
        raise ConfigError(f"params: missing required key {missing[0]!r}")
    unit = pnode["time_unit"]
    if unit not in ("per-day", "per-year"):
        raise ConfigError(
            f"params.time_unit: expected per-day or per-year, got {unit!r}"
        )
    rates = {
        k: _number(pnode.get(k, 0.0), f"params.{k}")
        for k in ("beta", "sigma", "gamma", "omega", "nu", "b", "mu")
    }
    try:
        params = ModelParams(time_unit=unit, **rates)
    except DomainError as exc:
        raise ConfigError(f"params: {exc}") from exc

    truncation = None
    if system in _MICRO_SYSTEMS:
        if "truncation" not in doc or doc["truncation"] is None:
            raise ConfigError(f"truncation: required for the {system} system")
        t = doc["truncation"]
        if isinstance(t, bool) or not isinstance(t, int) or t < 1:
            raise ConfigError(f"truncation: expected a positive integer, got {t!r}")
        truncation = t
    elif doc.get("truncation") is not None:
        raise ConfigError(f"truncation: does not apply to the {system} system")

    x0 = _parse_initial(doc["initial"], system, truncation)

    # a run without any infection pressure answers no epidemic question
    if system == "sis":
        if x0[1] <= 0.0:
            raise ConfigError("initial: the sis run needs I > 0 initially")
    else:
        if x0[1] + x0[2] <= 0.0:
            raise ConfigError(
                "initial: needs some exposed or infected mass initially (E + I > 0)"
            )

    inode = _require_mapping(doc["integration"], "integration")
    _reject_unknown(inode, _INTEGRATION_KEYS, "integration")
    for key in ("t_end", "sample_interval"):
        if key not in inode:
            raise ConfigError(f"integration: missing required key {key!r}")
    kwargs = {
        "t_start": _number(inode.get("t_start", 0.0), "integration.t_start"),
        "t_end": _number(inode["t_end"], "integration.t_end"),
        "sample_interval": _number(inode["sample_interval"], "integration.sample_interval"),
    }
    if "method" in inode:
        kwargs["method"] = inode["method"]
    if "step" in inode:
        kwargs["step"] = _number(inode["step"], "integration.step")
    if "abs_tol" in inode:
        kwargs["abs_tol"] = _number(inode["abs_tol"], "integration.abs_tol")
    if "rel_tol" in inode:
        kwargs["rel_tol"] = _number(inode["rel_tol"], "integration.rel_tol")
    if "max_step" in inode and inode["max_step"] is not None:
        kwargs["max_step"] = _number(inode["max_step"], "integration.max_step")
    integration = IntegrationConfig(**kwargs)  # raises ConfigError on bad combos
    integration.sample_times()  # force the divisibility check at parse time

    alpha = None
    if "observation" in doc and doc["observation"] is not None:
        onode = _require_mapping(doc["observation"], "observation")
        _reject_unknown(onode, {"alpha"}, "observation")
        if system != "sis":
            raise ConfigError("observation: only applies to the sis system")
        if "alpha" not in onode:
            raise ConfigError("observation: missing required key 'alpha'")
        alpha = _number(onode["alpha"], "observation.alpha")
        if not (0.0 < alpha <= 1.0):
            raise ConfigError(f"observation.alpha: must lie in (0, 1], got {alpha!r}")

    columns = system_columns(system, truncation, alpha is not None)

    outputs = []
    onode = doc.get("outputs")
    if onode is None:
        outputs.append(OutputSpec(csv="trajectory.csv", quantities=columns))
    else:
        if not isinstance(onode, list) or not onode:
            raise ConfigError("outputs: expected a non-empty list")
        for j, item in enumerate(onode):
            item = _require_mapping(item, f"outputs[{j}]")
            _reject_unknown(item, {"csv", "quantities"}, f"outputs[{j}]")
            if "csv" not in item or not isinstance(item["csv"], str) or not item["csv"]:
                raise ConfigError(f"outputs[{j}].csv: expected a non-empty filename")
            q = item.get("quantities", "all")
            if q == "all":
                selected = columns
            else:
                if not isinstance(q, list) or not q:
                    raise ConfigError(
                        f"outputs[{j}].quantities: expected \"all\" or a non-empty list"
                    )
                for name in q:
                    if name not in columns:
                        raise ConfigError(
                            f"outputs[{j}].quantities: unknown quantity {name!r} "
                            f"(this run emits: {', '.join(columns)})"
                        )
                # t leads every file regardless of selection order
                selected = ("t",) + tuple(n for n in columns if n in q and n != "t")
            outputs.append(OutputSpec(csv=item["csv"], quantities=selected))

    return ScenarioConfig(
        params=params,
        system=system,
        truncation=truncation,
        x0=x0,
        integration=integration,
        outputs=tuple(outputs),
        observation_alpha=alpha,
        columns=columns,
    )


def preset_scenario(
    name: str = "bjornstad-svi",
    *,
    n: int = 10,
    years: float = 25.0,
    sample_interval: float = 5.0,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    system: str = "normalized-micro",
) -> ScenarioConfig:
    """The shipped scenario: a childhood-disease parameter set.

    Latency 7 days, infectious period 14 days, immunity waning over one
    year, demographic turnover over 76 years with births balancing deaths,
    no infection-induced mortality, and the contact rate pinned so the
    basic reproduction number is exactly 3.  Initial condition: a 1e-3
    infected seed in block 1, the rest susceptible and never infected.
    """
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r} (available: {', '.join(PRESET_NAMES)})")
    gamma = 1.0 / 14.0
    sigma = 1.0 / 7.0
    omega = 1.0 / 365.0
    b = 1.0 / (76.0 * 365.0)
    beta = 3.0 * (gamma + b) * (sigma + b) / sigma
    doc = {
        "params": {
            "beta": beta, "sigma": sigma, "gamma": gamma, "omega": omega,
            "nu": 0.0, "b": b, "mu": b, "time_unit": "per-day",
        },
        "system": system,
        "initial": {"preset": name},
        "integration": {
            "t_start": 0.0,
            "t_end": years * 365.0,
            "sample_interval": sample_interval,
            "method": "rk45-adaptive",
            "abs_tol": abs_tol,
            "rel_tol": rel_tol,
        },
    }
    if system in _MICRO_SYSTEMS:
        doc["truncation"] = n
    return parse_config(doc)
