"""Reading experiment configurations from TOML files.

Schema (every key optional; defaults come from the experiment preset)::

    experiment = "exp1"          # exp0 | exp1 | custom
    preset = "exp1"              # parameter block for experiment = "custom"
    initial = "exp1"             # initial data for experiment = "custom"
    epsilon = 1.5
    t_final = 0.5
    snapshot_times = [0.1, 0.5]

    [grid]
    n = 100
    a = -2.0
    b = 2.0

    [params]                     # any ModelParams field; "lambda" and "M" accepted
    tau = 15.0

    [solver]                     # SolverOptions fields
    rel_tol = 1e-10

    [step_control]               # StepControlConfig fields
    cfl_limit = 0.5

    [sweep]
    tau = [5, 10, 15, 20]

    [output]
    dir = "runs/exp1"
    csv = false
    front_threshold = 0.5
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import tomli

from .experiments import EXPERIMENT_PARAMS, ConfigError, ExperimentConfig
from .imex import SolverOptions
from .model import PRESETS, ModelParams
from .timestep import StepControlConfig

PARAM_ALIASES = {"lambda": "lambda_", "M": "M_rate", "k_-1": "k_m1"}
TOP_KEYS = {"experiment", "preset", "initial", "epsilon", "t_final", "snapshot_times",
            "grid", "params", "solver", "step_control", "sweep", "output"}


@dataclass
class OutputOptions:
    directory: str | None = None
    csv: bool = False
    front_threshold: float = 0.5


def _build(cls, table: dict, section: str, aliases=None):
    names = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in table.items():
        key = (aliases or {}).get(key, key)
        if key not in names:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        kwargs[key] = value
    return kwargs


def params_from_table(table: dict, base: ModelParams) -> ModelParams:
    kwargs = _build(ModelParams, table, "params", PARAM_ALIASES)
    try:
        return base.replace(**{k: float(v) for k, v in kwargs.items()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(raw: dict) -> tuple[ExperimentConfig, OutputOptions, tuple[float, ...]]:
    """Experiment config, output options and sweep values from a parsed table."""
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    experiment = raw.get("experiment", "exp1")
    if experiment == "custom":
        preset = raw.get("preset", "base")
        if preset not in PRESETS:
            raise ConfigError(f"unknown parameter preset {preset!r}")
        base, experiment = PRESETS[preset], raw.get("initial", "exp1")
    elif experiment in EXPERIMENT_PARAMS:
        base = EXPERIMENT_PARAMS[experiment]
    else:
        raise ConfigError(f"unknown experiment {experiment!r}")

    grid = raw.get("grid", {})
    bad = set(grid) - {"n", "a", "b"}
    if bad:
        raise ConfigError(f"unknown keys {sorted(bad)} in [grid]")
    try:
        solver = SolverOptions(**_build(SolverOptions, raw.get("solver", {}), "solver"))
        control_table = raw.get("step_control")
        control = (StepControlConfig(**_build(StepControlConfig, control_table, "step_control"))
                   if control_table else None)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    out = raw.get("output", {})
    bad = set(out) - {"dir", "csv", "front_threshold"}
    if bad:
        raise ConfigError(f"unknown keys {sorted(bad)} in [output]")
    output = OutputOptions(out.get("dir"), bool(out.get("csv", False)),
                           float(out.get("front_threshold", 0.5)))
    taus = tuple(float(t) for t in raw.get("sweep", {}).get("tau", ()))

    cfg = ExperimentConfig(
        experiment=experiment,
        n=int(grid.get("n", 100)),
        a=float(grid.get("a", -2.0)),
        b=float(grid.get("b", 2.0)),
        params=params_from_table(raw.get("params", {}), base),
        epsilon=float(raw.get("epsilon", 1.5)),
        t_final=float(raw.get("t_final", 0.5)),
        snapshot_times=tuple(float(t) for t in raw.get("snapshot_times", ())),
        tau_sweep=taus,
        output_dir=output.directory,
        solver=solver,
        step_control=control,
    )
    return cfg, output, taus


def load_config(path) -> tuple[ExperimentConfig, OutputOptions, tuple[float, ...]]:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomli.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw)
