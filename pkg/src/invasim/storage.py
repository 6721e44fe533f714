"""On-disk formats for snapshots, radial cuts, run reports and tables.

Snapshot files hold one component at one time.  Layout (little endian)::

    magic    8 bytes   b"INVSNAP\\0"
    version  uint32    1
    nx, ny   uint32    cell counts
    (4 bytes padding)
    a, b, t  float64   domain bounds and time
    payload  ny*nx float64, row-major (x1 varies fastest)

Each binary file can be accompanied by a CSV twin with columns
``x1,x2,value``.
"""
from __future__ import annotations

import csv
import json
import re
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .experiments import ConfigError, ExperimentConfig, RunReport, RunResult, radial_cut
from .grid import GridSpec
from .model import COMPONENTS, StateField

MAGIC = b"INVSNAP\0"
VERSION = 1
HEADER = struct.Struct("<8sIII4xddd")
SNAPSHOT_DIR = "snapshots"
_NAME = re.compile(r"^(?P<comp>[a-z0-9]+)_t(?P<t>[0-9.eE+-]+)\.bin$")


class FormatError(ValueError):
    pass


def snapshot_name(component: str, t: float) -> str:
    return f"{component}_t{t:.6f}.bin"


def write_snapshot(path, grid: GridSpec, t: float, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.shape != (grid.n_cells,):
        raise ValueError(f"expected {grid.n_cells} values, got shape {values.shape}")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, grid.nx, grid.ny, grid.a, grid.b, t))
        fh.write(values.tobytes())


def read_snapshot(path) -> tuple[GridSpec, float, np.ndarray]:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, nx, ny, a, b, t = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    values = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    if values.size != nx * ny:
        raise FormatError(f"{path}: payload has {values.size} values, header says {nx * ny}")
    return GridSpec(a, b, nx, ny), t, values.astype(float)


def write_snapshot_csv(path, grid: GridSpec, values: np.ndarray) -> None:
    x1, x2 = grid.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "value"])
        for row in zip(x1.ravel(), x2.ravel(), values):
            w.writerow([repr(float(v)) for v in row])


def write_state(directory, grid: GridSpec, t: float, state: StateField,
                csv_too: bool = False) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in COMPONENTS:
        path = directory / snapshot_name(name, t)
        write_snapshot(path, grid, t, state.component(name))
        written.append(path)
        if csv_too:
            write_snapshot_csv(path.with_suffix(".csv"), grid, state.component(name))
    return written


def write_radial_cut(path, grid: GridSpec, state: StateField) -> None:
    columns = [radial_cut(grid, state.component(name)) for name in COMPONENTS]
    r = columns[0][0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", *COMPONENTS])
        for i in range(r.size):
            w.writerow([repr(float(r[i]))] + [repr(float(c[1][i])) for c in columns])


def write_report(path, report: RunReport) -> None:
    """One row per accepted step: ``step,t,dt,active,dt_max,cfl,kappa``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "t", "dt", "active", "dt_max", "cfl", "kappa"])
        for i, (t, dt, act, b) in enumerate(zip(report.times, report.dts, report.active,
                                               report.bounds), start=1):
            w.writerow([i, repr(t), repr(dt), act,
                        *(repr(b[k]) if k in b else "" for k in ("dt_max", "cfl", "kappa"))])


def write_table(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["snapshot_times"] = list(cfg.snapshot_times)
    d["tau_sweep"] = list(cfg.tau_sweep)
    d["step_control"] = asdict(cfg.control)
    return d


def save_run(result: RunResult, directory, csv_too: bool = False) -> Path:
    """Write snapshots, final state, radial cut, report and resolved config."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    snap_dir = directory / SNAPSHOT_DIR
    for t, snap in zip(result.snapshot_times, result.snapshots):
        write_state(snap_dir, result.grid, t, snap, csv_too)
        write_radial_cut(directory / f"radial_t{t:.6f}.csv", result.grid, snap)
    t_final = result.config.t_final
    write_state(snap_dir, result.grid, t_final, result.final, csv_too)
    write_radial_cut(directory / "radial_final.csv", result.grid, result.final)
    write_report(directory / "report.csv", result.report)
    summary = {
        "config": config_to_dict(result.config),
        "steps": result.report.steps,
        "rejected": result.report.rejected,
        "krylov_solves": result.report.krylov_solves,
        "krylov_iterations": result.report.krylov_iterations,
    }
    (directory / "run.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return directory


def load_snapshots(directory) -> tuple[GridSpec, dict[float, StateField]]:
    """All complete states stored under a run directory, keyed by time."""
    directory = Path(directory)
    snap_dir = directory / SNAPSHOT_DIR if (directory / SNAPSHOT_DIR).is_dir() else directory
    if not snap_dir.is_dir():
        raise ConfigError(f"not a run directory: {directory}")
    by_time: dict[float, dict[str, np.ndarray]] = {}
    grid = None
    for path in sorted(snap_dir.glob("*.bin")):
        m = _NAME.match(path.name)
        if not m or m["comp"] not in COMPONENTS:
            continue
        g, t, values = read_snapshot(path)
        if grid is None:
            grid = g
        elif g != grid:
            raise FormatError(f"{path}: grid differs from other snapshots in {snap_dir}")
        by_time.setdefault(t, {})[m["comp"]] = values
    if grid is None:
        raise ConfigError(f"no snapshots found in {directory}")
    states = {t: StateField(np.stack([parts[c] for c in COMPONENTS]))
              for t, parts in by_time.items() if len(parts) == len(COMPONENTS)}
    return grid, states
