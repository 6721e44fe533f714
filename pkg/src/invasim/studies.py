"""Grid-convergence study, delay sweep and run comparison."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .experiments import (ConfigError, ExperimentConfig, FrontMetrics, RunAborted, RunResult,
                          front_metrics, run_simulation)
from .grid import GridSpec
from .imex import StepFailure
from .model import COMPONENTS, DegenerateStateError

log = logging.getLogger(__name__)

EOC_COMPONENTS = ("c1", "c2", "kappa")


def restrict(fine: np.ndarray, fine_grid: GridSpec) -> np.ndarray:
    """Average 2x2 blocks of a flat field onto the grid with half the cells per axis."""
    ny, nx = fine_grid.shape
    if nx % 2 or ny % 2:
        raise ConfigError(f"cannot restrict a {nx}x{ny} grid by 2x2 blocks")
    f = np.asarray(fine, dtype=float).reshape(ny, nx)
    return f.reshape(ny // 2, 2, nx // 2, 2).mean(axis=(1, 3)).ravel()


def coarsened(grid: GridSpec) -> GridSpec:
    return GridSpec(grid.a, grid.b, grid.nx // 2, grid.ny // 2)


def l1_norm(d: np.ndarray, grid: GridSpec) -> float:
    return float(np.sum(np.abs(d)) * grid.cell_area)


def l2_norm(d: np.ndarray, grid: GridSpec) -> float:
    return float(math.sqrt(np.sum(np.square(d)) * grid.cell_area))


def eoc(e_coarse: float, e_fine: float) -> float:
    """``log2(e_coarse / e_fine)``; NaN when either error vanishes."""
    if e_coarse <= 0.0 or e_fine <= 0.0:
        return math.nan
    return math.log2(e_coarse / e_fine)


def check_levels(levels) -> list[int]:
    levels = [int(n) for n in levels]
    if len(levels) < 2:
        raise ConfigError("an EOC study needs at least two grid levels")
    for lo, hi in zip(levels, levels[1:]):
        if hi != 2 * lo:
            raise ConfigError(f"grid levels must double, got {lo} -> {hi}")
    return levels


@dataclass
class EocRow:
    """Errors between levels ``n_coarse`` and ``2 n_coarse`` for one component."""

    component: str
    n_coarse: int
    n_fine: int
    l1: float
    l2: float
    eoc_l1: float = math.nan
    eoc_l2: float = math.nan


@dataclass
class EocStudy:
    levels: list[int]
    rows: list[EocRow]
    runs: list[RunResult] = field(default_factory=list)

    def row(self, component: str, n_coarse: int) -> EocRow:
        for r in self.rows:
            if r.component == component and r.n_coarse == n_coarse:
                return r
        raise KeyError((component, n_coarse))


def eoc_table(solutions: list[np.ndarray], grids: list[GridSpec],
              components=EOC_COMPONENTS) -> list[EocRow]:
    """Errors between successive levels and their EOC.

    ``solutions[i]`` is the ``(5, n_cells)`` state on ``grids[i]``; the
    finer state of each pair is restricted onto the coarser grid.
    """
    rows: list[EocRow] = []
    for name in components:
        k = COMPONENTS.index(name)
        prev = None
        for i in range(len(grids) - 1):
            coarse, fine = grids[i], grids[i + 1]
            d = solutions[i][k] - restrict(solutions[i + 1][k], fine)
            row = EocRow(name, coarse.nx, fine.nx, l1_norm(d, coarse), l2_norm(d, coarse))
            if prev is not None:
                row.eoc_l1 = eoc(prev.l1, row.l1)
                row.eoc_l2 = eoc(prev.l2, row.l2)
            rows.append(row)
            prev = row
    return rows


def eoc_study(cfg: ExperimentConfig, levels=(25, 50, 100, 200),
              components=EOC_COMPONENTS) -> EocStudy:
    """Run ``cfg`` on every level and tabulate successive-level errors."""
    levels = check_levels(levels)
    bad = [c for c in components if c not in COMPONENTS]
    if bad:
        raise ConfigError(f"unknown components {bad}")
    runs = []
    for n in levels:
        log.info("eoc level %d", n)
        runs.append(run_simulation(cfg.with_(n=n)))
    rows = eoc_table([r.final.data for r in runs], [r.grid for r in runs], components)
    return EocStudy(levels, rows, runs)


@dataclass
class SweepRow:
    tau: float
    metrics: FrontMetrics | None
    steps: int = 0
    wall_time: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.metrics is not None


def sweep_tau(cfg: ExperimentConfig, taus, threshold: float = 0.5) -> list[SweepRow]:
    """Front metrics at ``t_final`` for each delay; failed runs keep their row."""
    taus = list(taus)
    if not taus:
        raise ConfigError("tau sweep needs at least one value")
    rows = []
    for tau in taus:
        run_cfg = cfg.with_(params=cfg.params.replace(tau=float(tau)))
        try:
            res = run_simulation(run_cfg)
        except (RunAborted, StepFailure, DegenerateStateError, FloatingPointError) as exc:
            log.warning("tau=%g failed: %s", tau, exc)
            rows.append(SweepRow(float(tau), None, error=str(exc)))
            continue
        rows.append(SweepRow(float(tau), front_metrics(res.final, res.grid, threshold),
                             res.report.steps, res.report.wall_time))
    return rows


@dataclass
class Difference:
    component: str
    linf: float
    l1: float
    rel_linf: float


def compare_states(a: np.ndarray, b: np.ndarray, grid: GridSpec) -> list[Difference]:
    """Componentwise L-infinity and L1 norms of ``a - b``.

    ``rel_linf`` divides by the L-infinity norm of ``b``.
    """
    if a.shape != b.shape:
        raise ConfigError(f"state shapes differ: {a.shape} vs {b.shape}")
    out = []
    for k, name in enumerate(COMPONENTS):
        d = a[k] - b[k]
        linf = float(np.max(np.abs(d)))
        ref = float(np.max(np.abs(b[k])))
        rel = linf / ref if ref > 0 else (0.0 if linf == 0 else math.inf)
        out.append(Difference(name, linf, l1_norm(d, grid), rel))
    return out


def compare_runs(run_a: RunResult, run_b: RunResult) -> dict[float, list[Difference]]:
    """Differences at every time present in both runs, including the final time."""
    if run_a.grid != run_b.grid:
        raise ConfigError(f"grids differ: {run_a.grid} vs {run_b.grid}")
    out = {}
    for t, snap in zip(run_a.snapshot_times, run_a.snapshots):
        if t in run_b.snapshot_times:
            out[t] = compare_states(snap.data, run_b.snapshot(t).data, run_a.grid)
    ta, tb = run_a.config.t_final, run_b.config.t_final
    if ta == tb:
        out[ta] = compare_states(run_a.final.data, run_b.final.data, run_a.grid)
    if not out:
        raise ConfigError("runs share no output time")
    return out
