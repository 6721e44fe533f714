"""Initial data, the simulation driver and post-processing of runs."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .delay import DelayBuffer, interpolate_delayed
from .grid import GridSpec
from .imex import KrylovFailure, SolverOptions, StepFailure, explicit_rhs, step
from .model import (KAPPA, Y, EXPERIMENT0_PARAMS, EXPERIMENT1_PARAMS, ModelParams,
                    StateField)
from .timestep import StepControlConfig, StepSizeCollapse, compute_dt, dt_bounds, max_speed

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1.5


class ConfigError(ValueError):
    pass


class RunAborted(RuntimeError):
    pass


def gamma_pdf(x, a: float, b: float):
    """Gamma density with shape ``a`` and scale ``b``."""
    if not (a > 0 and b > 0):
        raise ConfigError(f"gamma density needs positive shape and scale, got {a}, {b}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ConfigError("gamma density is evaluated on x >= 0 only")
    out = x ** (a - 1.0) * np.exp(-x / b) / (b**a * math.gamma(a))
    return out if out.ndim else float(out)


def _tumour_core(grid: GridSpec, epsilon: float):
    x1, x2 = grid.mesh()
    r2 = (x1**2 + x2**2).ravel()
    c2 = np.exp(-r2 / epsilon)
    return r2, 0.4 * c2, c2, 1.0 - c2


def init_experiment0(grid: GridSpec, epsilon: float = DEFAULT_EPSILON) -> StateField:
    r2, c1, c2, v = _tumour_core(grid, epsilon)
    y = 20.0 * gamma_pdf(5.0 * r2, 2.0, 15.0)
    return StateField.from_components(c1, c2, v, y, 2.0 * y)


def init_experiment1(grid: GridSpec, epsilon: float = DEFAULT_EPSILON) -> StateField:
    r2, c1, c2, v = _tumour_core(grid, epsilon)
    y = 15.0 * gamma_pdf(80.0 * np.sqrt(r2), 3.0, 7.0)
    return StateField.from_components(c1, c2, v, y, 2.0 * y)


INITIAL_CONDITIONS = {"exp0": init_experiment0, "exp1": init_experiment1}
EXPERIMENT_PARAMS = {"exp0": EXPERIMENT0_PARAMS, "exp1": EXPERIMENT1_PARAMS}


@dataclass
class ExperimentConfig:
    experiment: str = "exp1"
    n: int = 100
    a: float = -2.0
    b: float = 2.0
    params: ModelParams = EXPERIMENT1_PARAMS
    epsilon: float = DEFAULT_EPSILON
    t_final: float = 0.5
    snapshot_times: tuple[float, ...] = ()
    tau_sweep: tuple[float, ...] = ()
    output_dir: str | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    step_control: StepControlConfig | None = None
    max_retries: int = 8

    def __post_init__(self):
        if self.experiment not in INITIAL_CONDITIONS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.t_final < 0:
            raise ConfigError("t_final must be nonnegative")
        bad = [t for t in self.snapshot_times if not 0.0 <= t <= self.t_final]
        if bad:
            raise ConfigError(f"snapshot times outside [0, t_final]: {bad}")
        self.snapshot_times = tuple(sorted(set(float(t) for t in self.snapshot_times)))

    @classmethod
    def preset(cls, experiment: str, **overrides) -> "ExperimentConfig":
        if experiment not in EXPERIMENT_PARAMS:
            raise ConfigError(f"unknown experiment {experiment!r}")
        return cls(experiment=experiment, params=EXPERIMENT_PARAMS[experiment], **overrides)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.a, self.b, self.n, self.n)

    @property
    def control(self) -> StepControlConfig:
        if self.step_control is not None:
            return self.step_control
        return StepControlConfig.for_final_time(self.t_final if self.t_final > 0 else 1.0)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def initial_state(self) -> StateField:
        return INITIAL_CONDITIONS[self.experiment](self.grid, self.epsilon)


@dataclass
class RunReport:
    steps: int = 0
    rejected: int = 0
    times: list[float] = field(default_factory=list)
    dts: list[float] = field(default_factory=list)
    active: list[str] = field(default_factory=list)
    bounds: list[dict[str, float]] = field(default_factory=list)
    krylov_solves: int = 0
    krylov_iterations: int = 0
    krylov_failures: int = 0
    max_krylov_residual: float = 0.0
    wall_time: float = 0.0

    def active_fraction(self, name: str, skip: int = 0) -> float:
        rows = self.active[skip:]
        return rows.count(name) / len(rows) if rows else 0.0


@dataclass
class RunResult:
    config: ExperimentConfig
    grid: GridSpec
    snapshot_times: list[float]
    snapshots: list[StateField]
    final: StateField
    report: RunReport

    def snapshot(self, t: float) -> StateField:
        return self.snapshots[self.snapshot_times.index(t)]


def run_simulation(cfg: ExperimentConfig, initial: StateField | None = None,
                   progress: bool = False) -> RunResult:
    """Integrate from the experiment's initial data to ``cfg.t_final``."""
    grid = cfg.grid
    params = cfg.params
    control = cfg.control
    w0 = initial if initial is not None else cfg.initial_state()
    state = w0.data.copy()
    buf = DelayBuffer.initial(state[Y])
    delay = params.delay
    report = RunReport()
    snap_times: list[float] = []
    snaps: list[StateField] = []
    targets = sorted(set(cfg.snapshot_times) | {cfg.t_final})
    started = time.perf_counter()

    t = 0.0
    if 0.0 in cfg.snapshot_times:
        snap_times.append(0.0)
        snaps.append(StateField(state.copy()))

    for target in (x for x in targets if x > 0.0):
        while t < target:
            first = explicit_rhs(grid, params, state,
                                 interpolate_delayed(buf, t, delay, state[Y]),
                                 cfg.solver.flux_orientation)
            a = max_speed(first.fluxes)
            state_kappa, r5 = state[KAPPA], first.rhs[KAPPA]
            try:
                dt, active = compute_dt(a, state[KAPPA], first.rhs[KAPPA], control, target - t)
            except StepSizeCollapse as exc:
                raise RunAborted(f"t={t:.6g}: {exc}") from exc
            for attempt in range(cfg.max_retries + 1):
                try:
                    result = step(grid, params, state, t, dt, buf, cfg.solver, first=first)
                    break
                except StepFailure as exc:
                    report.rejected += 1
                    report.krylov_failures += isinstance(exc, KrylovFailure)
                    log.debug("step rejected at t=%g dt=%g: %s", t, dt, exc)
                    dt *= 0.5
                    active = "halved"
                    if dt < control.dt_min:
                        raise RunAborted(f"t={t:.6g}: step size collapsed after failures") from exc
            else:
                raise RunAborted(f"t={t:.6g}: step failed after {cfg.max_retries} retries")
            state, buf = result.state, result.buffer
            t = target if active == "landing" else t + dt
            report.steps += 1
            report.times.append(t)
            report.dts.append(dt)
            report.active.append(active)
            report.bounds.append(dt_bounds(a, state_kappa, r5, control))
            report.krylov_solves += result.stats.krylov_solves
            report.krylov_iterations += result.stats.krylov_iterations
            report.max_krylov_residual = max(report.max_krylov_residual,
                                             result.stats.max_residual)
            if progress and report.steps % 100 == 0:
                log.info("step %d t=%.5f dt=%.3e (%s)", report.steps, t, dt, active)
        if target in cfg.snapshot_times:
            snap_times.append(target)
            snaps.append(StateField(state.copy()))

    report.wall_time = time.perf_counter() - started
    return RunResult(cfg, grid, snap_times, snaps, StateField(state), report)


def outermost_peak(c: np.ndarray) -> float:
    """Value of the outermost local maximum of a profile.

    Runs of equal values are collapsed first, so a plateau counts as a
    maximum only if it rises above both of its neighbouring runs.
    """
    if c.size == 0:
        return 0.0
    keep = np.append(True, np.diff(c) != 0)
    runs = c[keep]
    padded = np.concatenate(([-np.inf], runs, [-np.inf]))
    peaks = np.nonzero((runs > padded[:-2]) & (runs > padded[2:]))[0]
    return float(runs[peaks[-1]])


@dataclass
class FrontMetrics:
    front_position: float
    front_height: float
    mass_c1: float
    mass_c2: float


def radial_cut(grid: GridSpec, field_: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values along the positive x1 semi-axis through the domain centre.

    For an even number of rows the two rows adjacent to the centre line are
    averaged.
    """
    f = grid.as_2d(field_)
    ny, nx = grid.shape
    row = f[ny // 2] if ny % 2 else 0.5 * (f[ny // 2 - 1] + f[ny // 2])
    x1 = grid.centers_x1()
    centre = 0.5 * (grid.a + grid.b)
    keep = x1 > centre - 1e-12 * grid.h1
    return x1[keep] - centre, row[keep]


def front_metrics(state: StateField, grid: GridSpec, threshold: float = 0.5) -> FrontMetrics:
    """Front position/height of ``c2`` on the radial cut plus total masses.

    The front sits at the largest radius where the one-sided radial
    difference of ``c2`` reaches ``threshold`` times its maximum magnitude;
    the height is ``c2`` at the outermost local maximum of the cut.
    """
    r, c = radial_cut(grid, state.c2)
    area = grid.cell_area
    masses = float(np.sum(state.c1) * area), float(np.sum(state.c2) * area)
    grad = np.abs(np.diff(c)) / np.diff(r)
    g_max = grad.max() if grad.size else 0.0
    if g_max <= 0.0:
        return FrontMetrics(0.0, float(c.max()) if c.size else 0.0, *masses)
    k = np.nonzero(grad >= threshold * g_max)[0][-1]
    position = 0.5 * (r[k] + r[k + 1])
    height = outermost_peak(c)
    return FrontMetrics(float(position), height, *masses)


def integrate_fixed(grid: GridSpec, params: ModelParams, initial: StateField, t_final: float,
                    dt: float, solver: SolverOptions | None = None) -> StateField:
    """Integrate with a constant increment; ``t_final / dt`` must be an integer."""
    n_steps = int(round(t_final / dt))
    if n_steps < 1 or not math.isclose(n_steps * dt, t_final, rel_tol=1e-12):
        raise ConfigError("t_final must be a positive integer multiple of dt")
    state = initial.data.copy()
    buf = DelayBuffer.initial(state[Y])
    for k in range(n_steps):
        result = step(grid, params, state, k * dt, dt, buf, solver)
        state, buf = result.state, result.buffer
    return StateField(state)
