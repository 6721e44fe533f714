"""One step of the additive IMEX Runge-Kutta scheme.

Split of the semi-discrete system ``w' = -A(w) + R_expl(w) + D(w) + R_impl(w)``:

* explicit: advection ``-A`` and ``R_expl`` (which carries the delayed term),
* implicit: diffusion ``D`` and integrin kinetics ``R_impl``.

The implicit stage equations only touch ``c2`` and ``y``.  ``c1``, ``v`` and
``kappa`` of a stage are fully determined by the explicit sums, so ``y`` is
solved exactly per cell.  The ``c2`` system is linearised by freezing the
diffusion coefficient and solved by matrix-free BiCGSTAB; optional Picard sweeps
re-freeze the coefficient at the latest iterate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .delay import DelayBuffer, InsufficientHistoryError, advance, interpolate_delayed
from .grid import GridSpec
from .krylov import DEFAULT_MAX_ITER, DEFAULT_REL_TOL, LinearOperator, bicgstab
from .model import C1, C2, KAPPA, V, Y, ModelParams, diffusion_coefficient, reaction_expl
from .spatial import (FluxWorkspace, advection_from_fluxes, compute_fluxes, diffusion_stencil,
                      frozen_diffusion)
from .tableau import ARK3, ButcherPair

FREEZE_MODES = ("previous_stage", "step_start")


class StepFailure(RuntimeError):
    """A step could not be completed; retry with a smaller increment."""


class KrylovFailure(StepFailure):
    """The linear stage solver missed its tolerance."""


@dataclass
class SolverOptions:
    rel_tol: float = DEFAULT_REL_TOL
    max_iter: int = DEFAULT_MAX_ITER
    jacobi: bool = False
    freeze: str = "previous_stage"
    picard_iterations: int = 0
    flux_orientation: str = "upwind"

    def __post_init__(self):
        if self.freeze not in FREEZE_MODES:
            raise ValueError(f"freeze must be one of {FREEZE_MODES}")
        if self.picard_iterations < 0:
            raise ValueError("picard_iterations must be nonnegative")


@dataclass
class StepStats:
    krylov_solves: int = 0
    krylov_iterations: int = 0
    max_residual: float = 0.0


@dataclass
class ExplicitEval:
    """Explicit right-hand side at one stage, with its flux workspace."""

    rhs: np.ndarray
    fluxes: FluxWorkspace


def explicit_rhs(grid: GridSpec, params: ModelParams, state: np.ndarray,
                 y_delayed: np.ndarray, orientation: str = "upwind") -> ExplicitEval:
    """``-A(w) + R_expl(w)`` with the delayed integrin field supplied."""
    ws = compute_fluxes(grid, params, state, orientation)
    rhs = reaction_expl(params, state, y_delayed) - advection_from_fluxes(grid, ws)
    return ExplicitEval(rhs, ws)


def implicit_rhs(grid: GridSpec, params: ModelParams, state: np.ndarray) -> np.ndarray:
    """``D(w) + R_impl(w)``."""
    out = np.zeros_like(state)
    T = diffusion_coefficient(params, state)
    out[C2] = diffusion_stencil(grid, T, state[C2])
    out[Y] = (params.k_1 * (1.0 - state[Y]) * state[V] - params.k_m1 * state[Y]) / params.chi
    return out


def solve_integrin(params: ModelParams, rhs_y, v, gamma_dt):
    """Exact per-cell solution of ``y = rhs_y + gamma_dt * R_impl_y(y; v)``."""
    g = gamma_dt / params.chi
    return (rhs_y + g * params.k_1 * v) / (1.0 + g * (params.k_1 * v + params.k_m1))


def stage_solve(grid: GridSpec, params: ModelParams, rhs_c2: np.ndarray, rhs_y: np.ndarray,
                frozen_state: np.ndarray, gamma_dt: float,
                options: SolverOptions | None = None, x0: np.ndarray | None = None,
                stats: StepStats | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Linearised implicit stage solve for ``(c2, y)``.

    The diffusion coefficient and the ``v`` in the integrin kinetics are
    taken from ``frozen_state``.
    """
    if gamma_dt < 0:
        raise ValueError("gamma_dt must be nonnegative")
    options = options or SolverOptions()
    y = solve_integrin(params, rhs_y, frozen_state[V], gamma_dt)
    if gamma_dt == 0.0:
        return np.array(rhs_c2, dtype=float), y

    T = diffusion_coefficient(params, frozen_state)
    if not np.any(T):
        return np.array(rhs_c2, dtype=float), y
    stencil, stencil_diag = frozen_diffusion(grid, T)
    op = LinearOperator(lambda x: x - gamma_dt * stencil(x), grid.n_cells)
    diag = 1.0 - gamma_dt * stencil_diag if options.jacobi else None
    c2, report = bicgstab(op, rhs_c2, rhs_c2 if x0 is None else x0,
                          rel_tol=options.rel_tol, max_iter=options.max_iter, diagonal=diag)
    if stats is not None:
        stats.krylov_solves += 1
        stats.krylov_iterations += report.iterations
        stats.max_residual = max(stats.max_residual,
                                 report.final_residual / max(np.linalg.norm(rhs_c2), 1e-300))
    if not report.converged:
        raise KrylovFailure(f"BiCGSTAB did not converge: {report}")
    return c2, y


@dataclass
class StepResult:
    state: np.ndarray
    buffer: DelayBuffer
    stats: StepStats = field(default_factory=StepStats)


def step(grid: GridSpec, params: ModelParams, state: np.ndarray, t: float, dt: float,
         buf: DelayBuffer, options: SolverOptions | None = None,
         first: ExplicitEval | None = None, pair: ButcherPair = ARK3) -> StepResult:
    """Advance ``state`` from ``t`` to ``t + dt``.

    ``first`` may carry the explicit evaluation at ``(t, state)`` when the
    caller already computed it for step-size control.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    options = options or SolverOptions()
    stats = StepStats()
    delay = params.delay
    s = pair.stages
    K_E: list[np.ndarray] = []
    K_I: list[np.ndarray] = []
    W_prev = state

    for i in range(s):
        t_hat = t + pair.c_E[i] * dt
        if i == 0:
            W = state
        else:
            base = state.copy()
            for j in range(i):
                base += dt * (pair.a_E[i, j] * K_E[j] + pair.a_I[i, j] * K_I[j])
            gamma_dt = pair.a_I[i, i] * dt
            W = base.copy()
            # c1, v and kappa of the stage are known; only c2 enters T implicitly
            frozen = (W_prev if options.freeze == "previous_stage" else state).copy()
            frozen[[C1, V, KAPPA]] = base[[C1, V, KAPPA]]
            c2_guess = W_prev[C2]
            for _ in range(options.picard_iterations + 1):
                c2, y = stage_solve(grid, params, base[C2], base[Y], frozen, gamma_dt,
                                    options, x0=c2_guess, stats=stats)
                frozen[C2] = c2
                c2_guess = c2
            W[C2] = c2
            W[Y] = y

        if i == 0 and first is not None:
            K_E.append(first.rhs)
        else:
            try:
                y_delayed = interpolate_delayed(buf, t_hat, delay, W[Y])
            except InsufficientHistoryError as exc:
                raise StepFailure(str(exc)) from exc
            K_E.append(explicit_rhs(grid, params, W, y_delayed, options.flux_orientation).rhs)
        K_I.append(implicit_rhs(grid, params, W))
        W_prev = W

    new = state.copy()
    for j in range(s):
        new += dt * (pair.b_E[j] * K_E[j] + pair.b_I[j] * K_I[j])
    if not np.all(np.isfinite(new)):
        raise StepFailure("non-finite values after step")
    return StepResult(new, advance(buf, t + dt, new[Y], delay), stats)
