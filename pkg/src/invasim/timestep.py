"""Time-increment selection from the CFL bound and the contractivity bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spatial import FluxWorkspace


class StepSizeCollapse(RuntimeError):
    """The selected increment fell below ``dt_min``."""


@dataclass(frozen=True)
class StepControlConfig:
    cfl_limit: float = 0.5
    kappa_rel_limit: float = 0.01
    dt_max: float = 5e-3
    dt_min: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.cfl_limit <= 1.0:
            raise ValueError("cfl_limit must lie in (0, 1]")
        if self.kappa_rel_limit <= 0:
            raise ValueError("kappa_rel_limit must be positive")
        if not 0.0 < self.dt_min < self.dt_max:
            raise ValueError("need 0 < dt_min < dt_max")

    @classmethod
    def for_final_time(cls, t_final: float, **overrides) -> "StepControlConfig":
        """Default config with ``dt_max = 1e-2 * t_final``."""
        if t_final > 0 and "dt_max" not in overrides:
            overrides["dt_max"] = 1e-2 * t_final
        return cls(**overrides)


def max_speed(ws: FluxWorkspace) -> float:
    """``max |P| / h`` over all faces."""
    ax = np.max(np.abs(ws.speeds_x)) / ws.h1 if ws.speeds_x.size else 0.0
    ay = np.max(np.abs(ws.speeds_y)) / ws.h2 if ws.speeds_y.size else 0.0
    return float(max(ax, ay))


def dt_bounds(a: float, kappa: np.ndarray, r5: np.ndarray,
              cfg: StepControlConfig) -> dict[str, float]:
    """Candidate increments of each active bound, keyed by bound name.

    A bound with a vanishing norm imposes no restriction and is left out.
    """
    bounds = {"dt_max": cfg.dt_max}
    if a > 0:
        bounds["cfl"] = cfg.cfl_limit / a
    r5_norm = float(np.max(np.abs(r5))) if np.size(r5) else 0.0
    kappa_norm = float(np.max(np.abs(kappa))) if np.size(kappa) else 0.0
    if r5_norm > 0 and kappa_norm > 0:
        bounds["kappa"] = cfg.kappa_rel_limit * kappa_norm / r5_norm
    return bounds


def compute_dt(a: float, kappa: np.ndarray, r5: np.ndarray, cfg: StepControlConfig,
               time_to_target: float | None = None) -> tuple[float, str]:
    """Increment and the name of the binding bound.

    ``time_to_target`` shrinks the step so it lands on the next output time;
    the active bound is then reported as ``"landing"``.
    """
    bounds = dt_bounds(a, kappa, r5, cfg)
    active = min(bounds, key=bounds.get)
    dt = bounds[active]
    if dt < cfg.dt_min:
        raise StepSizeCollapse(f"dt={dt:.3e} below dt_min={cfg.dt_min:.3e} ({active} bound)")
    if time_to_target is not None and time_to_target <= dt:
        return time_to_target, "landing"
    return dt, active
