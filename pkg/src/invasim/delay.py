"""History of the integrin field for the delayed contractivity source.

Only three snapshots are kept (two retained history times and the current
accepted time); values at the delayed time are obtained by piecewise-linear
interpolation, with the stage value standing in for the solution at the
stage time.  Before the start time the history is the constant extension of
the initial field.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InsufficientHistoryError(RuntimeError):
    """The delayed time lies before the oldest retained snapshot."""


@dataclass(frozen=True)
class DelayBuffer:
    t1d: float
    t2d: float
    tn: float
    y1: np.ndarray
    y2: np.ndarray
    yn: np.ndarray
    t_start: float = 0.0

    def __post_init__(self):
        if not self.t1d <= self.t2d <= self.tn:
            raise ValueError(f"buffer times out of order: {self.t1d}, {self.t2d}, {self.tn}")

    @classmethod
    def initial(cls, y0: np.ndarray, t0: float = 0.0) -> "DelayBuffer":
        y0 = np.array(y0, dtype=float)
        return cls(t0, t0, t0, y0, y0, y0, t_start=t0)


def interpolate_delayed(buf: DelayBuffer, t_hat: float, delay: float,
                        y_hat: np.ndarray) -> np.ndarray:
    """Integrin field at ``t_hat - delay``.

    ``y_hat`` approximates the field at ``t_hat``; it is returned unchanged
    when ``delay == 0``.
    """
    s = t_hat - delay
    if s >= t_hat:
        return np.asarray(y_hat, dtype=float)
    if s < buf.t1d:
        if buf.t1d <= buf.t_start:
            # constant extension of the initial data
            return buf.y1.copy()
        raise InsufficientHistoryError(
            f"delayed time {s:.6g} precedes oldest snapshot {buf.t1d:.6g}")
    if s < buf.t2d:
        return buf.y1 + (s - buf.t1d) / (buf.t2d - buf.t1d) * (buf.y2 - buf.y1)
    if s < buf.tn:
        return buf.y2 + (s - buf.t2d) / (buf.tn - buf.t2d) * (buf.yn - buf.y2)
    return buf.yn + (s - buf.tn) / (t_hat - buf.tn) * (np.asarray(y_hat) - buf.yn)


def advance(buf: DelayBuffer, t_next: float, y_next: np.ndarray, delay: float) -> DelayBuffer:
    """Record an accepted step, shifting the history when it is no longer needed."""
    if t_next < buf.tn:
        raise ValueError("buffer can only move forward in time")
    y_next = np.array(y_next, dtype=float)
    if t_next - delay >= buf.t2d:
        return DelayBuffer(buf.t2d, buf.tn, t_next, buf.y2, buf.yn, y_next, buf.t_start)
    return DelayBuffer(buf.t1d, buf.t2d, t_next, buf.y1, buf.y2, y_next, buf.t_start)
