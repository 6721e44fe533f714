"""Matrix-free BiCGSTAB for the implicit diffusion stages."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_FLOOR = 1e-14
DEFAULT_MAX_ITER = 1000


@dataclass
class LinearOperator:
    apply: Callable[[np.ndarray], np.ndarray]
    n: int

    @classmethod
    def from_matrix(cls, A) -> "LinearOperator":
        return cls(lambda x: A @ x, A.shape[0])

    def __matmul__(self, x):
        return self.apply(x)


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool
    breakdown: bool = False
    restarts: int = 0


def _bicgstab_sweep(op, b, x, threshold, max_iter, inv_diag):
    """One BiCGSTAB run from ``x``.

    Returns ``(x, iterations, status)`` with status ``"converged"``,
    ``"maxiter"`` or ``"breakdown"``.
    """
    tiny = np.finfo(float).tiny
    r = b - op.apply(x)
    if np.linalg.norm(r) <= threshold:
        return x, 0, "converged"
    r_hat = r.copy()
    rho_old = alpha = omega = 1.0
    v = np.zeros_like(b)
    p = np.zeros_like(b)
    for it in range(1, max_iter + 1):
        rho = r_hat @ r
        if abs(rho) <= tiny:
            return x, it - 1, "breakdown"
        beta = (rho / rho_old) * (alpha / omega)
        p = r + beta * (p - omega * v)
        p_hat = p * inv_diag if inv_diag is not None else p
        v = op.apply(p_hat)
        denom = r_hat @ v
        if abs(denom) <= tiny:
            return x, it - 1, "breakdown"
        alpha = rho / denom
        s = r - alpha * v
        if np.linalg.norm(s) <= threshold:
            return x + alpha * p_hat, it, "converged"
        s_hat = s * inv_diag if inv_diag is not None else s
        t = op.apply(s_hat)
        tt = t @ t
        if tt <= tiny:
            return x + alpha * p_hat, it, "breakdown"
        omega = (t @ s) / tt
        x = x + alpha * p_hat + omega * s_hat
        r = s - omega * t
        if np.linalg.norm(r) <= threshold:
            return x, it, "converged"
        if abs(omega) <= tiny:
            return x, it, "breakdown"
        rho_old = rho
    return x, max_iter, "maxiter"


def bicgstab(op: LinearOperator, b: np.ndarray, x0: np.ndarray | None = None,
             rel_tol: float = DEFAULT_REL_TOL, max_iter: int = DEFAULT_MAX_ITER,
             abs_floor: float = DEFAULT_ABS_FLOOR,
             diagonal: np.ndarray | None = None) -> tuple[np.ndarray, SolveReport]:
    """Solve ``op x = b`` by BiCGSTAB.

    Convergence means ``||b - op x|| <= max(rel_tol * ||b||, abs_floor)``.
    After a breakdown the iteration is restarted once from the current
    iterate.  Exceeding ``max_iter`` is reported, not raised.  Passing the
    operator's ``diagonal`` enables Jacobi right preconditioning.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    b = np.asarray(b, dtype=float)
    if b.shape != (op.n,):
        raise ValueError(f"right-hand side has shape {b.shape}, operator dimension {op.n}")
    x = np.zeros(op.n) if x0 is None else np.array(x0, dtype=float)
    inv_diag = None if diagonal is None else 1.0 / np.asarray(diagonal, dtype=float)
    threshold = max(rel_tol * np.linalg.norm(b), abs_floor)

    total = 0
    restarts = 0
    while True:
        # right preconditioning: iterate on the unpreconditioned x directly
        x, its, status = _bicgstab_sweep(op, b, x, threshold, max_iter - total, inv_diag)
        total += its
        if status != "breakdown" or restarts == 1 or total >= max_iter:
            break
        restarts += 1

    residual = float(np.linalg.norm(b - op.apply(x)))
    converged = residual <= threshold
    return x, SolveReport(iterations=total, final_residual=residual, converged=converged,
                          breakdown=(status == "breakdown" and not converged),
                          restarts=restarts)
