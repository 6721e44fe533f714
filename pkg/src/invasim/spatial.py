"""Finite-volume operators for the migrating-cell equation.

Diffusion uses the three-point central stencil per direction with
arithmetically averaged face coefficients.  Haptotactic advection uses a
central-upwind flux on MC-limited linear reconstructions of ``c2``.  Both
operators close the boundary with mirrored ghost cells, which makes every
boundary face flux vanish (zero total flux through the boundary).

Functions that take a ``state`` expect a ``(5, n_cells)`` array; the scalar
building blocks (:func:`minmod`, :func:`mc_slope`, ...) broadcast.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import GridSpec
from .model import C2, KAPPA, V, ModelParams, diffusion_coefficient

FLUX_ORIENTATIONS = ("upwind", "downwind")


def minmod(v1, v2, v3):
    """Three-argument minmod: smallest magnitude if signs agree, else 0."""
    v1, v2, v3 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (v1, v2, v3)))
    out = np.zeros(v1.shape)
    pos = (v1 > 0) & (v2 > 0) & (v3 > 0)
    neg = (v1 < 0) & (v2 < 0) & (v3 < 0)
    out[pos] = np.minimum(np.minimum(v1, v2), v3)[pos]
    out[neg] = np.maximum(np.maximum(v1, v2), v3)[neg]
    return out if out.ndim else float(out)


def mc_slope(c_minus, c_center, c_plus):
    """Monotonized-central half-cell increment.

    ``minmod(c - c_minus, (c_plus - c_minus) / 4, c_plus - c)``.  The result
    is added to (subtracted from) the cell value to obtain the right (left)
    face value.
    """
    c_minus = np.asarray(c_minus, dtype=float)
    c_plus = np.asarray(c_plus, dtype=float)
    return minmod(c_center - c_minus, 0.25 * (c_plus - c_minus), c_plus - c_center)


def local_speed(params: ModelParams, v_left, kappa_left, v_right, kappa_right, h):
    """Haptotactic face speed ``P`` from cell averages on both sides."""
    g_left = kappa_left * v_left / (1.0 + v_left)
    g_right = kappa_right * v_right / (1.0 + v_right)
    return 0.5 * params.D_h * (g_left + g_right) * (v_right - v_left) / h


def numerical_flux(P, c2_minus, c2_plus, orientation: str = "upwind"):
    """Face flux ``H`` from the speed and the two reconstructed values.

    ``c2_minus`` is the reconstruction from the cell on the negative side of
    the face, ``c2_plus`` from the cell on the positive side.  ``"upwind"``
    takes the value the transport comes from; ``"downwind"`` takes the
    opposite one (P >= 0 picks ``c2_plus``), kept for comparison only.
    """
    P = np.asarray(P, dtype=float)
    if orientation == "upwind":
        out = np.where(P >= 0.0, P * c2_minus, P * c2_plus)
    elif orientation == "downwind":
        out = np.where(P >= 0.0, P * c2_plus, P * c2_minus)
    else:
        raise ValueError(f"orientation must be one of {FLUX_ORIENTATIONS}")
    return out if out.ndim else float(out)


@dataclass
class FluxWorkspace:
    """Per-face and per-cell intermediates of one advection evaluation.

    Face arrays include the boundary faces: ``speeds_x`` and ``fluxes_x``
    have shape ``(ny, nx + 1)``, the ``_y`` arrays ``(ny + 1, nx)``, and the
    outermost entries are zero.
    """

    slopes_x: np.ndarray
    slopes_y: np.ndarray
    speeds_x: np.ndarray
    speeds_y: np.ndarray
    fluxes_x: np.ndarray
    fluxes_y: np.ndarray
    h1: float
    h2: float


def _ghosted(f2d: np.ndarray) -> np.ndarray:
    return np.pad(f2d, 1, mode="edge")


def compute_fluxes(grid: GridSpec, params: ModelParams, state: np.ndarray,
                   orientation: str = "upwind") -> FluxWorkspace:
    c2 = grid.as_2d(state[C2])
    v = grid.as_2d(state[V])
    kappa = grid.as_2d(state[KAPPA])
    cg = _ghosted(c2)

    s_x = mc_slope(cg[1:-1, :-2], c2, cg[1:-1, 2:])
    s_y = mc_slope(cg[:-2, 1:-1], c2, cg[2:, 1:-1])

    ny, nx = grid.shape
    P_x = np.zeros((ny, nx + 1))
    P_y = np.zeros((ny + 1, nx))
    P_x[:, 1:-1] = local_speed(params, v[:, :-1], kappa[:, :-1], v[:, 1:], kappa[:, 1:], grid.h1)
    P_y[1:-1, :] = local_speed(params, v[:-1, :], kappa[:-1, :], v[1:, :], kappa[1:, :], grid.h2)

    H_x = np.zeros_like(P_x)
    H_y = np.zeros_like(P_y)
    H_x[:, 1:-1] = numerical_flux(P_x[:, 1:-1], c2[:, :-1] + s_x[:, :-1],
                                  c2[:, 1:] - s_x[:, 1:], orientation)
    H_y[1:-1, :] = numerical_flux(P_y[1:-1, :], c2[:-1, :] + s_y[:-1, :],
                                  c2[1:, :] - s_y[1:, :], orientation)
    return FluxWorkspace(s_x, s_y, P_x, P_y, H_x, H_y, grid.h1, grid.h2)


def advection_from_fluxes(grid: GridSpec, ws: FluxWorkspace) -> np.ndarray:
    """Flux differences of a workspace as a ``(5, n_cells)`` field."""
    div = (np.diff(ws.fluxes_x, axis=1) / ws.h1 + np.diff(ws.fluxes_y, axis=0) / ws.h2)
    out = np.zeros((5, grid.n_cells))
    out[C2] = div.ravel()
    return out


def advection_apply(grid: GridSpec, params: ModelParams, state: np.ndarray,
                    orientation: str = "upwind") -> np.ndarray:
    """Discrete advection operator ``A``; enters the equations as ``-A``."""
    return advection_from_fluxes(grid, compute_fluxes(grid, params, state, orientation))


def _face_coefficients(grid: GridSpec, T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Averaged face coefficients over h^2, zero on boundary faces."""
    ny, nx = grid.shape
    T = grid.as_2d(T)
    kx = np.zeros((ny, nx + 1))
    ky = np.zeros((ny + 1, nx))
    kx[:, 1:-1] = 0.5 * (T[:, :-1] + T[:, 1:]) / grid.h1**2
    ky[1:-1, :] = 0.5 * (T[:-1, :] + T[1:, :]) / grid.h2**2
    return kx, ky


def _stencil_from_faces(grid: GridSpec, kx: np.ndarray, ky: np.ndarray,
                        c2: np.ndarray) -> np.ndarray:
    c = grid.as_2d(c2)
    fx = kx[:, 1:-1] * (c[:, 1:] - c[:, :-1])
    fy = ky[1:-1, :] * (c[1:, :] - c[:-1, :])
    out = np.zeros_like(c)
    out[:, :-1] += fx
    out[:, 1:] -= fx
    out[:-1, :] += fy
    out[1:, :] -= fy
    return out.ravel()


def diffusion_stencil(grid: GridSpec, T: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """Central-difference ``div(T grad c2)`` on flat arrays."""
    kx, ky = _face_coefficients(grid, T)
    return _stencil_from_faces(grid, kx, ky, c2)


def frozen_diffusion(grid: GridSpec, T: np.ndarray):
    """Matrix-free form of the stencil with coefficients ``T`` held fixed.

    Returns ``(apply, diagonal)`` where ``apply(c2)`` evaluates the stencil
    and ``diagonal`` holds the stencil's diagonal entries.
    """
    kx, ky = _face_coefficients(grid, T)
    diagonal = -(kx[:, 1:] + kx[:, :-1] + ky[1:, :] + ky[:-1, :]).ravel()
    return (lambda c2: _stencil_from_faces(grid, kx, ky, c2)), diagonal


def diffusion_apply(grid: GridSpec, params: ModelParams, state: np.ndarray) -> np.ndarray:
    out = np.zeros((5, grid.n_cells))
    out[C2] = diffusion_stencil(grid, diffusion_coefficient(params, state), state[C2])
    return out


def diffusion_matrix_from_T(grid: GridSpec, T: np.ndarray) -> sp.csr_matrix:
    kx, ky = _face_coefficients(grid, T)
    nx = grid.nx
    east = kx[:, 1:].ravel()
    west = kx[:, :-1].ravel()
    north = ky[1:, :].ravel()
    south = ky[:-1, :].ravel()
    main = -(east + west + north + south)
    # east[k] couples k to k+1; it is zero on the last column, so no wrap-around
    return sp.diags(
        [main, east[:-1], west[1:], north[:-nx], south[nx:]],
        [0, 1, -1, nx, -nx],
        format="csr",
    )


def diffusion_operator_matrix(grid: GridSpec, params: ModelParams,
                              frozen_state: np.ndarray) -> sp.csr_matrix:
    """Sparse matrix of the diffusion stencil acting on ``c2``.

    Coefficients are evaluated once at ``frozen_state``; the result is linear
    in ``c2``.
    """
    return diffusion_matrix_from_T(grid, diffusion_coefficient(params, frozen_state))
