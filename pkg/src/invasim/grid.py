"""Uniform square grid with lexicographic cell numbering.

Cells are numbered ``k = i + (j - 1) * nx`` with 1-based ``i`` (along x1)
and ``j`` (along x2).  Field arrays are stored flat in the same order, so a
flat array reshaped to ``(ny, nx)`` has x1 along axis 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Returned by :func:`neighbor` when the neighbour lies outside the domain.
BOUNDARY = 0

#: Direction labels accepted by :func:`neighbor`.
DIRECTIONS = ("+e1", "-e1", "+e2", "-e2")


@dataclass(frozen=True)
class GridSpec:
    a: float
    b: float
    nx: int
    ny: int
    h1: float = field(init=False)
    h2: float = field(init=False)
    n_cells: int = field(init=False)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3x3 cells, got {self.nx}x{self.ny}")
        if not self.b > self.a:
            raise ValueError("domain upper bound must exceed lower bound")
        object.__setattr__(self, "h1", (self.b - self.a) / self.nx)
        object.__setattr__(self, "h2", (self.b - self.a) / self.ny)
        object.__setattr__(self, "n_cells", self.nx * self.ny)

    @classmethod
    def square(cls, n: int, a: float = -2.0, b: float = 2.0) -> "GridSpec":
        return cls(a, b, n, n)

    @property
    def cell_area(self) -> float:
        return self.h1 * self.h2

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of the 2D view of a flat field, ``(ny, nx)``."""
        return (self.ny, self.nx)

    def centers_x1(self) -> np.ndarray:
        return self.a + self.h1 / 2 + self.h1 * np.arange(self.nx)

    def centers_x2(self) -> np.ndarray:
        return self.a + self.h2 / 2 + self.h2 * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinates as two ``(ny, nx)`` arrays."""
        return np.meshgrid(self.centers_x1(), self.centers_x2())

    def as_2d(self, f: np.ndarray) -> np.ndarray:
        return f.reshape(self.shape)


def _check_index(grid: GridSpec, k: int) -> None:
    if not 1 <= k <= grid.n_cells:
        raise IndexError(f"cell index {k} outside 1..{grid.n_cells}")


def index_to_ij(grid: GridSpec, k: int) -> tuple[int, int]:
    """Inverse lexicographic map, both indices 1-based."""
    _check_index(grid, k)
    row = (k - 1) // grid.nx
    return k - row * grid.nx, row + 1


def ij_to_index(grid: GridSpec, i: int, j: int) -> int:
    if not (1 <= i <= grid.nx and 1 <= j <= grid.ny):
        raise IndexError(f"cell ({i}, {j}) outside grid")
    return i + (j - 1) * grid.nx


def cell_center(grid: GridSpec, k: int) -> tuple[float, float]:
    i, j = index_to_ij(grid, k)
    return (grid.a + grid.h1 / 2 + (i - 1) * grid.h1,
            grid.a + grid.h2 / 2 + (j - 1) * grid.h2)


def neighbor(grid: GridSpec, k: int, direction: str) -> int:
    """Index of the adjacent cell in ``direction`` or :data:`BOUNDARY`."""
    _check_index(grid, k)
    nx = grid.nx
    if direction == "+e1":
        return k + 1 if k % nx != 0 else BOUNDARY
    if direction == "-e1":
        return k - 1 if k % nx != 1 else BOUNDARY
    if direction == "+e2":
        return k + nx if k <= nx * (grid.ny - 1) else BOUNDARY
    if direction == "-e2":
        return k - nx if k >= nx + 1 else BOUNDARY
    raise ValueError(f"unknown direction {direction!r}, expected one of {DIRECTIONS}")
