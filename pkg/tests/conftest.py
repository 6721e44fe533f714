import numpy as np
import pytest

from invasim.grid import GridSpec
from invasim.model import StateField


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def line_state(grid: GridSpec, c2, v, kappa=1.0, c1=0.0, y=0.0) -> StateField:
    """State that varies along x1 only; each argument is a per-column list or a scalar."""
    def cols(x):
        row = np.broadcast_to(np.asarray(x, dtype=float), (grid.nx,))
        return np.tile(row, grid.ny)
    return StateField.from_components(cols(c1), cols(c2), cols(v), cols(y), cols(kappa))


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
