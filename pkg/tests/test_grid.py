import pytest
from hypothesis import given, strategies as st

from invasim.grid import BOUNDARY, GridSpec, cell_center, ij_to_index, index_to_ij, neighbor


def test_cell_centers_on_unit_spacing():
    g = GridSpec(-2.0, 2.0, 4, 4)
    assert g.h1 == g.h2 == 1.0
    assert cell_center(g, 1) == (-1.5, -1.5)
    assert cell_center(g, 16) == (1.5, 1.5)
    assert cell_center(g, 6) == (-0.5, -0.5)


def test_neighbor_examples():
    g = GridSpec(0.0, 1.0, 3, 3)
    assert neighbor(g, 1, "+e1") == 2
    assert neighbor(g, 3, "+e1") == BOUNDARY
    assert neighbor(g, 2, "+e2") == 5
    assert neighbor(g, 4, "-e1") == BOUNDARY
    assert neighbor(g, 2, "-e2") == BOUNDARY
    assert neighbor(g, 8, "+e2") == BOUNDARY


def test_invalid_grid_and_index():
    with pytest.raises(ValueError):
        GridSpec(0.0, 1.0, 2, 5)
    g = GridSpec(0.0, 1.0, 3, 3)
    for k in (0, 10):
        with pytest.raises(IndexError):
            cell_center(g, k)
        with pytest.raises(IndexError):
            neighbor(g, k, "+e1")


def test_stored_spacings():
    g = GridSpec(-2.0, 2.0, 5, 8)
    assert g.h1 == 4.0 / 5 and g.h2 == 4.0 / 8
    assert g.n_cells == 40


grids = st.builds(lambda nx, ny: GridSpec(-2.0, 2.0, nx, ny),
                  st.integers(3, 12), st.integers(3, 12))


@given(grids, st.data())
def test_index_round_trip(g, data):
    k = data.draw(st.integers(1, g.n_cells))
    i, j = index_to_ij(g, k)
    assert 1 <= i <= g.nx and 1 <= j <= g.ny
    assert ij_to_index(g, i, j) == k


@given(grids, st.data())
def test_neighbor_inverse_and_boundary_cells(g, data):
    k = data.draw(st.integers(1, g.n_cells))
    i, j = index_to_ij(g, k)
    for plus, minus in (("+e1", "-e1"), ("+e2", "-e2")):
        m = neighbor(g, k, plus)
        if m != BOUNDARY:
            assert neighbor(g, m, minus) == k
    assert (neighbor(g, k, "+e1") == BOUNDARY) == (i == g.nx)
    assert (neighbor(g, k, "-e1") == BOUNDARY) == (i == 1)
    assert (neighbor(g, k, "+e2") == BOUNDARY) == (j == g.ny)
    assert (neighbor(g, k, "-e2") == BOUNDARY) == (j == 1)
