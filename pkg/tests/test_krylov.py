import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from invasim.grid import GridSpec
from invasim.krylov import LinearOperator, bicgstab
from invasim.spatial import diffusion_matrix_from_T


def test_identity_in_one_iteration():
    b = np.array([1.0, -2.0, 3.0])
    x, rep = bicgstab(LinearOperator(lambda v: v, 3), b)
    assert rep.converged and rep.iterations <= 1
    assert np.allclose(x, b)


def test_diagonal_and_two_by_two():
    x, rep = bicgstab(LinearOperator.from_matrix(np.diag([2.0, 4.0])), np.array([2.0, 8.0]))
    assert rep.converged and np.allclose(x, [1.0, 2.0], atol=1e-12)
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    x, rep = bicgstab(LinearOperator.from_matrix(A), np.array([3.0, 4.0]))
    assert rep.converged and np.allclose(x, [1.0, 1.0], atol=1e-12)


def test_zero_rhs_and_bad_input():
    x, rep = bicgstab(LinearOperator.from_matrix(np.eye(2)), np.zeros(2))
    assert rep.converged and np.all(x == 0)
    with pytest.raises(ValueError):
        bicgstab(LinearOperator.from_matrix(np.eye(2)), np.zeros(3))
    with pytest.raises(ValueError):
        bicgstab(LinearOperator.from_matrix(np.eye(2)), np.ones(2), rel_tol=0.0)


def test_iteration_cap_is_reported_not_raised():
    g = GridSpec(0.0, 1.0, 30, 30)
    A = sp.identity(g.n_cells) - 10.0 * diffusion_matrix_from_T(g, np.ones(g.n_cells))
    b = np.random.default_rng(0).standard_normal(g.n_cells)
    x, rep = bicgstab(LinearOperator.from_matrix(A), b, max_iter=2)
    assert not rep.converged and rep.iterations == 2
    assert rep.final_residual == pytest.approx(np.linalg.norm(b - A @ x), rel=1e-13)


@settings(max_examples=200)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.booleans())
def test_matches_direct_solve(n, seed, jacobi):
    rng = np.random.default_rng(seed)
    # well-conditioned nonsymmetric systems
    A = rng.uniform(-1, 1, (n, n)) + (n + 1.0) * np.eye(n)
    b = rng.uniform(-1, 1, n)
    x, rep = bicgstab(LinearOperator.from_matrix(A), b, rel_tol=1e-12,
                      diagonal=np.diag(A) if jacobi else None)
    assert rep.converged
    assert np.allclose(x, np.linalg.solve(A, b), rtol=0, atol=1e-9)
    assert rep.final_residual == pytest.approx(np.linalg.norm(b - A @ x), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("n", [25, 50, 100, 200])
def test_stage_systems_converge_within_bound(n):
    g = GridSpec(-2.0, 2.0, n, n)
    rng = np.random.default_rng(n)
    T = rng.uniform(0.0, 0.05, g.n_cells)
    A = sp.identity(g.n_cells, format="csr") - 0.002 * diffusion_matrix_from_T(g, T)
    b = rng.uniform(0, 1, g.n_cells)
    x, rep = bicgstab(LinearOperator.from_matrix(A), b, rel_tol=1e-10,
                      max_iter=int(10 * np.sqrt(g.n_cells)))
    assert rep.converged
    assert np.linalg.norm(b - A @ x) <= 1e-10 * np.linalg.norm(b)
