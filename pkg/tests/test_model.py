import numpy as np
import pytest
from hypothesis import given, strategies as st

from invasim.model import (BASE_PARAMS, EXPERIMENT1_PARAMS, DegenerateStateError, ModelParams,
                           StateField, diffusion_coefficient, reaction_expl, reaction_full,
                           reaction_impl)

P = EXPERIMENT1_PARAMS


def w(*vals):
    return np.array(vals, dtype=float)


def test_zero_state_is_fixed_point():
    assert np.all(reaction_expl(P, w(0, 0, 0, 0, 0), 0.0) == 0.0)
    assert np.all(reaction_impl(P, w(0, 0, 0, 0, 0)) == 0.0)


def test_explicit_reaction_examples():
    r = reaction_expl(P.replace(mu_c=1.0, lambda_=0.152), w(1, 0, 0, 0, 0), 0.0)
    assert r == pytest.approx([-0.152, 0.152, 0, 0, 0], abs=1e-15)
    r = reaction_expl(P.replace(q=3.0, M_rate=1.0, chi=0.01), w(0, 0, 0, 0, 1), 1.0)
    assert r == pytest.approx([0, 0, 0, 0, -200.0])


def test_implicit_reaction_examples():
    p = P.replace(k_1=2.0, k_m1=0.06, chi=0.01)
    assert reaction_impl(p, w(0, 0, 0.7, 1, 0))[3] == pytest.approx(-6.0)
    assert reaction_impl(p, w(0, 0, 0, 0, 0))[3] == 0.0
    assert reaction_impl(p, w(0, 0, 1, 0, 0))[3] == pytest.approx(200.0)


def test_diffusion_coefficient_examples():
    p = P.replace(D_c=0.01)
    assert diffusion_coefficient(p, w(0.3, 0.2, 0.5, 0, 0)) == 0.0
    assert diffusion_coefficient(p, w(0, 0, 0.5, 0, 2)) == pytest.approx(0.02)
    assert diffusion_coefficient(p, w(0.5, 0.5, 1, 0, 1)) == pytest.approx(0.005)
    with pytest.raises(DegenerateStateError):
        diffusion_coefficient(p, w(-1, 0, 1, 0, 1))


def test_parameter_validation():
    with pytest.raises(ValueError):
        ModelParams(chi=0.0)
    with pytest.raises(ValueError):
        ModelParams(tau=-1.0)
    with pytest.raises(ValueError):
        ModelParams(q=-0.1)
    assert BASE_PARAMS.delay == pytest.approx(0.2)


def test_state_field_shape():
    s = StateField.zeros(7)
    assert s.n_cells == 7 and s.is_finite()
    with pytest.raises(ValueError):
        StateField(np.zeros((4, 7)))


finite = st.floats(-5, 5, allow_nan=False)


@given(st.lists(finite, min_size=5, max_size=5), finite)
def test_split_sums_to_full_reaction(vals, yd):
    state = np.array(vals)
    full = reaction_full(BASE_PARAMS, state, yd)
    split = reaction_expl(BASE_PARAMS, state, yd) + reaction_impl(BASE_PARAMS, state)
    assert np.allclose(split, full, rtol=1e-13, atol=1e-10)
    assert reaction_expl(BASE_PARAMS, state, yd)[3] == 0.0
    assert np.all(reaction_impl(BASE_PARAMS, state)[[0, 1, 2, 4]] == 0.0)


nonneg = st.floats(0, 5, allow_nan=False)


@given(nonneg, nonneg, nonneg, nonneg, st.floats(0.01, 2))
def test_coefficient_monotonicity(c1, c2, v, kappa, bump):
    base = diffusion_coefficient(P, w(c1, c2, v, 0, kappa))
    assert diffusion_coefficient(P, w(c1, c2, v, 0, kappa + bump)) >= base
    assert diffusion_coefficient(P, w(c1 + bump, c2, v + bump, 0, kappa)) <= base
