import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from ccspin.core import (
    CollisionError, MassedConfiguration, batch_potential_gradient, cartesian_gradient,
    center_and_project, hessian_blocks, mass_inner, mass_norm, moment_of_inertia, potential,
    rotate90, third_derivative_tensor, third_directional,
)


@st.composite
def configs(draw, nmin=2, nmax=5):
    n = draw(st.integers(nmin, nmax))
    m = draw(st.lists(st.floats(0.2, 5.0), min_size=n, max_size=n))
    # bodies on a jittered circle keep pair distances bounded below
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    jit = draw(st.lists(st.floats(-0.2, 0.2), min_size=2 * n, max_size=2 * n))
    x = np.column_stack([np.cos(ang), np.sin(ang)]).ravel() + np.array(jit) * (1.0 / n)
    return MassedConfiguration(m, x)


def test_validation():
    with pytest.raises(ValueError):
        MassedConfiguration([1.0, -1.0], [0, 0, 1, 0])
    with pytest.raises(ValueError):
        MassedConfiguration([1.0, 1.0], [0, 0, 1])
    with pytest.raises(ValueError):
        MassedConfiguration([1.0], [0, 0])
    with pytest.raises(ValueError):
        MassedConfiguration([1.0, 1.0], [0, 0, np.nan, 0])


def test_json_round_trip():
    c = MassedConfiguration([1, 2, 3], [0, 0, 1, 0, 0, 1])
    assert MassedConfiguration.from_json(c.to_json()) == c


def test_collision_raises():
    c = MassedConfiguration([1, 1], [0, 0, 0, 0])
    with pytest.raises(CollisionError):
        potential(c)


def test_rotate90_is_complex_structure():
    v = np.arange(6.0)
    assert np.allclose(rotate90(rotate90(v)), -v)
    assert mass_inner(v, rotate90(v), [1, 2, 3]) == pytest.approx(0.0)


@settings(max_examples=40, deadline=None)
@given(configs())
def test_potential_and_gradient_against_oracle(c):
    assert potential(c) == pytest.approx(O.potential(c.masses, c.x), rel=1e-13)
    assert np.allclose(cartesian_gradient(c), O.gradient_fd(c.masses, c.x), rtol=1e-6, atol=1e-7)


@settings(max_examples=40, deadline=None)
@given(configs())
def test_hessian_against_loops(c):
    H = hessian_blocks(c)
    assert np.allclose(H, O.hessian_loops(c.masses, c.x), rtol=1e-12, atol=1e-12)
    assert np.allclose(H, H.T)


@settings(max_examples=20, deadline=None)
@given(configs(3, 4), st.integers(0, 2**32 - 1))
def test_third_derivative_against_fd(c, seed):
    rng = np.random.default_rng(seed)
    u, v, w = rng.standard_normal((3, c.x.size))
    exact = third_directional(c, u, v, w)
    assert exact == pytest.approx(O.third_fd(c.masses, c.x, u, v, w), rel=1e-5, abs=1e-6)
    T = third_derivative_tensor(c, np.array([u, v, w]))
    assert T[0, 1, 2] == pytest.approx(exact, rel=1e-12, abs=1e-12)
    assert np.allclose(T, T.transpose(1, 0, 2)) and np.allclose(T, T.transpose(2, 1, 0))


@settings(max_examples=30, deadline=None)
@given(configs())
def test_homogeneity_and_invariance(c):
    # U is homogeneous of degree -1 and rotation/translation invariant
    assert potential(c.with_x(2 * c.x)) == pytest.approx(potential(c) / 2, rel=1e-13)
    P = c.points @ np.array([[0.6, -0.8], [0.8, 0.6]]).T + [3.0, -1.0]
    assert potential(c.with_x(P.ravel())) == pytest.approx(potential(c), rel=1e-12)
    # Euler: <grad U, x> = -U
    assert np.dot(cartesian_gradient(c), c.x) == pytest.approx(-potential(c), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(configs())
def test_center_and_project(c):
    cc = center_and_project(c)
    assert np.allclose(cc.masses @ cc.points, 0.0, atol=1e-12)
    assert moment_of_inertia(cc) == pytest.approx(mass_norm(cc) ** 2)


def test_batch_matches_single():
    c = MassedConfiguration([1, 2, 3, 4], [0, 0, 1, 0.1, 0.2, 1, -1, 0.5])
    U, G = batch_potential_gradient(c.masses, np.array([c.x, 2 * c.x]))
    assert U[0] == pytest.approx(potential(c)) and U[1] == pytest.approx(potential(c) / 2)
    assert np.allclose(G[0], cartesian_gradient(c))
