"""Vector helpers, quadratic metrics, and the shared divergence calculus."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adaopt.core import (
    DimensionMismatch, QuadMetric, SingularMetricError, as_point, bregman,
    delta_term, dir_derivative, dot, dual_norm_sq, numeric_dir_derivative,
    quad_norm_sq,
)
from adaopt import losses


def vec(draw_dim=3, lo=-10.0, hi=10.0):
    return st.lists(st.floats(min_value=lo, max_value=hi, allow_nan=False),
                    min_size=draw_dim, max_size=draw_dim).map(np.array)


def test_as_point_casts_to_float():
    x = as_point([1, 2])
    assert x.dtype == np.float64
    assert np.array_equal(x, [1.0, 2.0])


def test_as_point_rejects_matrices():
    with pytest.raises(ValueError):
        as_point(np.eye(2))


def test_dot_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dot(np.ones(2), np.ones(3))


# -- QuadMetric ----------------------------------------------------------------

def test_metric_norms_hand_values():
    # M = diag(4, 1), x = (2, 3): ||x||_M^2 = 4*4 + 9 = 25
    # g = (2, 3): ||g||_{M,*}^2 = 4/4 + 9/1 = 10
    m = QuadMetric.diagonal([4.0, 1.0])
    assert quad_norm_sq(m, [2.0, 3.0]) == pytest.approx(25.0, abs=1e-14)
    assert dual_norm_sq(m, [2.0, 3.0]) == pytest.approx(10.0, abs=1e-14)


def test_metric_add_mixes_kinds():
    m = QuadMetric.scaled(2.0).add(QuadMetric.diagonal([1.0, 3.0]))
    assert np.allclose(m.diag_weights(2), [3.0, 5.0])
    full = m.add(QuadMetric.full([[1.0, 0.5], [0.5, 1.0]]))
    assert np.allclose(full.as_array(), [[4.0, 0.5], [0.5, 6.0]])


def test_metric_eigs_full_matrix():
    # [[2, 1], [1, 2]] has eigenvalues 1 and 3
    m = QuadMetric.full([[2.0, 1.0], [1.0, 2.0]])
    assert m.min_eig() == pytest.approx(1.0, abs=1e-12)
    assert m.max_eig() == pytest.approx(3.0, abs=1e-12)


def test_metric_sqrt_diagonal():
    m = QuadMetric.diagonal([4.0, 9.0]).sqrt()
    assert np.allclose(m.diag_weights(), [2.0, 3.0])


def test_metric_solve_roundtrip():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4))
    m = QuadMetric.full(a @ a.T + np.eye(4))
    x = rng.normal(size=4)
    assert np.allclose(m.solve(m.matvec(x)), x, atol=1e-10)


def test_metric_shift_identity():
    m = QuadMetric.diagonal([3.0, 5.0]).shift_identity(-1.0)
    assert np.allclose(m.diag_weights(), [2.0, 4.0])


def test_singular_metric_raises_on_dual_norm():
    m = QuadMetric.diagonal([1.0, 0.0])
    assert not m.is_pd()
    with pytest.raises(SingularMetricError):
        dual_norm_sq(m, [1.0, 1.0])


def test_zero_metric_norm():
    m = QuadMetric.zero()
    assert quad_norm_sq(m, [5.0, -2.0]) == 0.0


def test_fenchel_young_equality_case():
    # equality at g = M x: M = diag(2, 0.5), x = (1, 2) -> g = (2, 1),
    # <g, x> = 4 and both halves equal 2
    m = QuadMetric.diagonal([2.0, 0.5])
    x = np.array([1.0, 2.0])
    g = m.matvec(x)
    lhs = dot(g, x)
    assert lhs == pytest.approx(4.0, abs=1e-14)
    assert 0.5 * quad_norm_sq(m, x) + 0.5 * dual_norm_sq(m, g) == pytest.approx(
        lhs, abs=1e-12)


@given(x=vec(), g=vec(), w=st.lists(st.floats(min_value=0.1, max_value=50.0),
                                    min_size=3, max_size=3))
@settings(max_examples=200, deadline=None)
def test_fenchel_young_inequality(x, g, w):
    m = QuadMetric.diagonal(np.array(w))
    gap = 0.5 * quad_norm_sq(m, x) + 0.5 * dual_norm_sq(m, g) - dot(g, x)
    assert gap >= -1e-9 * (1.0 + abs(gap))


# -- directional derivatives and divergences -----------------------------------

def test_dir_derivative_at_cusp():
    # |.| at 0 moving right has one-sided slope 1, moving left also 1
    f = losses.l1_loss(1.0, dim=1)
    assert dir_derivative(f, np.zeros(1), np.array([2.0])) == pytest.approx(
        2.0, abs=1e-12)
    assert dir_derivative(f, np.zeros(1), np.array([-2.0])) == pytest.approx(
        2.0, abs=1e-12)


def test_numeric_dir_derivative_matches_quadratic():
    f = losses.quadratic_loss(np.array([1.0, -1.0]), 2.0)
    x = np.array([0.5, 0.5])
    z = np.array([1.0, 2.0])
    exact = dot(f.grad(x), z)
    got = numeric_dir_derivative(f.value, x, z)
    assert got == pytest.approx(exact, rel=1e-6)


def test_bregman_quadratic_closed_form():
    # B_f(y, x) = (w/2)||y - x||^2 for f = (w/2)||. - c||^2, any center c
    f = losses.quadratic_loss(np.array([3.0, -2.0]), 1.5)
    y = np.array([1.0, 1.0])
    x = np.array([-1.0, 2.0])
    assert bregman(f, y, x) == pytest.approx(0.75 * 5.0, abs=1e-12)


def test_bregman_linear_is_zero():
    f = losses.linear_loss([2.0, -1.0])
    assert bregman(f, np.array([5.0, 5.0]), np.array([-3.0, 0.0])) == 0.0


def test_bregman_l1_hand_value():
    # f = |.|: B(-2, 1) = 2 - 1 - f'(1; -3) = 2 - 1 + 3 = 4
    f = losses.l1_loss(1.0, dim=1)
    assert bregman(f, np.array([-2.0]), np.array([1.0])) == pytest.approx(
        4.0, abs=1e-12)


@given(y=vec(lo=-5, hi=5), x=vec(lo=-5, hi=5),
       w=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=200, deadline=None)
def test_bregman_nonnegative_for_convex(y, x, w):
    f = losses.quadratic_loss(np.zeros(3), w)
    assert bregman(f, y, x) >= -1e-12


def test_delta_term_measures_gradient_error():
    # f = (1/2) x^2, x_t = 1, x* = 0, fed-back g = 0.5 (the true gradient
    # is 1): delta = 0.5 * (0 - 1) - f'(1; -1) = -0.5 + 1 = 0.5
    f = losses.quadratic_loss(np.zeros(1), 1.0)
    d = delta_term(f, np.array([1.0]), np.array([0.0]), np.array([0.5]))
    assert d == pytest.approx(0.5, abs=1e-14)


def test_delta_term_zero_for_exact_gradient():
    f = losses.quadratic_loss(np.array([2.0, 0.0]), 3.0)
    x = np.array([1.0, -1.0])
    assert delta_term(f, x, np.array([0.5, 0.5]), f.grad(x)) == pytest.approx(
        0.0, abs=1e-12)
