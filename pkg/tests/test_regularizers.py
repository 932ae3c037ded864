"""Regularizer algebra, proximal checks, and the adaptive schedules."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adaopt.core import INF, QuadMetric, bregman
from adaopt.regularizers import (
    L1, Difference, Indicatrix, Linear, ProximalConditionError, Quadratic,
    RegularizerTriple, ScheduleState, Sum, Zero, adagrad_diag_step,
    adagrad_full_step, adagrad_initial_metric, affine_shift, check_proximal,
    composite_wrap, final_attack_eta, ftrl_prox_increment, optimistic_shift,
    proximal_eta_increment, scale_free_eta, validate_psi_sequence,
)
from adaopt import solvers


BOX = solvers.Box(-np.ones(2), np.ones(2))


def test_zero_is_zero_everywhere():
    z = Zero()
    x = np.array([3.0, -1.0])
    assert z.value(x) == 0.0
    assert z.bregman(x, -x) == 0.0
    assert z.is_zero()


def test_quadratic_hand_values():
    # (3/2)||x - (1,0)||^2_{diag(2,1)} at x = (2, 2): (3/2)(2*1 + 1*4) = 9
    q = Quadratic(np.array([1.0, 0.0]), QuadMetric.diagonal([2.0, 1.0]), 3.0)
    x = np.array([2.0, 2.0])
    assert q.value(x) == pytest.approx(9.0, abs=1e-12)
    assert np.allclose(q.grad(x), [6.0, 6.0])
    # Bregman of a quadratic ignores the center: (3/2)||y - x||^2_M
    y = np.array([0.0, 1.0])
    assert q.bregman(y, x) == pytest.approx(1.5 * (2 * 4 + 1 * 1), abs=1e-12)


def test_quadratic_certification_follows_scale_sign():
    m = QuadMetric.scaled(1.0, 2)
    assert Quadratic(np.zeros(2), m, 0.5).certified()
    assert not Quadratic(np.zeros(2), m, -0.5).certified()


def test_linear_has_no_curvature():
    lin = Linear(np.array([2.0, -1.0]), 3.0)
    x = np.array([1.0, 1.0])
    assert lin.value(x) == pytest.approx(4.0, abs=1e-14)
    assert lin.bregman(np.array([9.0, 9.0]), x) == 0.0


def test_l1_cusp_directional_derivative():
    # at x = (0, 1), direction (1, -1): coordinate 0 contributes +|1|,
    # coordinate 1 contributes sign(1) * (-1); total 0 at alpha = 2
    r = L1(2.0)
    assert r.dir_deriv(np.array([0.0, 1.0]), np.array([1.0, -1.0])) == \
        pytest.approx(0.0, abs=1e-14)
    assert r.grad(np.zeros(2)) == pytest.approx(0.0)


def test_l1_bregman_hand_value():
    r = L1(1.0)
    assert r.bregman(np.array([-2.0]), np.array([1.0])) == pytest.approx(
        4.0, abs=1e-12)


def test_indicatrix_blows_up_outside():
    ind = Indicatrix(BOX)
    assert ind.value(np.array([0.5, 0.5])) == 0.0
    assert ind.value(np.array([2.0, 0.0])) == INF
    assert ind.bregman(np.array([2.0, 0.0]), np.array([0.0, 0.0])) == INF


def test_sum_flattens_and_adds():
    q = Quadratic(np.zeros(2), QuadMetric.scaled(1.0), 1.0)
    s = Sum([q, Sum([L1(1.0), Linear(np.array([1.0, 0.0]))])])
    x = np.array([1.0, -1.0])
    assert s.value(x) == pytest.approx(q.value(x) + 2.0 + 1.0, abs=1e-12)
    assert np.allclose(s.grad(x), q.grad(x) + np.array([1.0, -1.0])
                       + np.array([1.0, 0.0]))


def test_difference_convention_inf_minus_inf():
    ind = Indicatrix(BOX)
    d = Difference(ind, ind)
    outside = np.array([5.0, 0.0])
    assert d.value(outside) == INF
    assert d.value(np.zeros(2)) == 0.0


def test_difference_finite_minus_inf_rejected():
    d = Difference(Zero(), Indicatrix(BOX))
    with pytest.raises(ValueError):
        d.value(np.array([5.0, 0.0]))


def test_difference_of_quadratics_keeps_curvature_gap():
    big = Quadratic(np.zeros(2), QuadMetric.scaled(2.0), 1.0)
    small = Quadratic(np.zeros(2), QuadMetric.scaled(1.0), 1.0)
    d = Difference(big, small)
    x = np.array([1.0, 2.0])
    assert d.value(x) == pytest.approx(0.5 * 5.0, abs=1e-12)
    assert np.allclose(d.grad(x), x)


@given(y=st.lists(st.floats(-5, 5), min_size=2, max_size=2).map(np.array),
       x=st.lists(st.floats(-5, 5), min_size=2, max_size=2).map(np.array),
       v=st.lists(st.floats(-5, 5), min_size=2, max_size=2).map(np.array),
       w=st.floats(-3, 3))
@settings(max_examples=200, deadline=None)
def test_bregman_is_affine_invariant(y, x, v, w):
    f = Quadratic(np.array([0.5, -0.5]), QuadMetric.diagonal([2.0, 0.7]), 1.0)
    shifted = affine_shift(f, v, w)
    assert bregman(shifted, y, x) == pytest.approx(bregman(f, y, x),
                                                   abs=1e-9, rel=1e-9)


# -- proximal condition ---------------------------------------------------------

def test_check_proximal_accepts_centered_quadratic():
    x_t = np.array([0.3, -0.2])
    check_proximal(Quadratic(x_t, QuadMetric.scaled(2.0), 1.0), x_t, BOX)
    check_proximal(Zero(), x_t, BOX)


def test_check_proximal_rejects_offcenter_minimum():
    x_t = np.array([0.3, -0.2])
    wrong = Quadratic(np.array([-0.9, 0.9]), QuadMetric.scaled(1.0), 1.0)
    with pytest.raises(ProximalConditionError):
        check_proximal(wrong, x_t, BOX, rng=np.random.default_rng(0))


def test_check_proximal_rejects_linear():
    with pytest.raises(ProximalConditionError):
        check_proximal(Linear(np.array([1.0, 0.0])), np.zeros(2), BOX,
                       rng=np.random.default_rng(0))


def test_triple_certification():
    x_t = np.zeros(2)
    p = Quadratic(x_t, QuadMetric.scaled(1.0), 1.0)
    triple = RegularizerTriple.build(p, Zero(), Zero(), x_t, BOX)
    assert triple.certified()
    assert triple.r.value(np.array([1.0, 0.0])) == pytest.approx(0.5, abs=1e-14)
    # non-proximal p is rejected outright, not merely flagged
    with pytest.raises(ProximalConditionError):
        RegularizerTriple.build(
            Quadratic(x_t, QuadMetric.scaled(1.0), -1.0), Zero(), Zero(), x_t, BOX)
    # a negative-scale q only drops the certificate
    shrinking_q = Quadratic(x_t, QuadMetric.scaled(1.0), -0.5)
    flagged = RegularizerTriple.build(p, shrinking_q, Zero(), x_t, BOX)
    assert not flagged.certified()


# -- adaptive schedules ----------------------------------------------------------

def test_adagrad_diag_increments_hand_values():
    # gamma0 = 9, eta = 2.  Roots of the accumulated squares:
    #   start (3, 3); after g = (4, 0): (5, 3); after g = (0, 4): (5, 5).
    # Increments divided by eta: (1, 0) then (0, 1).
    state = ScheduleState()
    m1, state = adagrad_diag_step(state, np.array([4.0, 0.0]), eta=2.0, gamma0=9.0)
    assert np.allclose(m1.diag_weights(2), [1.0, 0.0])
    m2, state = adagrad_diag_step(state, np.array([0.0, 4.0]), eta=2.0, gamma0=9.0)
    assert np.allclose(m2.diag_weights(2), [0.0, 1.0])
    assert state.round == 2
    total = adagrad_initial_metric(2, 2.0, 9.0).add(m1).add(m2)
    assert np.allclose(total.diag_weights(2), [2.5, 2.5])


def test_adagrad_diag_rejects_bad_eta():
    with pytest.raises(ValueError):
        adagrad_diag_step(ScheduleState(), np.ones(2), eta=0.0, gamma0=1.0)


def test_adagrad_full_matches_diag_in_one_dim():
    sd, sf = ScheduleState(), ScheduleState()
    for g in ([2.0], [-1.0], [0.5]):
        md, sd = adagrad_diag_step(sd, np.array(g), eta=1.5, gamma0=0.25)
        mf, sf = adagrad_full_step(sf, np.array(g), eta=1.5, gamma0=0.25)
        assert mf.as_array(1)[0, 0] == pytest.approx(md.diag_weights(1)[0],
                                                     abs=1e-12)


def test_adagrad_full_increments_sum_to_root():
    rng = np.random.default_rng(7)
    state = ScheduleState()
    total = np.zeros((3, 3))
    gram = 0.5 * np.eye(3)
    for _ in range(6):
        g = rng.normal(size=3)
        m, state = adagrad_full_step(state, g, eta=1.0, gamma0=0.5)
        total += m.as_array(3)
        gram += np.outer(g, g)
    root = QuadMetric.full(gram).sqrt().as_array(3)
    start = QuadMetric.full(0.5 * np.eye(3)).sqrt().as_array(3)
    assert np.allclose(total, root - start, atol=1e-9)


def test_ftrl_prox_increment_is_proximal():
    x_t = np.array([0.4, 0.1])
    p = ftrl_prox_increment(x_t, QuadMetric.diagonal([0.3, 0.9]))
    check_proximal(p, x_t, BOX)
    assert p.value(x_t) == 0.0


def test_optimistic_shift_telescopes():
    q = Quadratic(np.zeros(2), QuadMetric.scaled(1.0), 1.0)
    shifted = optimistic_shift(q, np.array([1.0, 0.0]), np.array([0.0, 2.0]))
    x = np.array([1.0, 1.0])
    assert shifted.value(x) == pytest.approx(q.value(x) + (-1.0 + 2.0), abs=1e-14)
    same = optimistic_shift(q, np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    assert same is q


def test_scale_free_eta_is_homogeneous():
    a, b = ScheduleState(), ScheduleState()
    g = np.array([0.3, -0.7])
    h = np.array([0.1, 0.1])
    e1 = scale_free_eta(a, g, h, eta0=2.0)
    e2 = scale_free_eta(b, 100.0 * g, 100.0 * h, eta0=2.0)
    assert e2 == pytest.approx(100.0 * e1, rel=1e-12)
    # accumulates across rounds
    e1b = scale_free_eta(a, g, h, eta0=2.0)
    assert e1b == pytest.approx(2.0 * math.sqrt(2.0 * float(np.dot(g - h, g - h))),
                                rel=1e-12)


def test_final_attack_eta_floor_and_errors():
    state = ScheduleState()
    # perfect hint: only the floor 4 R L^2 remains
    eta = final_attack_eta(state, np.ones(2), np.ones(2), radius=2.0, smooth_l=3.0)
    assert eta == pytest.approx(4.0 * 2.0 * 9.0, abs=1e-12)
    with pytest.raises(ValueError):
        final_attack_eta(ScheduleState(), np.ones(2), np.zeros(2),
                         radius=math.inf, smooth_l=1.0)
    with pytest.raises(ValueError):
        final_attack_eta(ScheduleState(), np.ones(2), np.zeros(2),
                         radius=1.0, smooth_l=-1.0)


def test_proximal_eta_increment_schedule_rules():
    x_t = np.array([0.5, 0.5])
    p = proximal_eta_increment(x_t, 3.0, 1.0)
    assert isinstance(p, Quadratic)
    assert p.value(np.array([1.5, 0.5])) == pytest.approx(1.0, abs=1e-12)
    assert proximal_eta_increment(x_t, 2.0, 2.0).is_zero()
    with pytest.raises(ValueError):
        proximal_eta_increment(x_t, 1.0, 3.0)


def test_composite_wrap_settings():
    q = Quadratic(np.zeros(2), QuadMetric.scaled(1.0), 1.0)
    psi = L1(0.5)
    x = np.array([1.0, -1.0])
    for setting in ("known-before", "revealed-after"):
        wrapped = composite_wrap(q, psi, setting)
        assert wrapped.value(x) == pytest.approx(q.value(x) + 1.0, abs=1e-14)
    assert composite_wrap(q, None, "revealed-after") is q
    assert composite_wrap(q, Zero(), "revealed-after") is q
    with pytest.raises(ValueError):
        composite_wrap(q, psi, "sometime")


def test_validate_psi_sequence():
    x1 = np.zeros(2)
    probes = [np.array([0.5, 0.5]), np.array([-1.0, 1.0])]
    validate_psi_sequence([Zero(), Zero()], x1, probes)
    # psi_1(x_1) must vanish
    with pytest.raises(ValueError):
        validate_psi_sequence([Linear(np.zeros(2), 1.0)], x1, probes)
    # the sequence must not increase on any probe
    with pytest.raises(ValueError):
        validate_psi_sequence([L1(0.1), L1(0.2)], x1, probes)
    validate_psi_sequence([L1(0.2), L1(0.1)], x1, probes)
