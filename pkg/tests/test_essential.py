import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fisherstefan.errors import NumericalFailure
from fisherstefan.essential import (
    Region,
    apply_resolvent,
    border_curve,
    classify_lambda,
    derivative_jump,
    far_field_operator,
    fredholm_border,
    greens_dx,
    greens_function,
    q_essential_border,
    resolvent_residual,
)

speeds = st.floats(min_value=0.0, max_value=3.0)


def test_border_apex():
    curve = border_curve(1.3, k_max=5, n=201)
    assert np.max(curve.lam.real) == -1.0
    assert fredholm_border(0.7, 0.0) == -1.0 + 0j


@given(st.floats(1e-3, 3.0), st.floats(-20, 20))
def test_border_points_classified_as_border(c, k):
    assert classify_lambda(c, fredholm_border(c, k)) is Region.BORDER


@given(st.floats(0.0, 20.0), st.floats(0.01, 5))
def test_standing_case_has_no_interior(k, shift):
    lam = fredholm_border(0.0, k)
    assert classify_lambda(0.0, lam) is Region.BORDER
    assert classify_lambda(0.0, -1.0 + shift) is Region.RESOLVENT
    assert classify_lambda(0.0, lam + 1j * shift) is Region.RESOLVENT


@given(st.floats(0.1, 3.0), st.floats(-10, 10), st.floats(0.01, 5))
def test_right_of_border_resolvent_left_interior(c, k, shift):
    lam = fredholm_border(c, k)
    assert classify_lambda(c, lam + shift) is Region.RESOLVENT
    assert classify_lambda(c, lam - shift) is Region.ESSENTIAL_INTERIOR


def test_q_border():
    assert q_essential_border(1.0) == -1.25
    with pytest.raises(ValueError):
        q_essential_border(-1)


@settings(max_examples=30)
@given(st.floats(0, 2), st.floats(-0.9, 5), st.floats(-3, 3), st.floats(-10, -0.5))
def test_derivative_jump_is_one(c, re, im, y):
    lam = complex(re, im)
    if classify_lambda(c, lam) is not Region.RESOLVENT:
        return
    assert abs(derivative_jump(c, lam, y, eps=1e-5) - 1.0) < 1e-8


def test_greens_boundary_and_continuity():
    c, lam = 1.0, 0.5 + 0.3j
    y = -2.0
    assert abs(greens_function(c, lam, 0.0, y)) < 1e-15
    left = greens_function(c, lam, y - 1e-9, y)
    right = greens_function(c, lam, y + 1e-9, y)
    assert abs(left - right) < 1e-8
    # symmetric-in-time analytic derivative matches differences away from the kink
    x = -3.0
    fd = (greens_function(c, lam, x + 1e-6, y) - greens_function(c, lam, x - 1e-6, y)) / 2e-6
    assert abs(fd - greens_dx(c, lam, x, y)) < 1e-8


def test_greens_real_for_real_lambda_and_finite_far_out():
    g = greens_function(1.0, 2.0, np.array([-500.0, -1.0]), -700.0)
    assert np.isrealobj(g) and np.all(np.isfinite(g))


def test_greens_rejects_spectrum():
    with pytest.raises(ValueError):
        greens_function(1.0, -3.0, -1.0, -2.0)
    with pytest.raises(ValueError):
        greens_function(1.0, 1.0, 0.5, -2.0)


def test_resolvent_exact_solution():
    # p = z e^z / 3 solves p'' + p' - 2 p = e^z with p(0) = 0
    z, p = apply_resolvent(1.0, 1.0, np.exp, L=40, nodes=10001)
    assert np.max(np.abs(p - z * np.exp(z) / 3)) < 1e-10


@pytest.mark.parametrize("lam", [0.5, 1.0 + 2.0j, -0.5 + 0.5j])
def test_manufactured_solution(lam):
    c = 0.8
    z = np.linspace(-40, 0, 8001)
    exact = z * np.exp(z)
    f = (z + 2) * np.exp(z) + c * (1 + z) * np.exp(z) - (1 + lam) * exact
    _, p = apply_resolvent(c, lam, f, z)
    assert np.max(np.abs(p - exact)) < 1e-8
    assert resolvent_residual(c, lam, z, f, p) < 1e-6


def test_residual_fourth_order_then_second_order_stencil():
    c, lam = 1.0, 0.7
    r = []
    for nodes in (1001, 2001):
        z, p = apply_resolvent(c, lam, np.exp, L=20, nodes=nodes)
        applied, inner = far_field_operator(c, lam, z, p, order=2)
        r.append(np.max(np.abs(applied - np.exp(z)[inner])))
    assert r[0] / r[1] == pytest.approx(4.0, rel=0.05)


def test_convergence_check_passes():
    apply_resolvent(1.0, 1.0, np.exp, L=20, nodes=2001, check_convergence=True)


def test_convergence_check_flags_unresolved_data():
    # a grid-scale zigzag is invisible on every other node, so refining cannot help
    z = np.linspace(-20, 0, 41)
    f = (-1.0) ** np.arange(z.size)
    with pytest.raises(NumericalFailure):
        apply_resolvent(1.0, 1.0, f, z, check_convergence=True)


def test_apply_resolvent_validates_grid():
    with pytest.raises(ValueError):
        apply_resolvent(1.0, 1.0, np.ones(5), np.linspace(-1, 1, 5))
    with pytest.raises(ValueError):
        apply_resolvent(1.0, -5.0, np.exp)
