import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from conftest import J_ORACLE, MU_ORACLE
from fisherstefan.errors import NoCrossing, OutOfRange, SeriesDivergenceWarning
from fisherstefan.profile import (
    ManifoldSeries,
    WaveParameters,
    WaveProfile,
    axis_crossing,
    c_from_mu,
    closed_form_u0,
    evaluate_manifold,
    from_sheared,
    manifold_series,
    mu_curve_is_monotone,
    mu_from_c,
    shoot_profile,
    shooting_crossing,
    to_sheared,
    unstable_eigenvalue,
)

speeds = st.floats(min_value=0.0, max_value=1.99)


@given(speeds)
def test_unstable_eigenvalue_solves_characteristic_equation(c):
    nu = unstable_eigenvalue(c)
    assert nu > 0
    assert abs(nu * nu + c * nu - 1.0) < 1e-14


def test_unstable_eigenvalue_known_values():
    assert unstable_eigenvalue(0.0) == 1.0
    assert unstable_eigenvalue(1.5) == pytest.approx(0.5, abs=1e-16)
    assert unstable_eigenvalue(1.0) == pytest.approx((math.sqrt(5) - 1) / 2, abs=2.3e-16)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.3, 1.0))
def test_shear_round_trip(u, v, nu):
    w, y = to_sheared(u, v, nu)
    u2, v2 = from_sheared(w, y, nu)
    assert u2 == pytest.approx(u, abs=1e-14)
    assert v2 == pytest.approx(v, abs=1e-14)


def test_closed_form_satisfies_boundary_data():
    assert closed_form_u0(0.0) == pytest.approx(0.0, abs=1e-15)
    assert closed_form_u0(-40.0) == pytest.approx(1.0, abs=1e-15)
    z = np.linspace(-10, 0, 2001)
    u = closed_form_u0(z)
    h = z[1] - z[0]
    resid = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2 + u[1:-1] * (1 - u[1:-1])
    assert np.max(np.abs(resid)) < 1e-4


def test_standing_wave_matches_closed_form(wave_c0):
    z = np.linspace(-10, 0, 1001)
    u, v = wave_c0(z)
    assert np.max(np.abs(u - closed_form_u0(z))) < 1e-8
    assert wave_c0.front_slope == pytest.approx(-1 / math.sqrt(3), abs=1e-9)


@pytest.mark.parametrize("c", [0.5, 1.0, 1.5])
def test_shooting_crossing_matches_high_precision(c):
    assert shooting_crossing(c) == pytest.approx(J_ORACLE[c], abs=1e-9)


def test_profile_is_monotone_and_bounded(wave_c1):
    assert np.all(np.diff(wave_c1.u) <= 1e-15)
    assert np.all((wave_c1.u >= 0) & (wave_c1.u <= 1))
    assert wave_c1.u[-1] == 0.0
    assert wave_c1.covers(80.0)


def test_profile_interpolation_uses_derivatives(wave_c1):
    z = np.array([-3.337, -0.0123])
    u, _ = wave_c1(z)
    exact = wave_c1.dense_output(z)[0]
    assert np.max(np.abs(u - exact)) < 1e-9
    with pytest.raises(ValueError):
        wave_c1(0.5)


def test_profile_dict_round_trip(wave_c1):
    again = WaveProfile.from_dict(wave_c1.to_dict())
    assert np.array_equal(again.u, wave_c1.u) and again.c == wave_c1.c


@pytest.mark.parametrize("c", [2.0, 2.5, 3.0])
def test_no_wave_at_or_above_critical_speed(c):
    with pytest.raises(NoCrossing):
        shoot_profile(c)


def test_rejects_negative_speed():
    with pytest.raises(ValueError):
        shoot_profile(-0.1)


@pytest.mark.parametrize("c", [0.0, 0.7, 1.3])
def test_series_solves_invariance_equation(c):
    # (nu w + J) J' = w**2 - J / nu must hold order by order up to the truncation
    s = manifold_series(c, 15)
    J = s.full_coefficients()
    lhs = P.polymul(P.polyadd([0.0, s.nu], J), P.polyder(J))
    rhs = P.polysub([0.0, 0.0, 1.0], J / s.nu)
    resid = P.polysub(lhs, rhs)[: s.order + 1]
    assert np.max(np.abs(resid)) < 1e-14


def test_series_leading_coefficients():
    nu = unstable_eigenvalue(0.8)
    s = manifold_series(0.8, 6)
    a2 = nu / (2 * nu * nu + 1)
    a3 = -2 * a2 * a2 * nu / (3 * nu * nu + 1)
    assert s.coefficient(2) == pytest.approx(a2, rel=1e-15)
    assert s.coefficient(3) == pytest.approx(a3, rel=1e-14)
    assert s.coefficient(0) == 0.0 and s.coefficient(99) == 0.0


def test_series_rejects_bad_inputs():
    s = manifold_series(1.0, 10)
    with pytest.raises(ValueError):
        manifold_series(1.0, 1)
    with pytest.raises(ValueError):
        evaluate_manifold(s, -1.5)


def test_series_near_saddle_matches_shooting(wave_c1):
    s = manifold_series(1.0, 20)
    w, y = wave_c1.sheared()
    near = (w > -0.3) & (w < -0.01)
    approx = evaluate_manifold(s, w[near])
    assert np.max(np.abs(approx - y[near])) < 1e-9


def test_non_contracting_terms_warn():
    s = ManifoldSeries(nu=1.0, coeffs=np.ones(10))
    with pytest.warns(SeriesDivergenceWarning):
        evaluate_manifold(s, -1.0)


@pytest.mark.parametrize("c", [0.5, 1.0, 1.5])
def test_mu_matches_high_precision(c):
    assert mu_from_c(c) == pytest.approx(MU_ORACLE[c], rel=1e-10)


def test_axis_crossing_methods_agree_at_low_speed():
    exact = J_ORACLE[0.5]
    assert axis_crossing(0.5, method="seeded") == pytest.approx(exact, abs=1e-10)
    assert axis_crossing(0.5, order=21, method="pade") == pytest.approx(exact, abs=1e-6)
    with pytest.raises(ValueError):
        axis_crossing(0.5, method="nope")


def test_mu_curve_increasing_and_steep():
    assert mu_curve_is_monotone()
    assert mu_from_c(1.9) > 1e3 * mu_from_c(1.0)


@settings(max_examples=8, deadline=None)
@given(st.floats(min_value=0.05, max_value=1.9))
def test_mu_c_round_trip_property(c):
    assert c_from_mu(mu_from_c(c)) == pytest.approx(c, abs=1e-8)


def test_mu_out_of_range():
    with pytest.raises(OutOfRange) as info:
        c_from_mu(1e12)
    assert info.value.limit == 1.95
    with pytest.raises(ValueError):
        c_from_mu(-1.0)
    with pytest.raises(ValueError):
        mu_from_c(2.0)


def test_wave_parameters():
    p = WaveParameters.from_c(1.0)
    assert p.mu == pytest.approx(MU_ORACLE[1.0], rel=1e-10)
    assert WaveParameters.from_mu(p.mu).c == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        WaveParameters(c=1.0, mu=0.0)
