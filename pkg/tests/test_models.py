import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlgreen.models import (
    SingularityError,
    boussinesq_reduced,
    boussinesq_strengths,
    cnoidal_solution,
    kdv_reduced,
    kdv_soliton,
    quadratic_fourth,
    series_coefficients,
    snoidal_period,
    snoidal_solution,
    traveling_wave_map,
)


def residual_of(problem, t):
    return problem.residual(problem.closed_form_derivatives(t, problem.order))


@pytest.mark.parametrize("c", [0.25, 1.0, 3.0])
def test_kdv_closed_form_residual(c):
    p = kdv_reduced(c)
    t = np.linspace(1e-3, 5, 2001)
    assert np.max(np.abs(residual_of(p, t))) < 1e-9


def test_kdv_soliton_value_at_origin():
    u, _ = kdv_soliton(1.0)
    assert u(np.array([0.0]))[0] == pytest.approx(-0.5)


def test_kdv_with_offset_has_no_closed_form():
    assert kdv_reduced(1.0, c0=0.2).closed_form is None


@pytest.mark.parametrize("v,c", [(1.0, 0.5), (2.0, 0.9), (0.5, 0.1)])
def test_snoidal_residual_over_one_period(v, c):
    p = boussinesq_reduced(v, c)
    t = np.linspace(0.0, snoidal_period(v, c), 4001)[1:]
    assert np.max(np.abs(residual_of(p, t))) < 1e-8


def test_cnoidal_residual():
    u, derivs = cnoidal_solution(1.0, 0.4)
    p = boussinesq_reduced(1.0, None)
    t = np.linspace(0.01, 5, 500)
    d = derivs(t, 4)
    assert np.max(np.abs(p.residual(d))) < 1e-9


def test_cnoidal_singular_modulus():
    with pytest.raises(SingularityError):
        cnoidal_solution(1.0, math.sqrt(0.5))


def test_cnoidal_beyond_singular_modulus():
    with pytest.raises(ValueError):
        cnoidal_solution(1.0, 0.9)


def test_snoidal_modulus_range():
    with pytest.raises(ValueError):
        snoidal_solution(1.0, 1.5)


def test_boussinesq_strength_candidates():
    s = boussinesq_strengths(1.0, 0.5)
    assert s["quoted_strength"] == pytest.approx(-0.75 * 0.25 / 1.25 ** 2)
    assert s["jump_strength"] == pytest.approx(2 * s["quoted_strength"])


def test_series_leading_coefficients_exact():
    v, s = Fraction(3), Fraction(2)
    ser = series_coefficients(v, s, 8)
    a = ser.coefficients
    assert a[:4] == (0, 0, 0, s / 6)
    assert a[4] == 0
    assert a[5] == v * v * s / 120


@settings(max_examples=30, deadline=None)
@given(v=st.integers(-5, 5), s=st.integers(-5, 5))
def test_series_alpha5_property(v, s):
    a = series_coefficients(Fraction(v), Fraction(s), 6).coefficients
    assert a[5] == Fraction(v * v * s, 120)


def test_series_satisfies_ode_near_origin():
    # truncated series leaves a residual O(t^(M-3)) in the ODE
    ser = series_coefficients(1.0, 1.0, 14)
    p = quadratic_fourth(1.0)
    a = np.array(ser.coefficients)
    t = np.array([0.05, 0.1])
    derivs = [np.polyval(np.polyder(a[::-1], k), t) if k else np.polyval(a[::-1], t) for k in range(5)]
    assert np.max(np.abs(p.residual(derivs))) < 1e-12


def test_series_rejects_bad_start():
    ser = series_coefficients(1.0, 1.0, 6)
    with pytest.raises(ValueError):
        type(ser)((0, 0, 1.0, 1 / 6, 0), 1.0, 1.0)


def test_traveling_wave_map():
    assert traveling_wave_map(2.0, 1.0, speed=0.5) == pytest.approx(1.5)
    assert traveling_wave_map(2.0, 1.0, speed=0.5, shift=1.0) == pytest.approx(0.5)
