import numpy as np
import pytest

from nlgreen.expansion import (
    DegenerateBasisError,
    ExpansionCoefficients,
    expansion_basis,
    fit_coefficients,
    leading_order_solution,
    short_time_partial_sum,
    source_antiderivative,
)
from nlgreen.greens import GreenFunction, wrap_closed_form
from nlgreen.ivp import IvpConfig, solve_reference
from nlgreen.models import kdv_reduced, linear_problem
from nlgreen.quadrature import Grid, GridFunction

GRID = Grid.from_horizon(0.0, 1e-3, 1.0)


def source(fn):
    return GridFunction.from_function(fn, GRID)


def kdv_green():
    return wrap_closed_form(kdv_reduced(1.0))


def test_fit_recovers_planted_coefficients():
    G, f = kdv_green(), source(np.exp)
    basis = expansion_basis(G, f, 1)
    target = f.with_values(2.0 * basis[0].values - 0.5 * basis[1].values)
    coeffs = fit_coefficients(G, f, target, 1)
    np.testing.assert_allclose(coeffs.a, [2.0, -0.5], rtol=1e-9)
    assert coeffs.fit_residual < 1e-12


def test_order_one_kernel_uses_antiderivative():
    G, f = kdv_green(), source(np.ones_like)
    F = source_antiderivative(G, f)
    np.testing.assert_allclose(F.values, F.t, atol=1e-12)


def test_linear_oscillator_leading_coefficient_is_one():
    # u'' + u = f with zero data is exactly int sin(t - s) f(s) ds
    p = linear_problem([1.0, 0.0])
    G = GreenFunction(0, 1.0, np.sin, "closed_form")
    f = source(np.exp)
    ref = solve_reference(p, np.exp, None, IvpConfig(T=1.0, dt=1e-3))
    coeffs = fit_coefficients(G, f, ref, 0)
    assert coeffs.a[0] == pytest.approx(1.0, abs=1e-5)
    w = leading_order_solution(G, f)
    assert np.max(np.abs(w.values - ref.values)) < 1e-6


def test_fit_residual_nests_in_n():
    G, f = kdv_green(), source(np.exp)
    ref = solve_reference(kdv_reduced(1.0), np.exp, None, IvpConfig(T=1.0, dt=1e-3))
    basis = expansion_basis(G, f, 4)
    residuals = [fit_coefficients(G, f, ref, N, basis=basis).fit_residual for N in range(5)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(residuals, residuals[1:]))


def test_partial_sum_matches_manual_sum():
    G, f = kdv_green(), source(np.sin)
    coeffs = ExpansionCoefficients((1.5, -0.25))
    sol = short_time_partial_sum(G, f, coeffs)
    basis = expansion_basis(G, f, 1)
    np.testing.assert_allclose(sol.w.values, 1.5 * basis[0].values - 0.25 * basis[1].values)
    assert sol.N == 1 and sol.green_order == 1


def test_zero_source_gives_zero_coefficients():
    G, f = kdv_green(), source(np.zeros_like)
    coeffs = fit_coefficients(G, f, f, 2)
    assert coeffs.a == (0.0, 0.0, 0.0)


def test_window_past_horizon_rejected():
    G, f = kdv_green(), source(np.exp)
    with pytest.raises(ValueError):
        fit_coefficients(G, f, f, 0, window=(0.0, 2.0))


def test_degenerate_basis_detected():
    G, f = kdv_green(), source(np.exp)
    with pytest.raises(DegenerateBasisError):
        fit_coefficients(G, f, f, 3, window=(0.0, 0.003))


def test_coefficient_report_lists_terms():
    text = ExpansionCoefficients((1.0, 2.0), (0.0, 1.0), 0.1, 3.0).report()
    assert "a1: 2.0" in text and text.startswith("N: 1")
