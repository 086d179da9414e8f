
import numpy as np
import pytest

from nlgreen.greens import (
    GreenFunction,
    HomogeneityError,
    Nonlinearity,
    build_green_from_homogeneous,
    check_generalized_homogeneity,
    singular_part,
    wrap_closed_form,
)
from nlgreen.ivp import IvpConfig
from nlgreen.models import boussinesq_reduced, kdv_reduced, linear_problem, quadratic_fourth
from nlgreen.quadrature import Grid
from nlgreen.special import sech


def test_homogeneity_holds_for_kdv():
    p = kdv_reduced(1.0)
    assert check_generalized_homogeneity(p.nonlinearity, [[0.3, -1.0]]).holds


def test_homogeneity_fails_with_constant_term():
    N = Nonlinearity(2, lambda s: s[0] ** 2 + 1.0, "w^2 + 1")
    rep = check_generalized_homogeneity(N, [[1.0, 1.0]])
    assert not rep.holds
    assert rep.zero_value == 1.0


def test_build_rejects_inhomogeneous_nonlinearity():
    p = linear_problem([1.0, 0.0])
    bad = type(p)("bad", 2, Nonlinearity(2, lambda s: s[0] + 2.0), {})
    with pytest.raises(HomogeneityError):
        build_green_from_homogeneous(bad, 1.0, IvpConfig(T=1.0))


def test_singular_part_examples():
    assert singular_part([0.0, 1.0], 2) == {1: 0.0, 0: 1.0}
    assert singular_part([-0.5, 0.0], 2) == {1: -0.5, 0: 0.0}
    assert singular_part([0, 0, 0, 2.0], 4) == {3: 0, 2: 0, 1: 0, 0: 2.0}


def test_theta_sin_is_linear_green_function():
    p = linear_problem([1.0, 0.0])
    g = build_green_from_homogeneous(p, 1.0, IvpConfig(T=5.0, dt=1e-3))
    assert g.order == 0 and g.strength == 1.0
    t = np.linspace(0.01, 5, 50)
    assert np.max(np.abs(g(t) - np.sin(t))) < 1e-9
    assert g(0.0) == 0.0
    assert g(-1.0) == 0.0


def test_zero_strength_gives_zero_kernel():
    g = build_green_from_homogeneous(quadratic_fourth(1.0), 0.0, IvpConfig(T=2.0))
    assert np.all(g.sample(Grid.from_horizon(0, 1e-3, 2.0)).values == 0.0)


def test_sample_respects_horizon():
    g = build_green_from_homogeneous(quadratic_fourth(1.0), 1.0, IvpConfig(T=1.0))
    with pytest.raises(ValueError):
        g.sample(Grid.from_horizon(0, 1e-3, 2.0))


def test_sample_right_limit_switch():
    g = wrap_closed_form(kdv_reduced(1.0))
    grid = Grid.from_horizon(0, 1e-2, 1.0)
    assert g.sample(grid).values[0] == pytest.approx(-0.5)
    assert g.sample(grid, right_limit=False).values[0] == 0.0


def test_kdv_from_cauchy_data_matches_closed_form():
    c = 1.0
    g = build_green_from_homogeneous(kdv_reduced(c), 0.0, IvpConfig(T=5.0, dt=1e-3), cauchy=(-c / 2, 0.0))
    assert g.order == 1 and g.strength == -0.5
    t = g.state[0].t
    assert np.max(np.abs(g.state[0].values + 0.5 * sech(t / 2) ** 2)) < 1e-6


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_kdv_closed_form_strength(c):
    g = wrap_closed_form(kdv_reduced(c), measure=True)
    assert g.order == 1
    assert g.metadata["jump_strength"] == pytest.approx(-c / 2)
    assert g.strength == pytest.approx(-c / 2, rel=0.02)


def test_boussinesq_metadata_records_both_strengths():
    g = wrap_closed_form(boussinesq_reduced(1.0, 0.5))
    meta = g.metadata
    assert meta["quoted_strength"] == pytest.approx(-0.12)
    assert meta["jump_strength"] == pytest.approx(-0.24)
    assert meta["measured_strength"] == pytest.approx(-0.24, rel=1e-6)


def test_metadata_text_is_key_value():
    text = wrap_closed_form(kdv_reduced(1.0)).metadata_text()
    assert text.splitlines()[0] == "provenance: closed_form"
    assert all(": " in line for line in text.splitlines())


def test_unknown_provenance_rejected():
    with pytest.raises(ValueError):
        GreenFunction(0, 1.0, np.sin, "guess")
