import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlgreen.analysis import (
    LOG_FLOOR,
    Settings,
    build_green,
    er1,
    er2,
    leading_term_dominance,
    make_source,
    run_forced,
)
from nlgreen.models import boussinesq_reduced, kdv_reduced, quadratic_fourth
from nlgreen.quadrature import Grid, GridFunction

GRID = Grid.from_horizon(0.0, 0.01, 1.0)


def const(value):
    return GridFunction.from_function(lambda t: np.full_like(t, value), GRID)


def test_identical_curves_hit_floor():
    a = const(1.0)
    rep = er1(a, a)
    assert rep.max_er == LOG_FLOOR == rep.min_er
    assert rep.metadata["clamped_points"] == len(a)


def test_known_offsets():
    assert er1(const(math.exp(-3)), const(0.0)).max_er == pytest.approx(-3.0)
    assert er1(const(1e-4), const(0.0)).max_er == pytest.approx(-9.2103, abs=1e-4)


@settings(max_examples=30, deadline=None)
@given(shift=st.floats(1e-12, 1e3))
def test_er_is_symmetric(shift):
    a, b = const(0.0), const(shift)
    assert er2(a, b).max_er == er2(b, a).max_er


def test_first_point_excluded_and_plot_stride():
    a = GridFunction.from_function(lambda t: t, GRID)
    rep = er1(a, const(0.0), plot_step=0.1)
    assert rep.metadata["analysis_points"] == 10
    assert rep.min_er == pytest.approx(math.log(0.1))


def test_window_restricts_points():
    a = GridFunction.from_function(lambda t: t + 1e-3, GRID)
    rep = er1(a, const(0.0), window=(0.5, 1.0))
    assert rep.min_er == pytest.approx(math.log(0.501))


def test_unknown_source():
    with pytest.raises(ValueError):
        make_source("cosh", Settings())


def test_zero_source_run_is_zero():
    p = kdv_reduced(1.0)
    run = run_forced(p, build_green(p), "zero", (1, 2), Settings(T=1.0))
    assert not np.any(run.w(1).values) and not np.any(run.reference.values)


def test_delta_run_shifts_back_to_origin():
    p = kdv_reduced(1.0)
    run = run_forced(p, build_green(p), "delta", (1,), Settings(T=0.5, epsilon=0.01))
    assert len(run.reference) == len(run.w(1)) == 501
    assert run.reference.metadata["delta_center"] == pytest.approx(0.06)
    # the delta response starts like t with unit slope
    assert run.reference.values[100] == pytest.approx(0.1, rel=0.02)


def test_homogeneous_kernel_for_quadratic4():
    p = quadratic_fourth(1.0)
    g = build_green(p, settings=Settings(T=2.0))
    assert g.provenance == "homogeneous_solve" and g.order == 0


def test_dominance_ratio_definition():
    p = boussinesq_reduced(1.0, 0.5)
    res = leading_term_dominance(p, build_green(p), Settings(T=2.0), {"sin": (1, 2)})
    assert 0 <= res[0].ratio < 1
    assert res[0].pair == (1, 2)
