import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlgreen.special import (
    EllipticDomainError,
    agm,
    complete_elliptic_k,
    complete_elliptic_k_series,
    jacobi_sn_cn_dn,
    sech,
)

moduli = st.floats(min_value=0.0, max_value=0.999, allow_nan=False)


def mp_sn_cn_dn(u, k):
    with mpmath.workdps(30):
        m = mpmath.mpf(k) ** 2  # squaring in double precision shifts K noticeably near k = 1
    with mpmath.workdps(30):
        return [float(mpmath.ellipfun(name, u, m=m)) for name in ("sn", "cn", "dn")]


def test_agm_of_equal_arguments():
    assert agm(2.0, 2.0) == 2.0


def test_k_at_zero_is_half_pi():
    assert complete_elliptic_k(0.0) == pytest.approx(math.pi / 2, abs=1e-15)


def test_k_at_sqrt_half_matches_series():
    k = math.sqrt(0.5)
    assert complete_elliptic_k(k) == pytest.approx(complete_elliptic_k_series(k), abs=1e-13)
    assert complete_elliptic_k(k) == pytest.approx(1.8540746773013719, abs=1e-14)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.999])
def test_k_against_mpmath(k):
    assert complete_elliptic_k(k) == pytest.approx(float(mpmath.ellipk(k * k)), rel=1e-14)


@pytest.mark.parametrize("k", [1.0, 1.5, -0.1, float("nan")])
def test_k_domain(k):
    with pytest.raises(EllipticDomainError):
        complete_elliptic_k(k)


def test_degenerate_moduli():
    u = np.linspace(-3, 3, 13)
    sn, cn, dn = jacobi_sn_cn_dn(u, 0.0)
    np.testing.assert_allclose(sn, np.sin(u), atol=1e-15)
    np.testing.assert_allclose(cn, np.cos(u), atol=1e-15)
    np.testing.assert_allclose(dn, 1.0)
    sn, cn, dn = jacobi_sn_cn_dn(u, 1.0)
    np.testing.assert_allclose(sn, np.tanh(u), atol=1e-15)
    np.testing.assert_allclose(cn, 1 / np.cosh(u), atol=1e-15)
    np.testing.assert_allclose(dn, 1 / np.cosh(u), atol=1e-15)


@pytest.mark.parametrize("k", [0.3, 0.7, 0.95, 0.9999999999])
def test_against_mpmath_including_quarter_periods(k):
    K = complete_elliptic_k(k)
    us = [0.3, 1.7, -2.2, 5.0, K, 2 * K, 3 * K, -K]
    sn, cn, dn = jacobi_sn_cn_dn(np.array(us), k)
    for i, u in enumerate(us):
        ref = mp_sn_cn_dn(u, k)
        assert abs(sn[i] - ref[0]) < 1e-12
        assert abs(cn[i] - ref[1]) < 1e-12
        assert abs(dn[i] - ref[2]) < 1e-12


@settings(max_examples=60, deadline=None)
@given(u=st.floats(-50, 50), k=moduli)
def test_pythagorean_identities(u, k):
    sn, cn, dn = jacobi_sn_cn_dn(u, k)
    assert abs(sn * sn + cn * cn - 1) < 1e-11
    assert abs(dn * dn + k * k * sn * sn - 1) < 1e-11


@settings(max_examples=40, deadline=None)
@given(u=st.floats(-10, 10), k=st.floats(0.01, 0.99))
def test_periodicity_and_parity(u, k):
    K = complete_elliptic_k(k)
    a = np.array(jacobi_sn_cn_dn(u, k))
    b = np.array(jacobi_sn_cn_dn(u + 4 * K, k))
    np.testing.assert_allclose(a, b, atol=1e-10)
    sn_m, cn_m, dn_m = jacobi_sn_cn_dn(-u, k)
    assert sn_m == pytest.approx(-a[0], abs=1e-12)
    assert cn_m == pytest.approx(a[1], abs=1e-12)
    assert dn_m == pytest.approx(a[2], abs=1e-12)


def test_sn_reaches_one_at_quarter_period():
    k = 0.8
    sn, cn, dn = jacobi_sn_cn_dn(complete_elliptic_k(k), k)
    assert sn == pytest.approx(1.0, abs=1e-14)
    assert abs(cn) < 1e-13
    assert dn == pytest.approx(math.sqrt(1 - k * k), abs=1e-13)


def test_sech_does_not_overflow():
    x = np.array([0.0, 1.0, -1.0, 800.0, -800.0])
    out = sech(x)
    assert np.all(np.isfinite(out))
    np.testing.assert_allclose(out[:3], 1 / np.cosh(x[:3]), rtol=1e-15)
    assert out[3] == 0.0
