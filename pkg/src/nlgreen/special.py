"""Complete elliptic integral K, Jacobi elliptic functions and sech.

All functions take the elliptic *modulus* ``k`` (not the parameter ``m = k**2``).
"""

from __future__ import annotations

import math

import numpy as np

_AGM_TOL = 1e-16
_MAX_AGM_STEPS = 60


class EllipticDomainError(ValueError):
    """Modulus outside the admissible range."""


def _check_modulus(k: float, *, allow_one: bool) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0.0 or k > 1.0:
        raise EllipticDomainError(f"elliptic modulus must lie in [0, 1], got {k!r}")
    if k == 1.0 and not allow_one:
        raise EllipticDomainError("K(k) diverges logarithmically at k = 1 (unbounded period)")
    return k


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(_MAX_AGM_STEPS):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic_k(k: float) -> float:
    """Quarter period ``K(k) = pi / (2 agm(1, sqrt(1 - k^2)))`` for ``0 <= k < 1``."""
    k = _check_modulus(k, allow_one=False)
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, kp))


def _landen_sequence(k: float):
    # a_n, c_n of the AGM started at (1, k'); stops once c_n is negligible
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    a, b, c = [1.0], [kp], [k]
    while abs(c[-1]) > 1e-17 and len(a) < _MAX_AGM_STEPS:
        a_n, b_n = a[-1], b[-1]
        a.append(0.5 * (a_n + b_n))
        c.append(0.5 * (a_n - b_n))
        b.append(math.sqrt(a_n * b_n))
    return a, c


def jacobi_sn_cn_dn(u, k: float):
    """Jacobi elliptic functions ``(sn, cn, dn)`` of argument ``u`` and modulus ``k``.

    Uses the AGM / descending Landen scheme. ``u`` may be a scalar or an array;
    the degenerate moduli ``k = 0`` (circular) and ``k = 1`` (hyperbolic) are
    evaluated in closed form.
    """
    k = _check_modulus(k, allow_one=True)
    u_arr = np.asarray(u, dtype=float)
    if k == 0.0:
        sn, cn, dn = np.sin(u_arr), np.cos(u_arr), np.ones_like(u_arr)
    elif k == 1.0:
        sn, cn = np.tanh(u_arr), sech(u_arr)
        dn = cn.copy()
    else:
        # reduce to [-2K, 2K) to keep the amplitude small; sn/cn are 4K-periodic
        quarter = complete_elliptic_k(k)
        period = 4.0 * quarter
        u_red = u_arr - period * np.floor((u_arr + 2.0 * quarter) / period)
        a, c = _landen_sequence(k)
        n = len(a) - 1
        phi = (2.0 ** n) * a[n] * u_red
        for j in range(n, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        # dn^2 = k'^2 + k^2 cn^2 has no cancellation; cos(phi0)/cos(phi1 - phi0) is 0/0 at u = K
        dn = np.sqrt((1.0 - k) * (1.0 + k) + k * k * cn * cn)
    if np.ndim(u) == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def complete_elliptic_k_series(k: float, tol: float = 1e-17) -> float:
    """Power series ``K = pi/2 sum [(2n)!/(2^{2n} n!^2)]^2 k^{2n}``; slow near ``k = 1``."""
    k = _check_modulus(k, allow_one=False)
    m = k * k
    term, total, n = 1.0, 1.0, 0
    while term > tol * total:
        n += 1
        ratio = (2 * n - 1) / (2 * n)
        term *= ratio * ratio * m
        total += term
        if n > 100_000:
            break
    return 0.5 * math.pi * total


def sech(x):
    """Hyperbolic secant, ``2 / (e^x + e^-x)``, without overflow for large ``|x|``."""
    x_arr = np.asarray(x, dtype=float)
    e = np.exp(-np.abs(x_arr))
    out = 2.0 * e / (1.0 + e * e)
    if np.ndim(x) == 0:
        return float(out)
    return out
