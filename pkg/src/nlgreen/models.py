"""Catalog problems: reduced KdV, the quadratic fourth-order ODE and reduced Boussinesq."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .greens import GreenFunction, Nonlinearity
from .quadrature import Grid
from .special import jacobi_sn_cn_dn, sech

log = logging.getLogger(__name__)


class SingularityError(ValueError):
    """Closed form requested at a parameter value where it is singular."""


@dataclass(frozen=True, eq=False)
class Problem:
    """``w^(n) + N(w, ..., w^(n-1)) = f + offset``.

    ``weak_terms`` writes ``w^(n) + N`` as ``sum_j D^j flux_j(state)``; the
    weak-form strength measurement needs it. ``closed_form`` (if any) is a smooth
    homogeneous solution used as an order-one kernel.
    """

    name: str
    order: int
    nonlinearity: Nonlinearity
    params: dict
    weak_terms: tuple = ()
    offset: float = 0.0
    closed_form: Callable | None = None
    closed_form_derivatives: Callable | None = None
    closed_form_notes: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        if self.nonlinearity.order != self.order:
            raise ValueError("nonlinearity order does not match problem order")
        if not self.weak_terms:
            n, N = self.order, self.nonlinearity
            object.__setattr__(self, "weak_terms", ((n, lambda s: s[0]), (0, lambda s: N(s))))

    def residual(self, derivatives) -> np.ndarray:
        """``w^(n) + N - offset`` given ``[w, w', ..., w^(n)]``."""
        return derivatives[self.order] + self.nonlinearity(derivatives[: self.order]) - self.offset

    def default_kernel_grid(self) -> Grid:
        return Grid.from_horizon(0.0, 1e-3, 5.0)


# --- symbolic differentiation of polynomials in a few basis functions -------------


def _differentiate(poly: dict, rules: list[dict]) -> dict:
    out: dict = defaultdict(float)
    for exps, c in poly.items():
        for i, e in enumerate(exps):
            if e == 0:
                continue
            base = list(exps)
            base[i] -= 1
            for dexps, dc in rules[i].items():
                out[tuple(b + d for b, d in zip(base, dexps))] += c * e * dc
    return {k: v for k, v in out.items() if v != 0.0}


def _evaluate(poly: dict, bases) -> np.ndarray:
    total = np.zeros_like(np.asarray(bases[0], dtype=float))
    for exps, c in poly.items():
        term = np.full_like(total, c)
        for b, e in zip(bases, exps):
            if e:
                term = term * b ** e
        total = total + term
    return total


def _derivative_stack(poly, rules, bases, scale, upto):
    out, p = [], poly
    for j in range(upto + 1):
        out.append(scale ** j * _evaluate(p, bases))
        p = _differentiate(p, rules)
    return out


_HYPERBOLIC_RULES = [{(1, 1): -1.0}, {(2, 0): 1.0}]  # d sech = -sech tanh, d tanh = sech^2


def _jacobi_rules(k: float) -> list[dict]:
    return [{(0, 1, 1): 1.0}, {(1, 0, 1): -1.0}, {(1, 1, 0): -k * k}]


# --- KdV --------------------------------------------------------------------------


def kdv_soliton(c: float):
    """``u(z) = -(c/2) sech^2(sqrt(c) z / 2)`` and its derivative stack."""
    kappa = math.sqrt(c) / 2.0
    poly = {(2, 0): -c / 2.0}

    def profile(z):
        return -0.5 * c * sech(kappa * np.asarray(z, dtype=float)) ** 2

    def derivatives(z, upto):
        x = kappa * np.asarray(z, dtype=float)
        return _derivative_stack(poly, _HYPERBOLIC_RULES, (sech(x), np.tanh(x)), kappa, upto)

    return profile, derivatives


def kdv_reduced(c: float, c0: float = 0.0) -> Problem:
    """``w'' - 3 w^2 - c w = c0`` (travelling-wave KdV, integrated once)."""
    if not c > 0:
        raise ValueError(f"KdV wave speed must be positive, got {c}")
    N = Nonlinearity(2, lambda s: -3.0 * s[0] * s[0] - c * s[0], f"-3 w^2 - {c} w")
    weak = ((2, lambda s: s[0]), (0, lambda s: -3.0 * s[0] ** 2 - c * s[0]))
    profile = derivatives = None
    if c0 == 0.0:
        profile, derivatives = kdv_soliton(c)
    return Problem("kdv", 2, N, {"c": float(c), "c0": float(c0)}, weak, float(c0), profile, derivatives,
                   description=f"w'' - 3w^2 - {c}w = {c0} + f")


# --- quadratic fourth order ------------------------------------------------------


def quadratic_fourth(v: float) -> Problem:
    """``w'''' + (w - v^2) w'' = f``."""
    v2 = float(v) ** 2
    N = Nonlinearity(4, lambda s: (s[0] - v2) * s[2], f"(w - {v2}) w''")
    # w w'' = (w^2/2)'' - (w')^2
    weak = ((4, lambda s: s[0]), (2, lambda s: 0.5 * s[0] ** 2 - v2 * s[0]), (0, lambda s: -s[1] ** 2))
    return Problem("quadratic4", 4, N, {"v": float(v)}, weak, description=f"w'''' + (w - {v2}) w'' = f")


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated power series ``sum alpha_n t^n`` of the homogeneous solution."""

    coefficients: tuple
    v: object
    s: object

    def __post_init__(self):
        a = self.coefficients
        if len(a) < 5 or a[0] != 0 or a[1] != 0 or a[2] != 0 or a[3] != self.s / 6:
            raise ValueError("series must start 0, 0, 0, s/6")

    def __call__(self, t):
        # Horner; works for floats, arrays, Fractions and mpf
        acc = 0 * t
        for a in reversed(self.coefficients):
            acc = acc * t + a
        return acc

    def green(self) -> GreenFunction:
        def profile(t):
            return np.asarray(self(np.asarray(t, dtype=float)), dtype=float)

        return GreenFunction(0, float(self.s), profile, "series",
                             metadata={"terms": len(self.coefficients), "v": float(self.v)})


def series_coefficients(v, s, M: int) -> SeriesSolution:
    """Power-series coefficients of the homogeneous quadratic fourth-order solution.

    Cauchy data ``(0, 0, 0, s)`` fixes ``alpha_0..alpha_3``; the rest follow from
    ``(n+1)(n+2)(n+3)(n+4) a_{n+4} = v^2 b_n a_{n+2} - sum_k b_k a_{k+2} a_{n-k}``
    with ``b_n = (n+1)(n+2)``. Arithmetic is generic, so exact or high-precision
    inputs stay exact.
    """
    if M < 4:
        raise ValueError("need M >= 4")
    zero = 0 * s
    a = [zero] * (M + 1)
    a[3] = s / 6

    def beta(n):
        return (n + 1) * (n + 2)

    for n in range(0, M - 3):
        conv = sum((beta(k) * a[k + 2] * a[n - k] for k in range(n + 1)), zero)
        a[n + 4] = (v * v * beta(n) * a[n + 2] - conv) / ((n + 1) * (n + 2) * (n + 3) * (n + 4))
    return SeriesSolution(tuple(a), v, s)


# --- Boussinesq -------------------------------------------------------------------


def _check_snoidal_modulus(c: float) -> None:
    if not 0.0 < c <= 1.0:
        raise ValueError(f"snoidal modulus must satisfy 0 < c <= 1, got {c}")


def snoidal_solution(v: float, c: float, phi: float = 0.0):
    """``w = -(3 c^2 v^2 / (1 + c^2)) sn^2(v z / (2 sqrt(1 + c^2)) + phi, c)``.

    Returns ``(profile, derivatives)``; ``derivatives(z, upto)`` gives
    ``[w, w', ..., w^(upto)]`` from the sn/cn/dn derivative rules.
    """
    _check_snoidal_modulus(c)
    amp = -3.0 * c * c * v * v / (1.0 + c * c)
    b = v / (2.0 * math.sqrt(1.0 + c * c))
    return _jacobi_square(amp, b, phi, c, (2, 0, 0))


def cnoidal_solution(v: float, c: float, phi: float = 0.0):
    """``w = (3 c^2 v^2 / (1 - 2 c^2)) cn^2(v z / (2 sqrt(1 - 2 c^2)) + phi, c)``; singular at ``c^2 = 1/2``."""
    if not 0.0 < c <= 1.0:
        raise ValueError(f"cnoidal modulus must satisfy 0 < c <= 1, got {c}")
    gap = 1.0 - 2.0 * c * c
    if abs(gap) < 1e-12:
        raise SingularityError("cnoidal solution is singular at c^2 = 1/2")
    if gap < 0:
        raise ValueError(f"cnoidal solution has no real wave number for c^2 > 1/2 (c={c})")
    amp = 3.0 * c * c * v * v / gap
    b = v / (2.0 * math.sqrt(gap))
    return _jacobi_square(amp, b, phi, c, (0, 2, 0))


def _jacobi_square(amp, b, phi, k, exps):
    poly = {exps: amp}
    rules = _jacobi_rules(k)
    idx = exps.index(2)

    def profile(z):
        x = b * np.asarray(z, dtype=float) + phi
        return amp * jacobi_sn_cn_dn(x, k)[idx] ** 2

    def derivatives(z, upto):
        x = b * np.asarray(z, dtype=float) + phi
        return _derivative_stack(poly, rules, jacobi_sn_cn_dn(x, k), b, upto)

    return profile, derivatives


def boussinesq_strengths(v: float, c: float) -> dict:
    """Candidate delta' strengths of the phi = 0 snoidal kernel."""
    base = c * c * v ** 4 / (1.0 + c * c) ** 2
    return {"quoted_strength": -0.75 * base, "jump_strength": -1.5 * base}


def snoidal_period(v: float, c: float) -> float:
    from .special import complete_elliptic_k

    return 4.0 * complete_elliptic_k(c) * 2.0 * math.sqrt(1.0 + c * c) / v


def boussinesq_reduced(v: float, modulus: float | None = 0.5, phi: float = 0.0) -> Problem:
    """``w'''' + v^2 w'' + (1/2)(w^2)'' = f`` with the snoidal solution attached.

    The nonlinearity is stored expanded, ``v^2 w'' + (w')^2 + w w''``. ``modulus``
    and ``phi`` only select the closed form; pass ``modulus=None`` to omit it.
    """
    v2 = float(v) ** 2
    N = Nonlinearity(4, lambda s: v2 * s[2] + s[1] * s[1] + s[0] * s[2], f"{v2} w'' + (w')^2 + w w''")
    weak = ((4, lambda s: s[0]), (2, lambda s: v2 * s[0] + 0.5 * s[0] ** 2))
    params = {"v": float(v), "phi": float(phi)}
    profile = derivatives = None
    notes: dict = {}
    if modulus is not None:
        params["c"] = float(modulus)
        profile, derivatives = snoidal_solution(v, modulus, phi)
        notes = boussinesq_strengths(v, modulus)
        if phi != 0.0:
            log.warning("snoidal kernel with phi=%g: theta*u also carries delta'' and delta''' terms", phi)
            notes["phi_warning"] = "nonzero phase adds delta'' and delta''' content"
    return Problem("boussinesq", 4, N, params, weak, 0.0, profile, derivatives, notes,
                   description=f"w'''' + {v2} w'' + (w^2)''/2 = f")


def boussinesq_default_grid(v: float, c: float, dt: float = 1e-3) -> Grid:
    return Grid.from_horizon(0.0, dt, snoidal_period(v, c))


# --- generic linear problem and the travelling-wave map ---------------------------


def linear_problem(coefficients) -> Problem:
    """``w^(n) + sum_j a_j w^(j) = f`` with ``n = len(coefficients)``."""
    a = [float(x) for x in coefficients]
    n = len(a)
    N = Nonlinearity(n, lambda s: sum(aj * s[j] for j, aj in enumerate(a) if aj), "linear")
    weak = ((n, lambda s: s[0]),) + tuple((j, (lambda aj: lambda s: aj * s[0])(aj)) for j, aj in enumerate(a) if aj)
    return Problem("linear", n, N, {"coefficients": tuple(a)}, weak, description="linear")


def traveling_wave_map(x, t, speed: float, shift: float = 0.0):
    """``zeta = x - speed * t - shift``."""
    return x - speed * t - shift


CATALOG = {"kdv": kdv_reduced, "quadratic4": quadratic_fourth, "boussinesq": boussinesq_reduced}
