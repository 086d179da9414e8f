"""Nonlinear Green's functions ``G = theta * w0`` and their singular content."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .ivp import IvpConfig, integrate, reduce_to_first_order
from .quadrature import Grid, GridFunction, weak_form_strength

PROVENANCES = ("closed_form", "homogeneous_solve", "series")


class HomogeneityError(ValueError):
    """The nonlinearity does not vanish at the zero state."""


@dataclass(frozen=True)
class Nonlinearity:
    """``N(w, w', ..., w^(n-1))``; the evaluator receives the state in ascending order."""

    order: int
    evaluator: Callable[[Sequence], object]
    description: str = ""

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("nonlinearity order must be at least 2")

    def __call__(self, state):
        return self.evaluator(state)


@dataclass(frozen=True)
class HomogeneityReport:
    holds: bool
    zero_value: float
    witnesses: list


def check_generalized_homogeneity(N: Nonlinearity, sample_states, tol: float = 1e-14) -> HomogeneityReport:
    """Check ``N(theta*state) = theta*N(state)`` for ``theta in {0, 1}``.

    The ``theta = 1`` branch is an identity, so the property reduces to
    ``N(0, ..., 0) = 0``. Each sample state is still run through both branches and
    listed as a witness when either fails.
    """
    states = [list(map(float, s)) for s in sample_states]
    if not states:
        raise ValueError("need at least one sample state")
    if any(len(s) != N.order for s in states):
        raise ValueError(f"sample states must have length {N.order}")
    if not all(math.isfinite(v) for s in states for v in s):
        raise ValueError("sample states must be finite")
    zero = float(N([0.0] * N.order))
    witnesses = []
    if abs(zero) > tol:
        witnesses.append({"state": [0.0] * N.order, "theta": 0, "N": zero})
    for s in states:
        value = float(N(s))
        for theta in (0, 1):
            lhs = float(N([theta * v for v in s]))
            if abs(lhs - theta * value) > tol * max(1.0, abs(value)):
                witnesses.append({"state": s, "theta": theta, "lhs": lhs, "rhs": theta * value})
    return HomogeneityReport(not witnesses, zero, witnesses)


def singular_part(u_derivatives_at_0: Sequence[float], n: int) -> dict[int, float]:
    """Map ``delta order -> coefficient`` from ``D^n(theta u) = sum_k u^(k-1)(0) delta^(n-k) + theta u^(n)``."""
    if len(u_derivatives_at_0) != n:
        raise ValueError(f"expected {n} derivative values, got {len(u_derivatives_at_0)}")
    return {n - k: float(u_derivatives_at_0[k - 1]) for k in range(1, n + 1)}


def _leading_singular(coeffs: dict[int, float], tol: float = 0.0) -> tuple[int, float]:
    nonzero = [q for q, c in coeffs.items() if abs(c) > tol]
    if not nonzero:
        return 0, 0.0
    m = max(nonzero)
    return m, coeffs[m]


@dataclass(frozen=True, eq=False)
class GreenFunction:
    """Kernel ``theta(t) u(t)`` that answers ``strength * delta^(order)``.

    ``profile`` evaluates the smooth factor ``u`` for ``t >= 0``. Calling the
    object applies the Heaviside factor with ``theta(0) = 0``; :meth:`sample`
    uses the one-sided limit ``u(0+)`` at the origin, as quadrature needs.
    """

    order: int
    strength: float
    profile: Callable[[np.ndarray], np.ndarray]
    provenance: str
    horizon: float = math.inf
    state: tuple | None = None  # GridFunctions of (u, u', ..., u^(n-1)) when solved numerically
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("Green's function order must be non-negative")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        pos = t_arr > 0
        out = np.zeros_like(t_arr)
        if np.any(pos):
            out[pos] = self.profile(t_arr[pos])
        return float(out) if np.ndim(t) == 0 else out

    def sample(self, grid: Grid, *, right_limit: bool = True) -> GridFunction:
        if grid.t0 != 0.0:
            raise ValueError("kernels are sampled on grids starting at the origin")
        if grid.T > self.horizon * (1 + 1e-12):
            raise ValueError(f"kernel only known up to t={self.horizon}, asked for {grid.T}")
        if self.state is not None and _aligned(self.state[0], grid):
            vals = np.array(self.state[0].values[: grid.n])
        else:
            vals = np.asarray(self.profile(grid.t), dtype=float)
        if not right_limit:
            vals = vals.copy()
            vals[0] = 0.0
        return GridFunction(0.0, grid.dt, vals, {"kernel_order": self.order, "kernel_strength": self.strength,
                                                 "provenance": self.provenance})

    def sample_state(self, grid: Grid) -> list[np.ndarray] | None:
        if self.state is None or not _aligned(self.state[0], grid):
            return None
        return [np.asarray(s.values[: grid.n]) for s in self.state]

    def metadata_text(self) -> str:
        lines = [f"provenance: {self.provenance}", f"order: {self.order}", f"strength: {self.strength!r}",
                 f"horizon: {self.horizon!r}"]
        lines += [f"{k}: {v!r}" for k, v in sorted(self.metadata.items())]
        return "\n".join(lines) + "\n"


def _aligned(g: GridFunction, grid: Grid) -> bool:
    return g.t0 == grid.t0 and math.isclose(g.dt, grid.dt, rel_tol=1e-12) and len(g) >= grid.n


def build_green_from_homogeneous(problem, s: float, config: IvpConfig, cauchy: Sequence[float] | None = None) -> GreenFunction:
    """Solve the homogeneous problem with data ``(0, ..., 0, s)`` and return ``theta * w0``.

    ``cauchy`` overrides the data; the kernel order and strength are then read off
    the singular part (highest-order non-zero ``delta^(q)`` coefficient).
    A blow-up truncates the kernel; ``horizon`` records how far it is known.
    """
    report = check_generalized_homogeneity(problem.nonlinearity, [[1.0] * problem.order])
    if not report.holds:
        raise HomogeneityError(f"N(0,...,0) = {report.zero_value} != 0; G = theta*w0 does not apply")
    n = problem.order
    data = [0.0] * (n - 1) + [float(s)] if cauchy is None else [float(v) for v in cauchy]
    if len(data) != n:
        raise ValueError(f"Cauchy data must have length {n}")
    sing = singular_part(data, n)
    m, strength = _leading_singular(sing) if cauchy is not None else (0, float(s))

    homogeneous = _Homogeneous(problem)
    res = integrate(reduce_to_first_order(homogeneous), data, config)
    state = tuple(res.component(i) for i in range(n))
    spline = CubicHermiteSpline(res.t, res.states[0], res.states[1]) if len(res.t) > 1 else None

    def profile(t):
        return spline(np.asarray(t, dtype=float))

    meta = {"problem": getattr(problem, "name", "?"), "cauchy": tuple(data), "singular_part": sing,
            "config_fingerprint": config.fingerprint(), "truncated": res.truncated}
    return GreenFunction(m, strength, profile, "homogeneous_solve", res.horizon, state, meta)


class _Homogeneous:
    # problem view with the constant forcing offset dropped
    def __init__(self, problem):
        self.order = problem.order
        self.nonlinearity = problem.nonlinearity
        self.name = getattr(problem, "name", "problem")
        self.offset = 0.0


def wrap_closed_form(problem, *, measure: bool | None = None, grid: Grid | None = None) -> GreenFunction:
    """Order-one closed-form kernel of a catalog problem.

    The singular part follows from the profile's derivatives at 0. When ``measure``
    is true (the default for Boussinesq) the strength is instead measured with
    :func:`weak_form_strength`; both values go into ``metadata``.
    """
    if problem.closed_form is None:
        raise ValueError(f"problem {problem.name!r} has no closed-form homogeneous solution")
    n = problem.order
    derivs = problem.closed_form_derivatives(np.array([0.0]), n - 1)
    sing = singular_part([float(d[0]) for d in derivs], n)
    m, jump_strength = _leading_singular(sing, tol=1e-13)
    meta = {"problem": problem.name, "parameters": dict(problem.params), "singular_part": sing,
            "jump_strength": jump_strength}
    meta.update(problem.closed_form_notes)
    if measure is None:
        measure = problem.name == "boussinesq"
    strength = jump_strength
    if measure:
        grid = grid or problem.default_kernel_grid()
        sampled = GridFunction(0.0, grid.dt, problem.closed_form(grid.t))
        state = [np.asarray(d) for d in problem.closed_form_derivatives(grid.t, n - 1)]
        report = weak_form_strength(sampled, problem, max_order=n - 1, state=state)
        strength = report[m]
        meta.update(measured_strength=strength, measured_coefficients=report.coefficients,
                    measurement_condition=report.condition)
    return GreenFunction(m, float(strength), problem.closed_form, "closed_form", math.inf, None, meta)
