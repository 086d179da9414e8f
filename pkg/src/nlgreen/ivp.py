"""Reference initial-value solver for n-th order problems ``w^(n) + N(state) = f``.

The "method of lines" baseline reduces here to an IVP solve, since every catalog
problem is already an ODE in the travelling-wave variable.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .quadrature import Grid, GridFunction, MollifiedDelta

METHODS = ("rk4", "adaptive")


class StepSizeUnderflow(RuntimeError):
    """Integration could not proceed; ``last_t`` is the last point reached."""

    def __init__(self, message: str, last_t: float):
        super().__init__(message)
        self.last_t = last_t


@dataclass(frozen=True)
class IvpConfig:
    T: float = 5.0
    dt: float = 1e-3
    method: str = "rk4"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    t0: float = 0.0
    max_step: float = math.inf
    blowup: float = 1e8  # |state| beyond this counts as finite-time blow-up

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.dt > 0 or not self.T > self.t0:
            raise ValueError("need dt > 0 and T > t0")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")

    @property
    def grid(self) -> Grid:
        return Grid.from_horizon(self.t0, self.dt, self.T)

    def fingerprint(self) -> str:
        text = ";".join(f"{k}={v!r}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class FirstOrderSystem:
    """``y' = rhs(t, y)`` for the state ``y = (w, w', ..., w^(n-1))``."""

    dim: int
    rhs: Callable[[float, Sequence], list]
    description: str = ""


def reduce_to_first_order(problem, source: Callable[[float], float] | None = None) -> FirstOrderSystem:
    """Companion reduction: ``y_i' = y_{i+1}``, ``y_{n-1}' = f(t) + offset - N(y)``."""
    n = problem.order
    N = problem.nonlinearity
    offset = float(getattr(problem, "offset", 0.0))

    if source is None and offset == 0.0:

        def rhs(t, y):
            return [*y[1:], -N(y)]

    else:
        src = source if source is not None else (lambda t: 0.0)

        def rhs(t, y):
            return [*y[1:], src(t) + offset - N(y)]

    return FirstOrderSystem(n, rhs, f"companion system of {getattr(problem, 'name', 'problem')} (n={n})")


@dataclass
class IvpResult:
    t: np.ndarray
    states: np.ndarray  # shape (dim, len(t))
    horizon: float
    truncated: bool = False
    message: str = ""
    metadata: dict = field(default_factory=dict)

    def component(self, i: int = 0) -> GridFunction:
        dt = self.t[1] - self.t[0]
        return GridFunction(self.t[0], dt, self.states[i], dict(self.metadata, component=i))

    @property
    def solution(self) -> GridFunction:
        return self.component(0)


def _rk4(system: FirstOrderSystem, init, cfg: IvpConfig) -> IvpResult:
    grid = cfg.grid
    t = grid.t
    h = cfg.dt
    f = system.rhs
    y = np.array(init, dtype=float)
    out = np.empty((system.dim, grid.n))
    out[:, 0] = y
    last = 0
    message = ""
    for i in range(grid.n - 1):
        ti = t[i]
        k1 = np.asarray(f(ti, y))
        k2 = np.asarray(f(ti + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(f(ti + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(f(ti + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > cfg.blowup:
            message = f"blow-up after t={ti:.6g}"
            break
        out[:, i + 1] = y
        last = i + 1
    if last == 0:
        raise StepSizeUnderflow("solution blew up on the first step", t[0])
    truncated = last < grid.n - 1
    return IvpResult(t[: last + 1], out[:, : last + 1], float(t[last]), truncated, message)


def _adaptive(system: FirstOrderSystem, init, cfg: IvpConfig) -> IvpResult:
    grid = cfg.grid

    def blow(t, y):
        return cfg.blowup - np.max(np.abs(y))

    blow.terminal = True

    sol = solve_ivp(
        lambda t, y: system.rhs(t, y),
        (grid.t0, grid.T),
        np.asarray(init, dtype=float),
        method="DOP853",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=True,
        events=blow,
    )
    reached = float(sol.t[-1])
    if reached <= grid.t0:
        raise StepSizeUnderflow(sol.message, reached)
    t = grid.t
    keep = t <= reached * (1 + 1e-14) + 1e-15
    t = t[keep]
    states = sol.sol(t)
    truncated = len(t) < grid.n
    if not np.all(np.isfinite(states)):
        bad = np.argmin(np.all(np.isfinite(states), axis=0))
        t, states, truncated = t[:bad], states[:, :bad], True
    return IvpResult(t, states, float(t[-1]), truncated, "" if sol.status == 0 else sol.message)


def integrate(system: FirstOrderSystem, init: Sequence[float], config: IvpConfig) -> IvpResult:
    """Integrate ``system`` from ``config.t0`` to ``config.T`` and resample onto the grid.

    Blow-up (non-finite state or ``|y| > config.blowup``) truncates the result at
    the last good grid point; ``result.truncated`` and ``result.horizon`` say where.
    """
    if len(init) != system.dim:
        raise ValueError(f"Cauchy data has length {len(init)}, system order is {system.dim}")
    if not all(math.isfinite(float(v)) for v in init):
        raise ValueError("Cauchy data must be finite")
    res = _rk4(system, init, config) if config.method == "rk4" else _adaptive(system, init, config)
    if len(res.t) < 2:
        raise StepSizeUnderflow("integration stopped before the first output point", float(res.t[-1]))
    res.metadata.update(config_fingerprint=config.fingerprint(), method=config.method, horizon=res.horizon)
    return res


def integrate_precise(system: FirstOrderSystem, init: Sequence, t_eval: Sequence, dps: int = 50) -> list:
    """High-precision Taylor-series IVP solve (mpmath); returns state lists at ``t_eval``.

    Meant for verification at precisions beyond double. ``system.rhs`` must use
    plain arithmetic so that it accepts ``mpf`` values.
    """
    import mpmath

    with mpmath.workdps(dps):
        y0 = [mpmath.mpf(v) for v in init]
        sol = mpmath.odefun(lambda t, y: system.rhs(t, y), mpmath.mpf(0), y0)
        return [sol(mpmath.mpf(t)) for t in sorted(t_eval)]


def solve_reference(problem, source, init: Sequence[float] | None, config: IvpConfig) -> GridFunction:
    """Baseline solution on ``[0, T]`` for ``w^(n) + N = source`` with Cauchy data ``init``.

    ``source`` is ``None``, a callable, a :class:`GridFunction` (cubic-interpolated)
    or a :class:`MollifiedDelta`. A delta centred at ``t_c`` is integrated on
    ``[0, T + t_c]`` and the result shifted back by ``t_c`` so the impulse acts at
    the origin; ``t_c`` is rounded to a whole number of steps.
    """
    n = problem.order
    init = [0.0] * n if init is None else list(init)
    shift = 0.0
    meta: dict = {"problem": getattr(problem, "name", "?"), "config_fingerprint": config.fingerprint()}
    if source is None:
        fn = None
        meta["source"] = "none"
    elif isinstance(source, MollifiedDelta):
        steps = math.ceil(source.center / config.dt - 1e-9)
        shift = steps * config.dt
        source = MollifiedDelta(source.epsilon, source.order, shift)
        fn = source
        meta.update(source="mollified_delta", mollifier_epsilon=source.epsilon,
                    mollifier_order=source.order, delta_center=shift)
        config = IvpConfig(**{**asdict(config), "T": config.T + shift,
                              "max_step": min(config.max_step, source.epsilon / 2)})
    elif isinstance(source, GridFunction):
        from scipy.interpolate import CubicSpline

        fn = CubicSpline(source.t, source.values)
        meta["source"] = "grid"
    else:
        fn = source
        meta["source"] = getattr(source, "__name__", "callable")

    res = integrate(reduce_to_first_order(problem, fn), init, config)
    w = res.states[0]
    if shift:
        k = int(round(shift / config.dt))
        w = w[k:]
    meta.update(horizon=res.horizon - shift, truncated=res.truncated, method=config.method)
    return GridFunction(0.0, config.dt, w, meta)
