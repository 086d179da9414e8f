"""Uniform-grid functions, cumulative and convolution quadrature, mollified deltas
and weak-form measurement of distributional source strengths."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import hermite_e
from scipy import integrate as spi


class GridMismatchError(ValueError):
    """Two grid functions do not share ``t0`` and ``dt``."""


class ResolutionError(ValueError):
    """A mollifier or test function is too narrow for the grid."""


class IllConditionedError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``t0, t0 + dt, ..., t0 + (n - 1) dt``."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"grid step must be positive, got {self.dt}")
        if self.n < 2:
            raise ValueError("a grid needs at least 2 samples")

    @classmethod
    def from_horizon(cls, t0: float, dt: float, T: float) -> "Grid":
        n = int(round((T - t0) / dt)) + 1
        return cls(float(t0), float(dt), n)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def T(self) -> float:
        return self.t0 + self.dt * (self.n - 1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples on a uniform grid. ``values`` is stored read-only."""

    t0: float
    dt: float
    values: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("GridFunction needs a 1-d array of at least 2 samples")
        if not self.dt > 0:
            raise ValueError(f"grid step must be positive, got {self.dt}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("GridFunction values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], grid: Grid, **metadata) -> "GridFunction":
        t = grid.t
        return cls(grid.t0, grid.dt, np.broadcast_to(np.asarray(fn(t), dtype=float), t.shape), dict(metadata))

    @property
    def grid(self) -> Grid:
        return Grid(self.t0, self.dt, len(self.values))

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def T(self) -> float:
        return self.grid.T

    def __len__(self) -> int:
        return len(self.values)

    def with_values(self, values, **metadata) -> "GridFunction":
        return GridFunction(self.t0, self.dt, values, {**self.metadata, **metadata})

    def truncate(self, n: int) -> "GridFunction":
        return GridFunction(self.t0, self.dt, self.values[:n], dict(self.metadata))

    def same_grid(self, other: "GridFunction") -> bool:
        return (
            math.isclose(self.t0, other.t0, rel_tol=0, abs_tol=1e-12 * max(1.0, abs(self.t0)))
            and math.isclose(self.dt, other.dt, rel_tol=1e-12)
        )

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _require_common_grid(self, other)
        n = min(len(self), len(other))
        return self.with_values(self.values[:n] + other.values[:n])

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _require_common_grid(self, other)
        n = min(len(self), len(other))
        return self.with_values(self.values[:n] - other.values[:n])

    def __mul__(self, scalar: float) -> "GridFunction":
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def to_csv(self, header: str = "t,value") -> str:
        """Two-column CSV with a one-line header, LF line endings."""
        buf = io.StringIO()
        buf.write(header + "\n")
        for t, v in zip(self.t, self.values):
            buf.write(f"{float(t)!r},{float(v)!r}\n")
        return buf.getvalue()

    def write_csv(self, path, header: str = "t,value") -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv(header))

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        rows = [line.split(",") for line in text.strip().splitlines()[1:] if line.strip()]
        t = np.array([float(r[0]) for r in rows])
        v = np.array([float(r[1]) for r in rows])
        if len(t) < 2:
            raise ValueError("CSV table needs at least two rows")
        dt = (t[-1] - t[0]) / (len(t) - 1)
        if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
            raise ValueError("CSV table is not uniformly sampled")
        return cls(t[0], dt, v)

    @classmethod
    def read_csv(cls, path) -> "GridFunction":
        with open(path) as fh:
            return cls.from_csv(fh.read())


def _require_common_grid(a: GridFunction, b: GridFunction) -> None:
    if not a.same_grid(b):
        raise GridMismatchError(f"grids differ: (t0={a.t0}, dt={a.dt}) vs (t0={b.t0}, dt={b.dt})")


def trapezoid(values: np.ndarray, dt: float) -> float:
    return float(dt * (values.sum() - 0.5 * (values[0] + values[-1])))


def integrate_grid(values: np.ndarray, dt: float, rule: str = "trapezoid") -> float:
    if rule == "trapezoid":
        return trapezoid(values, dt)
    if rule == "simpson":
        return float(spi.simpson(values, dx=dt))
    raise ValueError(f"unknown quadrature rule {rule!r}")


def cumulative_integral(f: GridFunction, m: int = 1, rule: str = "trapezoid") -> GridFunction:
    """m-fold iterated antiderivative of ``f`` vanishing at ``t0`` with its first m-1 derivatives."""
    if m < 1:
        raise ValueError("cumulative_integral needs m >= 1")
    vals = np.asarray(f.values)
    for _ in range(m):
        if rule == "trapezoid":
            vals = spi.cumulative_trapezoid(vals, dx=f.dt, initial=0.0)
        elif rule == "simpson":
            vals = spi.cumulative_simpson(vals, dx=f.dt, initial=0.0)
        else:
            raise ValueError(f"unknown quadrature rule {rule!r}")
    return f.with_values(vals, antiderivative_order=m)


def convolve_weighted(G: GridFunction, f: GridFunction, k: int = 0) -> GridFunction:
    """Trapezoid approximation of ``int_0^t (t - tau)^k G(t - tau) f(tau) dtau``.

    ``G`` is sampled from its own origin (lag 0 at ``G.t0``); ``f`` carries the
    output grid. Both must share the step; the result has ``len(f)`` samples
    (``G`` must be at least that long).
    """
    if not math.isclose(G.dt, f.dt, rel_tol=1e-12):
        raise GridMismatchError(f"kernel step {G.dt} differs from source step {f.dt}")
    if not 0 <= k <= 8:
        raise ValueError("weight power k must be in 0..8")
    n = len(f)
    if len(G) < n:
        raise GridMismatchError("kernel grid shorter than the source grid")
    lag = f.dt * np.arange(n)
    kern = np.asarray(G.values[:n]) * lag ** k
    fv = np.asarray(f.values)
    full = np.convolve(kern, fv)[:n]
    out = f.dt * (full - 0.5 * (kern * fv[0] + kern[0] * fv))
    out[0] = 0.0
    return f.with_values(out, weight_power=k)


@dataclass(frozen=True)
class MollifiedDelta:
    """Gaussian approximation of ``delta^(order)(t - center)`` with width ``epsilon``.

    ``center`` defaults to ``6 * epsilon``. At ``3 * epsilon`` the Gaussian tail cut
    off below 0 still carries about 0.13% of the mass, which shows up directly as an
    amplitude error in impulse responses.
    """

    epsilon: float
    order: int = 0
    center: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("mollifier width must be positive")
        if not 0 <= self.order <= 3:
            raise ValueError("only delta derivatives of order 0..3 are supported")
        if self.center is None:
            object.__setattr__(self, "center", 6.0 * self.epsilon)

    def __call__(self, t):
        x = (np.asarray(t, dtype=float) - self.center) / self.epsilon
        gauss = np.exp(-0.5 * x * x) / (self.epsilon * math.sqrt(2.0 * math.pi))
        coef = [0.0] * self.order + [1.0]
        out = (-1.0 / self.epsilon) ** self.order * hermite_e.hermeval(x, coef) * gauss
        return float(out) if np.ndim(t) == 0 else out


def sample_mollified_delta(d: MollifiedDelta, grid: Grid) -> GridFunction:
    if d.epsilon < 4.0 * grid.dt * (1 - 1e-12):
        raise ResolutionError(f"epsilon={d.epsilon} is below 4*dt={4 * grid.dt}")
    if d.center - grid.t0 < 3.0 * d.epsilon * (1 - 1e-12) or grid.T - d.center < 3.0 * d.epsilon:
        raise ResolutionError("mollifier centre must sit at least 3*epsilon inside the grid")
    return GridFunction.from_function(d, grid, mollifier_epsilon=d.epsilon, mollifier_order=d.order, mollifier_center=d.center)


# --- weak-form strength measurement -------------------------------------------------


def _gaussian_derivative(t: np.ndarray, sigma: float, p: int) -> np.ndarray:
    # d^p/dt^p exp(-t^2 / (2 sigma^2))
    x = t / sigma
    coef = [0.0] * p + [1.0]
    return (-1.0 / sigma) ** p * hermite_e.hermeval(x, coef) * np.exp(-0.5 * x * x)


@dataclass(frozen=True)
class StrengthReport:
    """Coefficients ``c_q`` of ``sum_q c_q delta^(q)`` measured at the origin."""

    coefficients: dict
    condition: float
    residual: float
    scales: tuple

    def pairs(self) -> list[tuple[int, float]]:
        return sorted(self.coefficients.items())

    def __getitem__(self, q: int) -> float:
        return self.coefficients[q]


def _numeric_state(G: GridFunction, n: int) -> list[np.ndarray]:
    state = [np.asarray(G.values)]
    for _ in range(1, n):
        state.append(np.gradient(state[-1], G.dt, edge_order=2))
    return state


def weak_form_strength(
    G: GridFunction,
    problem,
    max_order: int,
    *,
    state: Sequence[np.ndarray] | None = None,
    scales: Sequence[float] | None = None,
    n_tests: int | None = None,
    rule: str = "trapezoid",
    max_condition: float = 1e8,
) -> StrengthReport:
    """Measure the distributional source ``L[G] = sum_q c_q delta^(q)`` at ``t = 0``.

    ``G`` holds the kernel on ``[0, T]`` (one-sided limit at the origin) and is taken
    to vanish for ``t < 0``. The operator is read from ``problem.weak_terms``, a
    sequence of ``(j, flux)`` pairs meaning ``sum_j D^j flux(state)``. Pairing with
    Hermite-Gaussian test functions moves every ``D^j`` onto the test function; the
    resulting moments are matched to ``sum_q c_q (-1)^q psi^(q)(0)`` by least squares.
    """
    if G.t0 != 0.0:
        raise ValueError("the kernel grid must start at the origin")
    if state is None:
        state = _numeric_state(G, problem.order)
    t = G.t
    T = G.T
    if scales is None:
        top = min(T / 9.0, 1.0)
        scales = (top, top / math.sqrt(2.0), top / 2.0)
    scales = tuple(float(s) for s in scales)
    if min(scales) < 20.0 * G.dt:
        raise ResolutionError(f"test-function scale {min(scales)} under-resolved at dt={G.dt}")
    if max(scales) > T / 8.0:
        raise ResolutionError("test functions do not decay inside the grid; lengthen the kernel horizon")
    n_tests = max_order + 3 if n_tests is None else n_tests

    fluxes = [(j, np.asarray(flux(state), dtype=float)) for j, flux in problem.weak_terms]
    rows, rhs = [], []
    for sigma in scales:
        for i in range(n_tests):
            norm = sigma ** i
            row = [
                (-1) ** q * norm * _gaussian_derivative(np.array(0.0), sigma, i + q) for q in range(max_order + 1)
            ]
            moment = 0.0
            for j, flux in fluxes:
                psi_j = norm * _gaussian_derivative(t, sigma, i + j)
                moment += (-1) ** j * integrate_grid(flux * psi_j, G.dt, rule)
            rows.append(row)
            rhs.append(moment)
    A = np.array(rows, dtype=float)
    b = np.array(rhs, dtype=float)
    col = np.linalg.norm(A, axis=0)
    An = A / col
    cond = float(np.linalg.cond(An))
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedError(f"test-function system is ill-conditioned (cond={cond:.3g})", cond)
    sol, *_ = np.linalg.lstsq(An, b, rcond=None)
    coeffs = sol / col
    resid = float(np.linalg.norm(A @ coeffs - b) / max(np.linalg.norm(b), 1e-300))
    return StrengthReport({q: float(c) for q, c in enumerate(coeffs)}, cond, resid, scales)
