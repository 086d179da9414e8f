"""Logarithmic error metrics and the forced-problem experiments built on them."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .expansion import ShortTimeSolution, expansion_basis, fit_coefficients
from .greens import GreenFunction, build_green_from_homogeneous, wrap_closed_form
from .ivp import IvpConfig, solve_reference
from .models import Problem, boussinesq_reduced, kdv_reduced, quadratic_fourth
from .quadrature import Grid, GridFunction, GridMismatchError, MollifiedDelta

log = logging.getLogger(__name__)

LOG_FLOOR = -40.0

SOURCES = {
    "exp": np.exp,
    "linear": lambda t: np.asarray(t, dtype=float) * 1.0,
    "sin": np.sin,
    "log1p": np.log1p,
    "zero": lambda t: np.zeros_like(np.asarray(t, dtype=float)),
}


@dataclass(frozen=True)
class ErrorReport:
    er_grid: GridFunction
    max_er: float
    min_er: float
    kind: str
    metadata: dict = field(default_factory=dict)


def _log_error(a: GridFunction, b: GridFunction, kind: str, window, plot_step, metadata) -> ErrorReport:
    if not a.same_grid(b):
        raise GridMismatchError("error metrics need a common grid")
    n = min(len(a), len(b))
    diff = np.abs(a.values[:n] - b.values[:n])
    clamped = diff <= math.exp(LOG_FLOOR)
    with np.errstate(divide="ignore"):
        er = np.where(clamped, LOG_FLOOR, np.log(np.where(clamped, 1.0, diff)))
    t = a.t[:n]
    stride = 1 if plot_step is None else max(1, int(round(plot_step / a.dt)))
    idx = np.arange(1, n)  # the first grid point is excluded
    idx = idx[idx % stride == 0]
    if window is not None:
        lo, hi = window
        tol = 1e-9 * max(1.0, abs(hi))
        idx = idx[(t[idx] >= lo - tol) & (t[idx] <= hi + tol)]
    if idx.size == 0:
        raise ValueError("analysis window contains no grid points")
    meta = dict(metadata, window=window, plot_step=plot_step, clamped_points=int(clamped.sum()),
                analysis_points=int(idx.size))
    grid = GridFunction(a.t0, a.dt, er, {"kind": kind})
    return ErrorReport(grid, float(er[idx].max()), float(er[idx].min()), kind, meta)


def er1(w_green: GridFunction, w_ref: GridFunction, *, window=None, plot_step=None, **metadata) -> ErrorReport:
    """``ln|w_green - w_ref|`` with exact zeros clamped to ``LOG_FLOOR``."""
    return _log_error(w_green, w_ref, "Er1", window, plot_step, metadata)


def er2(w_n1: GridFunction, w_n2: GridFunction, *, window=None, plot_step=None, **metadata) -> ErrorReport:
    """``ln|w^{N1} - w^{N2}|``; contribution of the higher-order terms."""
    return _log_error(w_n1, w_n2, "Er2", window, plot_step, metadata)


# --- experiments ------------------------------------------------------------------


@dataclass(frozen=True)
class Settings:
    """Numerical settings shared by the forced experiments."""

    T: float = 5.0
    dt: float = 1e-3
    epsilon: float = 0.01
    method: str = "rk4"
    fit_window: tuple | None = None
    plot_step: float | None = None

    @property
    def ivp(self) -> IvpConfig:
        return IvpConfig(T=self.T, dt=self.dt, method=self.method)


def make_source(kind: str, settings: Settings, table: GridFunction | None = None):
    """Return ``(solver_source, sampler)``; ``sampler(grid)`` gives the expansion source."""
    if kind == "delta":
        d = MollifiedDelta(settings.epsilon)
        return d, lambda grid: GridFunction.from_function(d, grid)
    if kind == "custom":
        if table is None:
            raise ValueError("custom source needs a table")
        return table, lambda grid: _resample(table, grid)
    if kind not in SOURCES:
        raise ValueError(f"unknown source {kind!r}; choose from {sorted(SOURCES) + ['delta', 'custom']}")
    fn = SOURCES[kind]
    return fn, lambda grid: GridFunction.from_function(fn, grid)


def _resample(table: GridFunction, grid: Grid) -> GridFunction:
    from scipy.interpolate import CubicSpline

    if grid.T > table.T + 1e-9:
        raise ValueError("custom source table is shorter than the analysis horizon")
    return GridFunction(grid.t0, grid.dt, CubicSpline(table.t, table.values)(grid.t))


@dataclass
class ForcedRun:
    problem: Problem
    green: GreenFunction
    source: str
    f: GridFunction
    reference: GridFunction
    solutions: dict  # N -> ShortTimeSolution
    settings: Settings

    def w(self, N: int) -> GridFunction:
        return self.solutions[N].w


def run_forced(problem: Problem, green: GreenFunction, source: str, Ns, settings: Settings,
               table: GridFunction | None = None) -> ForcedRun:
    """Reference solve, basis convolutions and a least-squares fit for every N in ``Ns``.

    A delta source is centred ``t_c`` inside an extended grid; reference and
    expansion are both shifted back by ``t_c`` so the impulse sits at the origin.
    """
    solver_source, sampler = make_source(source, settings, table)
    reference = solve_reference(problem, solver_source, None, settings.ivp)
    shift = int(round(reference.metadata.get("delta_center", 0.0) / settings.dt))
    grid = Grid(0.0, settings.dt, settings.ivp.grid.n + shift)
    f_ext = sampler(grid)
    n_ref = len(reference)
    basis_ext = expansion_basis(green, f_ext, max(Ns))
    basis = [GridFunction(0.0, settings.dt, b.values[shift: shift + n_ref]) for b in basis_ext]
    f = GridFunction(0.0, settings.dt, f_ext.values[shift: shift + n_ref])
    if reference.metadata.get("truncated"):
        log.warning("reference solution for %s/%s truncated at t=%.4g", problem.name, source,
                    reference.metadata["horizon"])
    solutions = {}
    for N in sorted(set(Ns)):
        coeffs = fit_coefficients(green, f, reference, N, settings.fit_window, basis=basis)
        w = sum((a * b.values for a, b in zip(coeffs.a, basis)), np.zeros(n_ref))
        solutions[N] = ShortTimeSolution(f.with_values(w, N=N), N, green.order, coeffs)
    return ForcedRun(problem, green, source, f, reference, solutions, settings)


# --- log-error table (KdV, f = exp) ---------------------------------------------


TABLE1_NS = (1, 2, 4)


@dataclass(frozen=True)
class Table1Config:
    """KdV with ``f = exp``. The horizon is chosen so the N=1 maximum lands near -3."""

    c: float = 1.0
    settings: Settings = Settings(T=1.2, dt=1e-3, plot_step=0.1)
    Ns: tuple = TABLE1_NS


@dataclass
class Table1Result:
    rows: list  # (N, max Er1, min Er1)
    reports: dict
    run: ForcedRun

    def to_csv(self) -> str:
        return "N,max_Er1,min_Er1\n" + "".join(f"{N},{mx!r},{mn!r}\n" for N, mx, mn in self.rows)


def table1_experiment(config: Table1Config = Table1Config()) -> Table1Result:
    problem = kdv_reduced(config.c)
    green = wrap_closed_form(problem)
    run = run_forced(problem, green, "exp", config.Ns, config.settings)
    rows, reports = [], {}
    for N in config.Ns:
        rep = er1(run.w(N), run.reference, window=config.settings.fit_window,
                  plot_step=config.settings.plot_step, N=N, source="exp", model="kdv")
        reports[N] = rep
        rows.append((N, rep.max_er, rep.min_er))
    return Table1Result(rows, reports, run)


# --- leading-term dominance -----------------------------------------------------------


DOMINANCE_PAIRS = {"exp": (1, 3), "sin": (1, 2), "log1p": (1, 2), "linear": (1, 2)}


@dataclass(frozen=True)
class DominanceResult:
    source: str
    pair: tuple
    ratio: float  # ||w^N1 - w^N2||_inf / ||w^N1||_inf
    er2: ErrorReport


def leading_term_dominance(problem: Problem, green: GreenFunction, settings: Settings,
                           pairs: dict = DOMINANCE_PAIRS) -> list[DominanceResult]:
    out = []
    for source, (n1, n2) in pairs.items():
        run = run_forced(problem, green, source, (n1, n2), settings)
        w1, w2 = run.w(n1), run.w(n2)
        n = len(w1)
        mask = np.ones(n, dtype=bool)
        if settings.fit_window is not None:
            mask = (w1.t >= settings.fit_window[0]) & (w1.t <= settings.fit_window[1])
        ratio = float(np.max(np.abs(w1.values - w2.values)[mask]) / np.max(np.abs(w1.values)[mask]))
        rep = er2(w1, w2, window=settings.fit_window, plot_step=settings.plot_step, N1=n1, N2=n2, source=source)
        out.append(DominanceResult(source, (n1, n2), ratio, rep))
    return out


def build_green(problem: Problem, kind: str = "auto", s: float = 1.0, settings: Settings = Settings()) -> GreenFunction:
    """Closed-form kernel when the problem has one, otherwise ``theta * w0`` from an IVP solve."""
    if kind == "auto":
        kind = "closed_form" if problem.closed_form is not None else "homogeneous"
    if kind == "closed_form":
        return wrap_closed_form(problem)
    if kind == "homogeneous":
        return build_green_from_homogeneous(problem, s, settings.ivp)
    raise ValueError(f"unknown kernel kind {kind!r}")


MODEL_BUILDERS = {"kdv": kdv_reduced, "quadratic4": quadratic_fourth, "boussinesq": boussinesq_reduced}
