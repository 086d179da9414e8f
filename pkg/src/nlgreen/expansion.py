"""Short-time expansion ``w = sum_k a_k int_0^t (t-tau)^k G(t-tau) F_m(tau) dtau``.

``F_m`` is the m-fold cumulative integral of the source for a kernel answering
``delta^(m)`` (``F_0 = f``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .greens import GreenFunction
from .quadrature import GridFunction, convolve_weighted, cumulative_integral

MAX_TERMS = 6


class DegenerateBasisError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class ExpansionCoefficients:
    a: tuple
    fit_window: tuple | None = None
    fit_residual: float = 0.0
    condition: float = math.nan

    def __post_init__(self):
        if len(self.a) < 1:
            raise ValueError("need at least a_0")
        if self.fit_residual < 0:
            raise ValueError("fit residual must be non-negative")
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))

    @property
    def N(self) -> int:
        return len(self.a) - 1

    def report(self) -> str:
        lines = [f"N: {self.N}"]
        lines += [f"a{k}: {v!r}" for k, v in enumerate(self.a)]
        lines += [f"fit_window: {self.fit_window!r}", f"fit_residual: {self.fit_residual!r}",
                  f"condition: {self.condition!r}"]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ShortTimeSolution:
    w: GridFunction
    N: int
    green_order: int
    coefficients: ExpansionCoefficients


def source_antiderivative(G: GreenFunction, f: GridFunction) -> GridFunction:
    if f.t0 != 0.0:
        raise ValueError("the source grid must start at the origin")
    if not 0 <= G.order <= 2:
        raise ValueError(f"kernel order {G.order} not supported (0..2)")
    return f if G.order == 0 else cumulative_integral(f, G.order)


def expansion_basis(G: GreenFunction, f: GridFunction, N: int) -> list[GridFunction]:
    """``B_k = int (t - tau)^k G(t - tau) F_m(tau) dtau`` for ``k = 0..N``."""
    if not 0 <= N <= MAX_TERMS:
        raise ValueError(f"expansion order must lie in 0..{MAX_TERMS}")
    F = source_antiderivative(G, f)
    kernel = G.sample(f.grid)
    return [convolve_weighted(kernel, F, k) for k in range(N + 1)]


def leading_order_solution(G: GreenFunction, f: GridFunction, a0: float = 1.0) -> GridFunction:
    return expansion_basis(G, f, 0)[0] * a0


def short_time_partial_sum(G: GreenFunction, f: GridFunction, coeffs: ExpansionCoefficients) -> ShortTimeSolution:
    basis = expansion_basis(G, f, coeffs.N)
    w = sum((a * b.values for a, b in zip(coeffs.a, basis)), np.zeros(len(f)))
    return ShortTimeSolution(f.with_values(w, N=coeffs.N), coeffs.N, G.order, coeffs)


def _window_mask(t: np.ndarray, window) -> np.ndarray:
    if window is None:
        return np.ones_like(t, dtype=bool)
    lo, hi = window
    tol = 1e-9 * max(1.0, abs(hi))
    return (t >= lo - tol) & (t <= hi + tol)


def fit_coefficients(
    G: GreenFunction,
    f: GridFunction,
    reference: GridFunction,
    N: int,
    window=None,
    *,
    basis: list[GridFunction] | None = None,
    max_condition: float = 1e10,
) -> ExpansionCoefficients:
    """Least-squares ``a_0..a_N`` so the partial sum matches ``reference`` on ``window``.

    The condition number is that of the column-normalised basis restricted to the
    window. ``basis`` may be passed in to reuse convolutions across several N.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if not f.same_grid(reference):
        from .quadrature import GridMismatchError

        raise GridMismatchError("reference and source grids differ")
    if basis is None:
        basis = expansion_basis(G, f, N)
    n = min(len(reference), len(f))
    t = f.t[:n]
    if window is not None and window[1] > t[-1] + 1e-9 * max(1.0, window[1]):
        raise ValueError(f"fit window {window} extends past the reference horizon {t[-1]}")
    mask = _window_mask(t, window)
    A = np.column_stack([b.values[:n][mask] for b in basis[: N + 1]])
    y = reference.values[:n][mask]
    scale = np.linalg.norm(A, axis=0)
    win = (float(t[mask][0]), float(t[mask][-1]))
    if np.all(scale == 0) and not np.any(y):
        # zero source: every basis function and the reference vanish
        return ExpansionCoefficients((0.0,) * (N + 1), win, 0.0, math.nan)
    if np.any(scale == 0):
        raise DegenerateBasisError("a basis function vanishes on the fit window", math.inf)
    An = A / scale
    cond = float(np.linalg.cond(An))
    if not np.isfinite(cond) or cond > max_condition:
        raise DegenerateBasisError(f"expansion basis is rank deficient (cond={cond:.3g})", cond)
    sol, *_ = np.linalg.lstsq(An, y, rcond=None)
    a = sol / scale
    resid = float(math.sqrt(f.dt * np.sum((A @ a - y) ** 2)))
    return ExpansionCoefficients(tuple(a), win, resid, cond)
