"""Cyclicity classification and optimal-norm decay rates.

For power weights w_k = (k+1)**alpha the decay of the optimal norms is a
trichotomy in (p, alpha): power decay of norm**p with exponent alpha+1-p
below the critical line alpha = p-1, logarithmic decay on it, and stagnation
above it (the norm itself, with exponent alpha-1 and critical line alpha = 1,
at p = inf).  Cyclicity of circle-zero polynomials is equivalent to decay,
with a strict boundary at p = 1.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, SweepError, UnsupportedExponentError
from .opa import (OpaResult, SolverOpts, closed_form_one_minus_zd, delta_sums,
                  solve_convex, solve_flat, solve_hilbert, solve_structural)
from .poly import CircleZeroSpec, Poly, expand
from .space import SpaceParams

SOLVER_CHOICES = ("auto", "convex", "hilbert", "structural", "flat", "closed")


@dataclass(frozen=True)
class RatePrediction:
    """Predicted decay regime and cyclicity verdict.

    The regime describes norm**p for finite p and the norm itself at
    p = inf.  ``exponent`` is the power-law exponent for the power regime and
    the log-power for the log regime; stagnation carries exponent 0.
    """

    regime: str                 # "power" | "log" | "stagnation"
    exponent: float
    cyclic: bool
    note: str = ""


@dataclass
class RateFit:
    """Least-squares decay fit of a sweep.

    ``fitted_exponent`` is the slope of log(norm**p) (log norm at p = inf)
    against log(n+d+1) over the fit window; ``fitted_log_exponent`` is the
    slope against log log(n+d+2), only fitted in the log regime.
    """

    samples: list[tuple[int, float]]
    fitted_exponent: float
    fitted_log_exponent: float | None
    r_squared: float


@dataclass
class SweepPoint:
    n: int
    d: int
    p: float
    alpha: float
    optimal_norm: float
    norm_p_power: float
    lower_bound: float
    predicted_value: float
    solver: str
    converged: bool
    iterations: int
    wall_ms: float


def classify(p: float, alpha: float) -> RatePrediction:
    """Decay regime and cyclicity for the power weight (k+1)**alpha."""
    if not p >= 1:
        raise ValueError("p must satisfy p >= 1")
    if p == math.inf:
        if alpha < 1:
            return RatePrediction("power", alpha - 1.0, cyclic=True)
        if alpha == 1:
            return RatePrediction("log", -1.0, cyclic=True)
        return RatePrediction("stagnation", 0.0, cyclic=False)
    if alpha < p - 1:
        return RatePrediction("power", alpha + 1.0 - p, cyclic=(p > 1 or alpha < 0))
    if alpha == p - 1:
        if p == 1:
            # boundary case: the norm does not tend to 0 even though the
            # log regime formula degenerates to a constant
            return RatePrediction("log", 0.0, cyclic=False,
                                  note="p=1 boundary: norm -> 0 predicted false")
        return RatePrediction("log", 1.0 - p, cyclic=True)
    return RatePrediction("stagnation", 0.0, cyclic=False)


def delta(k: int, sp: SpaceParams) -> float:
    """delta_k = (sum_{t<=k} w_t**(-q/p))**(1/q)."""
    if sp.is_flat:
        raise UnsupportedExponentError("delta needs 1 < p < inf")
    return float(delta_sums(sp, k)[k] ** (1.0 / sp.q))


def _degree_with_circle_zero(problem) -> int:
    """Degree of the problem polynomial, requiring a zero on the unit circle."""
    if isinstance(problem, CircleZeroSpec):
        if not problem.roots:
            raise ValueError("circle zero set is empty")
        return problem.degree
    if not isinstance(problem, Poly) or problem.is_zero or problem.degree == 0:
        raise ValueError("need a nonconstant polynomial or a circle zero spec")
    roots = np.roots(problem.coeffs[::-1])
    if not np.any(np.abs(np.abs(roots) - 1.0) <= 1e-8):
        raise ValueError("the lower bound applies only to f with a zero on the circle")
    return problem.degree


def lower_bound(problem, n: int, sp: SpaceParams) -> float:
    """Universal lower bound (sum_{t<=n+d} w_t**(-q/p))**(-1/q) on the optimal norm."""
    if sp.is_flat:
        raise UnsupportedExponentError("the lower bound formula needs 1 < p < inf")
    d = _degree_with_circle_zero(problem)
    return 1.0 / delta(n + d, sp)


def predicted_value(p: float, alpha: float, n: int, d: int) -> float:
    """Model decay value (unscaled) for norm**p, or the norm itself at p = inf."""
    pred = classify(p, alpha)
    if pred.regime == "power":
        return float((n + d + 1) ** pred.exponent)
    if pred.regime == "log":
        return float(math.log(n + d + 2) ** pred.exponent)
    return 1.0


def detect_one_minus_zd(problem) -> tuple[int, complex] | None:
    """Recognize f = c*(1 - z^d); returns (d, c) or None."""
    f = expand(problem) if isinstance(problem, CircleZeroSpec) else problem
    if not isinstance(f, Poly) or f.is_zero or f.degree == 0:
        return None
    c = f.coeffs
    lead = c[0]
    if lead == 0 or abs(c[-1] + lead) > 1e-12 * abs(lead):
        return None
    if c.size > 2 and np.abs(c[1:-1]).max() > 1e-12 * abs(lead):
        return None
    return f.degree, complex(lead)


def _dispatch(problem, n: int, sp: SpaceParams, solver: str,
              opts: SolverOpts) -> OpaResult:
    if solver not in SOLVER_CHOICES:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVER_CHOICES}")
    f = expand(problem) if isinstance(problem, CircleZeroSpec) else problem
    if solver == "auto":
        if not sp.is_flat and detect_one_minus_zd(problem) is not None:
            solver = "closed"
        elif sp.is_flat:
            solver = "flat"
        elif sp.p == 2.0:
            solver = "hilbert"
        else:
            solver = "convex"
    if solver == "closed":
        match = detect_one_minus_zd(problem)
        if match is None:
            raise ValueError("closed-form solver requires f = c*(1 - z^d)")
        d, lead = match
        res = closed_form_one_minus_zd(d, n, sp)
        if lead != 1.0:
            # f = lead * (1 - z^d): same residual with the approximant rescaled
            approx = res.approximant * (1.0 / lead)
            return OpaResult(approximant=approx, residual=res.residual,
                             optimal_norm=res.optimal_norm,
                             ortho_residual_max=res.ortho_residual_max,
                             iterations=res.iterations, converged=res.converged,
                             solver=res.solver)
        return res
    if solver == "hilbert":
        if sp.p != 2.0:
            raise ValueError("the hilbert solver applies only at p = 2")
        return solve_hilbert(f, n, sp.weight)
    if solver == "convex":
        return solve_convex(f, n, sp, opts)
    if solver == "flat":
        return solve_flat(f, n, sp, opts)[0]
    # structural
    if not isinstance(problem, CircleZeroSpec):
        raise ValueError("the structural solver needs a circle zero spec")
    return solve_structural(problem, n, sp, opts)[0]


def run_sweep(problem, sp: SpaceParams, n_grid, solver: str = "auto",
              opts: SolverOpts | None = None) -> list[SweepPoint]:
    """Solve at every order in n_grid and assemble per-point records.

    Raises SweepError listing the failing orders if any solve does not
    converge, and InternalConsistencyError if a computed norm undercuts the
    universal lower bound.
    """
    opts = opts or SolverOpts()
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    d = (problem.degree if isinstance(problem, (CircleZeroSpec, Poly)) else None)
    if d is None or d == 0:
        raise ValueError("problem must be a nonconstant polynomial or root spec")
    alpha = sp.alpha if sp.alpha is not None else math.nan
    try:
        bounds = {n: lower_bound(problem, n, sp) for n in n_grid}
    except (ValueError, UnsupportedExponentError):
        bounds = {n: math.nan for n in n_grid}

    points: list[SweepPoint] = []
    failed = []
    for n in n_grid:
        t0 = time.perf_counter()
        res = _dispatch(problem, n, sp, solver, opts)
        wall = (time.perf_counter() - t0) * 1e3
        if not res.converged:
            failed.append(n)
        bound = bounds[n]
        if math.isfinite(bound) and res.optimal_norm < bound * (1 - 1e-12) - 1e-15:
            raise InternalConsistencyError(
                f"optimal norm {res.optimal_norm!r} violates the lower bound "
                f"{bound!r} at n={n}")
        npow = res.optimal_norm if sp.p == math.inf else res.optimal_norm ** sp.p
        points.append(SweepPoint(
            n=n, d=d, p=sp.p, alpha=alpha, optimal_norm=res.optimal_norm,
            norm_p_power=npow, lower_bound=bound,
            predicted_value=(predicted_value(sp.p, alpha, n, d)
                             if not math.isnan(alpha) else math.nan),
            solver=res.solver, converged=res.converged,
            iterations=res.iterations, wall_ms=wall))
    if failed:
        raise SweepError(f"solver failed to converge at n in {failed}", failed)
    return points


def fit_rates(points: list[SweepPoint], sp: SpaceParams, fit_min_n: int = 32) -> RateFit:
    """Log-log least squares on a sweep, restricted to orders >= fit_min_n.

    Small orders are excluded by default because the decay laws are
    asymptotic and preasymptotic samples bias the slope.
    """
    window = [pt for pt in points if pt.n >= fit_min_n and pt.optimal_norm > 0]
    if len(window) < 2:
        raise ValueError("need at least two sweep points with n >= fit_min_n")
    d = window[0].d
    x = np.log([pt.n + d + 1 for pt in window])
    y = np.log([pt.norm_p_power for pt in window])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = y - (slope * x + intercept)
    total = y - y.mean()
    denom = float(total @ total)
    r2 = 1.0 - float(fitted @ fitted) / denom if denom > 0 else 1.0

    log_slope = None
    alpha = window[0].alpha
    if not math.isnan(alpha) and classify(sp.p, alpha).regime == "log":
        xl = np.log(np.log([pt.n + d + 2 for pt in window]))
        log_slope = float(np.polyfit(xl, y, 1)[0])
    return RateFit(samples=[(pt.n, pt.optimal_norm) for pt in window],
                   fitted_exponent=float(slope), fitted_log_exponent=log_slope,
                   r_squared=r2)


def sweep_and_fit(problem, sp: SpaceParams, n_grid, solver: str = "auto",
                  opts: SolverOpts | None = None, fit_min_n: int = 32) -> RateFit:
    """Run a sweep and fit the decay exponent in one call."""
    return fit_rates(run_sweep(problem, sp, n_grid, solver, opts), sp, fit_min_n)


def log_band_ratio(points: list[SweepPoint], sp: SpaceParams,
                   fit_min_n: int = 32) -> float:
    """Spread of norm**p * log(n+d+2)**(p-1) across the window.

    In the log regime this product should be bounded above and below, so the
    returned max/min ratio staying inside a modest band verifies the
    two-sided estimate without fitting an ill-conditioned triple logarithm.
    """
    window = [pt for pt in points if pt.n >= fit_min_n]
    if not window:
        raise ValueError("empty fit window")
    exponent = 1.0 if sp.p == math.inf else sp.p - 1.0
    vals = [pt.norm_p_power * math.log(pt.n + pt.d + 2) ** exponent for pt in window]
    return max(vals) / min(vals)


def geometric_grid(lo: int, hi: int) -> list[int]:
    """Doubling grid {lo, 2lo, 4lo, ...} capped at hi (hi always included)."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    grid = []
    n = lo
    while n < hi:
        grid.append(n)
        n *= 2
    grid.append(hi)
    return grid
