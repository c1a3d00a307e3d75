"""Error bounds, Voronovskaya asymptotics, convexity classification, and orderings.

The error bound is the modulus-of-continuity estimate
|S*(f;x) - f(x)| <= 2*omega(f, delta) with delta the square root of the second
central moment.  The Voronovskaya limit is n*(S*(f;x) - f(x)) ->
-x/2 * (f'(x)*log(a) - f''(x)).  Convexity with respect to the pair
{1, a^x} is decided by the 3x3 determinant test on ordered triples, with the
smooth criterion f'' >= log(a)*f' as a cross-check.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    DEFAULT_CONFIG,
    DomainError,
    EvalConfig,
    OperatorParams,
    ScalarFunction,
    _check_x,
    _sample_values,
    eval_classical,
    eval_modified,
)
from .moments import central_moment

_EPS = sys.float_info.epsilon


class DerivativeError(ValueError):
    """Derivatives requested but analytic ones are absent and differencing is disabled."""


class PreconditionError(ValueError):
    """The function failed a monotonicity/convexity screen required by a check."""


@dataclass(frozen=True)
class ErrorBoundReport:
    n: int
    a: float
    x: float
    delta: float
    omega: float
    bound: float
    actual_error: float


@dataclass(frozen=True)
class ConvexityVerdict:
    function_id: str
    a: float
    verdict: str  # convex | strictly_convex | not_convex | inconclusive
    witness: Optional[tuple[float, float, float]] = None


@dataclass(frozen=True)
class MonotoneOrderingRow:
    x: float
    first_n: Optional[int]
    first_n_classical: Optional[int]
    violations: int
    violations_classical: int


@dataclass(frozen=True)
class MonotoneOrderingReport:
    function_id: str
    a: float
    n_start: int
    n_stop: int
    rows: tuple[MonotoneOrderingRow, ...]

    @property
    def total_violations(self) -> int:
        return sum(r.violations + r.violations_classical for r in self.rows)


@dataclass(frozen=True)
class SandwichOrderingRow:
    x: float
    n: int
    lower_ok: bool
    upper_ok: bool


@dataclass(frozen=True)
class SandwichOrderingReport:
    function_id: str
    a: float
    rows: tuple[SandwichOrderingRow, ...]

    @property
    def total_violations(self) -> int:
        return sum((not r.lower_ok) + (not r.upper_ok) for r in self.rows)


def _as_callable(f) -> Callable:
    return f.f if isinstance(f, ScalarFunction) else f


def fd_step(x: float, order: int, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Scale-aware central-difference step: eps^(1/3) for f', eps^(1/4) for f''."""
    configured = cfg.fd_step_1 if order == 1 else cfg.fd_step_2
    if configured is not None:
        return configured
    power = 3.0 if order == 1 else 4.0
    return max(1.0, abs(x)) * _EPS ** (1.0 / power)


def derivative(f, x: float, order: int, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """First or second derivative at x: analytic when available, else differences.

    Falls back to one-sided second-order formulas near the domain edge x = 0.
    A configured step of 0 disables differencing.
    """
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order!r}")
    if isinstance(f, ScalarFunction):
        analytic = f.d1 if order == 1 else f.d2
        if analytic is not None:
            return float(analytic(x))
    fn = _as_callable(f)
    h = fd_step(x, order, cfg)
    if h == 0.0:
        raise DerivativeError(f"no analytic derivative of order {order} and differencing disabled")
    if order == 1:
        if x - h >= 0.0:
            return (fn(x + h) - fn(x - h)) / (2.0 * h)
        return (-3.0 * fn(x) + 4.0 * fn(x + h) - fn(x + 2.0 * h)) / (2.0 * h)
    if x - h >= 0.0:
        return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)
    return (2.0 * fn(x) - 5.0 * fn(x + h) + 4.0 * fn(x + 2.0 * h) - fn(x + 3.0 * h)) / (h * h)


def modulus_of_continuity(f, delta: float, bracket: tuple[float, float], grid_points: int = 2048) -> float:
    """Grid estimate of omega(f, delta) = sup |f(t) - f(s)| over |t - s| <= delta.

    A lower estimate of the true supremum (grid pairs only); non-decreasing in
    delta by construction.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (hi > lo >= 0.0):
        raise DomainError(f"bracket must satisfy hi > lo >= 0, got ({lo!r}, {hi!r})")
    if not (isinstance(delta, (int, float)) and delta > 0.0):
        raise DomainError(f"delta must be > 0, got {delta!r}")
    if grid_points < 2:
        raise DomainError(f"grid_points must be >= 2, got {grid_points!r}")
    ts = np.linspace(lo, hi, grid_points)
    values = _sample_values(_as_callable(f), ts)
    step = (hi - lo) / (grid_points - 1)
    width = min(int(delta / step), grid_points - 1)
    if width == 0:
        return 0.0
    windows = np.lib.stride_tricks.sliding_window_view(values, width + 1)
    return float((windows.max(axis=1) - windows.min(axis=1)).max())


def error_bound(
    f: ScalarFunction, params: OperatorParams, x: float, cfg: EvalConfig = DEFAULT_CONFIG
) -> ErrorBoundReport:
    """Modulus-based error report: delta, omega over [max(0, x-4d), x+4d], bound, error.

    The bracket covers the operator's effective support (the weights
    concentrate within a few delta of x), so the grid omega is a faithful
    lower estimate of the one the bound needs.
    """
    x = _check_x(x)
    delta = math.sqrt(max(central_moment(2, params, x), 0.0))
    actual = abs(eval_modified(f, params, x, cfg) - float(f.f(x)))
    if delta == 0.0:
        omega = 0.0
    else:
        bracket = (max(0.0, x - 4.0 * delta), x + 4.0 * delta)
        omega = modulus_of_continuity(f, delta, bracket, cfg.grid_points)
    return ErrorBoundReport(params.n, params.a, x, delta, omega, 2.0 * omega, actual)


def voronovskaya_limit(f, a: float, x: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Asymptotic value of n*(S*(f;x) - f(x)): -x/2 * (f'(x)*log(a) - f''(x))."""
    x = _check_x(x)
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 1.0):
        raise DomainError(f"a must exceed 1, got {a!r}")
    if x == 0.0:
        return 0.0
    d1 = derivative(f, x, 1, cfg)
    d2 = derivative(f, x, 2, cfg)
    return -0.5 * x * (d1 * math.log(a) - d2)


def voronovskaya_residuals(
    f: ScalarFunction,
    a: float,
    x: float,
    n_values: Sequence[int],
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> list[tuple[int, float]]:
    """Residuals n*(S*(f;x) - f(x)) - limit along n_values; magnitudes shrink in n."""
    limit = voronovskaya_limit(f, a, x, cfg)
    fx = float(f.f(x))
    out = []
    for n in n_values:
        value = eval_modified(f, OperatorParams(n, a), x, cfg)
        out.append((n, n * (value - fx) - limit))
    return out


def _ordered_triples(count: int) -> list[tuple[int, int, int]]:
    """Consecutive triples plus a deterministic sample of wider ones."""
    triples = [(i, i + 1, i + 2) for i in range(count - 2)]
    for span in (2, 3, 5, 8, 13):
        if 2 * span < count:
            triples.extend((i, i + span, i + 2 * span) for i in range(0, count - 2 * span, span))
    if count >= 3:
        triples.append((0, count // 2, count - 1))
    return triples


def _convexity_determinants(sigma: np.ndarray, values: np.ndarray, grid: np.ndarray):
    """Yield (det, tolerance, triple of x) for each tested ordered triple."""
    for i, j, k in _ordered_triples(len(grid)):
        s1, s2, s3 = sigma[i], sigma[j], sigma[k]
        f1, f2, f3 = values[i], values[j], values[k]
        det = (s2 - s1) * (f3 - f2) - (s3 - s2) * (f2 - f1)
        scale = max(1.0, abs(s1), abs(s2), abs(s3), abs(f1), abs(f2), abs(f3))
        yield det, 1e-10 * scale, (float(grid[i]), float(grid[j]), float(grid[k]))


def _classify(dets) -> tuple[str, Optional[tuple[float, float, float]]]:
    verdict = "strictly_convex"
    for det, tol, triple in dets:
        if det < -tol:
            return "not_convex", triple
        if det < tol:
            verdict = "convex"
    return verdict, None


def convexity_wrt_base(
    f, a: float, grid: Sequence[float], det_tol: Optional[float] = None
) -> ConvexityVerdict:
    """Classify convexity of f with respect to the pair {1, a^x} on a grid.

    Tests the sign of det[[1,1,1],[a^x1,a^x2,a^x3],[f1,f2,f3]] over ordered
    triples.  When f carries analytic derivatives the smooth criterion
    f'' - log(a)*f' >= 0 is cross-checked; disagreement yields "inconclusive".
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3 or not (np.diff(grid) > 0).all():
        raise DomainError("grid must be a strictly increasing sequence of at least 3 points")
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 1.0):
        raise DomainError(f"a must exceed 1, got {a!r}")
    fn = _as_callable(f)
    values = _sample_values(fn, grid)
    sigma = np.exp(grid * math.log(a))
    dets = list(_convexity_determinants(sigma, values, grid))
    if det_tol is not None:
        dets = [(d, det_tol, t) for d, _, t in dets]
    verdict, witness = _classify(dets)

    fid = f.id if isinstance(f, ScalarFunction) else getattr(f, "__name__", "f")
    if isinstance(f, ScalarFunction) and f.d1 is not None and f.d2 is not None:
        gap = np.array([float(f.d2(t)) - math.log(a) * float(f.d1(t)) for t in grid])
        gap_tol = 1e-9 * max(1.0, float(np.abs(gap).max()))
        gap_min = float(gap.min())
        smooth_not_convex = gap_min < -gap_tol
        if verdict == "not_convex" and not smooth_not_convex:
            verdict = "inconclusive"
        elif verdict in ("convex", "strictly_convex") and smooth_not_convex:
            verdict = "inconclusive"
    return ConvexityVerdict(fid, float(a), verdict, witness)


def _screen_monotone(f, grid: np.ndarray, cfg: EvalConfig, decreasing: bool) -> None:
    slopes = np.array([derivative(f, float(t), 1, cfg) for t in grid])
    tol = 1e-9 * max(1.0, float(np.abs(slopes).max()))
    if decreasing and float(slopes.max()) > tol:
        raise PreconditionError(f"{f.id}: not decreasing on the screen grid")
    if not decreasing and float(slopes.min()) < -tol:
        raise PreconditionError(f"{f.id}: not increasing on the screen grid")


def _screen_classically_convex(f, grid: np.ndarray) -> None:
    values = _sample_values(_as_callable(f), grid)
    verdict, _ = _classify(_convexity_determinants(grid, values, grid))
    if verdict == "not_convex":
        raise PreconditionError(f"{f.id}: not convex on the screen grid")


def check_monotone_ordering(
    f: ScalarFunction,
    a: float,
    x_grid: Sequence[float],
    n_range: Sequence[int],
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> MonotoneOrderingReport:
    """Verify S*_n >= S*_{n+1} >= f for a decreasing convex f, along consecutive n.

    Also verifies the classical chain S_n >= S_{n+1} >= f.  For each x the row
    records the smallest n from which each chain holds through the end of the
    range, and the count of pairwise violations (expected zero).
    """
    ns = [int(n) for n in n_range]
    if not ns or any(b != a_ + 1 for a_, b in zip(ns, ns[1:])) or ns[0] < 1:
        raise DomainError("n_range must be consecutive positive integers")
    xs = np.asarray(list(x_grid), dtype=float)
    if xs.ndim != 1 or len(xs) == 0 or (xs < 0).any():
        raise DomainError("x_grid must be non-negative reals")

    screen_grid = np.unique(np.concatenate([xs, np.linspace(xs.min(), xs.max() + 1.0, 33)]))
    _screen_monotone(f, screen_grid, cfg, decreasing=True)
    _screen_classically_convex(f, screen_grid)

    all_n = ns + [ns[-1] + 1]
    rows = []
    for x in xs:
        fx = float(f.f(x))
        modified = {n: eval_modified(f, OperatorParams(n, a), float(x), cfg) for n in all_n}
        classical = {n: eval_classical(f, OperatorParams(n, a), float(x), cfg) for n in all_n}
        row = []
        for chain in (modified, classical):
            scale = max(abs(v) for v in chain.values())
            slack = 10.0 * cfg.series_tol * (1.0 + scale)
            ok = [
                chain[n] >= chain[n + 1] - slack and chain[n + 1] >= fx - slack for n in ns
            ]
            violations = sum(not v for v in ok)
            first_n = None
            for idx in range(len(ns) - 1, -1, -1):
                if not ok[idx]:
                    break
                first_n = ns[idx]
            row.append((first_n, violations))
        rows.append(
            MonotoneOrderingRow(float(x), row[0][0], row[1][0], row[0][1], row[1][1])
        )
    return MonotoneOrderingReport(f.id, float(a), ns[0], ns[-1], tuple(rows))


def check_sandwich_ordering(
    f: ScalarFunction,
    a: float,
    x_grid: Sequence[float],
    n_values: Sequence[int],
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> SandwichOrderingReport:
    """Verify f <= S*_n(f) <= S_n(f) for an increasing, {1, a^x}-convex f."""
    xs = np.asarray(list(x_grid), dtype=float)
    if xs.ndim != 1 or len(xs) == 0 or (xs < 0).any():
        raise DomainError("x_grid must be non-negative reals")
    ns = [int(n) for n in n_values]
    if not ns or any(n < 1 for n in ns):
        raise DomainError("n_values must be positive integers")

    screen_grid = np.unique(np.concatenate([xs, np.linspace(xs.min(), xs.max() + 1.0, 33)]))
    _screen_monotone(f, screen_grid, cfg, decreasing=False)
    verdict = convexity_wrt_base(f, a, screen_grid)
    if verdict.verdict not in ("convex", "strictly_convex"):
        raise PreconditionError(f"{f.id}: not convex with respect to the base (got {verdict.verdict})")

    rows = []
    for x in xs:
        fx = float(f.f(x))
        for n in ns:
            params = OperatorParams(n, a)
            mid = eval_modified(f, params, float(x), cfg)
            top = eval_classical(f, params, float(x), cfg)
            slack = 10.0 * cfg.series_tol * (1.0 + max(abs(fx), abs(mid), abs(top)))
            rows.append(
                SandwichOrderingRow(float(x), n, fx <= mid + slack, mid <= top + slack)
            )
    return SandwichOrderingReport(f.id, float(a), tuple(rows))
