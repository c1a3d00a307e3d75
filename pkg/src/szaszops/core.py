"""Evaluation of Szasz-Mirakjan operators and the a^x-preserving modification.

The classical operator samples f on the lattice k/n against Poisson weights of
intensity n*x.  The modified operator replaces x by the transformed point
s_n(x) = x*log(a) / ((a^(1/n) - 1)*n), which makes a^x a fixed point of the
family.  Both are evaluated through certified truncated series: the retained
index window is grown until the discarded probability mass is provably below
the configured tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

_MAX_WINDOW_STEPS = 50_000_000


class DomainError(ValueError):
    """Input outside the operator domain (negative x, a <= 1, bad tolerance)."""


class EvaluationError(ArithmeticError):
    """A series term, sample value, or prefactor is not finite."""


@dataclass(frozen=True)
class OperatorParams:
    """Operator index n and preserved base a (dimensionless, a > 1)."""

    n: int
    a: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.a, (int, float)) or not math.isfinite(self.a) or self.a <= 1.0:
            raise DomainError(f"a must be a finite real exceeding 1, got {self.a!r}")

    @property
    def log_a(self) -> float:
        return math.log(self.a)

    @property
    def root_gap(self) -> float:
        """a^(1/n) - 1, computed via expm1 so it stays accurate as a -> 1+."""
        return math.expm1(math.log(self.a) / self.n)


@dataclass(frozen=True)
class Growth:
    """Growth tag guarding series evaluation.

    kind "bounded" and "polynomial" need no special handling (Poisson tails
    beat any polynomial); "exponential" triggers the tilted evaluation path,
    with `rate` the exponential rate c in |f(t)| ~ e^(c*t).
    """

    kind: str
    rate: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("bounded", "polynomial", "exponential"):
            raise DomainError(f"unknown growth kind {self.kind!r}")


BOUNDED = Growth("bounded")


def polynomial_growth(degree: float) -> Growth:
    return Growth("polynomial", float(degree))


def exponential_growth(rate: float) -> Growth:
    return Growth("exponential", float(rate))


@dataclass(frozen=True)
class ScalarFunction:
    """Real function on [0, inf) with optional analytic derivatives.

    d1/d2, when given, must be the true first/second derivatives of f; the
    analysis helpers fall back to central finite differences when they are
    absent.  The growth tag is an evaluation guard, not a norm.
    """

    id: str
    f: Callable[[float], float]
    d1: Optional[Callable[[float], float]] = None
    d2: Optional[Callable[[float], float]] = None
    growth: Growth = BOUNDED

    def __call__(self, t):
        return self.f(t)


@dataclass(frozen=True)
class EvalConfig:
    """Numerical knobs shared by every evaluation path."""

    series_tol: float = 1e-12
    quad_order: int = 16
    fd_step_1: Optional[float] = None
    fd_step_2: Optional[float] = None
    grid_points: int = 2048

    def __post_init__(self) -> None:
        if not (0.0 < self.series_tol <= 1e-3):
            raise DomainError(f"series_tol must lie in (0, 1e-3], got {self.series_tol!r}")
        if self.quad_order < 2:
            raise DomainError(f"quad_order must be >= 2, got {self.quad_order!r}")
        if self.grid_points < 16:
            raise DomainError(f"grid_points must be >= 16, got {self.grid_points!r}")


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class WeightSeries:
    """Truncated, mode-anchored Poisson weight window with a certified tail bound.

    weights[i] is the Poisson(mu) mass at k_min + i; tail_mass is an upper
    bound on the total discarded mass (both tails).
    """

    mu: float
    k_min: int
    k_max: int
    weights: np.ndarray
    tail_mass: float

    def indices(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)


def _check_x(x: float) -> float:
    if not isinstance(x, (int, float)) or not math.isfinite(x) or x < 0:
        raise DomainError(f"x must be a finite real >= 0, got {x!r}")
    return float(x)


def transform_point(params: OperatorParams, x: float) -> float:
    """Point transform s_n(x) = x*log(a) / ((a^(1/n)-1)*n).

    Linear and strictly increasing in x, with s_n(x) < x for a > 1 and
    s_n(x) -> x as n -> infinity.
    """
    x = _check_x(x)
    return x * params.log_a / (params.n * params.root_gap)


def poisson_weights(mu: float, tol: float) -> WeightSeries:
    """Poisson(mu) weights over a window certified to carry mass >= 1 - tol.

    The mode weight is computed in log space and the window grows outward by
    the stable recurrences w_{k+1} = w_k*mu/(k+1), w_{k-1} = w_k*k/mu until
    the geometric-ratio majorant bounds each discarded tail below tol/2.
    """
    if not (isinstance(tol, (int, float)) and 0.0 < tol <= 1e-3):
        raise DomainError(f"tol must lie in (0, 1e-3], got {tol!r}")
    if not isinstance(mu, (int, float)) or not math.isfinite(mu) or mu < 0:
        raise DomainError(f"mu must be a finite real >= 0, got {mu!r}")
    mu = float(mu)
    if mu == 0.0:
        return WeightSeries(0.0, 0, 0, np.ones(1), 0.0)

    half = 0.5 * tol
    k0 = int(math.floor(mu))
    w0 = math.exp(k0 * math.log(mu) - mu - math.lgamma(k0 + 1))

    upper = [w0]
    k = k0
    w = w0
    upper_tail = math.inf
    for _ in range(_MAX_WINDOW_STEPS):
        ratio = mu / (k + 1)
        if ratio < 1.0:
            upper_tail = w * ratio / (1.0 - ratio)
            if upper_tail < half:
                break
        w = w * mu / (k + 1)
        k += 1
        upper.append(w)
    else:
        raise EvaluationError(f"weight window failed to close for mu={mu!r}")
    k_max = k

    lower: list[float] = []
    k = k0
    w = w0
    lower_tail = 0.0
    while k > 0:
        ratio = k / mu
        if ratio < 1.0:
            bound = w * ratio / (1.0 - ratio)
            if bound < half:
                lower_tail = bound
                break
        w = w * k / mu
        k -= 1
        lower.append(w)
    k_min = k

    weights = np.array(lower[::-1] + upper)
    tail_mass = upper_tail + lower_tail
    total = math.fsum(weights.tolist())
    if abs(total + tail_mass - 1.0) > 2.0 * tol:
        raise EvaluationError(
            f"weight normalization drifted: sum={total!r} tail={tail_mass!r} for mu={mu!r}"
        )
    return WeightSeries(mu, k_min, k_max, weights, tail_mass)


def _sample_values(fn: Callable, ts: np.ndarray) -> np.ndarray:
    """Evaluate fn on an array of points, falling back to a scalar loop."""
    try:
        out = np.asarray(fn(ts), dtype=float)
        if out.shape == ts.shape:
            return out
    except Exception:
        pass
    return np.array([float(fn(float(t))) for t in ts], dtype=float)


def _check_finite(values: np.ndarray, ks: np.ndarray, n: int) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(ks[bad.argmax()])
        raise EvaluationError(f"f(k/n) is not finite at k={k}, n={n}")


def _series_value(fn: Callable, growth: Growth, n: int, nu: float, tol: float) -> float:
    """Certified sum_k Poisson(nu)_k * fn(k/n).

    For exponential growth the series is tilted exactly:
    w_k(nu)*f(k/n) = e^(nu*(e^(c/n)-1)) * w_k(nu*e^(c/n)) * f(k/n)*e^(-c*k/n),
    so the window is sized on the tilted intensity, where the weighted mass
    actually lives.
    """
    if nu == 0.0:
        return float(fn(0.0))
    if growth.kind == "exponential" and growth.rate != 0.0:
        beta = growth.rate / n
        try:
            prefactor = math.exp(nu * math.expm1(beta))
        except OverflowError:
            raise EvaluationError(f"series prefactor overflows for nu={nu!r}, rate={growth.rate!r}")
        series = poisson_weights(nu * math.exp(beta), tol)
        ks = series.indices()
        values = _sample_values(fn, ks / n)
        _check_finite(values, ks, n)
        damped = values * np.exp(-beta * ks)
        _check_finite(damped, ks, n)
        result = prefactor * math.fsum((series.weights * damped).tolist())
    else:
        series = poisson_weights(nu, tol)
        ks = series.indices()
        values = _sample_values(fn, ks / n)
        _check_finite(values, ks, n)
        result = math.fsum((series.weights * values).tolist())
    if not math.isfinite(result):
        raise EvaluationError(f"series value is not finite for nu={nu!r}")
    return result


def eval_classical(
    f: ScalarFunction, params: OperatorParams, x: float, cfg: EvalConfig = DEFAULT_CONFIG
) -> float:
    """Classical Szasz-Mirakjan value: sum_k Poisson(n*x)_k * f(k/n)."""
    x = _check_x(x)
    if x == 0.0:
        return float(f.f(0.0))
    return _series_value(f.f, f.growth, params.n, params.n * x, cfg.series_tol)


def eval_modified(
    f: ScalarFunction, params: OperatorParams, x: float, cfg: EvalConfig = DEFAULT_CONFIG
) -> float:
    """Modified operator value; equals the classical operator at s_n(x)."""
    x = _check_x(x)
    if x == 0.0:
        return float(f.f(0.0))
    nu = x * params.log_a / params.root_gap
    return _series_value(f.f, f.growth, params.n, nu, cfg.series_tol)


def exponential_image(lam: float, params: OperatorParams, x: float) -> float:
    """Closed-form modified-operator image of e^(lam*t): a^((e^(lam/n)-1)*x/(a^(1/n)-1)).

    Any real lam is accepted; lam = log(a) reproduces the fixed point a^x.
    """
    x = _check_x(x)
    if not isinstance(lam, (int, float)) or not math.isfinite(lam):
        raise DomainError(f"lambda must be a finite real, got {lam!r}")
    exponent = x * math.expm1(lam / params.n) / params.root_gap
    try:
        return math.exp(exponent * params.log_a)
    except OverflowError:
        raise EvaluationError(f"exponential image overflows at lam={lam!r}, x={x!r}")
