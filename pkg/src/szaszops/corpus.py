"""Built-in benchmark functions and helpers for constructing common ones."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BOUNDED,
    DomainError,
    ScalarFunction,
    exponential_growth,
    polynomial_growth,
)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    fn: ScalarFunction
    notes: str = ""


def monomial(order: int) -> ScalarFunction:
    """e_i(t) = t^i with analytic derivatives."""
    if not isinstance(order, int) or order < 0:
        raise DomainError(f"monomial order must be a non-negative integer, got {order!r}")
    if order == 0:
        return constant(1.0, fid="e0")
    d1 = (lambda t: order * t ** (order - 1))
    d2 = (lambda t: order * (order - 1) * t ** (order - 2)) if order >= 2 else (lambda t: 0.0 * t)
    return ScalarFunction(
        f"e{order}", lambda t: t**order, d1, d2, growth=polynomial_growth(order)
    )


def constant(value: float, fid: str | None = None) -> ScalarFunction:
    return ScalarFunction(
        fid or f"const{value}",
        lambda t: value + 0.0 * t,
        lambda t: 0.0 * t,
        lambda t: 0.0 * t,
        growth=BOUNDED,
    )


def power_base(a: float, scale: float = 1.0, sign: float = 1.0) -> ScalarFunction:
    """sign * a^(scale*t); the scale=1 case is the operator's fixed point."""
    if not (a > 1.0 and math.isfinite(a)):
        raise DomainError(f"a must exceed 1, got {a!r}")
    c = scale * math.log(a)
    prefix = "-" if sign < 0 else ""
    suffix = "t" if scale == 1.0 else f"{scale:g}t"
    return ScalarFunction(
        f"{prefix}a^{suffix}",
        lambda t: sign * np.exp(c * t),
        lambda t: sign * c * np.exp(c * t),
        lambda t: sign * c * c * np.exp(c * t),
        growth=exponential_growth(c),
    )


_POLY3 = ScalarFunction(
    "poly3",
    lambda t: t * (t - 1.0 / 3.0) * (t - 0.25),
    lambda t: 3.0 * t * t - (7.0 / 6.0) * t + 1.0 / 12.0,
    lambda t: 6.0 * t - 7.0 / 6.0,
    growth=polynomial_growth(3),
)

_X2EXP4X = ScalarFunction(
    "x2exp4x",
    lambda t: t * t * np.exp(4.0 * t),
    lambda t: (2.0 * t + 4.0 * t * t) * np.exp(4.0 * t),
    lambda t: (2.0 + 16.0 * t + 16.0 * t * t) * np.exp(4.0 * t),
    growth=exponential_growth(4.0),
)

_X2COS4X = ScalarFunction(
    "x2cos4x",
    lambda t: t * t * np.cos(4.0 * t),
    lambda t: 2.0 * t * np.cos(4.0 * t) - 4.0 * t * t * np.sin(4.0 * t),
    lambda t: (2.0 - 16.0 * t * t) * np.cos(4.0 * t) - 16.0 * t * np.sin(4.0 * t),
    growth=polynomial_growth(2),
)

_EXPNEG = ScalarFunction(
    "expneg",
    lambda t: np.exp(-t),
    lambda t: -np.exp(-t),
    lambda t: np.exp(-t),
    growth=BOUNDED,
)


def builtin_corpus() -> dict[str, CorpusEntry]:
    """Registry of named benchmark functions (a fresh dict per call)."""
    entries = [
        CorpusEntry("poly3", _POLY3, "cubic with two interior roots"),
        CorpusEntry("x2exp4x", _X2EXP4X, "exponentially growing"),
        CorpusEntry("x2cos4x", _X2COS4X, "oscillatory"),
        CorpusEntry("expneg", _EXPNEG, "decreasing convex"),
    ]
    entries.extend(CorpusEntry(f"e{i}", monomial(i), "monomial") for i in range(5))
    return {e.id: e for e in entries}


# ids resolved per configured base a rather than from the registry
DYNAMIC_IDS = ("a^t", "a^2t", "-a^2t")


def resolve_function(fid: str, a: float) -> ScalarFunction:
    """Look up a registered function, or build a base-dependent one (a^t family)."""
    if fid == "a^t":
        return power_base(a)
    if fid == "a^2t":
        return power_base(a, scale=2.0)
    if fid == "-a^2t":
        return power_base(a, scale=2.0, sign=-1.0)
    registry = builtin_corpus()
    if fid not in registry:
        known = ", ".join(sorted(registry) + list(DYNAMIC_IDS))
        raise DomainError(f"unknown function id {fid!r} (known: {known})")
    return registry[fid].fn
