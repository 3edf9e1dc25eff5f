"""Two-point quadrature rules read off from integral means.

If M is an integral mean of f then ∫_x^y f = (y - x) f(M(x, y)) exactly;
replacing M by its near-diagonal model gives rules with local error
O((y - x)^5):

* first kind:  (y - x) · f((x w(x) + y w(y)) / (w(x) + w(y))),  w = |f'|^(1/6)
* second kind: (y - x) · (f(x) v(y) + f(y) v(x)) / (v(x) + v(y)), v = |f'|^(1/3)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from means_lab.errors import DomainError, NumericalError
from means_lab.mean_classes import GeneratingFunction
from means_lab.numerics import EPS

FIRST = "first"
SECOND = "second"
_ALIASES = {"first": FIRST, "first_kind": FIRST, "1": FIRST, "second": SECOND, "second_kind": SECOND, "2": SECOND}


@dataclass(frozen=True)
class QuadResult:
    rule: str
    x: float
    y: float
    approx: float
    exact: Optional[float] = None

    @property
    def abs_error(self) -> Optional[float]:
        return None if self.exact is None else abs(self.approx - self.exact)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "x": self.x,
            "y": self.y,
            "approx": self.approx,
            "exact": self.exact,
            "abs_error": self.abs_error,
        }


def _rule_name(rule: str) -> str:
    try:
        return _ALIASES[str(rule).lower()]
    except KeyError:
        raise DomainError(f"unknown quadrature rule {rule!r}; use 'first' or 'second'") from None


def _in_closure(t, domain):
    return domain[0] <= t <= domain[1] and math.isfinite(t)


def _prepare(f: GeneratingFunction, x: float, y: float):
    x, y = float(x), float(y)
    # The rules only touch f at the endpoints and one interior node, so
    # endpoints on the boundary of the domain are fine if f is finite there.
    if not (_in_closure(x, f.domain) and _in_closure(y, f.domain)):
        raise DomainError(f"interval [{x}, {y}] is outside the domain of {f.label}")
    dx, dy = f.deriv1(x), f.deriv1(y)
    if not dx * dy > 0:
        raise DomainError(f"{f.label}' must keep a strict sign on [{x}, {y}]")
    return x, y, abs(dx), abs(dy)


def _exact(f: GeneratingFunction, x, y):
    return None if f.integral is None else float(f.integral(x, y))


def _first(f, x, y):
    x, y, ax, ay = _prepare(f, x, y)
    wx, wy = ax ** (1.0 / 6.0), ay ** (1.0 / 6.0)
    node = x + (y - x) * (wy / (wx + wy))
    return (y - x) * f.value(node)


def _second(f, x, y):
    x, y, ax, ay = _prepare(f, x, y)
    vx, vy = ax ** (1.0 / 3.0), ay ** (1.0 / 3.0)
    return (y - x) * (f.value(x) * vy + f.value(y) * vx) / (vx + vy)


_RULES = {FIRST: _first, SECOND: _second}


def _apply(rule: str, f: GeneratingFunction, x: float, y: float) -> QuadResult:
    name = _rule_name(rule)
    if x == y:
        return QuadResult(name, float(x), float(y), 0.0, 0.0)
    if x > y:
        r = _apply(name, f, y, x)
        return QuadResult(name, float(x), float(y), -r.approx, None if r.exact is None else -r.exact)
    return QuadResult(name, float(x), float(y), _RULES[name](f, x, y), _exact(f, x, y))


def approx_integral_first(f: GeneratingFunction, x: float, y: float) -> QuadResult:
    """First-kind rule for ∫_x^y f (reversed bounds flip the sign)."""
    return _apply(FIRST, f, x, y)


def approx_integral_second(f: GeneratingFunction, x: float, y: float) -> QuadResult:
    """Second-kind rule for ∫_x^y f (reversed bounds flip the sign)."""
    return _apply(SECOND, f, x, y)


def approx_integral(rule: str, f: GeneratingFunction, x: float, y: float) -> QuadResult:
    return _apply(rule, f, x, y)


DEFAULT_WIDTHS = tuple(0.2 * 2.0**-k for k in range(7))


@dataclass(frozen=True)
class ConvergenceFit:
    slope: float
    widths: tuple
    errors: tuple
    used: int


def convergence_fit(
    rule: str, f: GeneratingFunction, center: float, widths: Sequence[float] | None = None
) -> ConvergenceFit:
    """Least-squares slope of log|error| against log(width) for intervals
    [center - w/2, center + w/2].

    Errors at or below the rounding floor carry no information and are
    dropped; if every point is that small the rule is exact here and the
    slope is reported as infinite.
    """
    if f.integral is None:
        raise DomainError(f"{f.label} has no exact integral to measure against")
    ws = tuple(float(w) for w in (DEFAULT_WIDTHS if widths is None else widths))
    if len(ws) < 4 or any(not w > 0 for w in ws):
        raise DomainError("need at least 4 positive widths")
    if math.log10(max(ws) / min(ws)) < 1.5:
        raise DomainError("widths must span at least 1.5 decades")

    errs, keep_w, keep_e = [], [], []
    for w in ws:
        r = _apply(rule, f, center - 0.5 * w, center + 0.5 * w)
        e = r.abs_error
        errs.append(e)
        floor = max(1e-15, 64.0 * EPS * abs(r.exact))
        if e > floor:
            keep_w.append(w)
            keep_e.append(e)
    if not keep_e:
        return ConvergenceFit(math.inf, ws, tuple(errs), 0)
    if len(keep_e) < 3:
        raise NumericalError(
            f"only {len(keep_e)} widths have errors above rounding; cannot fit a slope"
        )
    slope = float(np.polyfit(np.log(keep_w), np.log(keep_e), 1)[0])
    return ConvergenceFit(slope, ws, tuple(errs), len(keep_e))


def convergence_order(
    rule: str, f: GeneratingFunction, center: float, widths: Sequence[float] | None = None
) -> float:
    """Fitted local convergence order of a rule (5 for both rules here)."""
    return convergence_fit(rule, f, center, widths).slope
