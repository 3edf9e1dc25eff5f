"""Shared numerical kernels: quadrature on [0, 1], monotone inversion, and
finite differences with Richardson extrapolation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from means_lab.errors import DomainError, NumericalError

EPS = float(np.finfo(float).eps)

SMOOTH = "smooth"
ENDPOINT_SINGULAR = "endpoint_singular"
QUADRATURE_TAGS = (SMOOTH, ENDPOINT_SINGULAR)

# Errors a user callback may raise when probed outside its natural domain.
_EVAL_ERRORS = (DomainError, ValueError, ZeroDivisionError, OverflowError)


def as_array_values(func: Callable, points: np.ndarray) -> np.ndarray:
    """Evaluate ``func`` on ``points``, vectorised when ``func`` allows it."""
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(func(points), dtype=float)
        if out.shape != points.shape:
            out = np.broadcast_to(out, points.shape).astype(float)
        return out
    except (TypeError, ValueError):
        return np.array([float(func(float(p))) for p in points])


# --------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def _fixed_rule(k: Callable, a: float, b: float, n: int) -> float:
    nodes, weights = _gauss_legendre(n)
    half = 0.5 * (b - a)
    pts = a + half * (nodes + 1.0)
    return half * float(np.dot(weights, as_array_values(k, pts)))


_QUAD_ACCEPT = 1e3


def integrate_01(h: Callable, tag: str = SMOOTH, tol: float = 1e-13) -> float:
    """Integrate ``h`` over (0, 1).

    With ``tag="endpoint_singular"`` the substitution t = sin²θ is applied
    first, so inverse square-root endpoint behaviour (the arcsine weight)
    becomes a smooth integrand on (0, π/2).

    A 24/48-node Gauss–Legendre pair is tried first; the 48-node value is
    returned when the two agree to ``tol`` (mixed absolute/relative).  This
    keeps the result a smooth function of any parameters ``h`` closes over,
    which matters when means built on top of it are differentiated
    numerically.  Otherwise the integral is handed to adaptive QUADPACK.
    """
    if tag not in QUADRATURE_TAGS:
        raise DomainError(f"unknown quadrature tag {tag!r}")
    if not tol >= 1e-14:
        raise DomainError("tol must be >= 1e-14")

    if tag == ENDPOINT_SINGULAR:

        def k(theta):
            s = np.sin(theta)
            return as_array_values(h, s * s) * np.sin(2.0 * theta)

        a, b = 0.0, 0.5 * math.pi
    else:
        k = h
        a, b = 0.0, 1.0

    coarse = _fixed_rule(k, a, b, 24)
    fine = _fixed_rule(k, a, b, 48)
    if math.isfinite(fine) and abs(fine - coarse) <= tol * (1.0 + abs(fine)):
        return fine

    def k_scalar(t):
        return float(as_array_values(k, np.array([t]))[0])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(k_scalar, a, b, epsabs=tol, epsrel=tol, limit=500)
    # QUADPACK's estimate is conservative and cannot go much below 1e-12 on
    # sharply peaked integrands, so the acceptance bar sits above ``tol``.
    if not math.isfinite(value) or err > _QUAD_ACCEPT * tol * max(1.0, abs(value)):
        raise NumericalError(
            f"quadrature did not converge (estimate {value!r}, error {err:.3g})",
            residual=err,
        )
    return value


# --------------------------------------------------------------------------
# Monotone inversion
# --------------------------------------------------------------------------


def _to_unbounded(domain):
    """Return (forward, backward) maps between ``domain`` and the real line."""
    lo, hi = domain
    if math.isinf(lo) and math.isinf(hi):
        return (lambda x: x), (lambda u: u)
    if math.isinf(hi):
        return (lambda x: math.log(x - lo)), (lambda u: lo + math.exp(u))
    if math.isinf(lo):
        return (lambda x: -math.log(hi - x)), (lambda u: hi - math.exp(-u))
    width = hi - lo

    def fwd(x):
        return math.log((x - lo) / (hi - x))

    def back(u):
        return lo + width / (1.0 + math.exp(-u))

    return fwd, back


def _safe_eval(f, x):
    try:
        v = float(f(x))
    except _EVAL_ERRORS:
        return math.nan
    return v


def _expand_bracket(f, target, domain, x0):
    fwd, back = _to_unbounded(domain)
    u0 = fwd(x0)
    f0 = _safe_eval(f, x0)
    # A start where f overflows gives no sign information; pull it toward
    # the middle of the domain until f is finite there.
    for _ in range(60):
        if math.isfinite(f0):
            break
        u0 *= 0.5
        x0 = back(u0)
        f0 = _safe_eval(f, x0)
    if not math.isfinite(f0):
        raise DomainError(f"cannot evaluate the function near {x0!r} on {domain}")
    if f0 == target:
        return x0, x0
    step = 1.0
    for _ in range(12):
        for u in (u0 - step, u0 + step):
            try:
                x = back(u)
            except OverflowError:
                continue
            if not (domain[0] < x < domain[1]):
                continue
            fx = _safe_eval(f, x)
            if not math.isfinite(fx):
                continue
            if (fx - target) * (f0 - target) <= 0.0:
                return (x, x0) if x < x0 else (x0, x)
        step *= 2.0
    raise DomainError(f"target {target!r} is outside the range of the function on {domain}")


def invert_monotone(
    f: Callable[[float], float],
    target: float,
    domain: tuple[float, float] = (0.0, math.inf),
    *,
    bracket: tuple[float, float] | None = None,
    x0: float | None = None,
    fprime: Callable[[float], float] | None = None,
) -> float:
    """Solve ``f(x) = target`` for strictly monotone ``f`` on the open ``domain``.

    ``bracket`` may supply an interval known to contain the solution (the
    two arguments of a mean, typically).  Without it a bracket is grown
    outward from ``x0`` (default: ``target`` itself when it lies in the
    domain).  The bracketed root is found with Brent's method and polished
    by one Newton step when ``fprime`` is given.
    """
    lo_dom, hi_dom = domain
    if bracket is not None:
        a, b = sorted(bracket)
        if a == b:
            return a
        fa, fb = f(a), f(b)
        if fa == target:
            return a
        if fb == target:
            return b
        if (fa - target) * (fb - target) > 0.0:
            # The caller's bracket can miss by a rounding error; accept the
            # nearest endpoint in that case, otherwise search properly.
            tol = 1e-13 * max(1.0, abs(target))
            near = a if abs(fa - target) < abs(fb - target) else b
            if min(abs(fa - target), abs(fb - target)) <= tol:
                return near
            bracket = None
    if bracket is None:
        if x0 is None:
            x0 = target if lo_dom < target < hi_dom else _default_start(domain)
        a, b = _expand_bracket(f, target, domain, x0)
        if a == b:
            return a

    def g(x):
        return f(x) - target

    try:
        root = optimize.brentq(g, a, b, xtol=1e-300, rtol=4.0 * EPS, maxiter=300)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"inversion failed: {exc}") from exc

    resid = abs(g(root))
    if fprime is not None and resid > 0.0:
        d = _safe_eval(fprime, root)
        if d and math.isfinite(d):
            cand = root - g(root) / d
            if a <= cand <= b:
                r2 = abs(g(cand))
                if r2 < resid:
                    root, resid = cand, r2

    if resid > 1e-13 * max(1.0, abs(target)):
        # Accept when the target sits between f at the neighbouring floats:
        # no binary64 argument does better.
        left = _safe_eval(f, math.nextafter(root, -math.inf))
        right = _safe_eval(f, math.nextafter(root, math.inf))
        if not (min(left, right) <= target <= max(left, right)):
            raise NumericalError(
                f"inversion residual {resid:.3g} exceeds tolerance", residual=resid
            )
    return root


def _default_start(domain):
    lo, hi = domain
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(hi):
        return lo + 1.0
    if math.isinf(lo):
        return hi - 1.0
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# Finite differences
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FDConfig:
    """Step ladder for :func:`fd_derivative`.

    The first step is ``base_step_scale * |x|`` (or ``base_step_scale`` at
    x = 0); later steps shrink by ``step_ratio``.  ``richardson_levels`` is
    the deepest extrapolation column used from the Neville tableau.
    """

    base_step_scale: float = 0.1
    richardson_levels: int = 3
    min_step: float = 1e-10
    step_ratio: float = 1.6
    max_steps: int = 9

    def __post_init__(self):
        if not 0 <= self.richardson_levels <= 8:
            raise ValueError("richardson_levels must be in [0, 8]")
        if not self.min_step > 0:
            raise ValueError("min_step must be positive")
        if not self.base_step_scale > 0:
            raise ValueError("base_step_scale must be positive")
        if not self.step_ratio > 1:
            raise ValueError("step_ratio must exceed 1")


FD_FIRST = FDConfig(base_step_scale=0.05)
FD_SECOND = FDConfig(base_step_scale=0.1)
# Fourth differences amplify rounding by h⁻⁴, so start wide (the stencil
# reaches x ± 0.8x) and lean on a deeper tableau instead.
FD_FOURTH = FDConfig(base_step_scale=0.4, richardson_levels=6, step_ratio=1.3, max_steps=16)
DEFAULT_FD = {1: FD_FIRST, 2: FD_SECOND, 4: FD_FOURTH}


def _stencil(order):
    if order == 1:
        return lambda f, x, h: (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return lambda f, x, h: (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    if order == 4:
        return lambda f, x, h: (
            f(x + 2 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2 * h)
        ) / h**4
    raise DomainError(f"unsupported derivative order {order}")


def fd_derivative(
    f: Callable[[float], float],
    x: float,
    order: int = 1,
    config: FDConfig | None = None,
    *,
    full_output: bool = False,
):
    """Central finite-difference derivative of ``f`` at ``x``.

    Orders 1, 2 and 4 are supported.  All three stencils have error
    expansions in even powers of h, so the tableau extrapolates with
    factor ``step_ratio**2`` and keeps the entry with the smallest
    disagreement with its neighbours (Ridders' selection rule).

    If the largest step probes ``f`` outside its domain the ladder is
    restarted at half the step, down to ``config.min_step``.

    Returns the estimate, or ``(estimate, error_estimate)`` with
    ``full_output=True``.
    """
    stencil = _stencil(order)
    cfg = config or DEFAULT_FD[order]
    h = cfg.base_step_scale * (abs(x) if x != 0 else 1.0)

    while True:
        if h < cfg.min_step:
            raise NumericalError(f"finite-difference step collapsed below {cfg.min_step}")
        try:
            first = stencil(f, x, h)
            if not math.isfinite(first):
                raise DomainError("non-finite stencil value")
            break
        except _EVAL_ERRORS:
            h *= 0.5

    if cfg.richardson_levels == 0:
        return (first, math.nan) if full_output else first

    fac = cfg.step_ratio**2
    prev_row = [first]
    best, best_err = first, math.inf
    for _ in range(1, cfg.max_steps):
        h /= cfg.step_ratio
        if h < cfg.min_step:
            break
        try:
            row = [stencil(f, x, h)]
        except _EVAL_ERRORS:
            break
        for j in range(1, min(len(prev_row), cfg.richardson_levels) + 1):
            w = fac**j
            row.append((row[j - 1] * w - prev_row[j - 1]) / (w - 1.0))
            err = max(abs(row[j] - row[j - 1]), abs(row[j] - prev_row[j - 1]))
            if err <= best_err:
                best, best_err = row[j], err
        # Rounding noise now dominates: further rows only make things worse.
        if abs(row[-1] - prev_row[-1]) >= 2.0 * best_err:
            break
        prev_row = row

    return (best, best_err) if full_output else best


def fd_mixed_partial(
    f: Callable[[float, float], float],
    x: float,
    y: float,
    config: FDConfig | None = None,
) -> float:
    """Estimate ∂²f/∂x∂y at (x, y) by nesting first-order differences."""
    cfg = config or FDConfig(base_step_scale=0.02, richardson_levels=2)

    def d_dy(xx):
        return fd_derivative(lambda yy: f(xx, yy), y, 1, cfg)

    return fd_derivative(d_dy, x, 1, cfg)
