"""The catalog of elementary means, the AGM, and two ways of deriving new
means from old ones (shifting and composition).

Every formula below is arranged to avoid cancellation as x → y: the
derived charfun estimates differentiate these functions numerically, so
a few ulps of error near the diagonal matter.
"""

from __future__ import annotations

import math

import numpy as np

from means_lab.base import CLOSED_FORM, CharFn, Family, MeanObject, MeanParams
from means_lab.charfun import analytic_charfun, charfun_coefficient, compose_charfun
from means_lab.errors import DomainError, NumericalError
from means_lab.numerics import SMOOTH, integrate_01

# Relative half-width below which the transcendental means switch to their
# second-order diagonal series.
DIAGONAL_TAU = 1e-6
# Parameter distance at which Stolarsky and Gini switch to limit formulas.
PARAM_GUARD = 1e-9


def _ordered(x, y):
    return (x, y) if x <= y else (y, x)


def _check(x, y):
    if not (x > 0 and y > 0) or math.isinf(x) or math.isinf(y):
        raise DomainError(f"means are defined for positive finite arguments, got ({x}, {y})")


def _log1pexp(z):
    """log(1 + e^z) without overflow."""
    if z > 30.0:
        return z + math.log1p(math.exp(-z))
    return math.log1p(math.exp(z))


def _series(lo, hi, c):
    """A + (Q(A)/2)(x - y)²: the diagonal series of a mean with Q = c/x."""
    d = hi - lo
    a = lo + 0.5 * d
    return a + 0.5 * (c / a) * d * d


def arithmetic(x: float, y: float) -> float:
    _check(x, y)
    lo, hi = _ordered(x, y)
    return lo + 0.5 * (hi - lo)


def geometric(x: float, y: float) -> float:
    _check(x, y)
    return math.sqrt(x) * math.sqrt(y)


def harmonic(x: float, y: float) -> float:
    _check(x, y)
    lo, hi = _ordered(x, y)
    return 2.0 * lo * (hi / (lo + hi))


def power_mean(r: float, x: float, y: float) -> float:
    """((x^r + y^r)/2)^(1/r), with the geometric mean at r = 0."""
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    if abs(r) <= PARAM_GUARD:
        return geometric(lo, hi)
    ell = math.log(hi / lo)
    # Factor out the larger power so expm1 never overflows.
    if r > 0:
        return hi * math.exp(math.log1p(0.5 * math.expm1(-r * ell)) / r)
    return lo * math.exp(math.log1p(0.5 * math.expm1(r * ell)) / r)


def gini_mean(a: float, b: float, x: float, y: float) -> float:
    """((x^a + y^a)/(x^b + y^b))^(1/(a-b)); the a = b limit is the
    exponential-weighted geometric mean."""
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    lr = math.log(lo / hi)
    if abs(a - b) <= PARAM_GUARD:
        c = 0.5 * (a + b)
        w = 1.0 / (1.0 + math.exp(-c * lr)) if c * lr > -700 else 0.0
        return hi * math.exp(lr * w)
    return hi * math.exp((_log1pexp(a * lr) - _log1pexp(b * lr)) / (a - b))


def lehmer_mean(t: float, x: float, y: float) -> float:
    """(x^t + y^t)/(x^(t-1) + y^(t-1))."""
    return gini_mean(t, t - 1.0, x, y)


def logarithmic(x: float, y: float) -> float:
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    d = hi - lo
    if d <= DIAGONAL_TAU * (lo + d / 2):
        return _series(lo, hi, -1.0 / 6.0)
    return d / math.log1p(d / lo)


def identric(x: float, y: float) -> float:
    """e^(-1) (x^x / y^y)^(1/(x-y))."""
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    d = hi - lo
    if d <= DIAGONAL_TAU * (lo + d / 2):
        return _series(lo, hi, -1.0 / 12.0)
    return hi * math.exp(lo * math.log1p(d / lo) / d - 1.0)


def exponential_mean(x: float, y: float) -> float:
    """log((e^x - e^y)/(x - y)), additively but not multiplicatively homogeneous."""
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    d = hi - lo
    if d <= DIAGONAL_TAU * (lo + d / 2):
        return lo + 0.5 * d + d * d / 24.0
    return hi + math.log(-math.expm1(-d) / d)


def eval_stolarsky(p: float, x: float, y: float) -> float:
    """((x^p - y^p)/(p(x - y)))^(1/(p-1)).

    Limits: p = 0 is the logarithmic mean and p = 1 the identric mean.
    """
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    if abs(p) <= PARAM_GUARD:
        return logarithmic(lo, hi)
    if abs(p - 1.0) <= PARAM_GUARD:
        return identric(lo, hi)
    d = hi - lo
    if d <= DIAGONAL_TAU * (lo + d / 2):
        return _series(lo, hi, (p - 2.0) / 12.0)
    u = d / lo
    ell = math.log1p(u)
    z = p * ell
    if z > 30.0:
        logq = z + math.log1p(-math.exp(-z)) - math.log(p * u)
    else:
        logq = math.log(math.expm1(z) / (p * u))
    return lo * math.exp(logq / (p - 1.0))


def agm_iterate(x: float, y: float, tol: float = 1e-15, max_iter: int = 64) -> float:
    """Arithmetic-geometric mean by the Gauss iteration."""
    _check(x, y)
    if not tol > 0:
        raise DomainError("tol must be positive")
    b, a = _ordered(x, y)
    if a == b:
        return a
    for _ in range(max_iter):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        if abs(a - b) <= tol * a:
            return 0.5 * (a + b)
    raise NumericalError(f"AGM iteration did not converge in {max_iter} steps", residual=abs(a - b))


def agm_integral(x: float, y: float, tol: float = 1e-14) -> float:
    """AGM from the elliptic integral (π/2) / ∫₀^{π/2} dθ/√(x²cos²θ + y²sin²θ).

    Independent of the iteration, so the two serve as oracles for each other.
    """
    _check(x, y)
    lo, hi = _ordered(x, y)
    if lo == hi:
        return lo
    rho = lo / hi
    half_pi = 0.5 * math.pi

    def k(s):
        th = half_pi * s
        c, sn = np.cos(th), np.sin(th)
        return 1.0 / np.sqrt(c * c + (rho * sn) ** 2)

    return hi / integrate_01(k, SMOOTH, tol)


# --------------------------------------------------------------------------
# Mean objects
# --------------------------------------------------------------------------


def _reduces_to_arithmetic(params: MeanParams) -> bool:
    if params.family is Family.ARITHMETIC:
        return True
    kind, c = charfun_coefficient(params)
    if params.family is Family.GINI:
        return {params["a"], params["b"]} == {0.0, 1.0}
    return kind == "reciprocal" and c == 0.0 and params.family in (
        Family.POWER,
        Family.LEHMER,
        Family.STOLARSKY,
    )


def _evaluator(params: MeanParams):
    fam = params.family
    if fam is Family.ARITHMETIC:
        return arithmetic
    if fam is Family.GEOMETRIC:
        return geometric
    if fam is Family.HARMONIC:
        return harmonic
    if fam is Family.LOGARITHMIC:
        return logarithmic
    if fam is Family.IDENTRIC:
        return identric
    if fam is Family.EXPONENTIAL:
        return exponential_mean
    if fam is Family.AGM:
        return agm_iterate
    if fam is Family.POWER:
        r = params["r"]
        return lambda x, y: power_mean(r, x, y)
    if fam is Family.LEHMER:
        t = params["t"]
        return lambda x, y: lehmer_mean(t, x, y)
    if fam is Family.GINI:
        a, b = params["a"], params["b"]
        return lambda x, y: gini_mean(a, b, x, y)
    if fam is Family.STOLARSKY:
        p = params["p"]
        return lambda x, y: eval_stolarsky(p, x, y)
    raise DomainError(f"unknown family {fam!r}")


def make_catalog_mean(family, *values: float) -> MeanObject:
    """Build a catalog mean, e.g. ``make_catalog_mean("gini", 2, 0.5)``."""
    params = family if isinstance(family, MeanParams) else MeanParams(Family(family), values)
    additive = params.family is Family.EXPONENTIAL or _reduces_to_arithmetic(params)
    return MeanObject(
        func=_evaluator(params),
        label=params.describe(),
        homogeneous=params.family is not Family.EXPONENTIAL,
        additively_homogeneous=additive,
        strict=True,
        charfun=analytic_charfun(params),
        params=params,
    )


def shift_transform(M: MeanObject, c: float) -> MeanObject:
    """M_c(x, y) = M(x + c, y + c) - c, for c ≥ 0.  Q_{M_c}(x) = Q_M(x + c)."""
    c = float(c)
    if not c >= 0 or math.isinf(c):
        raise DomainError("shift must be a finite non-negative number")
    if c == 0:
        return M

    def func(x, y):
        if x == y:
            return x
        return M(x + c, y + c) - c

    q = None
    if M.charfun is not None:
        base = M.charfun
        d2 = None
        if base.second_derivative is not None:
            s2 = base.second_derivative

            def d2(x):
                return s2(x + c)

        q = CharFn(lambda x: base(x + c), base.kind, f"{base.label}(x+{c:g})", d2)
    return MeanObject(
        func=func,
        label=f"shift[c={c:g}]({M.label})",
        homogeneous=M.homogeneous and M.additively_homogeneous,
        additively_homogeneous=M.additively_homogeneous,
        strict=M.strict,
        charfun=q,
    )


def compose_means(M0: MeanObject, M1: MeanObject, M2: MeanObject) -> MeanObject:
    """(x, y) ↦ M0(M1(x, y), M2(x, y))."""

    def func(x, y):
        if x == y:
            return x
        return M0(M1(x, y), M2(x, y))

    q = None
    if M1.charfun is not None and M2.charfun is not None:
        q = compose_charfun(M1.charfun, M2.charfun)
    return MeanObject(
        func=func,
        label=f"{M0.label}({M1.label}, {M2.label})",
        homogeneous=M0.homogeneous and M1.homogeneous and M2.homogeneous,
        additively_homogeneous=(
            M0.additively_homogeneous and M1.additively_homogeneous and M2.additively_homogeneous
        ),
        strict=M1.strict or M2.strict,
        charfun=q,
    )


ARITHMETIC = make_catalog_mean(Family.ARITHMETIC)
GEOMETRIC = make_catalog_mean(Family.GEOMETRIC)
HARMONIC = make_catalog_mean(Family.HARMONIC)
LOGARITHMIC = make_catalog_mean(Family.LOGARITHMIC)
IDENTRIC = make_catalog_mean(Family.IDENTRIC)
EXPONENTIAL = make_catalog_mean(Family.EXPONENTIAL)
AGM = make_catalog_mean(Family.AGM)
