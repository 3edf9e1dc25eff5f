"""Constructors for classes of means built from a generating function.

Normal means weight the endpoints by P, additive means average through a
monotone f, integral means average f along a segment (first kind) or
along a segment in preimage space (second kind), and M-means conjugate
an existing mean by f.  Each constructor attaches the class charfun.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from means_lab.base import CLOSED_FORM, CharFn, MeanObject
from means_lab.charfun import mmean_charfun
from means_lab.errors import ConstructionError, DomainError, NumericalError
from means_lab.numerics import ENDPOINT_SINGULAR, SMOOTH, fd_derivative, fd_mixed_partial, integrate_01, invert_monotone

POS = (0.0, math.inf)

_DERIV_RTOL = 1e-5
_SYM_RTOL = 1e-10
_MOMENT_TOL = 1e-10


def _sample_points(domain, n=12):
    lo, hi = domain
    if math.isinf(lo) and math.isinf(hi):
        return np.linspace(-4.0, 4.0, n)
    if math.isinf(hi):
        return lo + np.geomspace(0.05, 20.0, n)
    if math.isinf(lo):
        return hi - np.geomspace(0.05, 20.0, n)
    return lo + (hi - lo) * np.linspace(0.05, 0.95, n)


@dataclass(frozen=True, eq=False)
class GeneratingFunction:
    """A smooth real function with its first two derivatives.

    ``func``, ``d1`` and ``d2`` should accept numpy arrays.  ``image`` is
    the declared range of ``func`` on ``domain``; ``integral(x, y)`` is an
    optional exact ∫_x^y func.  ``direction`` is +1 or -1 for strictly
    monotone functions and 0 otherwise.
    """

    func: Callable
    d1: Callable
    d2: Callable
    domain: tuple = POS
    image: Optional[tuple] = None
    label: str = "f"
    integral: Optional[Callable[[float, float], float]] = None
    validate: bool = True
    direction: int = field(init=False, default=0)

    def __post_init__(self):
        pts = _sample_points(self.domain)
        with np.errstate(all="ignore"):
            slopes = np.array([float(self.d1(float(t))) for t in pts])
        if not np.all(np.isfinite(slopes)):
            raise ConstructionError(f"{self.label}: derivative is not finite on the domain")
        if np.all(slopes > 0):
            direction = 1
        elif np.all(slopes < 0):
            direction = -1
        else:
            direction = 0
        object.__setattr__(self, "direction", direction)
        if self.validate:
            self._check_derivatives(pts)

    def _check_derivatives(self, pts):
        for t in pts:
            t = float(t)
            for fn, der, name in ((self.value, self.deriv1, "d1"), (self.deriv1, self.deriv2, "d2")):
                want = der(t)
                got = fd_derivative(fn, t, 1)
                tol = _DERIV_RTOL * max(abs(want), 1e-6) + 1e-9 * max(1.0, abs(fn(t)))
                if abs(got - want) > tol:
                    raise ConstructionError(
                        f"{self.label}: supplied {name} disagrees with finite differences at t={t:g}"
                    )

    def value(self, t: float) -> float:
        return float(self.func(t))

    __call__ = value

    def deriv1(self, t: float) -> float:
        return float(self.d1(t))

    def deriv2(self, t: float) -> float:
        return float(self.d2(t))

    @property
    def monotone(self) -> bool:
        return self.direction != 0

    def inverse(self, u: float, bracket: tuple | None = None) -> float:
        if not self.monotone:
            raise DomainError(f"{self.label} is not monotone, so it has no inverse")
        return invert_monotone(self.value, u, self.domain, bracket=bracket, fprime=self.deriv1)

    def covers_positive_axis(self) -> bool:
        return self.domain[0] <= 0.0 and math.isinf(self.domain[1])


# --------------------------------------------------------------------------
# Symmetric distributions on [0, 1]
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymmetricDistribution:
    """A density on [0, 1] symmetric about 1/2.

    On construction the density is checked for unit mass, symmetry and
    vanishing odd central moments; the even central moments c_0..c_4 and
    μ = ∫ t(1-t) g are cached.
    """

    density: Callable
    tag: str = SMOOTH
    label: str = "g"
    moments: tuple = field(init=False, default=())
    mu: float = field(init=False, default=math.nan)

    def __post_init__(self):
        for t in (0.1, 0.2, 0.3, 0.4):
            a, b = float(self.density(t)), float(self.density(1.0 - t))
            if not (a >= 0 and b >= 0):
                raise ConstructionError(f"{self.label}: density must be non-negative")
            if abs(a - b) > _SYM_RTOL * max(a, b, 1e-300):
                raise ConstructionError(f"{self.label}: density is not symmetric about 1/2")
        moments = tuple(self.expect(lambda t, n=n: (t - 0.5) ** (2 * n)) for n in range(5))
        if abs(moments[0] - 1.0) > _MOMENT_TOL:
            raise ConstructionError(f"{self.label}: density has mass {moments[0]!r}, not 1")
        for k in (1, 3):
            odd = self.expect(lambda t, k=k: (t - 0.5) ** k)
            if abs(odd) > _MOMENT_TOL:
                raise ConstructionError(f"{self.label}: odd central moment of order {k} is {odd:.3g}")
        mu = self.expect(lambda t: t * (1.0 - t))
        if abs(mu - (0.25 - moments[1])) > 1e-12:
            raise NumericalError(f"{self.label}: μ and c_1 are inconsistent", residual=mu)
        object.__setattr__(self, "moments", moments)
        object.__setattr__(self, "mu", mu)

    def expect(self, func: Callable) -> float:
        """∫₀¹ func(t) g(t) dt."""
        dens = self.density
        return integrate_01(lambda t: func(t) * dens(t), self.tag)

    def essential(self, n: int) -> float:
        if not 0 <= n < len(self.moments):
            raise DomainError(f"essential integrals are cached for n = 0..{len(self.moments) - 1}")
        return self.moments[n]


def uniform() -> SymmetricDistribution:
    return SymmetricDistribution(lambda t: 1.0 + 0.0 * np.asarray(t, dtype=float), SMOOTH, "uniform")


def arcsine() -> SymmetricDistribution:
    """1/(π √(t(1-t))), singular at both endpoints."""
    return SymmetricDistribution(
        lambda t: 1.0 / (math.pi * np.sqrt(t * (1.0 - t))), ENDPOINT_SINGULAR, "arcsine"
    )


def beta_symmetric(r: float) -> SymmetricDistribution:
    """t^r (1-t)^r / B(r+1, r+1), for r > -1."""
    r = float(r)
    if not r > -1:
        raise ConstructionError("beta(r) needs r > -1")
    norm = float(special.beta(r + 1.0, r + 1.0))
    tag = SMOOTH if r >= 0 and r == int(r) else ENDPOINT_SINGULAR
    return SymmetricDistribution(
        lambda t: np.power(t * (1.0 - t), r) / norm, tag, f"beta({r:g})"
    )


def _resolve_dist(g):
    return uniform() if g is None else g


def essential_integral(g: SymmetricDistribution, n: int) -> float:
    """c_n(g) = ∫ (t - 1/2)^(2n) g(t) dt."""
    return g.essential(n)


def mu_integral(g: SymmetricDistribution) -> float:
    return g.mu


# --------------------------------------------------------------------------
# Class constructors
# --------------------------------------------------------------------------


def _ordered(x, y):
    return (x, y) if x <= y else (y, x)


def _require_monotone(f: GeneratingFunction, what: str):
    if not f.monotone:
        raise ConstructionError(f"{what} needs a strictly monotone function; {f.label} is not")


def _require_positive_domain(f: GeneratingFunction, what: str):
    if not f.covers_positive_axis():
        raise ConstructionError(f"{what}: {f.label} must be defined on all of (0, ∞)")


def make_normal(P: GeneratingFunction, *, label: str | None = None) -> MeanObject:
    """(x P(x) + y P(y)) / (P(x) + P(y)) for a positive weight P."""
    _require_positive_domain(P, "normal mean")
    samples = np.geomspace(1e-2, 1e2, 64)
    vals = np.array([P.value(float(t)) for t in samples])
    if not np.all(vals > 0):
        raise DomainError(f"normal mean: weight {P.label} must be positive")

    def func(x, y):
        lo, hi = _ordered(x, y)
        if lo == hi:
            return lo
        p_lo, p_hi = P.value(lo), P.value(hi)
        if not (p_lo > 0 and p_hi > 0):
            raise DomainError(f"weight {P.label} is not positive at ({x}, {y})")
        return lo + (hi - lo) * (p_hi / (p_lo + p_hi))

    q = CharFn(lambda x: P.deriv1(x) / (2.0 * P.value(x)), CLOSED_FORM, f"P'/2P[{P.label}]")
    return MeanObject(func, label or f"normal[{P.label}]", charfun=q)


def make_additive(f: GeneratingFunction, *, label: str | None = None) -> MeanObject:
    """Quasi-arithmetic mean f⁻¹((f(x) + f(y))/2)."""
    _require_monotone(f, "additive mean")
    _require_positive_domain(f, "additive mean")

    def func(x, y):
        lo, hi = _ordered(x, y)
        if lo == hi:
            return lo
        return f.inverse(0.5 * (f.value(lo) + f.value(hi)), bracket=(lo, hi))

    q = CharFn(lambda x: f.deriv2(x) / (4.0 * f.deriv1(x)), CLOSED_FORM, f"f''/4f'[{f.label}]")
    return MeanObject(func, label or f"additive[{f.label}]", charfun=q)


def make_integral_first(
    f: GeneratingFunction, g: SymmetricDistribution | None = None, *, label: str | None = None
) -> MeanObject:
    """f⁻¹(∫₀¹ f(t x + (1-t) y) g(t) dt)."""
    _require_monotone(f, "integral mean")
    _require_positive_domain(f, "integral mean")
    g = _resolve_dist(g)
    c1 = g.essential(1)

    def func(x, y):
        lo, hi = _ordered(x, y)
        if lo == hi:
            return lo
        avg = g.expect(lambda t: f.func(t * lo + (1.0 - t) * hi))
        return f.inverse(avg, bracket=(lo, hi))

    q = CharFn(lambda x: c1 * f.deriv2(x) / f.deriv1(x), CLOSED_FORM, f"c1 f''/f'[{f.label},{g.label}]")
    return MeanObject(func, label or f"int1[{f.label},{g.label}]", charfun=q)


def make_integral_second(
    f: GeneratingFunction, g: SymmetricDistribution | None = None, *, label: str | None = None
) -> MeanObject:
    """∫₀¹ f(t f⁻¹(u) + (1-t) f⁻¹(v)) g(t) dt, for f onto (0, ∞)."""
    _require_monotone(f, "second-kind integral mean")
    if f.image is None or tuple(f.image) != POS:
        raise ConstructionError(
            f"second-kind integral mean: the image of {f.label} must be (0, ∞), got {f.image}"
        )
    g = _resolve_dist(g)
    mu = g.mu

    def func(u, v):
        lo, hi = _ordered(u, v)
        if lo == hi:
            return lo
        s, t = f.inverse(lo), f.inverse(hi)
        val = g.expect(lambda tau: f.func(tau * s + (1.0 - tau) * t))
        # Rounding can push the average a hair outside [lo, hi].
        return min(max(val, lo), hi)

    def q(u):
        s = f.inverse(u)
        d1 = f.deriv1(s)
        return -mu * f.deriv2(s) / (d1 * d1)

    return MeanObject(
        func,
        label or f"int2[{f.label},{g.label}]",
        charfun=CharFn(q, CLOSED_FORM, f"mu (f^-1)''/(f^-1)'[{f.label},{g.label}]"),
    )


def make_mmean(
    M: MeanObject,
    f: GeneratingFunction,
    *,
    label: str | None = None,
    homogeneous: bool = False,
) -> MeanObject:
    """The M-mean f⁻¹(M(f(x), f(y)))."""
    _require_monotone(f, "M-mean")
    _require_positive_domain(f, "M-mean")
    if f.image is None or f.image[0] < 0:
        raise ConstructionError(f"M-mean: {f.label} must map (0, ∞) into (0, ∞), got image {f.image}")

    def func(x, y):
        lo, hi = _ordered(x, y)
        if lo == hi:
            return lo
        return f.inverse(M(f.value(lo), f.value(hi)), bracket=(lo, hi))

    q = None
    if M.charfun is not None:
        q = mmean_charfun(M.charfun, f.value, f.deriv1, f.deriv2)
    return MeanObject(
        func,
        label or f"mmean[{f.label}]({M.label})",
        homogeneous=homogeneous,
        strict=M.strict,
        charfun=q,
    )


def agm_as_mmean() -> MeanObject:
    """AGM(x, y) = √(I(x², y²)), I the first-kind integral mean of 1/√t
    under the arcsine density."""
    from means_lab import palette

    inner = make_integral_first(palette.recip_sqrt(), arcsine(), label="int1[recip_sqrt,arcsine]")
    return make_mmean(inner, palette.square(), label="agm[mmean]", homogeneous=True)


def normality_defect(M: MeanObject, x: float, y: float) -> float:
    """∂²φ/∂x∂y at (x, y) for φ = log(-(M - x)/(M - y)).

    φ separates (so the mixed partial vanishes) exactly when M is a
    normal mean.
    """
    if x == y:
        raise DomainError("normality defect needs an off-diagonal point")
    if not (x > 0 and y > 0):
        raise DomainError("normality defect needs positive arguments")

    def phi(s, t):
        m = M(s, t)
        num, den = m - s, m - t
        if num == 0 or den == 0:
            raise DomainError("mean coincides with an argument; is it strict?")
        return math.log(-num / den)

    return fd_mixed_partial(phi, x, y)
