"""Characteristic functions of means and what they tell us.

For a symmetric smooth mean M the characteristic function is
Q_M(x) = ∂²M/∂x²(x, x).  It fixes the first correction in the
near-diagonal expansion, with A = (x + y)/2 and d = x - y,

    M(x, y) = A + f1(A) d² + f2(A) d⁴ + O(d⁶),
    f1 = Q/2,   f2 = Q^[2]/24 - Q''/16,

where Q^[2](x) = ∂⁴M/∂x⁴(x, x).  Comparing Q's decides local (and, for
homogeneous means, global) comparability.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from means_lab.base import CLOSED_FORM, FD_ORACLE, CharFn, Family, MeanObject, MeanParams
from means_lab.errors import ConstructionError, DomainError
from means_lab.numerics import FDConfig, fd_derivative

# Differences of Q smaller than this are treated as FD noise.
DOMINANCE_THRESHOLD = 1e-10
# Spread tolerance used when testing Q or x·Q for constancy.
CONSTANCY_TOL = 1e-8
# Relative uncertainty of f2 above which a warning is raised.
F2_WARN_RELATIVE = 1e-3

_F2_ZERO_FACTOR = 4.0
_QPP_FD = FDConfig(base_step_scale=0.05, richardson_levels=3)


class ExpansionWarning(UserWarning):
    """The fourth-order expansion coefficient is poorly determined."""


def _reciprocal(c: float, label: str) -> CharFn:
    """Q(x) = c/x, with Q''(x) = 2c/x³."""
    return CharFn(lambda x: c / x, CLOSED_FORM, label, lambda x: 2.0 * c / x**3)


def _constant(c: float, label: str) -> CharFn:
    return CharFn(lambda x: c + 0.0 * x, CLOSED_FORM, label, lambda x: 0.0 * x)


def charfun_coefficient(params: MeanParams) -> tuple[str, float]:
    """Return ``("reciprocal", c)`` for Q = c/x or ``("constant", c)``."""
    fam = params.family
    if fam is Family.EXPONENTIAL:
        return "constant", 1.0 / 12.0
    if fam is Family.ARITHMETIC:
        return "reciprocal", 0.0
    if fam is Family.GEOMETRIC:
        return "reciprocal", -0.25
    if fam is Family.HARMONIC:
        return "reciprocal", -0.5
    if fam is Family.POWER:
        return "reciprocal", (params["r"] - 1.0) / 4.0
    if fam is Family.LEHMER:
        return "reciprocal", (params["t"] - 1.0) / 2.0
    if fam is Family.GINI:
        return "reciprocal", (params["a"] + params["b"] - 1.0) / 4.0
    if fam is Family.STOLARSKY:
        return "reciprocal", (params["p"] - 2.0) / 12.0
    if fam is Family.LOGARITHMIC:
        return "reciprocal", -1.0 / 6.0
    if fam is Family.IDENTRIC:
        return "reciprocal", -1.0 / 12.0
    if fam is Family.AGM:
        return "reciprocal", -0.125
    raise DomainError(f"no closed-form charfun for {fam!r}")


def analytic_charfun(params: MeanParams) -> CharFn:
    """Closed-form characteristic function of a catalog mean."""
    kind, c = charfun_coefficient(params)
    label = f"Q[{params.describe()}]"
    if kind == "constant":
        return _constant(c, label)
    return _reciprocal(c, label)


def estimate_charfun(M: MeanObject, x: float, config: FDConfig | None = None) -> float:
    """Q_M(x) by finite differences of s ↦ M(s, x) at s = x."""
    return fd_derivative(lambda s: M(s, x), x, 2, config)


def estimate_charfun2(M: MeanObject, x: float, config: FDConfig | None = None, *, full_output=False):
    """Q^[2]_M(x) = ∂⁴M/∂x⁴(x, x) by finite differences."""
    return fd_derivative(lambda s: M(s, x), x, 4, config, full_output=full_output)


def fd_charfun(M: MeanObject) -> CharFn:
    return CharFn(lambda x: estimate_charfun(M, x), FD_ORACLE, f"Q~[{M.label}]")


def charfun_of(M: MeanObject) -> CharFn:
    """The attached closed form when there is one, else the FD oracle."""
    return M.charfun if M.charfun is not None else fd_charfun(M)


def charfun_second_derivative(q: CharFn, x: float, *, full_output=False):
    if q.second_derivative is not None:
        v = float(q.second_derivative(x))
        return (v, 0.0) if full_output else v
    return fd_derivative(q, x, 2, _QPP_FD, full_output=full_output)


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Coefficients of M(a + d/2, a - d/2) = a + f1 d² + f2 d⁴ + O(d⁶)."""

    a: float
    f1: float
    f2: float
    f2_uncertainty: float

    def evaluate(self, d: float) -> float:
        d2 = d * d
        return self.a + d2 * (self.f1 + self.f2 * d2)


def expansion_coeffs(M: MeanObject, a: float) -> ExpansionCoeffs:
    if not a > 0:
        raise DomainError("expansion point must be positive")
    q = charfun_of(M)
    f1 = 0.5 * q(a)
    q4, q4_err = estimate_charfun2(M, a, full_output=True)
    qpp, qpp_err = charfun_second_derivative(q, a, full_output=True)
    f2 = q4 / 24.0 - qpp / 16.0
    unc = q4_err / 24.0 + qpp_err / 16.0
    # The Richardson error estimate runs a few times optimistic.  A value
    # inside that widened bar is reported as zero, so means that are exact
    # at second order (A, H) are reproduced exactly.
    if abs(f2) <= _F2_ZERO_FACTOR * unc:
        f2 = 0.0
    # f2 is naturally of size f1/a²; judge the uncertainty against that.
    scale = max(abs(f2), abs(f1) / (a * a))
    if scale > 0 and unc > F2_WARN_RELATIVE * scale:
        warnings.warn(
            f"f2 for {M.label} at a={a:g} has relative uncertainty {unc / scale:.2g}",
            ExpansionWarning,
            stacklevel=2,
        )
    return ExpansionCoeffs(float(a), f1, f2, unc)


def expand_near_diagonal(M: MeanObject, x: float, y: float, coeffs: ExpansionCoeffs | None = None) -> float:
    """Approximate M(x, y) by the fourth-order expansion about (x+y)/2."""
    a = 0.5 * (x + y)
    d = x - y
    if coeffs is None or coeffs.a != a:
        coeffs = expansion_coeffs(M, a)
    return coeffs.evaluate(d)


def compose_charfun(q1: CharFn, q2: CharFn) -> CharFn:
    """Charfun of M0(M1, M2): the average (Q1 + Q2)/2, whatever M0 is."""
    kind = CLOSED_FORM if q1.is_closed_form and q2.is_closed_form else FD_ORACLE
    d2 = None
    if q1.second_derivative is not None and q2.second_derivative is not None:
        s1, s2 = q1.second_derivative, q2.second_derivative

        def d2(x):
            return (s1(x) + s2(x)) / 2.0

    return CharFn(lambda x: (q1(x) + q2(x)) / 2.0, kind, f"avg({q1.label}, {q2.label})", d2)


def mmean_charfun(
    qm: CharFn,
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    fsecond: Callable[[float], float],
    *,
    check_points: Sequence[float] = (0.5, 1.0, 2.0),
) -> CharFn:
    """Charfun of the M-mean f⁻¹(M(f(x), f(y))): f''/(4f') + f'·Q_M(f).

    The supplied derivatives are checked against finite differences at a
    few points (relative 1e-5) before the closed form is trusted.
    """
    for x in check_points:
        for fn, der, name in ((f, fprime, "f'"), (fprime, fsecond, "f''")):
            try:
                want = float(der(x))
                got = fd_derivative(fn, x, 1)
            except (ValueError, ZeroDivisionError, OverflowError):
                continue
            if abs(got - want) > 1e-5 * max(abs(want), 1e-8):
                raise ConstructionError(f"{name} disagrees with finite differences at x={x}")

    def q(x):
        d1 = fprime(x)
        if d1 == 0:
            raise DomainError(f"f' vanishes at {x}")
        return fsecond(x) / (4.0 * d1) + d1 * qm(f(x))

    return CharFn(q, qm.kind, f"Q[M-mean of {qm.label}]")


# --------------------------------------------------------------------------
# Comparison and classification
# --------------------------------------------------------------------------


M1_GE_M2 = "M1>=M2"
M2_GE_M1 = "M2>=M1"
INCOMPARABLE = "incomparable"


@dataclass
class ComparisonReport:
    relation: str
    scope: str
    equal_charfuns: bool
    sample_xs: list
    q_gaps: list
    near_diagonal_checked: int = 0
    near_diagonal_violations: int = 0
    global_checked: int = 0
    global_violations: int = 0
    labels: tuple = ("M1", "M2")
    notes: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.near_diagonal_violations == 0 and self.global_violations == 0

    def to_dict(self) -> dict:
        return {
            "M1": self.labels[0],
            "M2": self.labels[1],
            "relation": self.relation,
            "scope": self.scope,
            "equal_charfuns": self.equal_charfuns,
            "sample_xs": [float(v) for v in self.sample_xs],
            "q_gaps": [float(v) for v in self.q_gaps],
            "near_diagonal": {
                "checked": self.near_diagonal_checked,
                "violations": self.near_diagonal_violations,
            },
            "global": {"checked": self.global_checked, "violations": self.global_violations},
            "consistent": self.consistent,
            "notes": list(self.notes),
        }


def compare_means(
    M1: MeanObject,
    M2: MeanObject,
    sample_xs: Sequence[float],
    *,
    seed: int = 0,
    global_points: int = 200,
) -> ComparisonReport:
    """Decide which of two means dominates by comparing their charfuns.

    Dominance M1 ≥ M2 near the diagonal holds when Q1 - Q2 exceeds the
    noise threshold at every sample.  When both means are homogeneous this
    local statement is promoted to a global one.  The verdict is then
    spot-checked on a near-diagonal grid and, for global claims, on
    random log-uniform pairs in (0.1, 100)².
    """
    xs = [float(x) for x in sample_xs]
    if not xs:
        raise DomainError("sample_xs must not be empty")
    if any(not x > 0 for x in xs):
        raise DomainError("sample points must be positive")
    q1, q2 = charfun_of(M1), charfun_of(M2)
    gaps = [q1(x) - q2(x) for x in xs]

    if all(g > DOMINANCE_THRESHOLD for g in gaps):
        relation = M1_GE_M2
    elif all(g < -DOMINANCE_THRESHOLD for g in gaps):
        relation = M2_GE_M1
    else:
        relation = INCOMPARABLE
    equal = all(abs(g) <= DOMINANCE_THRESHOLD for g in gaps)
    dominant = relation != INCOMPARABLE
    scope = "global" if dominant and M1.homogeneous and M2.homogeneous else "local"
    report = ComparisonReport(relation, scope, equal, xs, gaps, labels=(M1.label, M2.label))
    if not dominant:
        if not equal:
            report.notes.append("charfun gap changes sign or is within noise")
        return report

    hi_m, lo_m = (M1, M2) if relation == M1_GE_M2 else (M2, M1)
    for a in xs:
        for frac in (0.1, 0.05, 0.02, 0.01):
            d = 0.5 * frac * a
            x, y = a + d, a - d
            report.near_diagonal_checked += 1
            if hi_m(x, y) < lo_m(x, y) - 1e-13 * a:
                report.near_diagonal_violations += 1

    if scope == "global":
        rng = np.random.default_rng(seed)
        pts = np.exp(rng.uniform(math.log(0.1), math.log(100.0), size=(global_points, 2)))
        for x, y in pts:
            report.global_checked += 1
            if hi_m(x, y) < lo_m(x, y) - 1e-12 * max(x, y):
                report.global_violations += 1
    if not report.consistent:
        report.notes.append("spot check contradicts the charfun verdict")
    return report


@dataclass(frozen=True)
class CharfunClassification:
    q_values: tuple
    homogeneous_consistent: bool
    additively_homogeneous_consistent: bool
    almost_arithmetic: bool
    kind: str

    def to_dict(self) -> dict:
        return {
            "q_values": list(self.q_values),
            "homogeneous_consistent": self.homogeneous_consistent,
            "additively_homogeneous_consistent": self.additively_homogeneous_consistent,
            "almost_arithmetic": self.almost_arithmetic,
            "kind": self.kind,
        }


def _spread(vals) -> float:
    return max(vals) - min(vals)


def classify_by_charfun(M: MeanObject, sample_xs: Sequence[float]) -> CharfunClassification:
    """Read off structural properties from the shape of Q_M.

    Homogeneous means have x·Q(x) constant, additively homogeneous means
    have Q constant, and Q ≡ 0 marks an almost-arithmetic mean.
    """
    xs = [float(x) for x in sample_xs]
    if len(xs) < 4:
        raise DomainError("classification needs at least 4 sample points")
    if any(not x > 0 for x in xs):
        raise DomainError("sample points must be positive")
    q = charfun_of(M)
    vals = tuple(q(x) for x in xs)
    xq = [x * v for x, v in zip(xs, vals)]
    tol = CONSTANCY_TOL
    return CharfunClassification(
        q_values=vals,
        homogeneous_consistent=_spread(xq) <= tol * max(1.0, max(abs(v) for v in xq)),
        additively_homogeneous_consistent=_spread(vals) <= tol * max(1.0, max(abs(v) for v in vals)),
        almost_arithmetic=max(abs(v) for v in vals) <= tol,
        kind=q.kind,
    )
