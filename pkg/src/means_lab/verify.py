"""Self-verification suites.

Each check compares a library computation against an independent oracle
(closed forms, mpmath at 50 digits, or a second algorithm) and records
the worst residual seen alongside the tolerance it was held to.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from means_lab import palette
from means_lab.base import MeanObject
from means_lab.charfun import (
    M1_GE_M2,
    compare_means,
    estimate_charfun,
    expansion_coeffs,
)
from means_lab.core_means import (
    AGM,
    ARITHMETIC,
    EXPONENTIAL,
    GEOMETRIC,
    HARMONIC,
    IDENTRIC,
    LOGARITHMIC,
    agm_integral,
    agm_iterate,
    compose_means,
    eval_stolarsky,
    exponential_mean,
    geometric,
    harmonic,
    make_catalog_mean,
    power_mean,
)
from means_lab.mean_classes import (
    GeneratingFunction,
    agm_as_mmean,
    arcsine,
    beta_symmetric,
    make_additive,
    make_integral_first,
    make_integral_second,
    make_normal,
    normality_defect,
    uniform,
)
from means_lab.quadrature import approx_integral, convergence_order

SUITES = ("charfuns", "expansions", "classes", "quadrature", "agm")
SEED_ENV = "MEANS_LAB_SEED"
DEFAULT_SEED = 20240601


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw.strip(), 10)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be a decimal integer, got {raw!r}") from None


AT_MOST = "<="
AT_LEAST = ">="


@dataclass
class Check:
    """One verified statement: ``residual`` must be AT_MOST (or, for lower
    bounds such as convergence orders, AT_LEAST) ``tolerance``."""

    suite: str
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0
    sense: str = AT_MOST

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "sense": self.sense,
            "tolerance": self.tolerance,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


def _log_grid(rng, n, lo, hi):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=(n, 2)))


# --------------------------------------------------------------------------
# charfuns
# --------------------------------------------------------------------------

CHARFUN_TABLE = (
    ("A", ("arith",)),
    ("G", ("geometric",)),
    ("H", ("harmonic",)),
    ("E", ("exp",)),
    ("Gini(2,0.5)", ("gini", 2.0, 0.5)),
    ("Stolarsky(3)", ("stolarsky", 3.0)),
    ("Power(3)", ("power", 3.0)),
    ("Lehmer(2)", ("lehmer", 2.0)),
    ("L", ("log",)),
    ("I", ("identric",)),
    ("AGM", ("agm",)),
)
CHARFUN_XS = (0.5, 1.0, 2.0, 10.0)
ORDERING_CHAIN = (ARITHMETIC, IDENTRIC, AGM, LOGARITHMIC, GEOMETRIC, HARMONIC)


def check_charfun_table():
    for name, spec in CHARFUN_TABLE:
        M = make_catalog_mean(*spec)
        worst = 0.0
        for x in CHARFUN_XS:
            q = M.charfun(x)
            worst = max(worst, abs(estimate_charfun(M, x) - q) / max(1.0, abs(q)))
        yield f"charfun {name}", worst, 1e-6, ""


def check_closeness(seed):
    worst = 0.0
    for t in np.linspace(-2.0, 3.0, 11):
        P = make_catalog_mean("power", 2 * t - 1)
        L = make_catalog_mean("lehmer", t)
        for x in CHARFUN_XS:
            worst = max(worst, abs(estimate_charfun(P, x) - estimate_charfun(L, x)))
    yield "power(2t-1) close to lehmer(t)", worst, 1e-6, ""


def check_ordering(seed):
    rng = np.random.default_rng(seed)
    pts = _log_grid(rng, 500, 0.1, 100.0)
    worst = 0.0
    for x, y in pts:
        vals = [M(x, y) for M in ORDERING_CHAIN]
        for hi, lo in zip(vals, vals[1:]):
            worst = max(worst, (lo - hi) / max(x, y))
    yield "A >= I >= AGM >= L >= G >= H pointwise", max(worst, 0.0), 1e-14, "500 random points"
    for hi, lo in zip(ORDERING_CHAIN, ORDERING_CHAIN[1:]):
        rep = compare_means(hi, lo, [0.5, 1.0, 2.0, 5.0], seed=seed)
        ok = rep.relation == M1_GE_M2 and rep.scope == "global" and rep.consistent
        # Residual: number of failed conditions (verdict, scope, spot checks).
        bad = (rep.relation != M1_GE_M2) + (rep.scope != "global") + (not rep.consistent)
        yield f"compare {hi.label} >= {lo.label}", float(bad), 0.0, f"{rep.relation} {rep.scope}"


# --------------------------------------------------------------------------
# agm
# --------------------------------------------------------------------------


def check_agm(seed):
    rng = np.random.default_rng(seed)
    pts = _log_grid(rng, 25, 0.1, 50.0)
    am = agm_as_mmean()
    worst = {"iterate/integral": 0.0, "iterate/mmean": 0.0, "integral/mmean": 0.0}
    for x, y in pts:
        a, b, c = agm_iterate(x, y), agm_integral(x, y), am(x, y)
        worst["iterate/integral"] = max(worst["iterate/integral"], abs(a - b) / a)
        worst["iterate/mmean"] = max(worst["iterate/mmean"], abs(a - c) / a)
        worst["integral/mmean"] = max(worst["integral/mmean"], abs(b - c) / b)
    for name, w in worst.items():
        yield f"AGM {name}", w, 1e-8, "25 random points in (0.1, 50)^2"
    q = am.charfun
    wq = max(abs(q(x) + 0.125 / x) * x for x in CHARFUN_XS)
    yield "AGM as M-mean has Q = -1/(8x)", wq, 1e-12, ""


# --------------------------------------------------------------------------
# expansions
# --------------------------------------------------------------------------

EXPANSION_TABLE = (
    ("G", GEOMETRIC, -1.0 / 8.0, -1.0 / 128.0),
    ("H", HARMONIC, -1.0 / 4.0, 0.0),
    ("E", EXPONENTIAL, 1.0 / 24.0, -1.0 / 2880.0),
)


def _mp_oracles():
    return {
        "G": (GEOMETRIC, lambda x, y: mpmath.sqrt(x * y)),
        "L": (LOGARITHMIC, lambda x, y: (x - y) / (mpmath.log(x) - mpmath.log(y))),
        "E": (EXPONENTIAL, lambda x, y: mpmath.log((mpmath.exp(x) - mpmath.exp(y)) / (x - y))),
        "AGM": (AGM, lambda x, y: mpmath.agm(x, y)),
    }


def remainder_slope(M: MeanObject, oracle: Callable, a: float = 1.0, n: int = 9) -> float:
    """Slope of log|M - expansion| against log d over d ∈ [1e-3, 1e-1].

    The remainder drops to ~1e-21 at the small end, far below binary64
    resolution, so M is evaluated by a 50-digit oracle and the expansion
    polynomial with the library's (f1, f2) is subtracted in that precision.
    """
    c = expansion_coeffs(M, a)
    ds = np.geomspace(1e-3, 1e-1, n)
    with mpmath.workdps(50):
        A = mpmath.mpf(a)
        rem = []
        for d in ds:
            dm = mpmath.mpf(float(d))
            model = A + mpmath.mpf(c.f1) * dm**2 + mpmath.mpf(c.f2) * dm**4
            rem.append(float(abs(oracle(A + dm / 2, A - dm / 2) - model)))
    return float(np.polyfit(np.log(ds), np.log(rem), 1)[0])


def check_expansions(seed):
    for name, M, f1, f2 in EXPANSION_TABLE:
        c = expansion_coeffs(M, 1.0)
        r1 = abs(c.f1 - f1) / abs(f1)
        # H has f2 = 0; measure it against the size of f1 instead.
        r2 = abs(c.f2 - f2) / (abs(f2) if f2 else abs(f1))
        yield f"expansion f1 {name}", r1, 1e-4, f"f1={c.f1!r}"
        yield f"expansion f2 {name}", r2, 1e-4, f"f2={c.f2!r}"
    for name, (M, oracle) in _mp_oracles().items():
        s = remainder_slope(M, oracle)
        yield f"remainder slope {name}", abs(s - 6.0), 0.2, f"slope={s:.3f}"


# --------------------------------------------------------------------------
# classes
# --------------------------------------------------------------------------


def _identity_checks():
    return (
        ("additive(pow(3)) = power(3)", make_additive(palette.power(3)), lambda x, y: power_mean(3, x, y)),
        ("additive(pow(-2)) = power(-2)", make_additive(palette.power(-2)), lambda x, y: power_mean(-2, x, y)),
        ("additive(log) = G", make_additive(palette.log()), geometric),
        ("int1(pow(2)) = stolarsky(3)", make_integral_first(palette.power(2)), lambda x, y: eval_stolarsky(3, x, y)),
        ("int1(pow(-0.5)) = stolarsky(0.5)", make_integral_first(palette.power(-0.5)), lambda x, y: eval_stolarsky(0.5, x, y)),
        ("int1(exp) = E", make_integral_first(palette.exp()), exponential_mean),
        ("int2(pow(-2)) = G", make_integral_second(palette.power(-2)), geometric),
        ("int2(recip_sqrt) = H", make_integral_second(palette.recip_sqrt()), harmonic),
    )


def check_class_identities(seed):
    rng = np.random.default_rng(seed + 1)
    pts = _log_grid(rng, 50, 0.1, 50.0)
    for name, M, ref in _identity_checks():
        worst = max(abs(M(x, y) - ref(x, y)) / ref(x, y) for x, y in pts)
        yield name, worst, 1e-9, "50 random points"


CLASS_XS = (0.5, 1.0, 2.0, 5.0)


def class_charfun_cases():
    dists = (uniform(), arcsine(), beta_symmetric(1.0))
    weights = ("pow(-0.5)", "pow(2)", "exp", "recip", "sin_shift")
    monotone = ("pow(3)", "log", "exp", "recip", "recip_sqrt", "square")
    onto = ("pow(3)", "exp", "recip", "recip_sqrt", "square")
    for w in weights:
        yield make_normal(palette.get_function(w))
    for f in monotone:
        yield make_additive(palette.get_function(f))
    for g in dists:
        for f in monotone:
            yield make_integral_first(palette.get_function(f), g)
        for f in onto:
            yield make_integral_second(palette.get_function(f), g)


def check_class_charfuns(seed):
    groups = {}
    for M in class_charfun_cases():
        kind = M.label.split("[")[0]
        worst = groups.get(kind, (0.0, ""))
        for x in CLASS_XS:
            q = M.charfun(x)
            r = abs(estimate_charfun(M, x) - q) / max(abs(q), 1e-3)
            if r > worst[0]:
                worst = (r, f"{M.label} at x={x:g}")
        groups[kind] = worst
    for kind, (w, where) in groups.items():
        yield f"class charfun {kind}", w, 1e-5, f"worst: {where}"


def check_essential_integrals(seed):
    g_u, g_a = uniform(), arcsine()
    table = (
        ("c1(uniform) = 1/12", g_u.essential(1), 1.0 / 12.0),
        ("c2(uniform) = 1/80", g_u.essential(2), 1.0 / 80.0),
        ("c1(arcsine) = 1/8", g_a.essential(1), 1.0 / 8.0),
        ("c2(arcsine) = 3/128", g_a.essential(2), 3.0 / 128.0),
        ("mu(uniform) = 1/6", g_u.mu, 1.0 / 6.0),
        ("mu(arcsine) = 1/8", g_a.mu, 1.0 / 8.0),
    )
    for name, got, want in table:
        yield name, abs(got - want), 1e-10, ""
    worst = max(abs(beta_symmetric(r).essential(1) - 1.0 / (4 * (2 * r + 3))) for r in (0.0, 1.0, 2.0, 0.5))
    yield "c1(beta(r)) = 1/(4(2r+3))", worst, 1e-10, ""


def check_composition(seed):
    worst = 0.0
    for M0 in (ARITHMETIC, GEOMETRIC, AGM):
        for M1, M2 in ((ARITHMETIC, GEOMETRIC), (HARMONIC, ARITHMETIC)):
            C = compose_means(M0, M1, M2)
            for x in CLASS_XS:
                want = 0.5 * (M1.charfun(x) + M2.charfun(x))
                worst = max(worst, abs(estimate_charfun(C, x) - want) / abs(want))
    yield "charfun of M0(M1, M2) = (Q1 + Q2)/2", worst, 1e-5, ""


NORMALITY_POINTS = ((1, 2), (1, 4), (0.5, 3), (2, 7), (3, 1), (0.2, 0.9), (5, 9), (1.5, 6), (0.3, 8), (10, 2))


def check_normality(seed):
    normal = (ARITHMETIC, GEOMETRIC, HARMONIC, make_catalog_mean("lehmer", 2), make_catalog_mean("lehmer", 3))
    for M in normal:
        w = max(abs(normality_defect(M, x, y)) for x, y in NORMALITY_POINTS)
        yield f"normality defect {M.label} vanishes", w, 1e-6, ""
    for M in (make_catalog_mean("power", 2), AGM):
        w = max(abs(normality_defect(M, x, y)) for x, y in NORMALITY_POINTS)
        yield f"normality defect {M.label} is non-zero", w, 1e-3, "", AT_LEAST


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


def _affine(slope: float, intercept: float) -> GeneratingFunction:
    return GeneratingFunction(
        func=lambda t: slope * np.asarray(t, dtype=float) + intercept,
        d1=lambda t: slope + 0.0 * np.asarray(t, dtype=float),
        d2=lambda t: 0.0 * np.asarray(t, dtype=float),
        domain=(-math.inf, math.inf),
        image=(-math.inf, math.inf),
        label=f"{slope:g}t+{intercept:g}",
        integral=lambda x, y: (y - x) * (0.5 * slope * (x + y) + intercept),
    )


def check_quadrature(seed):
    for fname in ("exp", "recip", "pow(3)"):
        f = palette.get_function(fname)
        for rule in ("first", "second"):
            slopes = [convergence_order(rule, f, c) for c in (1.0, 2.0, 5.0)]
            yield f"{rule}-kind order for {fname}", min(slopes), 4.8, "centers 1, 2, 5", AT_LEAST
    worst = 0.0
    for f in (_affine(2.0, 1.0), _affine(-0.5, 3.0), palette.identity()):
        for rule in ("first", "second"):
            for x, y in ((0.0, 1.0), (1.0, 3.5), (2.0, 2.25)):
                r = approx_integral(rule, f, x, y)
                worst = max(worst, r.abs_error / max(1.0, abs(r.exact)))
    yield "rules exact on affine integrands", worst, 1e-14, ""


SUITE_CHECKS = {
    "charfuns": (lambda s: check_charfun_table(), check_closeness, check_ordering),
    "agm": (check_agm,),
    "expansions": (check_expansions,),
    "classes": (
        check_class_identities,
        check_class_charfuns,
        check_essential_integrals,
        check_composition,
        check_normality,
    ),
    "quadrature": (check_quadrature,),
}


def run_suite(name: str, seed: int | None = None) -> list[Check]:
    """Run one suite (or ``"all"``) and return its checks in a fixed order."""
    if seed is None:
        seed = seed_from_env()
    names = SUITES if name == "all" else (name,)
    out = []
    for suite in names:
        if suite not in SUITE_CHECKS:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
        for gen in SUITE_CHECKS[suite]:
            t0 = time.perf_counter()
            for item in gen(seed):
                check_name, residual, tol, detail = item[:4]
                sense = item[4] if len(item) > 4 else AT_MOST
                now = time.perf_counter()
                ok = residual <= tol if sense == AT_MOST else residual >= tol
                ok = bool(ok) and not math.isnan(residual)
                out.append(Check(suite, check_name, ok, float(residual), float(tol), detail, now - t0, sense))
                t0 = now
    return out
