"""A small palette of generating functions and symmetric distributions.

Each generating function carries its first two derivatives, its domain
and image, and a cancellation-free definite integral (used as the exact
reference by the quadrature rules).
"""

from __future__ import annotations

import math
import re

import numpy as np

from means_lab.errors import ConstructionError, SpecParseError
from means_lab.mean_classes import (
    GeneratingFunction,
    SymmetricDistribution,
    arcsine,
    beta_symmetric,
    uniform,
)

POS = (0.0, math.inf)
REAL = (-math.inf, math.inf)


def power(r: float) -> GeneratingFunction:
    """t ↦ t^r on (0, ∞)."""
    r = float(r)
    if r == 0:
        raise ConstructionError("power(0) is constant; use log instead")

    def integral(x, y):
        # (y^(r+1) - x^(r+1))/(r+1), written so that nearby x, y do not cancel.
        ell = math.log1p((y - x) / x)
        if r == -1.0:
            return ell
        return x ** (r + 1) * math.expm1((r + 1) * ell) / (r + 1)

    return GeneratingFunction(
        func=lambda t: np.power(t, r),
        d1=lambda t: r * np.power(t, r - 1),
        d2=lambda t: r * (r - 1) * np.power(t, r - 2),
        domain=POS,
        image=POS,
        label=f"pow({r:g})",
        integral=integral,
    )


def log() -> GeneratingFunction:
    def integral(x, y):
        return (y - x) * (math.log(y) - 1.0) + x * math.log1p((y - x) / x)

    return GeneratingFunction(
        func=np.log,
        d1=lambda t: 1.0 / t,
        d2=lambda t: -1.0 / (t * t),
        domain=POS,
        image=REAL,
        label="log",
        integral=integral,
    )


def exp() -> GeneratingFunction:
    return GeneratingFunction(
        func=np.exp,
        d1=np.exp,
        d2=np.exp,
        domain=REAL,
        image=POS,
        label="exp",
        integral=lambda x, y: math.exp(x) * math.expm1(y - x),
    )


def recip() -> GeneratingFunction:
    g = power(-1.0)
    return GeneratingFunction(g.func, g.d1, g.d2, POS, POS, "recip", integral=g.integral)


def recip_sqrt() -> GeneratingFunction:
    g = power(-0.5)
    return GeneratingFunction(g.func, g.d1, g.d2, POS, POS, "recip_sqrt", integral=g.integral)


def square() -> GeneratingFunction:
    g = power(2.0)
    return GeneratingFunction(g.func, g.d1, g.d2, POS, POS, "square", integral=g.integral)


def identity() -> GeneratingFunction:
    # Declared on (0, ∞) so it qualifies for every class constructor.
    return GeneratingFunction(
        func=lambda t: np.asarray(t, dtype=float) + 0.0,
        d1=lambda t: 1.0 + 0.0 * np.asarray(t, dtype=float),
        d2=lambda t: 0.0 * np.asarray(t, dtype=float),
        domain=POS,
        image=POS,
        label="identity",
        integral=lambda x, y: 0.5 * (y - x) * (y + x),
    )


def sin_shift() -> GeneratingFunction:
    """sin t + 2: positive but not monotone, usable only as a normal weight."""

    def integral(x, y):
        return 2.0 * (y - x) + 2.0 * math.sin(0.5 * (x + y)) * math.sin(0.5 * (y - x))

    return GeneratingFunction(
        func=lambda t: np.sin(t) + 2.0,
        d1=np.cos,
        d2=lambda t: -np.sin(t),
        domain=REAL,
        image=(1.0, 3.0),
        label="sin_shift",
        integral=integral,
    )


_NULLARY = {
    "log": log,
    "exp": exp,
    "recip": recip,
    "recip_sqrt": recip_sqrt,
    "square": square,
    "identity": identity,
    "id": identity,
    "sin_shift": sin_shift,
}
_UNARY = {"pow": power, "power": power}

FUNCTION_NAMES = tuple(sorted(_NULLARY)) + ("pow(r)",)
DISTRIBUTION_NAMES = ("uniform", "arcsine", "beta(r)")

_CALL = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\(\s*([^()]*?)\s*\))?\s*$")


def _split_call(text: str, what: str, offset: int):
    m = _CALL.match(text)
    if not m:
        raise SpecParseError(f"malformed {what} {text!r}", offset)
    name, arg = m.group(1).lower(), m.group(2)
    if arg is None:
        return name, None
    try:
        return name, float(arg)
    except ValueError:
        raise SpecParseError(f"bad numeric argument {arg!r} for {name}", offset + m.start(2)) from None


def get_function(text: str, offset: int = 0) -> GeneratingFunction:
    """Look up a palette function by name, e.g. ``"exp"`` or ``"pow(-0.5)"``."""
    name, arg = _split_call(text, "function", offset)
    if name in _UNARY:
        if arg is None:
            raise SpecParseError(f"{name} needs an argument, e.g. {name}(2)", offset)
        return _UNARY[name](arg)
    if name in _NULLARY:
        if arg is not None:
            raise SpecParseError(f"{name} takes no argument", offset)
        return _NULLARY[name]()
    raise SpecParseError(f"unknown function {name!r}; known: {', '.join(FUNCTION_NAMES)}", offset)


def get_distribution(text: str, offset: int = 0) -> SymmetricDistribution:
    name, arg = _split_call(text, "distribution", offset)
    if name in ("uniform", "unif"):
        if arg is not None:
            raise SpecParseError("uniform takes no argument", offset)
        return uniform()
    if name == "arcsine":
        if arg is not None:
            raise SpecParseError("arcsine takes no argument", offset)
        return arcsine()
    if name == "beta":
        if arg is None:
            raise SpecParseError("beta needs an exponent, e.g. beta(1)", offset)
        return beta_symmetric(arg)
    raise SpecParseError(
        f"unknown distribution {name!r}; known: {', '.join(DISTRIBUTION_NAMES)}", offset
    )
