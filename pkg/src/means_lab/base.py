"""Value types shared across the package: evaluable means and charfuns."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from means_lab.errors import DomainError

CLOSED_FORM = "closed_form"
FD_ORACLE = "fd_oracle"


class Family(str, Enum):
    ARITHMETIC = "arith"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"
    POWER = "power"
    LEHMER = "lehmer"
    GINI = "gini"
    STOLARSKY = "stolarsky"
    IDENTRIC = "identric"
    LOGARITHMIC = "log"
    EXPONENTIAL = "exp"
    AGM = "agm"


# Parameter names each family requires, in canonical order.
FAMILY_PARAMS = {
    Family.POWER: ("r",),
    Family.LEHMER: ("t",),
    Family.GINI: ("a", "b"),
    Family.STOLARSKY: ("p",),
}


@dataclass(frozen=True)
class MeanParams:
    """A catalog family together with its real parameters."""

    family: Family
    values: tuple = ()

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        names = FAMILY_PARAMS.get(fam, ())
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(names):
            raise DomainError(f"{fam.value} takes parameters {names}, got {len(vals)} value(s)")
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"{fam.value}: parameters must be finite")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, name: str) -> float:
        return self.values[FAMILY_PARAMS[self.family].index(name)]

    def as_dict(self) -> dict:
        return dict(zip(FAMILY_PARAMS.get(self.family, ()), self.values))

    def describe(self) -> str:
        d = self.as_dict()
        if not d:
            return self.family.value
        inner = ",".join(f"{k}={v:g}" for k, v in d.items())
        return f"{self.family.value}:{inner}"


@dataclass(frozen=True, eq=False)
class CharFn:
    """A univariate characteristic function x ↦ Q(x).

    ``second_derivative`` is an optional analytic Q''; it is only known for
    the simple c/x and constant closed forms.
    """

    func: Callable[[float], float]
    kind: str = CLOSED_FORM
    label: str = ""
    second_derivative: Optional[Callable[[float], float]] = None

    def __call__(self, x: float) -> float:
        return float(self.func(x))

    @property
    def is_closed_form(self) -> bool:
        return self.kind == CLOSED_FORM


@dataclass(frozen=True, eq=False)
class MeanObject:
    """A symmetric bivariate mean on (0, ∞)².

    Instances are immutable and evaluate as plain functions: ``M(x, y)``.
    """

    func: Callable[[float, float], float]
    label: str
    homogeneous: bool = False
    additively_homogeneous: bool = False
    strict: bool = True
    charfun: Optional[CharFn] = None
    params: object = None

    def __call__(self, x: float, y: float) -> float:
        x = float(x)
        y = float(y)
        if not (x > 0.0 and y > 0.0) or math.isinf(x) or math.isinf(y):
            raise DomainError(f"{self.label}: arguments must be positive and finite, got ({x}, {y})")
        return self.func(x, y)

    def __repr__(self) -> str:
        return f"MeanObject({self.label!r})"
