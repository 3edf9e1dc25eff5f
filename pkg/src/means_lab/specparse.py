"""Textual mean identifiers.

Grammar (whitespace around tokens is ignored)::

    spec   := name [":" args]
    args   := arg ("," arg)*
    arg    := key "=" value | "inner=" spec      # inner consumes the rest
    value  := number | palette-call

Examples: ``agm``, ``power:r=3``, ``gini:a=1,b=0``,
``int1:f=pow(2),g=arcsine``, ``shift:c=1.5,inner=mmean:f=square,inner=harmonic``.
"""

from __future__ import annotations

import math
import re

from means_lab import palette
from means_lab.base import FAMILY_PARAMS, Family, MeanObject
from means_lab.core_means import make_catalog_mean, shift_transform
from means_lab.errors import SpecParseError
from means_lab.mean_classes import (
    make_additive,
    make_integral_first,
    make_integral_second,
    make_mmean,
    make_normal,
)

_NAME = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*")
_KEY = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=")

CATALOG_ALIASES = {
    "a": Family.ARITHMETIC,
    "arith": Family.ARITHMETIC,
    "arithmetic": Family.ARITHMETIC,
    "g": Family.GEOMETRIC,
    "geo": Family.GEOMETRIC,
    "geometric": Family.GEOMETRIC,
    "h": Family.HARMONIC,
    "harmonic": Family.HARMONIC,
    "power": Family.POWER,
    "lehmer": Family.LEHMER,
    "gini": Family.GINI,
    "stolarsky": Family.STOLARSKY,
    "i": Family.IDENTRIC,
    "identric": Family.IDENTRIC,
    "l": Family.LOGARITHMIC,
    "log": Family.LOGARITHMIC,
    "logarithmic": Family.LOGARITHMIC,
    "e": Family.EXPONENTIAL,
    "exp": Family.EXPONENTIAL,
    "exponential": Family.EXPONENTIAL,
    "agm": Family.AGM,
}

# Constructor name -> (required keys, optional keys).
CONSTRUCTORS = {
    "normal": ({"P"}, set()),
    "additive": ({"f"}, set()),
    "int1": ({"f"}, {"g"}),
    "int2": ({"f"}, {"g"}),
    "shift": ({"c", "inner"}, set()),
    "mmean": ({"f", "inner"}, set()),
}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.key_pos = {}

    def error(self, msg, pos):
        raise SpecParseError(msg, pos)

    def parse(self, start: int = 0) -> MeanObject:
        s = self.text
        m = _NAME.match(s, start)
        if not m:
            self.error("expected a mean name", start)
        name, name_pos = m.group(1), m.start(1)
        i = m.end()
        args = {}
        if i < len(s):
            if s[i] != ":":
                self.error(f"expected ':' after {name!r}", i)
            args = self.parse_args(i + 1)
        return self.build(name, name_pos, args)

    def parse_args(self, i: int) -> dict:
        s = self.text
        args = {}
        while True:
            m = _KEY.match(s, i)
            if not m:
                self.error("expected key=value", i)
            key, key_pos = m.group(1), m.start(1)
            if key in args:
                self.error(f"duplicate key {key!r}", key_pos)
            self.key_pos[id(args), key] = key_pos
            i = m.end()
            if key == "inner":
                args[key] = ("", i)
                return args
            j, depth = i, 0
            while j < len(s):
                ch = s[j]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth < 0:
                        self.error("unbalanced ')'", j)
                elif ch == "," and depth == 0:
                    break
                j += 1
            if depth != 0:
                self.error("unbalanced '('", i)
            value = s[i:j].strip()
            if not value:
                self.error(f"missing value for {key!r}", i)
            args[key] = (value, i + (len(s[i:j]) - len(s[i:j].lstrip())))
            if j == len(s):
                return args
            i = j + 1

    def number(self, args, key) -> float:
        text, pos = args[key]
        try:
            v = float(text)
        except ValueError:
            self.error(f"{key} must be a number, got {text!r}", pos)
        if not math.isfinite(v):
            self.error(f"{key} must be finite", pos)
        return v

    def check_keys(self, name, name_pos, args, required, optional=()):
        for key, (_, pos) in args.items():
            if key not in required and key not in optional:
                self.error(f"{name} does not take {key!r}", self.key_pos.get((id(args), key), pos))
        missing = [k for k in required if k not in args]
        if missing:
            self.error(f"{name} needs {', '.join(sorted(missing))}", name_pos)

    def build(self, name: str, name_pos: int, args: dict) -> MeanObject:
        lname = name.lower()
        if lname in CATALOG_ALIASES and lname not in CONSTRUCTORS:
            fam = CATALOG_ALIASES[lname]
            keys = FAMILY_PARAMS.get(fam, ())
            self.check_keys(name, name_pos, args, set(keys))
            return make_catalog_mean(fam, *(self.number(args, k) for k in keys))
        if lname not in CONSTRUCTORS:
            self.error(f"unknown mean {name!r}", name_pos)

        required, optional = CONSTRUCTORS[lname]
        self.check_keys(lname, name_pos, args, required, optional)

        def fn(key):
            text, pos = args[key]
            return palette.get_function(text, pos)

        def dist():
            if "g" not in args:
                return None
            text, pos = args["g"]
            return palette.get_distribution(text, pos)

        if lname == "normal":
            return make_normal(fn("P"))
        if lname == "additive":
            return make_additive(fn("f"))
        if lname == "int1":
            return make_integral_first(fn("f"), dist())
        if lname == "int2":
            return make_integral_second(fn("f"), dist())
        inner = self.parse(args["inner"][1])
        if lname == "shift":
            return shift_transform(inner, self.number(args, "c"))
        return make_mmean(inner, fn("f"))


def parse_mean_spec(text: str) -> MeanObject:
    """Resolve a textual identifier to a :class:`MeanObject`."""
    if not isinstance(text, str) or not text.strip():
        raise SpecParseError("empty mean specification", 0)
    return _Parser(text).parse()
