import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from means_lab.base import Family, MeanParams
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
    gini_mean,
    identric,
    lehmer_mean,
    logarithmic,
    make_catalog_mean,
    power_mean,
    shift_transform,
)
from means_lab.errors import DomainError

mp.mp.dps = 40

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)

CATALOG = [
    ("arith",),
    ("geometric",),
    ("harmonic",),
    ("power", 3.0),
    ("power", -2.0),
    ("power", 0.0),
    ("lehmer", 2.0),
    ("lehmer", 0.25),
    ("gini", 2.0, 0.5),
    ("gini", 1.0, 1.0),
    ("stolarsky", 3.0),
    ("stolarsky", -1.0),
    ("stolarsky", 0.0),
    ("stolarsky", 1.0),
    ("identric",),
    ("log",),
    ("exp",),
    ("agm",),
]


def mp_reference(spec, x, y):
    x, y = mp.mpf(x), mp.mpf(y)
    name = spec[0]
    if name == "arith":
        return (x + y) / 2
    if name == "geometric":
        return mp.sqrt(x * y)
    if name == "harmonic":
        return 2 * x * y / (x + y)
    if name == "power":
        r = spec[1]
        return mp.sqrt(x * y) if r == 0 else ((x**r + y**r) / 2) ** (1 / mp.mpf(r))
    if name == "lehmer":
        t = spec[1]
        return (x**t + y**t) / (x ** (t - 1) + y ** (t - 1))
    if name == "gini":
        a, b = spec[1], spec[2]
        if a == b:
            return mp.exp((x**a * mp.log(x) + y**a * mp.log(y)) / (x**a + y**a))
        return ((x**a + y**a) / (x**b + y**b)) ** (1 / mp.mpf(a - b))
    if name == "stolarsky":
        p = spec[1]
        if p == 0:
            return (x - y) / (mp.log(x) - mp.log(y))
        if p == 1:
            return mp.exp((x * mp.log(x) - y * mp.log(y)) / (x - y) - 1)
        return ((x**p - y**p) / (p * (x - y))) ** (1 / mp.mpf(p - 1))
    if name == "identric":
        return mp.exp((x * mp.log(x) - y * mp.log(y)) / (x - y) - 1)
    if name == "log":
        return (x - y) / (mp.log(x) - mp.log(y))
    if name == "exp":
        return mp.log((mp.exp(x) - mp.exp(y)) / (x - y))
    if name == "agm":
        return mp.agm(x, y)
    raise AssertionError(name)


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: ":".join(map(str, s)))
@pytest.mark.parametrize("x,y", [(1.0, 2.0), (0.3, 7.0), (5.0, 5.000001), (1e-2, 1e2), (3.0, 3.0 + 1e-9)])
def test_catalog_against_high_precision(spec, x, y):
    M = make_catalog_mean(*spec)
    assert M(x, y) == pytest.approx(float(mp_reference(spec, x, y)), rel=2e-14)


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: ":".join(map(str, s)))
def test_diagonal_is_exact(spec):
    M = make_catalog_mean(*spec)
    for x in (0.1, 1.0, 37.5):
        assert M(x, x) == x


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: ":".join(map(str, s)))
@settings(max_examples=40, deadline=None)
@given(x=positive, y=positive)
def test_symmetric_and_between(spec, x, y):
    M = make_catalog_mean(*spec)
    v = M(x, y)
    assert v == M(y, x)
    lo, hi = min(x, y), max(x, y)
    assert lo * (1 - 1e-15) <= v <= hi * (1 + 1e-15)


@pytest.mark.parametrize("spec", [s for s in CATALOG if s[0] != "exp"], ids=lambda s: ":".join(map(str, s)))
@settings(max_examples=30, deadline=None)
@given(x=positive, y=positive, lam=st.floats(min_value=0.01, max_value=100))
def test_homogeneous(spec, x, y, lam):
    M = make_catalog_mean(*spec)
    assert M.homogeneous
    assert M(lam * x, lam * y) == pytest.approx(lam * M(x, y), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(0.01, 50), y=st.floats(0.01, 50), lam=st.floats(0.0, 50))
def test_exponential_mean_is_additively_homogeneous(x, y, lam):
    assert EXPONENTIAL.additively_homogeneous and not EXPONENTIAL.homogeneous
    assert exponential_mean(x + lam, y + lam) == pytest.approx(exponential_mean(x, y) + lam, rel=1e-13, abs=1e-13)


def test_flags():
    assert ARITHMETIC.additively_homogeneous
    assert make_catalog_mean("power", 1).additively_homogeneous
    assert make_catalog_mean("gini", 0, 1).additively_homogeneous
    assert make_catalog_mean("stolarsky", 2).additively_homogeneous
    assert not GEOMETRIC.additively_homogeneous
    assert all(M.strict for M in (ARITHMETIC, GEOMETRIC, AGM))


def test_trivial_values():
    assert make_catalog_mean("power", 1)(2, 4) == 3
    assert make_catalog_mean("lehmer", 0)(2, 4) == pytest.approx(8 / 3, rel=1e-15)
    assert eval_stolarsky(2, 1, 3) == pytest.approx(2.0, rel=1e-15)
    assert eval_stolarsky(-1, 1, 4) == pytest.approx(2.0, rel=1e-15)


def test_parameter_limits_are_continuous():
    x, y = 1.3, 4.2
    assert eval_stolarsky(1e-10, x, y) == pytest.approx(logarithmic(x, y), rel=1e-9)
    assert eval_stolarsky(1e-7, x, y) == pytest.approx(logarithmic(x, y), rel=1e-6)
    assert eval_stolarsky(1 + 1e-7, x, y) == pytest.approx(identric(x, y), rel=1e-6)
    assert gini_mean(2 + 1e-7, 2, x, y) == pytest.approx(gini_mean(2, 2, x, y), rel=1e-6)
    assert power_mean(1e-8, x, y) == pytest.approx(GEOMETRIC(x, y), rel=1e-7)


def test_no_overflow_at_extreme_ratios():
    x, y = 1e-4, 1e4
    assert power_mean(60, x, y) == pytest.approx(y * 0.5 ** (1 / 60), rel=1e-13)
    assert power_mean(-60, x, y) == pytest.approx(x * 0.5 ** (-1 / 60), rel=1e-13)
    assert math.isfinite(eval_stolarsky(80, x, y))
    assert math.isfinite(lehmer_mean(-50, x, y))
    assert math.isfinite(exponential_mean(1.0, 900.0))


def test_near_diagonal_series_branch_matches_closed_form():
    for M, spec in ((LOGARITHMIC, ("log",)), (IDENTRIC, ("identric",)), (EXPONENTIAL, ("exp",))):
        for d in (1e-7, 5e-7, 2e-6):
            x, y = 2.0, 2.0 + d
            assert M(x, y) == pytest.approx(float(mp_reference(spec, x, y)), rel=1e-15)


def test_domain_errors():
    for M in (ARITHMETIC, HARMONIC, AGM):
        with pytest.raises(DomainError):
            M(-1, 2)
        with pytest.raises(DomainError):
            M(1, math.inf)
    with pytest.raises(DomainError):
        agm_iterate(0.0, 1.0)
    with pytest.raises(DomainError):
        make_catalog_mean("power")
    with pytest.raises(DomainError):
        MeanParams(Family.GINI, (1.0, math.nan))


class TestAGM:
    @pytest.mark.parametrize("x,y", [(1, 2), (0.1, 50), (1e-6, 1e6), (3, 3.0000001)])
    def test_iterate_matches_mpmath(self, x, y):
        assert agm_iterate(x, y) == pytest.approx(float(mp.agm(x, y)), rel=1e-15)

    @pytest.mark.parametrize("x,y", [(1, 2), (0.1, 50), (1, 500)])
    def test_integral_matches_iterate(self, x, y):
        assert agm_integral(x, y) == pytest.approx(agm_iterate(x, y), rel=1e-12)

    def test_agm_of_one_and_root_two(self):
        # Gauss's constant: 1/AGM(1, √2).
        assert 1 / agm_iterate(1, math.sqrt(2)) == pytest.approx(0.8346268416740731, rel=1e-15)


def test_shift_transform():
    Gc = shift_transform(GEOMETRIC, 1.0)
    assert Gc(1, 3) == pytest.approx(math.sqrt(8) - 1, rel=1e-15)
    Hc = shift_transform(HARMONIC, 0.7)
    x, y, c = 1.5, 4.0, 0.7
    assert Hc(x, y) == pytest.approx((2 * x * y + c * (x + y)) / (x + y + 2 * c), rel=1e-15)
    assert Gc.charfun(2.0) == GEOMETRIC.charfun(3.0)
    assert shift_transform(GEOMETRIC, 0) is GEOMETRIC
    with pytest.raises(DomainError):
        shift_transform(GEOMETRIC, -1)


def test_compose_means():
    C = compose_means(GEOMETRIC, ARITHMETIC, HARMONIC)
    # G(A, H) = G for two arguments.
    assert C(2, 8) == pytest.approx(4.0, rel=1e-15)
    assert C.charfun(2.0) == pytest.approx(GEOMETRIC.charfun(2.0) * 0 + (-0.5 / 2) / 2, rel=1e-15)
    assert C.homogeneous


def test_params_describe():
    p = MeanParams(Family.GINI, (1, 0))
    assert p.describe() == "gini:a=1,b=0"
    assert p["b"] == 0.0
    assert make_catalog_mean(p).label == "gini:a=1,b=0"
