import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from means_lab import palette
from means_lab.charfun import estimate_charfun
from means_lab.core_means import (
    AGM,
    ARITHMETIC,
    EXPONENTIAL,
    GEOMETRIC,
    HARMONIC,
    LOGARITHMIC,
    agm_integral,
    agm_iterate,
    eval_stolarsky,
    make_catalog_mean,
)
from means_lab.errors import ConstructionError, DomainError
from means_lab.mean_classes import (
    GeneratingFunction,
    SymmetricDistribution,
    agm_as_mmean,
    arcsine,
    beta_symmetric,
    essential_integral,
    make_additive,
    make_integral_first,
    make_integral_second,
    make_mmean,
    make_normal,
    mu_integral,
    normality_defect,
    uniform,
)

pairs = st.tuples(st.floats(0.05, 20), st.floats(0.05, 20))


class TestGeneratingFunction:
    def test_direction(self):
        assert palette.log().direction == 1
        assert palette.recip().direction == -1
        assert palette.sin_shift().direction == 0 and not palette.sin_shift().monotone

    def test_bad_derivative_is_caught(self):
        with pytest.raises(ConstructionError):
            GeneratingFunction(np.exp, np.exp, lambda t: 2 * np.exp(t), domain=(-5, 5))

    def test_inverse(self):
        f = palette.power(3)
        assert f.inverse(27.0) == pytest.approx(3.0, rel=1e-15)
        with pytest.raises(DomainError):
            palette.sin_shift().inverse(2.0)

    def test_power_zero_rejected(self):
        with pytest.raises(ConstructionError):
            palette.power(0)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    @pytest.mark.parametrize("name", ["log", "exp", "recip", "recip_sqrt", "square", "identity", "pow(2.5)", "pow(-1)"])
    def test_palette_integrals(self, name):
        from scipy import integrate

        f = palette.get_function(name)
        x, y = 0.7, 1.9
        want, _ = integrate.quad(f.value, x, y, epsabs=1e-14, epsrel=1e-14)
        assert f.integral(x, y) == pytest.approx(want, rel=1e-13)

    def test_sin_shift_integral(self):
        from scipy import integrate

        f = palette.sin_shift()
        want, _ = integrate.quad(f.value, -1.0, 2.5)
        assert f.integral(-1.0, 2.5) == pytest.approx(want, rel=1e-13)


class TestDistributions:
    def test_uniform(self):
        g = uniform()
        assert essential_integral(g, 0) == pytest.approx(1.0, abs=1e-14)
        assert essential_integral(g, 1) == pytest.approx(1 / 12, abs=1e-14)
        assert essential_integral(g, 2) == pytest.approx(1 / 80, abs=1e-14)
        assert mu_integral(g) == pytest.approx(1 / 6, abs=1e-14)

    def test_arcsine(self):
        g = arcsine()
        assert essential_integral(g, 1) == pytest.approx(1 / 8, abs=1e-12)
        # E[(t - 1/2)^4] = 3/128 for the arcsine law.
        assert essential_integral(g, 2) == pytest.approx(3 / 128, abs=1e-12)
        assert mu_integral(g) == pytest.approx(1 / 8, abs=1e-12)

    @pytest.mark.parametrize("r", [-0.5, 0.0, 1.0, 2.0, 0.3])
    def test_beta_family(self, r):
        g = beta_symmetric(r)
        assert essential_integral(g, 1) == pytest.approx(1 / (4 * (2 * r + 3)), abs=1e-9)
        assert mu_integral(g) + essential_integral(g, 1) == pytest.approx(0.25, abs=1e-12)

    def test_beta_minus_half_is_arcsine(self):
        assert beta_symmetric(-0.5).moments == pytest.approx(arcsine().moments, abs=1e-12)

    def test_bad_r(self):
        with pytest.raises(ConstructionError):
            beta_symmetric(-1.0)

    def test_validation(self):
        with pytest.raises(ConstructionError):
            SymmetricDistribution(lambda t: 2 * np.asarray(t, dtype=float))  # asymmetric
        with pytest.raises(ConstructionError):
            SymmetricDistribution(lambda t: 2.0 + 0 * np.asarray(t, dtype=float))  # mass 2
        with pytest.raises(DomainError):
            uniform().essential(7)

    def test_expect(self):
        assert uniform().expect(lambda t: t) == pytest.approx(0.5, abs=1e-15)


class TestNormal:
    def test_linear_weight_gives_lehmer_two(self):
        M = make_normal(palette.identity())
        assert M(2, 4) == pytest.approx(make_catalog_mean("lehmer", 2)(2, 4), rel=1e-15)

    def test_constant_weight(self):
        P = GeneratingFunction(
            lambda t: 1.0 + 0 * np.asarray(t, dtype=float),
            lambda t: 0 * np.asarray(t, dtype=float),
            lambda t: 0 * np.asarray(t, dtype=float),
            image=(1.0, 1.0),
            label="one",
        )
        assert make_normal(P)(2, 8) == 5.0

    @pytest.mark.parametrize("t", [-1.0, 0.0, 0.5, 2.0, 3.0])
    def test_power_weights_give_lehmer(self, t):
        P = palette.power(t - 1) if t != 1 else palette.identity()
        M = make_normal(P)
        L = make_catalog_mean("lehmer", t)
        for x, y in ((1, 2), (0.3, 5)):
            assert M(x, y) == pytest.approx(L(x, y), rel=1e-14)
        for x in (0.5, 1.0, 2.0):
            assert M.charfun(x) == pytest.approx(estimate_charfun(M, x), rel=1e-6, abs=1e-9)

    def test_geometric_charfun(self):
        assert make_normal(palette.power(-0.5)).charfun(1.0) == pytest.approx(-0.25)

    def test_nonpositive_weight(self):
        P = GeneratingFunction(np.log, lambda t: 1 / t, lambda t: -1 / t**2, label="log")
        with pytest.raises(DomainError):
            make_normal(P)

    def test_non_monotone_weight_is_fine(self):
        M = make_normal(palette.sin_shift())
        assert 1 < M(1, 3) < 3


class TestAdditive:
    def test_cube(self):
        assert make_additive(palette.power(3))(1, 2) == pytest.approx(4.5 ** (1 / 3), rel=1e-15)

    def test_log_gives_geometric(self):
        assert make_additive(palette.log())(4, 9) == pytest.approx(6.0, rel=1e-15)

    def test_identity(self):
        assert make_additive(palette.identity())(3.0, 8.0) == pytest.approx(5.5, rel=1e-15)

    @pytest.mark.parametrize("r", [-2.0, -1.0, 0.5, 2.0, 3.0])
    def test_power_means(self, r):
        A = make_additive(palette.power(r))
        P = make_catalog_mean("power", r)
        for x, y in ((1, 2), (0.2, 9), (3, 3.001)):
            assert A(x, y) == pytest.approx(P(x, y), rel=1e-10)
        assert A.charfun(2.0) == pytest.approx(P.charfun(2.0), rel=1e-14)

    def test_exp_gives_constant_charfun(self):
        assert make_additive(palette.exp()).charfun(5.0) == 0.25

    def test_non_monotone_rejected(self):
        with pytest.raises(ConstructionError):
            make_additive(palette.sin_shift())

    @settings(max_examples=30, deadline=None)
    @given(pairs, st.floats(0.01, 0.5))
    def test_strictly_increasing(self, xy, bump):
        M = make_additive(palette.power(2.5))
        x, y = xy
        assert M(x + bump, y) > M(x, y)


class TestIntegralFirst:
    def test_reciprocal_gives_logarithmic(self):
        M = make_integral_first(palette.recip())
        assert M(1, math.e) == pytest.approx(math.e - 1, rel=1e-13)

    @pytest.mark.parametrize("p", [-1.0, 0.0, 1.0, 2.0, 3.0])
    def test_stolarsky(self, p):
        f = palette.identity() if p == 2 else (palette.log() if p == 1 else palette.power(p - 1))
        M = make_integral_first(f)
        for x, y in ((1, 2), (0.5, 7), (2, 2.01)):
            assert M(x, y) == pytest.approx(eval_stolarsky(p, x, y), rel=1e-9)

    def test_exp_gives_exponential_mean(self):
        M = make_integral_first(palette.exp())
        for x, y in ((1, 2), (0.1, 3)):
            assert M(x, y) == pytest.approx(EXPONENTIAL(x, y), rel=1e-9)

    def test_identity_any_density(self):
        for g in (uniform(), arcsine(), beta_symmetric(2)):
            assert make_integral_first(palette.identity(), g)(1.0, 4.0) == pytest.approx(2.5, rel=1e-13)

    def test_arcsine_charfun(self):
        M = make_integral_first(palette.recip_sqrt(), arcsine())
        assert M.charfun(1.0) == pytest.approx(-3 / 16, rel=1e-12)
        assert estimate_charfun(M, 1.0) == pytest.approx(-3 / 16, rel=1e-6)


class TestIntegralSecond:
    def test_inverse_square_gives_geometric(self):
        M = make_integral_second(palette.power(-2))
        for x, y in ((1, 4), (0.3, 2)):
            assert M(x, y) == pytest.approx(GEOMETRIC(x, y), rel=1e-10)

    def test_reciprocal_sqrt_gives_harmonic(self):
        M = make_integral_second(palette.recip_sqrt())
        for x, y in ((1, 4), (0.3, 2)):
            assert M(x, y) == pytest.approx(HARMONIC(x, y), rel=1e-10)

    def test_identity(self):
        assert make_integral_second(palette.identity(), arcsine())(2, 6) == pytest.approx(4.0, rel=1e-12)

    def test_charfuns(self):
        assert make_integral_second(palette.power(-2)).charfun(2.0) == pytest.approx(-1 / 8, rel=1e-12)
        assert make_integral_second(palette.recip_sqrt()).charfun(2.0) == pytest.approx(-1 / 4, rel=1e-12)

    def test_range_check(self):
        with pytest.raises(ConstructionError):
            make_integral_second(palette.log())


class TestMmean:
    def test_agm_reconstruction(self):
        M = agm_as_mmean()
        assert M(1, 1) == 1
        assert M(1, 2) == pytest.approx(agm_iterate(1, 2), abs=1e-8)
        assert M(0.5, 3) == pytest.approx(agm_integral(0.5, 3), abs=1e-8)
        assert M.charfun(1.0) == pytest.approx(-0.125, rel=1e-12)
        assert M.homogeneous

    def test_square_of_arithmetic_is_quadratic_mean(self):
        M = make_mmean(ARITHMETIC, palette.square())
        assert M(1, 7) == pytest.approx(5.0, rel=1e-14)
        assert M.charfun(2.0) == pytest.approx(make_catalog_mean("power", 2).charfun(2.0), rel=1e-14)

    def test_image_check(self):
        with pytest.raises(ConstructionError):
            make_mmean(GEOMETRIC, palette.log())


class TestNormality:
    def test_normal_means(self):
        assert abs(normality_defect(GEOMETRIC, 2, 5)) <= 1e-6
        assert abs(normality_defect(ARITHMETIC, 1, 4)) <= 1e-6
        assert abs(normality_defect(HARMONIC, 1, 4)) <= 1e-6

    def test_power_two_is_not_normal(self):
        assert abs(normality_defect(make_catalog_mean("power", 2), 1, 4)) > 1e-3

    def test_errors(self):
        with pytest.raises(DomainError):
            normality_defect(GEOMETRIC, 2, 2)
        mx = make_catalog_mean("power", 1)
        assert abs(normality_defect(mx, 1, 3)) <= 1e-6


CONSTRUCTED = {
    "normal": lambda: make_normal(palette.power(1.5)),
    "additive": lambda: make_additive(palette.exp()),
    "int1": lambda: make_integral_first(palette.power(0.5), beta_symmetric(1)),
    "int2": lambda: make_integral_second(palette.recip(), arcsine()),
    "mmean": lambda: make_mmean(LOGARITHMIC, palette.square()),
    "agm": agm_as_mmean,
}


@pytest.mark.parametrize("kind", list(CONSTRUCTED))
@settings(max_examples=25, deadline=None)
@given(xy=pairs)
def test_mean_invariants(kind, xy):
    M = CONSTRUCTED[kind]()
    x, y = xy
    v = M(x, y)
    assert v == pytest.approx(M(y, x), rel=1e-12)
    lo, hi = min(x, y), max(x, y)
    assert lo * (1 - 1e-12) <= v <= hi * (1 + 1e-12)
    assert M(x, x) == pytest.approx(x, rel=1e-14)


def test_agm_catalog_sanity():
    assert AGM(2.0, 2.0) == 2.0
