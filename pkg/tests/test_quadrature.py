import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from means_lab import palette
from means_lab.errors import DomainError, NumericalError
from means_lab.quadrature import (
    DEFAULT_WIDTHS,
    QuadResult,
    approx_integral,
    approx_integral_first,
    approx_integral_second,
    convergence_fit,
    convergence_order,
)


def test_identity_is_exact_for_first_kind():
    r = approx_integral_first(palette.identity(), 1.0, 2.0)
    assert r.approx == pytest.approx(1.5, rel=1e-15)
    assert r.abs_error <= 1e-15


def test_reciprocal_first_kind():
    r = approx_integral_first(palette.recip(), 1.0, 1.2)
    assert r.exact == pytest.approx(math.log(1.2), rel=1e-15)
    assert r.abs_error <= 1e-6


def test_square_second_kind():
    r = approx_integral_second(palette.square(), 1.0, 1.1)
    assert r.exact == pytest.approx(0.331 / 3, rel=1e-14)
    assert r.abs_error <= 1e-6


def test_affine_second_kind_is_trapezoid():
    r = approx_integral_second(palette.identity(), 2.0, 5.0)
    assert r.approx == pytest.approx(0.5 * 3.0 * 7.0, rel=1e-15)


def test_reciprocal_sqrt_second_kind_error_scale():
    r = approx_integral_second(palette.recip_sqrt(), 4.0, 4.4)
    assert r.abs_error <= 0.4**5


def test_exp_error_is_fifth_order():
    r = approx_integral_first(palette.exp(), 1.0, 1.1)
    assert r.abs_error <= 0.1**5
    assert convergence_order("first", palette.exp(), 1.05) >= 4.8


@pytest.mark.parametrize("rule", ["first", "second"])
@pytest.mark.parametrize("name,center", [("exp", 1.0), ("recip", 2.0), ("pow(3)", 5.0), ("log", 3.0), ("pow(0.5)", 1.0), ("pow(-1.5)", 1.0)])
def test_convergence_order_is_five(rule, name, center):
    fit = convergence_fit(rule, palette.get_function(name), center)
    assert fit.used >= 3
    assert fit.slope == pytest.approx(5.0, abs=0.25)


def test_exact_rule_reports_infinite_order():
    fit = convergence_fit("first", palette.identity(), 1.0)
    assert fit.slope == math.inf and fit.used == 0


def test_second_kind_is_exact_for_reciprocal_sqrt():
    # The weights |f'|^(1/3) are proportional to f itself here, and the rule
    # collapses to 2(√y - √x).
    r = approx_integral_second(palette.recip_sqrt(), 1.0, 9.0)
    assert r.approx == pytest.approx(4.0, rel=1e-15)
    assert convergence_fit("second", palette.recip_sqrt(), 1.0).slope == math.inf


@pytest.mark.parametrize("rule", ["first", "second"])
def test_both_rules_are_exact_for_inverse_square(rule):
    # The first-kind node is √(xy), where (y - x)/node² = 1/x - 1/y.
    r = approx_integral(rule, palette.power(-2), 1.0, 4.0)
    assert r.abs_error <= 1e-15


def test_boundary_endpoint_allowed():
    r = approx_integral_first(palette.identity(), 0.0, 1.0)
    assert r.approx == pytest.approx(0.5, rel=1e-15)


def test_reversed_and_degenerate():
    f = palette.exp()
    fwd = approx_integral("first", f, 0.5, 0.9)
    back = approx_integral("first", f, 0.9, 0.5)
    assert back.approx == -fwd.approx and back.exact == -fwd.exact
    assert approx_integral("second", f, 0.7, 0.7).approx == 0.0


def test_rule_aliases():
    f = palette.log()
    assert approx_integral("1", f, 1, 2).approx == approx_integral("first_kind", f, 1, 2).approx
    with pytest.raises(DomainError):
        approx_integral("third", f, 1, 2)


def test_sign_change_of_slope_rejected():
    with pytest.raises(DomainError):
        approx_integral_first(palette.sin_shift(), 1.0, 2.5)


def test_outside_domain_rejected():
    with pytest.raises(DomainError):
        approx_integral_first(palette.log(), -1.0, 2.0)


def test_to_dict():
    d = approx_integral_first(palette.log(), 1, 2).to_dict()
    assert set(d) == {"rule", "x", "y", "approx", "exact", "abs_error"}
    assert QuadResult("first", 0, 1, 0.5).abs_error is None


def test_fit_validation():
    f = palette.exp()
    with pytest.raises(DomainError):
        convergence_fit("first", f, 1.0, [0.1, 0.05, 0.02])
    with pytest.raises(DomainError):
        convergence_fit("first", f, 1.0, [0.1, 0.09, 0.08, 0.07])
    with pytest.raises(NumericalError):
        # Only the two widest intervals rise above rounding.
        convergence_fit("first", f, 1.0, [0.02, 1e-3, 5e-4, 2e-4, 1e-4])
    assert DEFAULT_WIDTHS[0] == 0.2 and len(DEFAULT_WIDTHS) == 7


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 20), st.floats(0.001, 0.05))
def test_small_intervals_are_accurate(x, w):
    # Error is O(w⁵ · f-scale); for log on x ≥ 0.2 that is well below w⁴.
    for rule in ("first", "second"):
        r = approx_integral(rule, palette.log(), x, x + w)
        assert r.abs_error <= w**4 * max(1.0, 1 / x**3)
