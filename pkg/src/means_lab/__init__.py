"""Bivariate means, their characteristic functions, and the quadrature
rules they induce."""

from means_lab.base import CharFn, Family, MeanObject, MeanParams
from means_lab.charfun import (
    ComparisonReport,
    ExpansionCoeffs,
    ExpansionWarning,
    analytic_charfun,
    classify_by_charfun,
    compare_means,
    compose_charfun,
    estimate_charfun,
    estimate_charfun2,
    expand_near_diagonal,
    expansion_coeffs,
    mmean_charfun,
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
    make_catalog_mean,
    shift_transform,
)
from means_lab.errors import ConstructionError, DomainError, MeansError, NumericalError, SpecParseError
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
from means_lab.quadrature import (
    QuadResult,
    approx_integral_first,
    approx_integral_second,
    convergence_order,
)
from means_lab.specparse import parse_mean_spec

__version__ = "0.1.0"
