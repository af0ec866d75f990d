"""Chord power integrals, radial mean bodies of fields, and inequality checks."""

from __future__ import annotations

from .convex_bodies import (
    ConvexBody,
    ball,
    body_from_dict,
    covariogram,
    cube,
    difference_body,
    ellipsoid,
    interval,
    polytope,
    regular_polygon,
    simplex,
)
from .mean_bodies import (
    SampledStarBody,
    UnboundedBody,
    ZetaProfile,
    default_grid,
    frac_polar_projection_body,
    l_alpha_body,
    polar_projection_body,
    r_alpha_field,
    r_alpha_set,
    r_infty_field,
    r_zero,
    zeta,
)
from .quadrature import DirectionGrid, make_grid, mc_double_integral
from .scalar_fields import ScalarField, characteristic, cone_power, exp_gauge, field_from_dict, radial_profile
from .special_functions import DomainError, c_gz, c_s, gamma_normaliser, sigma, unit_ball_volume
from .verifier import CHECKS, VerificationReport, reports_to_csv

__version__ = "0.1.0"

__all__ = [
    "CHECKS",
    "ConvexBody",
    "DirectionGrid",
    "DomainError",
    "SampledStarBody",
    "ScalarField",
    "UnboundedBody",
    "VerificationReport",
    "ZetaProfile",
    "ball",
    "body_from_dict",
    "c_gz",
    "c_s",
    "characteristic",
    "cone_power",
    "covariogram",
    "cube",
    "default_grid",
    "difference_body",
    "ellipsoid",
    "exp_gauge",
    "field_from_dict",
    "frac_polar_projection_body",
    "gamma_normaliser",
    "interval",
    "l_alpha_body",
    "make_grid",
    "mc_double_integral",
    "polar_projection_body",
    "polytope",
    "r_alpha_field",
    "r_alpha_set",
    "r_infty_field",
    "r_zero",
    "radial_profile",
    "regular_polygon",
    "reports_to_csv",
    "sigma",
    "simplex",
    "unit_ball_volume",
    "zeta",
]
