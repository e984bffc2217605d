"""Exact images of polynomial and rational maps as constructible trees."""

from .polycore import (
    CapabilityError,
    ComputationLimitError,
    GenericityError,
    GREVLEX,
    LEX,
    MonomialOrder,
    ParseError,
    PolyImageError,
    Polynomial,
    Ring,
    StructuralError,
    block_order,
    factor,
    homogenize,
    dehomogenize,
    parse_polynomial,
    poly_arith,
)
from .grobner import (
    GrobnerLimits,
    Ideal,
    dimension,
    eliminate,
    groebner_basis,
    ideal,
    ideal_equal,
    ideal_quotient,
    intersect,
    normal_form,
    radical_membership,
    saturate,
    variety_contains,
)

__version__ = "0.1.0"
