"""Exhaustive rigid-motion incidence geometry over small finite fields.

Exact enumeration of orthogonal groups and rigid motions over F_q^d,
point-motion incidence counting, congruence classification of point
tuples, the planar-motion-to-space-line reduction, motion-image unions,
and seeded audit corpora that turn every counting bound into a checkable
report with an empirical constant.
"""

from .errors import (
    BadParameters,
    DegenerateSegment,
    DimensionMismatch,
    FormMismatch,
    NonPrime,
    NotInDomain,
    NotOriented,
    TooLarge,
    UnsupportedDegree,
    WrongResidue,
)
from .ffield import Field, all_points, field_for_order, make_field, make_field_with_modulus
from .incidence import AuditReport, PairSet, SideCondition
from .simplex import ClassCensus, SimplexKey

__all__ = [
    "AuditReport",
    "BadParameters",
    "ClassCensus",
    "DegenerateSegment",
    "DimensionMismatch",
    "Field",
    "FormMismatch",
    "NonPrime",
    "NotInDomain",
    "NotOriented",
    "PairSet",
    "SideCondition",
    "SimplexKey",
    "TooLarge",
    "UnsupportedDegree",
    "WrongResidue",
    "all_points",
    "field_for_order",
    "make_field",
    "make_field_with_modulus",
]

__version__ = "0.1.0"
