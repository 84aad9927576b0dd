"""Exact calculus of step polynomials on tori.

Step polynomials are finite sums of polynomials times indicators of
rational polytopes in ``[0,1)^d``, read as functions on ``T^d`` through
fractional parts.  The package builds them from a small expression
language, composes them with affine torus maps, integrates them exactly,
and checks difference equations and cocycle identities a.e.
"""
from .calculus import average_over_subgroup, integrate_out, permute_coords, substitute_coord, total_integral
from .cohomdiff import (
    Cochain,
    NotACocycle,
    VerificationReport,
    check_zero,
    coboundary,
    cochains_equal,
    efface,
    is_cocycle,
    verify_pdcee,
    verify_zero_sum,
)
from .dsl import ExprSyntaxError, UnknownVariable, compile_expr, compile_source, interpret, parse, to_source
from .geometry import DimensionError, HalfSpace, Polytope
from .poly import AffineMap, Polynomial
from .steppoly import (
    NotPiecewiseAffine,
    StepPoly,
    ae_equal,
    ae_equal_mod1,
    canonicalize,
    complexity_report,
    floor_piecewise_affine,
    residual_cells,
)
from .torus import (
    AffineTorusMap,
    NotSurjective,
    StepAffineMap,
    SubgroupSpec,
    TorusPoint,
    cross_section,
    difference_op,
    frac_of_affine,
    precompose,
    translate,
)

__version__ = "0.1.0"
