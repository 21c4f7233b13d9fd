"""K-ring presentations of flag Bott towers.

Exact Laurent polynomial arithmetic, Weyl group data, presentations of the
ordinary and equivariant K-rings, an exact normal-form engine for full-flag
type-A towers, and a rational Groebner-basis oracle.
"""

from .errors import (
    BindingError,
    ComputationError,
    InputError,
    KFlagError,
    ParseError,
    ResourceError,
    SchemaError,
    UnitError,
    UnsupportedError,
    ValidationError,
    VerificationFailure,
)
from .expr import load_tower_spec, lower_expr, parse_expr, parse_poly, render_ast, tower_from_json
from .flag_nf import BasisVector, QuotientEngine, build_engine, clear_inverses, mult_table, normal_form
from .groebner import groebner_for, nf_oracle, quotient_dimension, verify_rank
from .laurent import Kind, LaurentPoly, Monomial, VarId, render, u, v, w, y
from .tower import (
    Presentation,
    TowerSpec,
    equivariant_presentation,
    expected_rank,
    make_tower,
    ordinary_presentation,
    psi_pullback,
    specialize_u1,
)
from .weyl import Stage, apply_simple_reflection, coset_rank, invariant_generators, weyl_order

__version__ = "0.1.0"

__all__ = [
    "BasisVector",
    "BindingError",
    "ComputationError",
    "InputError",
    "KFlagError",
    "Kind",
    "LaurentPoly",
    "Monomial",
    "ParseError",
    "Presentation",
    "QuotientEngine",
    "ResourceError",
    "SchemaError",
    "Stage",
    "TowerSpec",
    "UnitError",
    "UnsupportedError",
    "ValidationError",
    "VarId",
    "VerificationFailure",
    "apply_simple_reflection",
    "build_engine",
    "clear_inverses",
    "coset_rank",
    "equivariant_presentation",
    "expected_rank",
    "groebner_for",
    "invariant_generators",
    "load_tower_spec",
    "lower_expr",
    "make_tower",
    "mult_table",
    "nf_oracle",
    "normal_form",
    "ordinary_presentation",
    "parse_expr",
    "parse_poly",
    "psi_pullback",
    "quotient_dimension",
    "render",
    "render_ast",
    "specialize_u1",
    "tower_from_json",
    "u",
    "v",
    "verify_rank",
    "w",
    "weyl_order",
    "y",
]
