"""Polyhedral assume-guarantee contract algebra and design-exploration labs."""

from . import config
from .contracts import (
    IncompatibilityDiagnostic,
    PolyhedralContract,
    RefinementResult,
    compose,
    contracts_equivalent,
    get_variable_bounds,
    merge,
    new_contract,
    optimize,
    quotient,
    refines,
)
from .errors import (
    ConfigError,
    ConstructionError,
    ContractForgeError,
    DischargeFailure,
    ExplosionError,
    IncompatibilityError,
    InfeasibleRegion,
    InterfaceError,
    ParseError,
    QuotientUnsound,
    RangeError,
)
from .lp import Direction, LPOutcome, LPStatus, lp_optimize
from .parser import parse_constraints, parse_expression, render
from .polyhedra import (
    eliminate,
    equivalent,
    is_implied,
    is_satisfiable,
    reduce_terms,
    transform_sufficient,
    var_bounds,
)
from .sampling import latin_hypercube_sample
from .neldermead import nelder_mead_minimize
from .terms import LinearTerm, Relation, TermList

__version__ = "0.1.0"

__all__ = [
    "config",
    "PolyhedralContract",
    "IncompatibilityDiagnostic",
    "RefinementResult",
    "new_contract",
    "compose",
    "quotient",
    "merge",
    "refines",
    "contracts_equivalent",
    "get_variable_bounds",
    "optimize",
    "LinearTerm",
    "TermList",
    "Relation",
    "parse_constraints",
    "parse_expression",
    "render",
    "lp_optimize",
    "LPOutcome",
    "LPStatus",
    "Direction",
    "is_implied",
    "is_satisfiable",
    "reduce_terms",
    "eliminate",
    "var_bounds",
    "equivalent",
    "transform_sufficient",
    "latin_hypercube_sample",
    "nelder_mead_minimize",
    "ContractForgeError",
    "ParseError",
    "InterfaceError",
    "InfeasibleRegion",
    "ExplosionError",
    "DischargeFailure",
    "IncompatibilityError",
    "QuotientUnsound",
    "ConstructionError",
    "ConfigError",
    "RangeError",
]
