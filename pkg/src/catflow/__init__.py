"""catflow: system dynamics diagrams as attributed C-sets."""

from .acset import ACSet, Homomorphism, Part, Schema, Violation, export_tables, identity, validate, write_tables
from .composition import GluingSpec, OpenDiagram, compose_open, pushout
from .errors import (
    AttributeConflictError,
    CatflowError,
    FormulaError,
    HomomorphismError,
    InvalidInstanceError,
    ModelFormatError,
    SchemaError,
    SimulationError,
    TypingError,
)
from .formulas import reconstruct_formula, render, sum_var_formula
from .homs import SearchOptions, assign_types, find_homomorphisms, is_homomorphism, is_isomorphic
from .schemas import SchCLD, SchSFD, SchSSD, build_cld, build_sfd
from .signed import SignedGraph, enumerate_implied_links, find_feedback_loops, match_signed_pattern, path_sign
from .stratification import TypedDiagram, pullback
from .translation import sfd_to_cld, sfd_to_ssd, ssd_to_cld

__version__ = "0.1.0"
