"""Exact homological freeness tests for hyperplane multi-arrangements.

This package builds intersection lattices, the scalar and graded complexes of
a multi-arrangement, their cohomology degree by degree, logarithmic
derivation modules and Saito bases, and the combinatorial classifications
available for TF2 arrangements. All arithmetic is exact over the rationals
or a prime field.

Requires Python 3.10+

Main modules:
- linalg: Fields, exact matrices, monomial bases and polynomial rings
- arrangement: Multi-arrangements, flats, restrictions and coordinate frames
- graphs: Graphic arrangements and clique complexes
- families: Named parameterized arrangements
- complexes: Scalar complex, formality and the graded complex
- homology: Degree-by-degree cohomology tables
- derivations: Derivation spaces, Saito's criterion and rank-2 exponents
- tf2: TF2 arrangements and their free multiplicities
- analyzer: Freeness decisions with certificates
- io_operations: Arrangement text format, polynomial input and JSON reports
- reporting: Text reports
- performance: Parallel fan-out and timing statistics
- config: Configuration management and environment setup
- constants: Shared constants and certificate names
"""

__version__ = "1.0.0"
__author__ = "Arrangement Homology Team"

from .analyzer import (
    DecisionOptions,
    FreenessVerdict,
    decide_freeness,
    moduli_sample,
    revalidate_certificate,
    yoshinaga_check,
)
from .arrangement import Flat, IntersectionLattice, MultiArrangement
from .complexes import (
    build_J_complex,
    build_S_complex,
    formality_profile,
    is_totally_formal,
)
from .config import get_config, setup_environment
from .derivations import (
    derivation_space,
    free_basis_search,
    minimal_generator_degrees,
    rank2_exponents,
    saito_check,
)
from .exceptions import (
    ArrangementError,
    ConfigurationError,
    FieldError,
    ParseError,
    PreconditionError,
    ValidationError,
)
from .families import build_family
from .graphs import graphic_arrangement
from .homology import freeness_by_homology, homology_table, pdim_bounds
from .io_operations import (
    format_arrangement,
    parse_arrangement_text,
    parse_polynomial_arrangement,
    read_arrangement,
)
from .linalg import Field
from .tf2 import (
    classify_free_tf2_multiplicity,
    classify_nonfree_tf2_multiplicity,
    h2_presentation,
    incidence_graphs,
    is_tf2,
    tf2_freeness_combinatorial,
)

__all__ = [
    # Config
    "get_config",
    "setup_environment",
    # Core types
    "Field",
    "Flat",
    "IntersectionLattice",
    "MultiArrangement",
    # Construction and I/O
    "build_family",
    "graphic_arrangement",
    "parse_arrangement_text",
    "parse_polynomial_arrangement",
    "read_arrangement",
    "format_arrangement",
    # Complexes and homology
    "build_S_complex",
    "build_J_complex",
    "formality_profile",
    "is_totally_formal",
    "homology_table",
    "freeness_by_homology",
    "pdim_bounds",
    # Derivations
    "derivation_space",
    "free_basis_search",
    "minimal_generator_degrees",
    "rank2_exponents",
    "saito_check",
    # TF2
    "is_tf2",
    "tf2_freeness_combinatorial",
    "incidence_graphs",
    "h2_presentation",
    "classify_free_tf2_multiplicity",
    "classify_nonfree_tf2_multiplicity",
    # Decisions
    "DecisionOptions",
    "FreenessVerdict",
    "decide_freeness",
    "yoshinaga_check",
    "moduli_sample",
    "revalidate_certificate",
    # Exceptions
    "ArrangementError",
    "FieldError",
    "ParseError",
    "ValidationError",
    "PreconditionError",
    "ConfigurationError",
]
