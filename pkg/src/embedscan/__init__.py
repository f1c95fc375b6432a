"""Embeddability of Markov matrices.

Decide whether a Markov matrix ``M`` equals ``exp(Q)`` for a rate matrix
``Q`` and list the generators: every size with distinct eigenvalues, and
every 4x4 spectral type.
"""

from .census import CensusConfig, CensusResult, classify_membership, run_census, sample_markov_uniform
from .distinct import enumerate_generators_distinct
from .embed4 import solve4x4
from .errors import (
    EmbedError,
    ParseError,
    UnsupportedMatrix,
    ValidationError,
)
from .identifiability import IdentifiabilityClass, classify_identifiability
from .ingest import parse_matrix
from .matrices import StochasticMatrix, is_rate_matrix, matrix_exponential, validate_markov
from .report import EmbeddabilityReport
from .solver import solve
from .spectral import circulant_generator, decompose, det_threshold
from .tolerances import ToleranceConfig, resolve_tolerance

__version__ = "0.1.0"

__all__ = [
    "CensusConfig", "CensusResult", "EmbeddabilityReport", "EmbedError", "IdentifiabilityClass",
    "ParseError", "StochasticMatrix", "ToleranceConfig", "UnsupportedMatrix", "ValidationError",
    "circulant_generator", "classify_identifiability", "classify_membership", "decompose",
    "det_threshold", "enumerate_generators_distinct", "is_rate_matrix", "matrix_exponential",
    "parse_matrix", "resolve_tolerance", "run_census", "sample_markov_uniform", "solve",
    "solve4x4", "validate_markov",
]
