"""k-factors of regular bipartite multigraphs by exact fractional rounding."""

from .errors import (
    FactorError,
    InvariantViolation,
    SizeGuardError,
    StructuralError,
    UnsupportedParameters,
    WeightRangeError,
)
from .graph import BipartiteMultigraph, FactorSubgraph, FractionalMatching, Side
from .pipeline import k_factor, lemma_main, perfect_matching, two_factor
from .verification import enumerate_k_factors, verify_factor

__all__ = [
    "BipartiteMultigraph",
    "FactorError",
    "FactorSubgraph",
    "FractionalMatching",
    "InvariantViolation",
    "Side",
    "SizeGuardError",
    "StructuralError",
    "UnsupportedParameters",
    "WeightRangeError",
    "enumerate_k_factors",
    "k_factor",
    "lemma_main",
    "perfect_matching",
    "two_factor",
    "verify_factor",
]
