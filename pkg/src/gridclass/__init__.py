"""Geometric grid classes of permutations: membership, finite bases with
completeness certificates, and rational generating functions.

The pipeline: a 0/±1 matrix is given row/column signs (doubling it when
necessary), its class is described by an explicit monadic second-order
sentence over permutations, sentences are translated to the language of
words over the nonzero-cell alphabet, compiled to finite automata, and the
automata answer the counting and universality questions.
"""

from .errors import Budget, BudgetExceededError, GridClassError, InputFormatError
from .grid import (
    Cell,
    GriddedPermutation,
    GridMatrix,
    Permutation,
    SignedGridMatrix,
    parse_matrix,
    parse_permutation,
    signed_form,
    signed_from_text,
    word_to_gridded_permutation,
    word_to_permutation,
)

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "BudgetExceededError",
    "Cell",
    "GridClassError",
    "GriddedPermutation",
    "GridMatrix",
    "InputFormatError",
    "Permutation",
    "SignedGridMatrix",
    "parse_matrix",
    "parse_permutation",
    "signed_form",
    "signed_from_text",
    "word_to_gridded_permutation",
    "word_to_permutation",
    "__version__",
]
