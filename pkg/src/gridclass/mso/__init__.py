"""Monadic second-order formulas over permutations, gridded permutations and
words; sentence builders; and a model checker for small finite structures."""

from .syntax import (
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    In,
    LetterAt,
    Less,
    Not,
    Or,
    Top,
    all_of,
    any_of,
    exists_unique,
    formula_to_text,
    node_count,
    parse_formula,
)
from .structures import FiniteStructure
from .check import model_check
from .builders import (
    acyclicity,
    basis_check_sentence,
    basis_element_sentence,
    contains_copy,
    geom_sentence,
    gridding_constraints,
    interpret,
    min_gridding_sentence,
    normal_form_sentence,
    origin_order,
    relativize,
    simple_sentence,
    skew_indecomposable_sentence,
    sum_indecomposable_sentence,
    unique_word_sentence,
)

__all__ = [
    "And", "Bottom", "Eq", "Exists", "Forall", "Formula", "Iff", "Implies",
    "In", "LetterAt", "Less", "Not", "Or", "Top",
    "all_of", "any_of", "exists_unique", "formula_to_text", "node_count",
    "parse_formula", "FiniteStructure", "model_check",
    "acyclicity", "basis_check_sentence", "basis_element_sentence",
    "contains_copy", "geom_sentence", "gridding_constraints", "interpret",
    "min_gridding_sentence", "normal_form_sentence", "origin_order",
    "relativize", "simple_sentence", "skew_indecomposable_sentence",
    "sum_indecomposable_sentence", "unique_word_sentence",
]
