"""Shared exception types and resource budgets."""

from __future__ import annotations

from dataclasses import dataclass


class GridClassError(Exception):
    """Base class for errors raised by this package."""


class InputFormatError(GridClassError):
    """Malformed textual input (matrix or permutation).

    Carries 1-based line/column positions when they are known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class SignatureError(GridClassError):
    """A formula was used with a structure or transform of the wrong signature."""


class BudgetExceededError(GridClassError):
    """A resource budget was exhausted.

    ``origin`` names the operation or subformula responsible, so the caller
    can tell which clause of a large sentence blew up.
    """

    def __init__(self, message: str, origin: str | None = None):
        self.origin = origin
        super().__init__(message if origin is None else f"{message} [while processing: {origin}]")


@dataclass(frozen=True)
class Budget:
    """Caps for the expensive parts of the pipeline.

    max_states        -- automaton state cap (per determinization/product)
    max_formula_nodes -- cap on constructed formula AST nodes
    max_bdd_nodes     -- cap for the model checker's internal store
    max_domain        -- largest structure the model checker will accept
    """

    max_states: int = 200_000
    max_formula_nodes: int = 2_000_000
    max_bdd_nodes: int = 4_000_000
    max_domain: int = 14

    def check_states(self, n: int, origin: str | None = None) -> None:
        if n > self.max_states:
            raise BudgetExceededError(
                f"automaton grew past {self.max_states} states", origin=origin
            )


DEFAULT_BUDGET = Budget()
