"""Finite relational structures the model checker understands.

Three kinds: permutations (two orders), words (position order plus letter
labels), and gridded permutations (two orders plus cell labels). Domain
elements are 0..n-1 in position order, so "<1" and "<" are both plain index
comparison; "<2" compares the stored values.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SignatureError
from ..grid import GriddedPermutation, Permutation
from .syntax import Formula, relations_used


@dataclass(frozen=True)
class FiniteStructure:
    kind: str  # "permutation" | "word" | "gridded"
    size: int
    values: tuple[int, ...] | None = None   # point values, position order
    letters: tuple | None = None            # letters / cell indices per position

    @classmethod
    def from_permutation(cls, p: Permutation) -> "FiniteStructure":
        return cls("permutation", len(p), values=p.values)

    @classmethod
    def from_word(cls, letters) -> "FiniteStructure":
        letters = tuple(letters)
        return cls("word", len(letters), letters=letters)

    @classmethod
    def from_gridded(cls, g: GriddedPermutation) -> "FiniteStructure":
        return cls("gridded", len(g), values=g.perm.values, letters=g.cell_of)

    def orders(self) -> set[str]:
        return {"<"} if self.kind == "word" else {"<1", "<2"}

    def has_letters(self) -> bool:
        return self.kind in ("word", "gridded")

    def holds_less(self, order: str, a: int, b: int) -> bool:
        if order == "<1" or order == "<":
            return a < b
        return self.values[a] < self.values[b]

    def check_signature(self, f: Formula) -> None:
        orders, letters = relations_used(f)
        if not orders <= self.orders():
            raise SignatureError(
                f"formula uses {sorted(orders - self.orders())} but the structure is a {self.kind}")
        if letters and not self.has_letters():
            raise SignatureError(f"letter atoms cannot be evaluated on a {self.kind}")
