"""Brute-force reference implementations.

Everything here works by drawing points on the standard figure with exact
rational coordinates and enumerating words exhaustively. None of it shares
code with the combinatorial decoding in ``grid`` or with the automaton
pipeline; tests compare the two sides.

Coordinates use the common denominator n+1 for a word of length n, so all
arithmetic stays in plain integers.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .grid import (
    GriddedPermutation,
    Permutation,
    SignedGridMatrix,
    all_deletions,
    contains_pattern,
)


def place_word(s: SignedGridMatrix, word: tuple[int, ...]) -> list[tuple[int, int]]:
    """Exact coordinates (numerators over n+1) of the points a word draws.

    Point k (1-based) sits at parameter k/(n+1) along its cell's segment,
    measured from the cell's origin corner.
    """
    n = len(word)
    den = n + 1
    pts = []
    for k, letter in enumerate(word, start=1):
        cell = s.cells[letter - 1]
        if cell.col_sign == 1:
            x = (cell.col - 1) * den + k
        else:
            x = cell.col * den - k
        if cell.row_sign == 1:
            y = (cell.row - 1) * den + k
        else:
            y = cell.row * den - k
        pts.append((x, y))
    return pts


def permutation_of_points(pts: list[tuple[int, int]]) -> Permutation:
    """Read the permutation off a generic point set (distinct x and y)."""
    by_x = sorted(range(len(pts)), key=lambda i: pts[i][0])
    rank_y = {i: r + 1 for r, i in enumerate(sorted(range(len(pts)), key=lambda i: pts[i][1]))}
    return Permutation(tuple(rank_y[i] for i in by_x))


def gridded_of_word(s: SignedGridMatrix, word: tuple[int, ...]) -> GriddedPermutation:
    pts = place_word(s, word)
    by_x = sorted(range(len(pts)), key=lambda i: pts[i][0])
    rank_y = {i: r + 1 for r, i in enumerate(sorted(range(len(pts)), key=lambda i: pts[i][1]))}
    return GriddedPermutation(
        Permutation(tuple(rank_y[i] for i in by_x)),
        tuple(word[i] for i in by_x),
    )


def brute_members(s: SignedGridMatrix, n: int, budget: int = 20_000_000) -> set[Permutation]:
    """All members of length n, as distinct images of the |alphabet|^n words."""
    k = len(s.cells)
    if n == 0:
        return {Permutation(())}
    if k == 0:
        return set()
    if k ** n > budget:
        raise ValueError(f"{k}^{n} words exceed the oracle budget")
    out = set()
    for word in itertools.product(range(1, k + 1), repeat=n):
        out.add(permutation_of_points(place_word(s, word)))
    return out


def brute_gridded(s: SignedGridMatrix, n: int, budget: int = 20_000_000) -> set[GriddedPermutation]:
    k = len(s.cells)
    if n == 0:
        return {GriddedPermutation(Permutation(()), ())}
    if k == 0:
        return set()
    if k ** n > budget:
        raise ValueError(f"{k}^{n} words exceed the oracle budget")
    return {gridded_of_word(s, w) for w in itertools.product(range(1, k + 1), repeat=n)}


def brute_member_counts(s: SignedGridMatrix, max_len: int) -> tuple[list[int], list[int]]:
    """(plain, gridded) distinct-image counts for lengths 0..max_len in one pass."""
    plain = [1]
    gridded = [1]
    for n in range(1, max_len + 1):
        seen_p: set[tuple[int, ...]] = set()
        seen_g: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
        k = len(s.cells)
        for word in itertools.product(range(1, k + 1), repeat=n) if k else ():
            g = gridded_of_word(s, word)
            seen_p.add(g.perm.values)
            seen_g.add((g.perm.values, g.cell_of))
        plain.append(len(seen_p))
        gridded.append(len(seen_g))
    return plain, gridded


def brute_basis(s: SignedGridMatrix, max_len: int) -> set[Permutation]:
    """Minimal non-members up to max_len: out of the class, every one-point
    deletion in it."""
    members: list[set[Permutation]] = [ {Permutation(())} ]
    for n in range(1, max_len + 1):
        members.append(brute_members(s, n))
    basis = set()
    for n in range(1, max_len + 1):
        for values in itertools.permutations(range(1, n + 1)):
            p = Permutation(values)
            if p in members[n]:
                continue
            if all(d in members[n - 1] for d in all_deletions(p)):
                basis.add(p)
    return basis


def valid_griddings(s: SignedGridMatrix, p: Permutation) -> list[GriddedPermutation]:
    """Every gridding of ``p`` realizable on the figure, found by exhausting
    words of the same length."""
    n = len(p)
    out = set()
    for word in itertools.product(range(1, len(s.cells) + 1), repeat=n):
        g = gridded_of_word(s, word)
        if g.perm == p:
            out.add(g)
    return sorted(out, key=lambda g: g.cell_of)


def brute_minimal_gridding(s: SignedGridMatrix, p: Permutation) -> GriddedPermutation | None:
    """The least valid gridding: griddings compare at the first (leftmost)
    point placed in different cells, lower-then-lefter cell first. Since
    cells are indexed in exactly that order, this is plain lexicographic
    comparison of the cell tuples.
    """
    gs = valid_griddings(s, p)
    return gs[0] if gs else None


def is_simple(p: Permutation) -> bool:
    """No nontrivial interval: every contiguous position window of size
    2..n-1 has non-contiguous values."""
    v = p.values
    n = len(v)
    if n < 2:
        # matches the sentence semantics: no witness interval can exist
        return True
    for i in range(n):
        lo = hi = v[i]
        for j in range(i + 1, n):
            lo = min(lo, v[j])
            hi = max(hi, v[j])
            width = j - i + 1
            if width == n:
                break
            if hi - lo + 1 == width:
                return False
    return True


def brute_simple(n: int) -> set[Permutation]:
    return {Permutation(vals) for vals in itertools.permutations(range(1, n + 1))
            if is_simple(Permutation(vals))}


def is_sum_indecomposable(p: Permutation) -> bool:
    """No proper prefix whose values are exactly an initial segment."""
    v = p.values
    n = len(v)
    hi = 0
    for i in range(n - 1):
        hi = max(hi, v[i])
        if hi == i + 1:
            return False
    return True


def is_skew_indecomposable(p: Permutation) -> bool:
    v = p.values
    n = len(v)
    lo = n + 1
    for i in range(n - 1):
        lo = min(lo, v[i])
        if lo == n - i:
            return False
    return True


@dataclass
class OracleReport:
    """Summary of an exhaustive run, serializable for the CLI."""

    matrix_rows_top_first: list[list[int]]
    max_length: int
    member_counts: list[int] = field(default_factory=list)
    gridded_counts: list[int] = field(default_factory=list)
    members: dict[int, list[str]] = field(default_factory=dict)
    minimal_non_members: list[str] = field(default_factory=list)
    elapsed_seconds: float | None = None

    def to_json(self) -> dict:
        out = {
            "matrix": self.matrix_rows_top_first,
            "max_length": self.max_length,
            "member_counts": self.member_counts,
            "gridded_counts": self.gridded_counts,
            "members": {str(k): v for k, v in sorted(self.members.items())},
            "minimal_non_members": self.minimal_non_members,
        }
        if self.elapsed_seconds is not None:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out


def run_report(s: SignedGridMatrix, max_length: int, with_timing: bool = False) -> OracleReport:
    start = time.monotonic()
    plain, gridded = brute_member_counts(s, max_length)
    members = {n: sorted(str(p) for p in brute_members(s, n)) for n in range(1, max_length + 1)}
    basis = brute_basis(s, max_length)
    report = OracleReport(
        matrix_rows_top_first=s.base.rows_top_first(),
        max_length=max_length,
        member_counts=plain,
        gridded_counts=gridded,
        members=members,
        minimal_non_members=sorted((str(p) for p in basis), key=lambda t: (len(t), t)),
    )
    if with_timing:
        report.elapsed_seconds = time.monotonic() - start
    return report
