"""0/±1 matrices with Cartesian cell geometry, sign assignments, and the
word-to-permutation decoding maps.

Matrices are stored bottom-up (row 1 is the bottom row, Cartesian style);
the text formats are top-down (reading order) and get flipped at parse time.
Nonzero cells of a signed matrix are indexed 1..n sorted by (row, column),
which is also the order used to compare cells lexicographically.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from .errors import InputFormatError


@dataclass(frozen=True)
class GridMatrix:
    """A t x u matrix over {-1, 0, 1}; ``entries[r-1][c-1]`` with row 1 at the bottom."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match declared dimensions")
        if any(e not in (-1, 0, 1) for r in self.entries for e in r):
            raise ValueError("entries must be -1, 0 or 1")

    @classmethod
    def from_rows_top_first(cls, rows: list[list[int]]) -> "GridMatrix":
        """Build from reading order (first row = top row)."""
        flipped = tuple(tuple(r) for r in reversed(rows))
        return cls(len(flipped), len(flipped[0]) if flipped else 0, flipped)

    def entry(self, col: int, row: int) -> int:
        """1-based lookup, Cartesian coordinates."""
        return self.entries[row - 1][col - 1]

    def rows_top_first(self) -> list[list[int]]:
        return [list(r) for r in reversed(self.entries)]

    def nonzero_cells(self) -> list[tuple[int, int, int]]:
        """(col, row, entry) triples sorted by (row, col)."""
        out = []
        for r in range(1, self.rows + 1):
            for c in range(1, self.cols + 1):
                v = self.entry(c, r)
                if v:
                    out.append((c, r, v))
        return out

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.rows_top_first())


@dataclass(frozen=True)
class Cell:
    """A nonzero cell of a signed matrix.

    ``index`` is the 1-based position in the canonical (row, col) order. The
    cell's origin corner follows from the signs: bottom if the row sign is +1
    else top, left if the column sign is +1 else right.
    """

    index: int
    col: int
    row: int
    entry: int
    col_sign: int
    row_sign: int

    def __post_init__(self):
        if self.entry not in (-1, 1):
            raise ValueError("cells exist only at nonzero entries")

    @property
    def origin(self) -> tuple[str, str]:
        return ("bottom" if self.row_sign == 1 else "top",
                "left" if self.col_sign == 1 else "right")


@dataclass(frozen=True)
class SignedGridMatrix:
    """A matrix together with row/column signs multiplying to every nonzero entry."""

    base: GridMatrix
    row_signs: tuple[int, ...]
    col_signs: tuple[int, ...]
    cells: tuple[Cell, ...] = field(init=False)

    def __post_init__(self):
        if len(self.row_signs) != self.base.rows or len(self.col_signs) != self.base.cols:
            raise ValueError("sign vectors do not match matrix dimensions")
        cells = []
        for c, r, v in self.base.nonzero_cells():
            if v != self.row_signs[r - 1] * self.col_signs[c - 1]:
                raise ValueError(f"entry at col {c}, row {r} is not row sign * column sign")
            cells.append(Cell(len(cells) + 1, c, r, v,
                              self.col_signs[c - 1], self.row_signs[r - 1]))
        object.__setattr__(self, "cells", tuple(cells))

    @property
    def alphabet_size(self) -> int:
        return len(self.cells)

    def cell(self, index: int) -> Cell:
        return self.cells[index - 1]


Word = tuple[int, ...]
"""A word is a tuple of 1-based cell indices of some SignedGridMatrix."""


@dataclass(frozen=True)
class Permutation:
    """One-line notation; ``values`` is exactly {1..n} in some order."""

    values: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.values) != list(range(1, len(self.values) + 1)):
            raise ValueError(f"not a permutation in one-line notation: {self.values}")

    def __len__(self) -> int:
        return len(self.values)

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.values) if self.values else "(empty)"

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))


@dataclass(frozen=True)
class GriddedPermutation:
    """A permutation plus a cell index for each point (in position order)."""

    perm: Permutation
    cell_of: tuple[int, ...]

    def __post_init__(self):
        if len(self.cell_of) != len(self.perm):
            raise ValueError("cell assignment must cover every point")

    def __len__(self) -> int:
        return len(self.perm)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_matrix(text: str) -> GridMatrix:
    """Parse the textual matrix format: rows top-to-bottom, entries space
    separated from {-1, 0, 1}; blank lines and ``#`` comments are ignored.
    Inline strings may separate rows with ``/`` instead of newlines.
    """
    rows: list[list[int]] = []
    lines = text.replace("/", "\n").splitlines()
    width = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        row = []
        col = 0
        for tok in line.split():
            col += 1
            if tok not in ("-1", "0", "1"):
                raise InputFormatError(f"matrix entry {tok!r} is not -1, 0 or 1",
                                       line=lineno, column=col)
            row.append(int(tok))
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputFormatError(
                f"row has {len(row)} entries, expected {width}", line=lineno, column=len(row))
        rows.append(row)
    if not rows:
        raise InputFormatError("matrix text contains no rows")
    return GridMatrix.from_rows_top_first(rows)


def parse_permutation(text: str) -> Permutation:
    """Parse one-line notation: space- or comma-separated positive integers.

    An empty string is the empty permutation. A bare digit string like
    ``2413`` is accepted as shorthand when every value is a single digit.
    """
    stripped = text.strip()
    if not stripped:
        return Permutation(())
    cleaned = stripped.replace(",", " ")
    if " " not in cleaned and cleaned.isdigit():
        values = tuple(int(ch) for ch in cleaned)
        if 0 in values:
            raise InputFormatError("permutation values must be positive", column=cleaned.index("0") + 1)
    else:
        values = ()
        for col, tok in enumerate(cleaned.split(), start=1):
            if not tok.isdigit() or int(tok) < 1:
                raise InputFormatError(f"bad permutation value {tok!r}", column=col)
            values += (int(tok),)
    try:
        return Permutation(values)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Sign assignment / refinement
# ---------------------------------------------------------------------------

def try_assign_signs(m: GridMatrix) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Solve row/column signs so every nonzero entry is their product.

    This is 2-coloring of the bipartite row/column graph where each nonzero
    entry forces the product of its endpoints. Returns None when inconsistent.
    Free components get +1 at their first node (rows enumerate before
    columns), which makes the assignment deterministic.
    """
    t, u = m.rows, m.cols
    sign: list[int | None] = [None] * (t + u)  # rows 0..t-1, cols t..t+u-1
    adj: list[list[tuple[int, int]]] = [[] for _ in range(t + u)]
    for c, r, v in m.nonzero_cells():
        adj[r - 1].append((t + c - 1, v))
        adj[t + c - 1].append((r - 1, v))
    for start in range(t + u):
        if sign[start] is not None or not adj[start]:
            continue
        sign[start] = 1
        queue = [start]
        while queue:
            node = queue.pop()
            for other, v in adj[node]:
                want = v * sign[node]
                if sign[other] is None:
                    sign[other] = want
                    queue.append(other)
                elif sign[other] != want:
                    return None
    row_signs = tuple(sign[r] if sign[r] is not None else 1 for r in range(t))
    col_signs = tuple(sign[t + c] if sign[t + c] is not None else 1 for c in range(u))
    return row_signs, col_signs


def double_refinement(m: GridMatrix) -> GridMatrix:
    """Replace each entry by a 2x2 block: +1 becomes bottom-left/top-right
    copies, -1 becomes top-left/bottom-right copies, 0 stays a zero block.
    The refined matrix describes the same geometric class and always admits
    the alternating sign assignment (+ bottom/left, - top/right per block).
    """
    t, u = m.rows, m.cols
    entries = [[0] * (2 * u) for _ in range(2 * t)]
    for c, r, v in m.nonzero_cells():
        lo_r, hi_r = 2 * r - 2, 2 * r - 1
        lo_c, hi_c = 2 * c - 2, 2 * c - 1
        if v == 1:
            entries[lo_r][lo_c] = 1
            entries[hi_r][hi_c] = 1
        else:
            entries[hi_r][lo_c] = -1
            entries[lo_r][hi_c] = -1
    return GridMatrix(2 * t, 2 * u, tuple(tuple(row) for row in entries))


def signed_form(m: GridMatrix) -> SignedGridMatrix:
    """Equip ``m`` with row/column signs, doubling it first when no
    consistent assignment exists. The geometric class is unchanged.
    """
    assignment = try_assign_signs(m)
    if assignment is not None:
        return SignedGridMatrix(m, *assignment)
    refined = double_refinement(m)
    row_signs = tuple(1 if r % 2 == 0 else -1 for r in range(refined.rows))
    col_signs = tuple(1 if c % 2 == 0 else -1 for c in range(refined.cols))
    return SignedGridMatrix(refined, row_signs, col_signs)


def signed_from_text(text: str) -> SignedGridMatrix:
    return signed_form(parse_matrix(text))


# ---------------------------------------------------------------------------
# Cell order
# ---------------------------------------------------------------------------

def cell_compare(a: Cell, b: Cell) -> int:
    """Total order on cells: below first, then left first within a row.
    Returns -1, 0 or 1. Coincides with canonical index order.
    """
    ka, kb = (a.row, a.col), (b.row, b.col)
    return -1 if ka < kb else (0 if ka == kb else 1)


def cells_independent(a: Cell, b: Cell) -> bool:
    """True when the cells share no row and no column, so their letters
    commute in the trace monoid."""
    return a.row != b.row and a.col != b.col


# ---------------------------------------------------------------------------
# Word decoding (combinatorial realization of the standard-figure placement)
# ---------------------------------------------------------------------------

def word_to_gridded_permutation(s: SignedGridMatrix, word: Word) -> GriddedPermutation:
    """Decode a word into the gridded permutation it draws.

    Point k goes to the cell named by letter k, at a distance from the cell's
    origin that grows with k. Relative positions: different columns compare
    by column; within a column, later letters sit further from the origin
    side, so index order is kept under a +1 column sign and reversed under
    -1. Values behave the same way with rows.
    """
    n = len(word)
    keys_pos = []
    keys_val = []
    for k, letter in enumerate(word):
        if not 1 <= letter <= len(s.cells):
            raise ValueError(f"letter {letter} outside the alphabet of {len(s.cells)} cells")
        cell = s.cells[letter - 1]
        keys_pos.append((cell.col, k if cell.col_sign == 1 else -k))
        keys_val.append((cell.row, k if cell.row_sign == 1 else -k))
    by_pos = sorted(range(n), key=lambda k: keys_pos[k])
    rank_val = {k: i + 1 for i, k in enumerate(sorted(range(n), key=lambda k: keys_val[k]))}
    values = tuple(rank_val[k] for k in by_pos)
    cells = tuple(word[k] for k in by_pos)
    return GriddedPermutation(Permutation(values), cells)


def word_to_permutation(s: SignedGridMatrix, word: Word) -> Permutation:
    return word_to_gridded_permutation(s, word).perm


def all_words(s: SignedGridMatrix, length: int):
    return itertools.product(range(1, len(s.cells) + 1), repeat=length)


# ---------------------------------------------------------------------------
# Gridding validity
# ---------------------------------------------------------------------------

def origin_order_edges(s: SignedGridMatrix, g: GriddedPermutation) -> list[tuple[int, int]]:
    """Directed edges (x, y) between points forced to satisfy 'x is closer to
    its origin than y': same row compares values oriented by the row sign,
    same column compares positions oriented by the column sign.
    """
    n = len(g)
    vals = g.perm.values
    edges = []
    for x in range(n):
        cx = s.cells[g.cell_of[x] - 1]
        for y in range(n):
            if x == y:
                continue
            cy = s.cells[g.cell_of[y] - 1]
            if cx.row == cy.row:
                if (vals[x] < vals[y]) == (cx.row_sign == 1):
                    edges.append((x, y))
            if cx.col == cy.col:
                if (x < y) == (cx.col_sign == 1):
                    edges.append((x, y))
    return edges


def _has_cycle(n: int, edges: list[tuple[int, int]]) -> bool:
    out: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for x, y in edges:
        out[x].append(y)
        indeg[y] += 1
    stack = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen != n


def is_realizable(s: SignedGridMatrix, g: GriddedPermutation) -> bool:
    """Whether the cell assignment can actually be drawn on the figure:
    the monotone/ordering clauses hold between and inside cells, and the
    origin-distance relation admits a linear extension (no directed cycle).
    """
    n = len(g)
    vals = g.perm.values
    for x in range(n):
        cx = s.cells[g.cell_of[x] - 1]
        for y in range(x + 1, n):
            cy = s.cells[g.cell_of[y] - 1]
            if cx.col != cy.col and (cx.col < cy.col) != (x < y):
                return False
            if cx.row != cy.row and (cx.row < cy.row) != (vals[x] < vals[y]):
                return False
            if cx.index == cy.index and ((vals[x] < vals[y]) != (cx.entry == 1)):
                return False
    return not _has_cycle(n, origin_order_edges(s, g))


# ---------------------------------------------------------------------------
# One-point extension cover
# ---------------------------------------------------------------------------

def one_point_extension_matrix(s: SignedGridMatrix, size_warning: int = 5000) -> GridMatrix:
    """A matrix whose class contains every one-point extension of the class
    of ``s``.

    For a t x u input it has 3t+1 rows and (3u+1) * 3^(3t+1) columns: the
    block whose columns enumerate {0,-1,1}^(3t+1) in ternary counter order,
    concatenated 3u+1 times. Any matrix of dimensions (3t+1) x (3u+1) then
    embeds as a submatrix by picking its j-th column inside the j-th copy.
    """
    t, u = s.base.rows, s.base.cols
    height = 3 * t + 1
    copies = 3 * u + 1
    digits = (0, 1, -1)
    block = list(itertools.product(digits, repeat=height))
    total_cols = copies * len(block)
    if total_cols > size_warning:
        warnings.warn(
            f"one-point extension cover is {height} x {total_cols}; "
            "downstream compilation will likely exhaust its budget",
            stacklevel=2,
        )
    columns = block * copies
    entries = tuple(
        tuple(colvec[height - 1 - r] for colvec in columns) for r in range(height)
    )
    # entries built bottom-up: column vectors list top row first
    return GridMatrix(height, total_cols, entries)


def is_submatrix(small: GridMatrix, big: GridMatrix) -> bool:
    """Submatrix containment: delete rows and columns of ``big`` to get ``small``."""
    if small.rows > big.rows or small.cols > big.cols:
        return False
    for rows in itertools.combinations(range(big.rows), small.rows):
        cols_needed = small.cols
        col = 0
        found = 0
        while col < big.cols and found < cols_needed:
            if all(big.entries[rows[i]][col] == small.entries[i][found] for i in range(small.rows)):
                found += 1
            col += 1
        if found == cols_needed:
            return True
    return False


# ---------------------------------------------------------------------------
# Classical pattern containment
# ---------------------------------------------------------------------------

def contains_pattern(haystack: Permutation, needle: Permutation) -> bool:
    """Order-preserving injection test on both orders (backtracking)."""
    p, q = haystack.values, needle.values
    n, k = len(p), len(q)
    if k > n:
        return False
    if k == 0:
        return True

    def extend(qi: int, start: int, chosen: list[int]) -> bool:
        if qi == k:
            return True
        # positions left must suffice
        for pos in range(start, n - (k - qi) + 1):
            ok = True
            for j, prev in enumerate(chosen):
                if (p[prev] < p[pos]) != (q[j] < q[qi]):
                    ok = False
                    break
            if ok:
                chosen.append(pos)
                if extend(qi + 1, pos + 1, chosen):
                    return True
                chosen.pop()
        return False

    return extend(0, 0, [])


def delete_point(p: Permutation, i: int) -> Permutation:
    """Remove the point at position ``i`` (1-based) and renormalize values."""
    if not 1 <= i <= len(p):
        raise IndexError(f"position {i} out of range for length {len(p)}")
    removed = p.values[i - 1]
    return Permutation(tuple(v - 1 if v > removed else v
                             for j, v in enumerate(p.values) if j != i - 1))


def all_deletions(p: Permutation) -> list[Permutation]:
    return [delete_point(p, i) for i in range(1, len(p) + 1)]


def one_point_insertions(p: Permutation) -> set[Permutation]:
    """All permutations obtained by inserting one new point anywhere."""
    n = len(p)
    out = set()
    for pos in range(n + 1):
        for val in range(1, n + 2):
            lifted = [v + 1 if v >= val else v for v in p.values]
            out.add(Permutation(tuple(lifted[:pos] + [val] + lifted[pos:])))
    return out
