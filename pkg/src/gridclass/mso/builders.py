"""The sentences describing a geometric grid class, and the translation of
permutation sentences to word sentences.

Cell variables follow the canonical cell indexing of the signed matrix (rows
bottom-up, then columns left-to-right), which is also the order used to pick
the least gridding: cell i precedes cell j when i < j.
"""

from __future__ import annotations

from ..errors import Budget, BudgetExceededError, DEFAULT_BUDGET, SignatureError
from ..grid import Permutation, SignedGridMatrix, cells_independent
from .syntax import (
    And, Bottom, Eq, Exists, Forall, Formula, Iff, Implies, In, LetterAt,
    Less, Not, Or, Top, all_of, any_of, exists_unique, free_variables,
    node_count, relations_used, substitute_fo,
)


def set_var_names(s: SignedGridMatrix, prefix: str = "X") -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, len(s.cells) + 1))


def gridding_constraints(s: SignedGridMatrix, set_vars: tuple[str, ...] | None = None) -> Formula:
    """The cells partition the points, each cell runs the right way, and
    points in cells from different columns/rows come in the right order.
    Free set variables: one per nonzero cell.
    """
    cells = s.cells
    X = set_vars if set_vars is not None else set_var_names(s)
    if len(X) != len(cells):
        raise ValueError("need one set variable per nonzero cell")
    clauses: list[Formula] = []

    membership = any_of([In("x", Xi) for Xi in X])
    parts = [membership]
    if len(X) > 1:
        parts.append(all_of([
            Implies(In("x", X[i]), Not(In("x", X[j])))
            for i in range(len(X)) for j in range(len(X)) if i != j
        ]))
    clauses.append(Forall("x", False, all_of(parts)))

    for i, cell in enumerate(cells):
        direction = Less("<2", "x", "y") if cell.entry == 1 else Less("<2", "y", "x")
        clauses.append(Forall("x", False, Forall("y", False, Implies(
            all_of([In("x", X[i]), In("y", X[i]), Less("<1", "x", "y")]), direction))))

    for i, a in enumerate(cells):
        for j, b in enumerate(cells):
            if a.col < b.col:
                clauses.append(Forall("x", False, Forall("y", False, Implies(
                    And((In("x", X[i]), In("y", X[j]))), Less("<1", "x", "y")))))
            if a.row < b.row:
                clauses.append(Forall("x", False, Forall("y", False, Implies(
                    And((In("x", X[i]), In("y", X[j]))), Less("<2", "x", "y")))))

    return all_of(clauses)


def origin_order(s: SignedGridMatrix, set_vars: tuple[str, ...] | None = None,
                 x: str = "x", y: str = "y") -> Formula:
    """The relation 'x sits closer to its cell's origin than y', given the
    cell assignment named by the set variables. Holds only for points sharing
    a row or a column of cells: same row compares values oriented by the row
    sign, same column compares positions oriented by the column sign.
    """
    cells = s.cells
    X = set_vars if set_vars is not None else set_var_names(s)
    disjuncts: list[Formula] = []
    for i, a in enumerate(cells):
        for j, b in enumerate(cells):
            if a.row == b.row:
                order = Less("<2", x, y) if a.row_sign == 1 else Less("<2", y, x)
                disjuncts.append(And((In(x, X[i]), In(y, X[j]), order)))
            if a.col == b.col:
                order = Less("<1", x, y) if a.col_sign == 1 else Less("<1", y, x)
                disjuncts.append(And((In(x, X[i]), In(y, X[j]), order)))
    return any_of(disjuncts)


def acyclicity(edge: Formula, x: str = "x", y: str = "y", tag: str = "") -> Formula:
    """No directed cycle in the relation defined by ``edge`` (free in x, y).

    On a finite structure a cycle exists iff some nonempty subset has
    in-degree and out-degree exactly one under the induced relation; the
    nonemptiness guard matters, since the empty set satisfies the degree
    condition vacuously.
    """
    X = f"C{tag}"
    w, p, q, u, v = (f"{n}{tag}" for n in ("w&", "p&", "q&", "u&", "v&"))

    into = substitute_fo(edge, {x: p, y: x})        # edge(p, x)
    out_of = substitute_fo(edge, {y: q})            # edge(x, q)
    pred = exists_unique(p, And((In(p, X), into)), u)
    succ = exists_unique(q, And((In(q, X), out_of)), v)
    cycle_witness = Exists(X, True, And((
        Exists(w, False, In(w, X)),
        Forall(x, False, Implies(In(x, X), And((pred, succ)))),
    )))
    return Not(cycle_witness)


def geom_sentence(s: SignedGridMatrix) -> Formula:
    """Membership sentence for the class of ``s`` (language of permutations):
    some cell assignment satisfies the gridding constraints and the
    origin-distance relation has no cycle.
    """
    Y = set_var_names(s, "Y")
    out: Formula = And((gridding_constraints(s, Y),
                        acyclicity(origin_order(s, Y), "x", "y")))
    for name in reversed(Y):
        out = Exists(name, True, out)
    return out


def min_gridding_sentence(s: SignedGridMatrix) -> Formula:
    """Holds on a gridded permutation iff no valid regridding improves it:
    whenever the alternative assignment (the quantified sets) is itself
    drawable, each point's actual cell is no later than its alternative cell,
    or some earlier point's actual cell already beats its alternative.
    """
    n = len(s.cells)
    if n == 0:
        return Top()
    Y = set_var_names(s, "Y")
    valid = And((gridding_constraints(s, Y), acyclicity(origin_order(s, Y), "x", "y")))

    per_cell = []
    for j in range(1, n + 1):
        actual_le = LetterAt("x", frozenset(range(1, j + 1)))
        earlier_beats = Exists("y", False, And((
            Less("<1", "y", "x"),
            any_of([
                And((In("y", Y[ell - 1]), LetterAt("y", frozenset(range(1, ell)))))
                for ell in range(2, n + 1)
            ]),
        )))
        per_cell.append(Forall("x", False, Implies(
            In("x", Y[j - 1]), any_of([actual_le, earlier_beats]))))

    out: Formula = Implies(valid, all_of(per_cell))
    for name in reversed(Y):
        out = Forall(name, True, out)
    return out


def sum_indecomposable_sentence() -> Formula:
    """No split into two nonempty parts with one entirely before and below
    the other."""
    return _indecomposable(Less("<1", "x", "y"), Less("<2", "x", "y"))


def skew_indecomposable_sentence() -> Formula:
    """No split into two nonempty parts with one before and *above* the
    other."""
    return _indecomposable(Less("<1", "x", "y"), Less("<2", "y", "x"))


def _indecomposable(first: Formula, second: Formula) -> Formula:
    partition = Forall("x", False, And((
        Or((In("x", "S"), In("x", "T"))),
        Not(And((In("x", "S"), In("x", "T")))),
    )))
    separated = Forall("x", False, Forall("y", False, Implies(
        And((In("x", "S"), In("y", "T"))), And((first, second)))))
    split = Exists("S", True, Exists("T", True, And((
        Exists("a", False, In("a", "S")),
        Exists("b", False, In("b", "T")),
        partition,
        separated,
    ))))
    return Not(split)


def _between(order: str, z: str, x: str, y: str) -> Formula:
    return Or((And((Less(order, x, z), Less(order, z, y))),
               And((Less(order, y, z), Less(order, z, x)))))


def simple_sentence() -> Formula:
    """No nontrivial interval: no subset with at least two points and at
    least one point outside it that is closed under lying-between in both
    orders. (Betweenness alone cannot see two-point intervals, so the subset
    formulation is the faithful one; 123 is not simple.)
    """
    proper = And((
        Exists("a", False, Exists("b", False, And((
            In("a", "S"), In("b", "S"), Not(Eq("a", "b")))))),
        Exists("c", False, Not(In("c", "S"))),
    ))
    closed = Forall("x", False, Forall("y", False, Forall("z", False, Implies(
        And((In("x", "S"), In("y", "S"), Not(In("z", "S")))),
        And((Not(_between("<1", "z", "x", "y")), Not(_between("<2", "z", "x", "y")))),
    ))))
    return Not(Exists("S", True, And((proper, closed))))


def contains_copy(b: Permutation) -> Formula:
    """Some points form a copy of ``b``: positions increase left to right
    and values compare exactly as in ``b``."""
    k = len(b)
    if k == 0:
        return Top()
    names = [f"p{i}" for i in range(1, k + 1)]
    atoms: list[Formula] = []
    for i in range(k):
        for j in range(i + 1, k):
            atoms.append(Less("<1", names[i], names[j]))
            if b.values[i] < b.values[j]:
                atoms.append(Less("<2", names[i], names[j]))
            else:
                atoms.append(Less("<2", names[j], names[i]))
    out: Formula = all_of(atoms) if atoms else Top()
    for name in reversed(names):
        out = Exists(name, False, out)
    return out


def basis_check_sentence(basis, s: SignedGridMatrix) -> Formula:
    """'Anything outside the class contains one of these patterns.' Holding
    on every member of a cover class certifies basis completeness."""
    return Implies(Not(geom_sentence(s)), any_of([contains_copy(b) for b in sorted(
        basis, key=lambda p: (len(p), p.values))]))


def relativize(f: Formula, X: str) -> Formula:
    """Evaluate ``f`` on the substructure induced by ``X``: every first-order
    quantifier gets guarded into X. Set quantifiers stay unguarded, which is
    sound because only guarded points are ever inspected."""
    fo, so = free_variables(f)
    if X in so or X in fo:
        raise ValueError(f"relativization variable {X} already occurs free")

    def walk(node: Formula) -> Formula:
        if isinstance(node, Exists) and not node.set_var:
            return Exists(node.var, False, And((In(node.var, X), walk(node.body))))
        if isinstance(node, Forall) and not node.set_var:
            return Forall(node.var, False, Implies(In(node.var, X), walk(node.body)))
        if isinstance(node, Not):
            return Not(walk(node.body))
        if isinstance(node, And):
            return And(tuple(walk(a) for a in node.args))
        if isinstance(node, Or):
            return Or(tuple(walk(a) for a in node.args))
        if isinstance(node, Implies):
            return Implies(walk(node.a), walk(node.b))
        if isinstance(node, Iff):
            return Iff(walk(node.a), walk(node.b))
        if isinstance(node, Exists):
            return Exists(node.var, True, walk(node.body))
        if isinstance(node, Forall):
            return Forall(node.var, True, walk(node.body))
        return node

    return walk(f)


def basis_element_sentence(s: SignedGridMatrix) -> Formula:
    """Defines the minimal non-members: out of the class, but back in after
    deleting any single point (the rest of the domain, collected in a set,
    satisfies the membership sentence relativized to it)."""
    geom = geom_sentence(s)
    rel = relativize(geom, "R")
    deletion_ok = Forall("d", False, Exists("R", True, And((
        Forall("e", False, Implies(Not(Eq("e", "d")), In("e", "R"))),
        rel,
    ))))
    return And((Not(geom), deletion_ok))


def normal_form_sentence(s: SignedGridMatrix) -> Formula:
    """Selects one word per drawing: no later letter could commute backwards
    past an earlier, larger letter. Forbidden: positions p < q where the
    letter at q is smaller than the letter at p, they sit in independent
    cells, and every letter strictly between is independent of the one at q.
    """
    cells = s.cells
    conjuncts: list[Formula] = []
    for a in cells:
        for b in cells:
            if b.index < a.index and cells_independent(a, b):
                indep_of_b = frozenset(c.index for c in cells if cells_independent(c, b))
                gap_ok = Forall("k", False, Implies(
                    And((Less("<", "p", "k"), Less("<", "k", "q"))),
                    LetterAt("k", indep_of_b)))
                bad = Exists("p", False, Exists("q", False, And((
                    Less("<", "p", "q"),
                    LetterAt("p", frozenset({a.index})),
                    LetterAt("q", frozenset({b.index})),
                    gap_ok,
                ))))
                conjuncts.append(Not(bad))
    return all_of(conjuncts)


def interpret(f: Formula, s: SignedGridMatrix, budget: Budget = DEFAULT_BUDGET) -> Formula:
    """Translate a sentence about (gridded) permutations into one about words
    over the nonzero-cell alphabet, by substituting the defining formulas for
    the two orders. Different columns order positions by column; within a
    column the word order applies, flipped when the column sign is negative.
    Cell labels become letter labels unchanged.
    """
    orders, _ = relations_used(f)
    if "<" in orders:
        raise SignatureError("formula already speaks about words")

    cells = s.cells
    col_letters: dict[int, frozenset] = {}
    row_letters: dict[int, frozenset] = {}
    for c in cells:
        col_letters.setdefault(c.col, frozenset())
        row_letters.setdefault(c.row, frozenset())
    for c in cells:
        col_letters[c.col] |= {c.index}
        row_letters[c.row] |= {c.index}
    col_sign = {c.col: c.col_sign for c in cells}
    row_sign = {c.row: c.row_sign for c in cells}

    def order_formula(groups: dict[int, frozenset], signs: dict[int, int],
                      x: str, y: str) -> Formula:
        keys = sorted(groups)
        disjuncts: list[Formula] = []
        for i, g in enumerate(keys):
            for h in keys[i + 1:]:
                disjuncts.append(And((LetterAt(x, groups[g]), LetterAt(y, groups[h]))))
        for g in keys:
            pos = Less("<", x, y) if signs[g] == 1 else Less("<", y, x)
            disjuncts.append(And((LetterAt(x, groups[g]), LetterAt(y, groups[g]), pos)))
        return any_of(disjuncts)

    nodes_used = [0]

    def spend(f2: Formula) -> Formula:
        nodes_used[0] += node_count(f2)
        if nodes_used[0] > budget.max_formula_nodes:
            raise BudgetExceededError(
                "interpreted formula grew past the node budget",
                origin="order-relation substitution")
        return f2

    def walk(node: Formula) -> Formula:
        if isinstance(node, Less):
            if node.order == "<1":
                return spend(order_formula(col_letters, col_sign, node.x, node.y))
            return spend(order_formula(row_letters, row_sign, node.x, node.y))
        if isinstance(node, (LetterAt, In, Eq, Top, Bottom)):
            return node
        if isinstance(node, Not):
            return Not(walk(node.body))
        if isinstance(node, And):
            return And(tuple(walk(a) for a in node.args))
        if isinstance(node, Or):
            return Or(tuple(walk(a) for a in node.args))
        if isinstance(node, Implies):
            return Implies(walk(node.a), walk(node.b))
        if isinstance(node, Iff):
            return Iff(walk(node.a), walk(node.b))
        if isinstance(node, (Exists, Forall)):
            return type(node)(node.var, node.set_var, walk(node.body))
        raise TypeError(f"not a formula node: {node!r}")

    return walk(f)


def unique_word_sentence(s: SignedGridMatrix, budget: Budget = DEFAULT_BUDGET) -> Formula:
    """Word sentence accepting exactly one word per member permutation: the
    word is in normal form and its drawing is the least gridding."""
    return And((normal_form_sentence(s), interpret(min_gridding_sentence(s), s, budget)))
