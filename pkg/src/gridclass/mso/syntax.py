"""Formula abstract syntax.

Variables are plain strings; first-order and set variables are told apart by
the quantifier that binds them (and by position in atoms: the second slot of
``In`` is always a set variable). Connectives ``And``/``Or`` are n-ary and
never empty; use ``Top``/``Bottom`` for the degenerate cases, or the
``all_of``/``any_of`` helpers which fold empty sequences for you.

Order atoms name their relation: ``"<1"`` and ``"<2"`` are the two
permutation orders, ``"<"`` is the position order of words. ``LetterAt``
tests the letter at a position against a *set* of letters; a classic unary
label U_c is ``LetterAt(x, frozenset({c}))``, and keeping whole sets in one
atom is what lets large alphabets compile without a per-letter blowup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from ..errors import SignatureError


class Formula:
    """Base class; all nodes are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Less(Formula):
    order: str  # "<1", "<2" or "<"
    x: str
    y: str

    def __post_init__(self):
        if self.order not in ("<1", "<2", "<"):
            raise SignatureError(f"unknown order relation {self.order!r}")


@dataclass(frozen=True)
class LetterAt(Formula):
    x: str
    letters: frozenset

    def __post_init__(self):
        object.__setattr__(self, "letters", frozenset(self.letters))


@dataclass(frozen=True)
class In(Formula):
    x: str
    X: str


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty conjunction; use Top()")


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty disjunction; use Bottom()")


@dataclass(frozen=True)
class Implies(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class Iff(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    set_var: bool
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    set_var: bool
    body: Formula


def all_of(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    if not args:
        return Top()
    if len(args) == 1:
        return args[0]
    return And(args)


def any_of(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    if not args:
        return Bottom()
    if len(args) == 1:
        return args[0]
    return Or(args)


def exists_unique(var: str, body: Formula, witness: str) -> Formula:
    """Expand 'there is exactly one var with body' using ``witness`` as the
    auxiliary variable name (must not occur in body)."""
    return Exists(var, False, And((body, Forall(witness, False,
                 Implies(substitute_fo(body, {var: witness}), Eq(witness, var))))))


# ---------------------------------------------------------------------------
# Structural helpers
# ---------------------------------------------------------------------------

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.a, f.b)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def node_count(f: Formula) -> int:
    total = 0
    stack = [f]
    while stack:
        node = stack.pop()
        total += 1
        stack.extend(children(node))
    return total


def free_variables(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """(first-order frees, set frees)."""
    fo: set[str] = set()
    so: set[str] = set()

    def walk(node: Formula, bound: frozenset[str]):
        if isinstance(node, Less):
            fo.update(v for v in (node.x, node.y) if v not in bound)
        elif isinstance(node, Eq):
            fo.update(v for v in (node.x, node.y) if v not in bound)
        elif isinstance(node, LetterAt):
            if node.x not in bound:
                fo.add(node.x)
        elif isinstance(node, In):
            if node.x not in bound:
                fo.add(node.x)
            if node.X not in bound:
                so.add(node.X)
        elif isinstance(node, (Exists, Forall)):
            walk(node.body, bound | {node.var})
        else:
            for ch in children(node):
                walk(ch, bound)

    walk(f, frozenset())
    return frozenset(fo), frozenset(so)


def substitute_fo(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free first-order occurrences. Bound variables shadow; a
    quantifier over a *target* name would capture, so that is rejected."""
    if not mapping:
        return f

    def walk(node: Formula, live: dict[str, str]) -> Formula:
        if isinstance(node, Less):
            return Less(node.order, live.get(node.x, node.x), live.get(node.y, node.y))
        if isinstance(node, Eq):
            return Eq(live.get(node.x, node.x), live.get(node.y, node.y))
        if isinstance(node, LetterAt):
            return LetterAt(live.get(node.x, node.x), node.letters)
        if isinstance(node, In):
            return In(live.get(node.x, node.x), node.X)
        if isinstance(node, Not):
            return Not(walk(node.body, live))
        if isinstance(node, And):
            return And(tuple(walk(a, live) for a in node.args))
        if isinstance(node, Or):
            return Or(tuple(walk(a, live) for a in node.args))
        if isinstance(node, Implies):
            return Implies(walk(node.a, live), walk(node.b, live))
        if isinstance(node, Iff):
            return Iff(walk(node.a, live), walk(node.b, live))
        if isinstance(node, (Exists, Forall)):
            inner = {k: v for k, v in live.items() if k != node.var}
            if node.var in inner.values():
                raise ValueError(f"substitution would be captured by quantifier on {node.var}")
            body = walk(node.body, inner) if inner else node.body
            return type(node)(node.var, node.set_var, body)
        return node

    return walk(f, dict(mapping))


def rename_bound(f: Formula) -> Formula:
    """Give every bound variable a unique name (x~1, X~2, ...); free
    variables are untouched. Used before compilation so variable names can
    be identified with automaton tracks."""
    counter = [0]

    def walk(node: Formula, live: dict[str, str]) -> Formula:
        if isinstance(node, Less):
            return Less(node.order, live.get(node.x, node.x), live.get(node.y, node.y))
        if isinstance(node, Eq):
            return Eq(live.get(node.x, node.x), live.get(node.y, node.y))
        if isinstance(node, LetterAt):
            return LetterAt(live.get(node.x, node.x), node.letters)
        if isinstance(node, In):
            return In(live.get(node.x, node.x), live.get(node.X, node.X))
        if isinstance(node, Not):
            return Not(walk(node.body, live))
        if isinstance(node, And):
            return And(tuple(walk(a, live) for a in node.args))
        if isinstance(node, Or):
            return Or(tuple(walk(a, live) for a in node.args))
        if isinstance(node, Implies):
            return Implies(walk(node.a, live), walk(node.b, live))
        if isinstance(node, Iff):
            return Iff(walk(node.a, live), walk(node.b, live))
        if isinstance(node, (Exists, Forall)):
            counter[0] += 1
            fresh = f"{node.var}~{counter[0]}"
            inner = dict(live)
            inner[node.var] = fresh
            return type(node)(fresh, node.set_var, walk(node.body, inner))
        return node

    return walk(f, {})


def relations_used(f: Formula) -> tuple[set[str], bool]:
    """(order relation names, whether letter atoms occur)."""
    orders: set[str] = set()
    letters = False
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Less):
            orders.add(node.order)
        elif isinstance(node, LetterAt):
            letters = True
        stack.extend(children(node))
    return orders, letters


# ---------------------------------------------------------------------------
# Debug text form (s-expressions, round-trip stable)
# ---------------------------------------------------------------------------

def _letter_token(letter) -> str:
    return str(letter)


def formula_to_text(f: Formula) -> str:
    if isinstance(f, Top):
        return "(top)"
    if isinstance(f, Bottom):
        return "(bot)"
    if isinstance(f, Less):
        return f"({f.order} {f.x} {f.y})"
    if isinstance(f, LetterAt):
        toks = " ".join(sorted((_letter_token(l) for l in f.letters), key=str))
        return f"(letter {f.x}{' ' + toks if toks else ''})"
    if isinstance(f, In):
        return f"(in {f.x} {f.X})"
    if isinstance(f, Eq):
        return f"(= {f.x} {f.y})"
    if isinstance(f, Not):
        return f"(not {formula_to_text(f.body)})"
    if isinstance(f, And):
        return "(and " + " ".join(formula_to_text(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(formula_to_text(a) for a in f.args) + ")"
    if isinstance(f, Implies):
        return f"(-> {formula_to_text(f.a)} {formula_to_text(f.b)})"
    if isinstance(f, Iff):
        return f"(<-> {formula_to_text(f.a)} {formula_to_text(f.b)})"
    if isinstance(f, Exists):
        return f"({'ES' if f.set_var else 'E'} {f.var} {formula_to_text(f.body)})"
    if isinstance(f, Forall):
        return f"({'AS' if f.set_var else 'A'} {f.var} {formula_to_text(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_formula(text: str) -> Formula:
    """Parse the s-expression form produced by :func:`formula_to_text`.
    Letter tokens that look like integers are read back as integers."""
    tokens = _tokenize(text)
    pos = [0]

    def need(tok: str):
        if pos[0] >= len(tokens) or tokens[pos[0]] != tok:
            raise SignatureError(f"expected {tok!r} at token {pos[0]} of formula text")
        pos[0] += 1

    def atom_token() -> str:
        if pos[0] >= len(tokens) or tokens[pos[0]] in "()":
            raise SignatureError(f"expected a name at token {pos[0]}")
        tok = tokens[pos[0]]
        pos[0] += 1
        return tok

    def parse() -> Formula:
        need("(")
        head = atom_token()
        out: Formula
        if head == "top":
            out = Top()
        elif head == "bot":
            out = Bottom()
        elif head in ("<1", "<2", "<"):
            out = Less(head, atom_token(), atom_token())
        elif head == "letter":
            x = atom_token()
            letters = []
            while tokens[pos[0]] != ")":
                tok = atom_token()
                letters.append(int(tok) if tok.lstrip("-").isdigit() else tok)
            out = LetterAt(x, frozenset(letters))
        elif head == "in":
            out = In(atom_token(), atom_token())
        elif head == "=":
            out = Eq(atom_token(), atom_token())
        elif head == "not":
            out = Not(parse())
        elif head in ("and", "or"):
            args = []
            while tokens[pos[0]] != ")":
                args.append(parse())
            out = (And if head == "and" else Or)(tuple(args))
        elif head == "->":
            out = Implies(parse(), parse())
        elif head == "<->":
            out = Iff(parse(), parse())
        elif head in ("E", "A", "ES", "AS"):
            var = atom_token()
            body = parse()
            cls = Exists if head.startswith("E") else Forall
            out = cls(var, head.endswith("S"), body)
        else:
            raise SignatureError(f"unknown form {head!r}")
        need(")")
        return out

    result = parse()
    if pos[0] != len(tokens):
        raise SignatureError("trailing tokens after formula")
    return result
