"""Word sentences compiled to finite automata, and the decision procedures
on them.

Alphabets carry tracks: one extra bit per free variable, so a symbol is a
base letter plus a bit vector (first-order variables ride along as
singleton-constrained tracks). Symbols are never stored individually;
transitions are indexed by symbol *classes* (groups of symbols the automaton
cannot tell apart), which is what keeps large alphabets workable.

Compilation is the classical construction: tiny automata for atoms, product
for the connectives, complement on the determinized completion for negation,
track projection for quantifiers. Everything stays deterministic and
complete except transiently after projection, and gets minimized after every
negation and at the root.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import Budget, BudgetExceededError, DEFAULT_BUDGET, SignatureError
from .mso.syntax import (
    And, Bottom, Eq, Exists, Forall, Formula, Iff, Implies, In, LetterAt,
    Less, Not, Or, Top, formula_to_text, free_variables, relations_used,
    rename_bound,
)


@dataclass(frozen=True)
class TrackAlphabet:
    """Base letters plus named tracks. Symbol index = letter index shifted
    left by the track count, plus the track bits (track i = bit i in the
    sorted track order)."""

    letters: tuple
    tracks: tuple[str, ...] = ()

    def __post_init__(self):
        if tuple(sorted(self.tracks)) != self.tracks:
            raise ValueError("tracks must be sorted")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("duplicate letters")

    @property
    def n_symbols(self) -> int:
        return len(self.letters) << len(self.tracks)

    def symbol(self, letter, bits: int) -> int:
        return (self.letters.index(letter) << len(self.tracks)) | bits

    def describe_symbol(self, sym: int) -> tuple:
        k = len(self.tracks)
        return self.letters[sym >> k], sym & ((1 << k) - 1)


@dataclass(frozen=True)
class Automaton:
    """Transitions are indexed state-major by symbol class; each entry is a
    sorted tuple of successors (singletons everywhere iff deterministic and
    complete)."""

    alphabet: TrackAlphabet
    class_map: tuple[int, ...]      # symbol index -> class id
    n_classes: int
    n_states: int
    initial: frozenset[int]
    accepting: frozenset[int]
    transitions: tuple[tuple[tuple[int, ...], ...], ...]
    deterministic: bool = False
    complete: bool = False
    minimized: bool = False

    def class_sizes(self) -> list[int]:
        sizes = [0] * self.n_classes
        for c in self.class_map:
            sizes[c] += 1
        return sizes

    def accepts(self, word, assignment: dict | None = None) -> bool:
        """Run the automaton on a word; ``assignment`` maps track names to a
        position (int) or iterable of positions."""
        assignment = assignment or {}
        k = len(self.alphabet.tracks)
        sets = []
        for t in self.alphabet.tracks:
            v = assignment.get(t, ())
            sets.append(frozenset([v]) if isinstance(v, int) else frozenset(v))
        current = set(self.initial)
        for pos, letter in enumerate(word):
            bits = 0
            for i in range(k):
                if pos in sets[i]:
                    bits |= 1 << i
            cls = self.class_map[self.alphabet.symbol(letter, bits)]
            current = {q for s in current for q in self.transitions[s][cls]}
            if not current:
                return False
        return bool(current & self.accepting)

    def dump(self) -> str:
        """Stable text form for goldens and inspection."""
        out = [f"letters: {' '.join(str(l) for l in self.alphabet.letters)}"]
        out.append(f"tracks: {' '.join(self.alphabet.tracks) if self.alphabet.tracks else '-'}")
        out.append(f"states: {self.n_states} initial: "
                   f"{' '.join(map(str, sorted(self.initial)))} accepting: "
                   f"{' '.join(map(str, sorted(self.accepting))) or '-'}")
        k = len(self.alphabet.tracks)
        by_class: dict[int, list[str]] = {}
        for sym, cls in enumerate(self.class_map):
            letter, bits = self.alphabet.describe_symbol(sym)
            by_class.setdefault(cls, []).append(
                f"{letter}" + (f"/{bits:0{k}b}" if k else ""))
        for cls in range(self.n_classes):
            out.append(f"class {cls}: " + " ".join(by_class.get(cls, [])))
        for s in range(self.n_states):
            row = " ".join(
                f"{cls}->{{{','.join(map(str, self.transitions[s][cls]))}}}"
                for cls in range(self.n_classes))
            out.append(f"state {s}: {row}")
        flags = [name for name, v in [("det", self.deterministic),
                                      ("complete", self.complete),
                                      ("min", self.minimized)] if v]
        out.append("flags: " + (" ".join(flags) if flags else "-"))
        return "\n".join(out)


# ---------------------------------------------------------------------------
# Internal mutable form
# ---------------------------------------------------------------------------

class _Fa:
    """Working representation: rows[state][class] is an int (deterministic,
    complete) or a frozenset (nondeterministic)."""

    __slots__ = ("letters", "tracks", "class_map", "n_classes", "rows",
                 "initial", "accepting", "det")

    def __init__(self, letters, tracks, class_map, n_classes, rows, initial,
                 accepting, det):
        self.letters = letters
        self.tracks = tracks
        self.class_map = class_map
        self.n_classes = n_classes
        self.rows = rows
        self.initial = initial      # int when det, frozenset otherwise
        self.accepting = accepting  # set[int]
        self.det = det

    @property
    def n_states(self):
        return len(self.rows)


def _to_public(fa: _Fa, minimized: bool = False) -> Automaton:
    alphabet = TrackAlphabet(tuple(fa.letters), tuple(fa.tracks))
    if fa.det:
        rows = tuple(tuple((d,) for d in row) for row in fa.rows)
        initial = frozenset({fa.initial})
    else:
        rows = tuple(tuple(tuple(sorted(d)) for d in row) for row in fa.rows)
        initial = frozenset(fa.initial)
    return Automaton(
        alphabet=alphabet,
        class_map=tuple(fa.class_map),
        n_classes=fa.n_classes,
        n_states=len(fa.rows),
        initial=initial,
        accepting=frozenset(fa.accepting),
        transitions=rows,
        deterministic=fa.det,
        complete=fa.det,
        minimized=minimized,
    )


def _from_public(a: Automaton) -> _Fa:
    det = a.deterministic and a.complete
    if det:
        rows = [[d[0] for d in row] for row in a.transitions]
        initial = next(iter(a.initial))
    else:
        rows = [[frozenset(d) for d in row] for row in a.transitions]
        initial = frozenset(a.initial)
    return _Fa(list(a.alphabet.letters), list(a.alphabet.tracks),
               list(a.class_map), a.n_classes, rows, initial,
               set(a.accepting), det)


def _compress_classes(fa: _Fa) -> None:
    """Merge symbol classes with identical transition behavior everywhere,
    renumbering classes by their smallest symbol."""
    if fa.n_classes == 0:
        return
    sig_of: dict[tuple, int] = {}
    remap = [0] * fa.n_classes
    for cls in range(fa.n_classes):
        sig = tuple(row[cls] for row in fa.rows)
        remap[cls] = sig_of.setdefault(sig, len(sig_of))
    if len(sig_of) == fa.n_classes:
        return
    # renumber by first symbol occurrence for determinism
    order: dict[int, int] = {}
    new_map = []
    for sym in range(len(fa.class_map)):
        tmp = remap[fa.class_map[sym]]
        if tmp not in order:
            order[tmp] = len(order)
        new_map.append(order[tmp])
    sig_rows = []
    for row in fa.rows:
        merged = [None] * len(order)
        for cls in range(fa.n_classes):
            merged[order[remap[cls]]] = row[cls]
        sig_rows.append(merged)
    fa.class_map = new_map
    fa.n_classes = len(order)
    fa.rows = sig_rows


def _trim_reachable(fa: _Fa) -> None:
    """Drop states unreachable from the initial set (keeps determinism)."""
    seen: set[int] = set()
    stack = [fa.initial] if fa.det else list(fa.initial)
    seen.update(stack if not fa.det else [fa.initial])
    while stack:
        s = stack.pop()
        for dest in fa.rows[s]:
            targets = (dest,) if fa.det else dest
            for q in targets:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    if len(seen) == len(fa.rows):
        return
    order = sorted(seen)
    renum = {old: i for i, old in enumerate(order)}
    if fa.det:
        fa.rows = [[renum[d] for d in fa.rows[s]] for s in order]
        fa.initial = renum[fa.initial]
    else:
        fa.rows = [[frozenset(renum[q] for q in d) for d in fa.rows[s]] for s in order]
        fa.initial = frozenset(renum[q] for q in fa.initial)
    fa.accepting = {renum[q] for q in fa.accepting if q in renum}


def _determinize(fa: _Fa, budget: Budget, origin: str | None = None) -> _Fa:
    if fa.det:
        return fa
    start = frozenset(fa.initial)
    index: dict[frozenset, int] = {start: 0}
    rows: list[list[int] | None] = [None]
    accepting: set[int] = set()
    stack = [start]
    while stack:
        subset = stack.pop()
        si = index[subset]
        row = []
        for cls in range(fa.n_classes):
            dest = frozenset(q for s in subset for q in fa.rows[s][cls])
            got = index.get(dest)
            if got is None:
                got = len(index)
                index[dest] = got
                rows.append(None)
                stack.append(dest)
                budget.check_states(len(index), origin)
            row.append(got)
        rows[si] = row
        if subset & fa.accepting:
            accepting.add(si)
    return _Fa(fa.letters, fa.tracks, list(fa.class_map), fa.n_classes,
               rows, 0, accepting, True)


def _minimize(fa: _Fa, budget: Budget, origin: str | None = None) -> _Fa:
    fa = _determinize(fa, budget, origin)
    _trim_reachable(fa)
    n = len(fa.rows)
    if n == 0:
        return fa
    # Moore refinement
    part = [1 if s in fa.accepting else 0 for s in range(n)]
    n_parts = 2 if 0 < len(fa.accepting) < n else 1
    if n_parts == 1:
        part = [0] * n
    while True:
        sigs: dict[tuple, int] = {}
        new_part = [0] * n
        for s in range(n):
            sig = (part[s],) + tuple(part[d] for d in fa.rows[s])
            new_part[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == n_parts:
            part = new_part
            break
        part, n_parts = new_part, len(sigs)
    # canonical numbering: BFS from the initial block, classes in order
    block_rows: dict[int, list[int]] = {}
    block_acc: set[int] = set()
    for s in range(n):
        b = part[s]
        if b not in block_rows:
            block_rows[b] = [part[d] for d in fa.rows[s]]
            if s in fa.accepting:
                block_acc.add(b)
    renum: dict[int, int] = {part[fa.initial]: 0}
    queue = [part[fa.initial]]
    while queue:
        b = queue.pop(0)
        for d in block_rows[b]:
            if d not in renum:
                renum[d] = len(renum)
                queue.append(d)
    rows = [None] * len(renum)
    for b, row in block_rows.items():
        if b in renum:
            rows[renum[b]] = [renum[d] for d in row]
    out = _Fa(fa.letters, fa.tracks, list(fa.class_map), fa.n_classes,
              rows, 0, {renum[b] for b in block_acc if b in renum}, True)
    _compress_classes(out)
    return out


def _merge_alphabets(a: _Fa, b: _Fa):
    """Common track set plus projection tables from merged symbols to each
    side's class ids. Returns (letters, tracks, map_a, map_b, n_symbols)."""
    if tuple(a.letters) != tuple(b.letters):
        raise SignatureError("automata over different base alphabets")
    tracks = sorted(set(a.tracks) | set(b.tracks))
    k = len(tracks)
    pos_a = [tracks.index(t) for t in a.tracks]
    pos_b = [tracks.index(t) for t in b.tracks]
    n_letters = len(a.letters)
    map_a = [0] * (n_letters << k)
    map_b = [0] * (n_letters << k)
    for bits in range(1 << k):
        bits_a = 0
        for i, p in enumerate(pos_a):
            if (bits >> p) & 1:
                bits_a |= 1 << i
        bits_b = 0
        for i, p in enumerate(pos_b):
            if (bits >> p) & 1:
                bits_b |= 1 << i
        for li in range(n_letters):
            sym = (li << k) | bits
            map_a[sym] = a.class_map[(li << len(a.tracks)) | bits_a]
            map_b[sym] = b.class_map[(li << len(b.tracks)) | bits_b]
    return a.letters, tracks, map_a, map_b, n_letters << k


_OPS = {
    "and": lambda x, y: x and y,
    "or": lambda x, y: x or y,
    "xor": lambda x, y: x != y,
    "andnot": lambda x, y: x and not y,
}


def _product(a: _Fa, b: _Fa, op: str, budget: Budget, origin: str | None = None) -> _Fa:
    a = _determinize(a, budget, origin)
    b = _determinize(b, budget, origin)
    letters, tracks, map_a, map_b, n_syms = _merge_alphabets(a, b)
    pair_class: dict[tuple[int, int], int] = {}
    class_map = [0] * n_syms
    pairs: list[tuple[int, int]] = []
    for sym in range(n_syms):
        key = (map_a[sym], map_b[sym])
        got = pair_class.get(key)
        if got is None:
            got = len(pair_class)
            pair_class[key] = got
            pairs.append(key)
        class_map[sym] = got
    combine = _OPS[op]
    index: dict[tuple[int, int], int] = {(a.initial, b.initial): 0}
    rows: list[list[int] | None] = [None]
    accepting: set[int] = set()
    stack = [(a.initial, b.initial)]
    while stack:
        pair = stack.pop()
        sa, sb = pair
        row = []
        for ca, cb in pairs:
            dest = (a.rows[sa][ca], b.rows[sb][cb])
            got = index.get(dest)
            if got is None:
                got = len(index)
                index[dest] = got
                rows.append(None)
                stack.append(dest)
                budget.check_states(len(index), origin)
            row.append(got)
        rows[index[pair]] = row
        if combine(sa in a.accepting, sb in b.accepting):
            accepting.add(index[pair])
    out = _Fa(list(letters), list(tracks), class_map, len(pairs), rows, 0,
              accepting, True)
    _compress_classes(out)
    return out


def _complement(fa: _Fa, budget: Budget, origin: str | None = None) -> _Fa:
    fa = _determinize(fa, budget, origin)
    return _Fa(fa.letters, fa.tracks, list(fa.class_map), fa.n_classes,
               [list(r) for r in fa.rows], fa.initial,
               set(range(len(fa.rows))) - fa.accepting, True)


def _add_track(fa: _Fa, track: str) -> _Fa:
    if track in fa.tracks:
        return fa
    tracks = sorted(fa.tracks + [track])
    p = tracks.index(track)
    k_old = len(fa.tracks)
    k_new = k_old + 1
    low = (1 << p) - 1
    class_map = [0] * (len(fa.letters) << k_new)
    for li in range(len(fa.letters)):
        base_old = li << k_old
        base_new = li << k_new
        for bits in range(1 << k_new):
            old_bits = (bits & low) | ((bits >> (p + 1)) << p)
            class_map[base_new | bits] = fa.class_map[base_old | old_bits]
    return _Fa(fa.letters, tracks, class_map, fa.n_classes,
               fa.rows, fa.initial, set(fa.accepting), fa.det)


def _project_track(fa: _Fa, track: str) -> _Fa:
    """Erase a track; the result is nondeterministic."""
    if track not in fa.tracks:
        raise SignatureError(f"automaton has no track {track}")
    p = fa.tracks.index(track)
    k_old = len(fa.tracks)
    k_new = k_old - 1
    tracks = [t for t in fa.tracks if t != track]
    low = (1 << p) - 1
    n_syms_new = len(fa.letters) << k_new
    # each new symbol covers the two old symbols with the erased bit 0/1;
    # new class = pair of old classes, transitions take the union
    pair_class: dict[tuple[int, int], int] = {}
    class_map = [0] * n_syms_new
    pairs: list[tuple[int, int]] = []
    for li in range(len(fa.letters)):
        for bits in range(1 << k_new):
            old_base = (bits & low) | ((bits >> p) << (p + 1))
            sym0 = (li << k_old) | old_base
            sym1 = sym0 | (1 << p)
            key = (fa.class_map[sym0], fa.class_map[sym1])
            got = pair_class.get(key)
            if got is None:
                got = len(pair_class)
                pair_class[key] = got
                pairs.append(key)
            class_map[(li << k_new) | bits] = got
    det_rows = fa.rows if fa.det else None
    rows = []
    for s in range(len(fa.rows)):
        old = fa.rows[s]
        if fa.det:
            rows.append([frozenset((old[c0], old[c1])) for c0, c1 in pairs])
        else:
            rows.append([old[c0] | old[c1] for c0, c1 in pairs])
    initial = frozenset([fa.initial]) if fa.det else frozenset(fa.initial)
    out = _Fa(fa.letters, tracks, class_map, len(pairs), rows, initial,
              set(fa.accepting), False)
    del det_rows
    return out


# ---------------------------------------------------------------------------
# Atom automata
# ---------------------------------------------------------------------------

def _classes_by_key(letters, tracks, key_fn):
    """Build (class_map, keys) grouping symbols by key_fn(letter, bits)."""
    k = len(tracks)
    class_map = []
    ids: dict = {}
    keys = []
    for letter in letters:
        for bits in range(1 << k):
            key = key_fn(letter, bits)
            got = ids.get(key)
            if got is None:
                got = len(ids)
                ids[key] = got
                keys.append(key)
            class_map.append(got)
    return class_map, keys


def _atom_true(letters, accepting: bool) -> _Fa:
    class_map, _ = _classes_by_key(letters, (), lambda l, b: 0)
    rows = [[0] * (1 if letters else 0)]
    return _Fa(list(letters), [], class_map, 1 if letters else 0, rows, 0,
               {0} if accepting else set(), True)


def _atom_less(letters, x: str, y: str) -> _Fa:
    tracks = sorted([x, y])
    bx, by = tracks.index(x), tracks.index(y)
    class_map, keys = _classes_by_key(
        letters, tracks, lambda l, b: ((b >> bx) & 1, (b >> by) & 1))
    DEAD = 3
    rows = []
    for state in range(4):
        row = []
        for kx, ky in keys:
            if state == 0:
                row.append(1 if (kx, ky) == (1, 0) else (0 if (kx, ky) == (0, 0) else DEAD))
            elif state == 1:
                row.append(2 if (kx, ky) == (0, 1) else (1 if (kx, ky) == (0, 0) else DEAD))
            elif state == 2:
                row.append(2 if (kx, ky) == (0, 0) else DEAD)
            else:
                row.append(DEAD)
        rows.append(row)
    return _Fa(list(letters), tracks, class_map, len(keys), rows, 0, {2}, True)


def _atom_eq(letters, x: str, y: str) -> _Fa:
    tracks = sorted([x, y])
    bx, by = tracks.index(x), tracks.index(y)
    class_map, keys = _classes_by_key(
        letters, tracks, lambda l, b: ((b >> bx) & 1, (b >> by) & 1))
    DEAD = 2
    rows = []
    for state in range(3):
        row = []
        for kx, ky in keys:
            if state == 0:
                row.append(1 if (kx, ky) == (1, 1) else (0 if (kx, ky) == (0, 0) else DEAD))
            elif state == 1:
                row.append(1 if (kx, ky) == (0, 0) else DEAD)
            else:
                row.append(DEAD)
        rows.append(row)
    return _Fa(list(letters), tracks, class_map, len(keys), rows, 0, {1}, True)


def _atom_letter(letters, x: str, subset: frozenset) -> _Fa:
    tracks = [x]
    class_map, keys = _classes_by_key(
        letters, tracks, lambda l, b: (l in subset, b & 1))
    DEAD = 2
    rows = []
    for state in range(3):
        row = []
        for good, bit in keys:
            if state == 0:
                row.append((1 if good else DEAD) if bit else 0)
            elif state == 1:
                row.append(DEAD if bit else 1)
            else:
                row.append(DEAD)
        rows.append(row)
    return _Fa(list(letters), tracks, class_map, len(keys), rows, 0, {1}, True)


def _atom_in(letters, x: str, X: str) -> _Fa:
    tracks = sorted([x, X])
    bx, bX = tracks.index(x), tracks.index(X)
    class_map, keys = _classes_by_key(
        letters, tracks, lambda l, b: ((b >> bx) & 1, (b >> bX) & 1))
    DEAD = 2
    rows = []
    for state in range(3):
        row = []
        for kx, kX in keys:
            if state == 0:
                row.append((1 if kX else DEAD) if kx else 0)
            elif state == 1:
                row.append(DEAD if kx else 1)
            else:
                row.append(DEAD)
        rows.append(row)
    return _Fa(list(letters), tracks, class_map, len(keys), rows, 0, {1}, True)


def _atom_singleton(letters, x: str) -> _Fa:
    tracks = [x]
    class_map, keys = _classes_by_key(letters, tracks, lambda l, b: b & 1)
    DEAD = 2
    rows = []
    for state in range(3):
        row = []
        for bit in keys:
            if state == 0:
                row.append(1 if bit else 0)
            elif state == 1:
                row.append(DEAD if bit else 1)
            else:
                row.append(DEAD)
        rows.append(row)
    return _Fa(list(letters), tracks, class_map, len(keys), rows, 0, {1}, True)


# ---------------------------------------------------------------------------
# Compiler
# ---------------------------------------------------------------------------

_MINIMIZE_THRESHOLD = 64


def compile_formula(
    formula: Formula,
    letters,
    free_vars: dict[str, bool] | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> Automaton:
    """Compile a word sentence (or a formula with declared free variables)
    into a minimal deterministic automaton.

    ``free_vars`` maps each free variable name to True when it is a set
    variable; first-order free variables carry an implicit exactly-one-bit
    constraint. The language is over symbols (letter, track bits) with
    tracks sorted by variable name.
    """
    letters = tuple(sorted(letters, key=str))
    orders, uses_letters = relations_used(formula)
    if orders - {"<"}:
        raise SignatureError(
            f"cannot compile permutation orders {sorted(orders - {'<'})}; interpret first")
    f = rename_bound(formula)
    free_fo, free_so = free_variables(f)
    free_vars = dict(free_vars or {})
    missing = (free_fo | free_so) - free_vars.keys()
    if missing:
        raise SignatureError(f"free variables not declared: {sorted(missing)}")

    letter_set = set(letters)

    def c(node: Formula) -> _Fa:
        if isinstance(node, Top):
            return _atom_true(letters, True)
        if isinstance(node, Bottom):
            return _atom_true(letters, False)
        if isinstance(node, Less):
            return _atom_less(letters, node.x, node.y)
        if isinstance(node, Eq):
            return _atom_eq(letters, node.x, node.y)
        if isinstance(node, LetterAt):
            if not node.letters <= letter_set:
                raise SignatureError(
                    f"letter atom mentions letters outside the alphabet: "
                    f"{sorted(node.letters - letter_set, key=str)}")
            return _atom_letter(letters, node.x, node.letters)
        if isinstance(node, In):
            return _atom_in(letters, node.x, node.X)
        if isinstance(node, Not):
            out = _complement(c(node.body), budget, _origin(node))
            return _maybe_minimize(out, budget, _origin(node), force=True)
        if isinstance(node, And):
            return _fold(node.args, "and", node)
        if isinstance(node, Or):
            return _fold(node.args, "or", node)
        if isinstance(node, Implies):
            return c(Or((Not(node.a), node.b)))
        if isinstance(node, Iff):
            out = _product(c(node.a), c(node.b), "xor", budget, _origin(node))
            out = _complement(out, budget, _origin(node))
            return _maybe_minimize(out, budget, _origin(node), force=True)
        if isinstance(node, Exists):
            return _quantify(node, existential=True)
        if isinstance(node, Forall):
            return _quantify(node, existential=False)
        raise TypeError(f"not a formula node: {node!r}")

    def _origin(node: Formula) -> str:
        text = formula_to_text(node)
        return text if len(text) <= 120 else text[:117] + "..."

    def _maybe_minimize(fa: _Fa, budget: Budget, origin: str, force: bool = False) -> _Fa:
        if force or len(fa.rows) > _MINIMIZE_THRESHOLD:
            return _minimize(fa, budget, origin)
        return fa

    def _fold(args, op: str, node: Formula) -> _Fa:
        acc = c(args[0])
        for arg in args[1:]:
            acc = _product(acc, c(arg), op, budget, _origin(node))
            acc = _maybe_minimize(acc, budget, _origin(node))
        return acc

    def _quantify(node, existential: bool) -> _Fa:
        body = node.body if existential else Not(node.body)
        fa = c(body)
        fa = _add_track(fa, node.var)
        if not node.set_var:
            fa = _product(fa, _atom_singleton(letters, node.var), "and",
                          budget, _origin(node))
        fa = _project_track(fa, node.var)
        fa = _minimize(fa, budget, _origin(node))
        if not existential:
            fa = _complement(fa, budget, _origin(node))
            fa = _minimize(fa, budget, _origin(node))
        return fa

    fa = c(f)
    # root: materialize declared tracks, enforce singletons on free
    # first-order variables
    for name in sorted(free_vars):
        fa = _add_track(fa, name)
    for name in sorted(free_vars):
        if not free_vars[name]:
            fa = _product(fa, _atom_singleton(letters, name), "and", budget,
                          origin="free-variable constraint")
    fa = _minimize(fa, budget, origin="root")
    return _to_public(fa, minimized=True)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def determinize(a: Automaton, budget: Budget = DEFAULT_BUDGET) -> Automaton:
    return _to_public(_determinize(_from_public(a), budget))


def complement(a: Automaton, budget: Budget = DEFAULT_BUDGET) -> Automaton:
    return _to_public(_complement(_from_public(a), budget))


def product(a: Automaton, b: Automaton, op: str = "and",
            budget: Budget = DEFAULT_BUDGET) -> Automaton:
    if op not in _OPS:
        raise ValueError(f"unknown product op {op!r}")
    return _to_public(_product(_from_public(a), _from_public(b), op, budget))


def project_track(a: Automaton, track: str) -> Automaton:
    return _to_public(_project_track(_from_public(a), track))


def minimize(a: Automaton, budget: Budget = DEFAULT_BUDGET) -> Automaton:
    if a.minimized:
        return a
    return _to_public(_minimize(_from_public(a), budget), minimized=True)


def isomorphic(a: Automaton, b: Automaton) -> bool:
    """Structural identity of minimized automata (states are canonically
    numbered by minimize, classes by smallest symbol)."""
    a = minimize(a)
    b = minimize(b)
    return (a.alphabet == b.alphabet and a.class_map == b.class_map
            and a.transitions == b.transitions and a.initial == b.initial
            and a.accepting == b.accepting)


def language_equal(a: Automaton, b: Automaton, budget: Budget = DEFAULT_BUDGET) -> bool:
    return is_empty(product(a, b, "xor", budget))


def _require_word(a: Automaton, what: str) -> None:
    if a.alphabet.tracks:
        raise SignatureError(f"{what} requires a pure word alphabet "
                             f"(open tracks: {a.alphabet.tracks})")


def is_universal(a: Automaton, budget: Budget = DEFAULT_BUDGET) -> bool:
    _require_word(a, "universality")
    m = minimize(a, budget)
    return all(s in m.accepting for s in range(m.n_states))


def is_empty(a: Automaton, budget: Budget = DEFAULT_BUDGET) -> bool:
    fa = _from_public(a)
    _trim_reachable(fa)
    return not fa.accepting


def finite_language_max_length(a: Automaton, budget: Budget = DEFAULT_BUDGET) -> int | None:
    """Length of the longest accepted word, or None when the language is
    infinite; -1 for the empty language."""
    _require_word(a, "finiteness")
    fa = _determinize(_from_public(a), budget)
    _trim_reachable(fa)
    n = len(fa.rows)
    # co-reachable states only
    rev: list[set[int]] = [set() for _ in range(n)]
    for s in range(n):
        for d in fa.rows[s]:
            rev[d].add(s)
    live = set(fa.accepting)
    stack = list(live)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in live:
                live.add(p)
                stack.append(p)
    if fa.initial not in live:
        return -1
    # cycle detection among live states (iterative three-color DFS)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {s: WHITE for s in live}
    order: list[int] = []
    for root in sorted(live):
        if color[root] != WHITE:
            continue
        stack2: list[tuple[int, int]] = [(root, 0)]
        color[root] = GRAY
        while stack2:
            s, i = stack2[-1]
            nexts = [d for d in fa.rows[s] if d in live]
            if i < len(nexts):
                stack2[-1] = (s, i + 1)
                d = nexts[i]
                if color[d] == GRAY:
                    return None
                if color[d] == WHITE:
                    color[d] = GRAY
                    stack2.append((d, 0))
            else:
                color[s] = BLACK
                order.append(s)
                stack2.pop()
    # longest path on the DAG
    dist = {s: None for s in live}
    dist[fa.initial] = 0
    best = 0 if fa.initial in fa.accepting else -1
    for s in reversed(order):
        if dist.get(s) is None:
            continue
        for d in fa.rows[s]:
            if d in live:
                nd = dist[s] + 1
                if dist.get(d) is None or nd > dist[d]:
                    dist[d] = nd
                    if d in fa.accepting and nd > best:
                        best = nd
    # a second relaxation pass is unnecessary: `order` is reverse
    # topological, so one sweep relaxes every edge in order
    return best


def count_words(a: Automaton, n: int, budget: Budget = DEFAULT_BUDGET) -> int:
    """Number of accepted words of length exactly n (multiplicities come
    from class sizes; exact big integers)."""
    _require_word(a, "counting")
    fa = _determinize(_from_public(a), budget)
    sizes = [0] * fa.n_classes
    for cls in fa.class_map:
        sizes[cls] += 1
    vec = [0] * len(fa.rows)
    vec[fa.initial] = 1
    for _ in range(n):
        nxt = [0] * len(fa.rows)
        for s, v in enumerate(vec):
            if v:
                row = fa.rows[s]
                for cls in range(fa.n_classes):
                    if sizes[cls]:
                        nxt[row[cls]] += v * sizes[cls]
        vec = nxt
    return sum(vec[s] for s in fa.accepting)


def enumerate_words(a: Automaton, n: int, budget: Budget = DEFAULT_BUDGET):
    """Yield accepted words of length n once each, lexicographically by
    letter order."""
    _require_word(a, "enumeration")
    fa = _determinize(_from_public(a), budget)
    # states that can still reach acceptance in exactly r steps
    alive = [set(fa.accepting)]
    for _ in range(n):
        prev = alive[-1]
        alive.append({s for s in range(len(fa.rows))
                      if any(d in prev for d in fa.rows[s])})
    letters = list(fa.letters)
    letter_cls = [fa.class_map[li << len(fa.tracks)] for li in range(len(letters))]
    lex = sorted(range(len(letters)), key=lambda i: str(letters[i]))

    def walk(state: int, remaining: int, prefix: tuple):
        if remaining == 0:
            if state in fa.accepting:
                yield prefix
            return
        for li in lex:
            dest = fa.rows[state][letter_cls[li]]
            if dest in alive[remaining - 1]:
                yield from walk(dest, remaining - 1, prefix + (letters[li],))

    if fa.initial in alive[n]:
        yield from walk(fa.initial, n, ())
