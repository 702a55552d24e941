"""Model checking on small finite structures.

Truth values are computed by structural recursion. First-order quantifiers
enumerate the domain. Set quantifiers are symbolic: every bound set variable
contributes one binary decision per domain element, subformulas evaluate to
BDDs over those decisions, and quantification abstracts them.

Two further techniques keep this workable on sentences with many set
variables (the gridding sentences quantify one set per nonzero cell):

* conjunctions and implications propagate what is already known downward,
  so constraint-shaped sentences never build their expensive subformulas
  over unconstrained assignments;
* once the accumulated constraint of a conjunction has few enough models,
  the evaluator enumerates them and switches to bit-parallel evaluation:
  each subformula becomes one big integer, one bit per model (times one bit
  per assignment of any set variable quantified further in), and boolean
  structure turns into machine-speed integer arithmetic.

Still worst-case exponential; the node store and domain size are capped by
the budget.
"""

from __future__ import annotations

from ..errors import Budget, BudgetExceededError, DEFAULT_BUDGET, SignatureError
from .bdd import BddStore
from .structures import FiniteStructure
from .syntax import (
    And, Bottom, Eq, Exists, Forall, Formula, Iff, Implies, In, LetterAt,
    Less, Not, Or, Top, children, free_variables, rename_bound,
)

_SWITCH_MODELS = 2048          # enumerate models when a conjunction narrows this far
_MAX_MASK_BITS = 1 << 23       # bail out of bit-parallel mode past 1 MiB masks


def _collect_bound_sets(f: Formula) -> list[str]:
    out: list[str] = []
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Exists, Forall)) and node.set_var:
            out.append(node.var)
        stack.extend(reversed(children(node)))
    return out


def _so_table(f: Formula) -> dict[int, bool]:
    """Whether each node binds a set variable somewhere beneath it."""
    table: dict[int, bool] = {}

    def walk(node: Formula) -> bool:
        out = isinstance(node, (Exists, Forall)) and node.set_var
        for ch in children(node):
            out = walk(ch) or out
        table[id(node)] = out
        return out

    walk(f)
    return table


def _fo_var_table(f: Formula) -> dict[int, tuple[str, ...]]:
    """Free first-order variables per node, for memo keys."""
    table: dict[int, tuple[str, ...]] = {}

    def walk(node: Formula) -> frozenset[str]:
        if isinstance(node, Less):
            out = frozenset((node.x, node.y))
        elif isinstance(node, Eq):
            out = frozenset((node.x, node.y))
        elif isinstance(node, LetterAt):
            out = frozenset((node.x,))
        elif isinstance(node, In):
            out = frozenset((node.x,))
        elif isinstance(node, (Exists, Forall)):
            out = walk(node.body) - {node.var}
        else:
            out = frozenset()
            for ch in children(node):
                out |= walk(ch)
        table[id(node)] = tuple(sorted(out))
        return out

    walk(f)
    return table


def _flat_and(node: And) -> list[Formula]:
    args: list[Formula] = []
    stack = list(reversed(node.args))
    while stack:
        a = stack.pop()
        if isinstance(a, And):
            stack.extend(reversed(a.args))
        else:
            args.append(a)
    return args


class _MaskBail(Exception):
    """Bit-parallel mode exceeded its width cap; retry symbolically."""


def _comb(width: int, ones: int) -> int:
    """0^ones 1^ones repeated across ``width`` bits (low bits first)."""
    period = 2 * ones
    block = ((1 << ones) - 1) << ones
    reps = (width + period - 1) // period
    return (block * (((1 << (period * reps)) - 1) // ((1 << period) - 1))) & ((1 << width) - 1)


class _ModelSpace:
    """Models of the accumulated constraint, plus any inner set-quantifier
    dimensions appended on top. Masks are ints, one bit per point of the
    space."""

    def __init__(self, models: list[int], level_pos: dict[int, int],
                 parent: "_ModelSpace | None" = None, ext_levels: tuple[int, ...] = ()):
        self.models = models            # only meaningful on the root space
        self.level_pos = level_pos      # scope level -> bit position in a model
        self.parent = parent
        self.ext_levels = ext_levels    # levels quantified in this extension
        if parent is None:
            self.width = max(1, len(models))
        else:
            self.width = parent.width << len(ext_levels)
        self.full = (1 << self.width) - 1
        self._level_masks: dict[int, int] = {}
        self.memo: dict[tuple, int] = {}

    def extend(self, levels: tuple[int, ...]) -> "_ModelSpace":
        child = _ModelSpace([], self.level_pos, parent=self, ext_levels=levels)
        if child.width > _MAX_MASK_BITS:
            raise _MaskBail()
        return child

    def level_mask(self, level: int) -> int:
        got = self._level_masks.get(level)
        if got is not None:
            return got
        if level in self.ext_levels:
            # block index e covers this level at bit position i: blocks of
            # parent-width; level set on blocks whose i-th index bit is 1
            i = self.ext_levels.index(level)
            base = self.parent.width << i
            out = _comb(self.width, base)
        elif self.parent is not None:
            inner = self.parent.level_mask(level)
            out = inner * (((1 << self.width) - 1) // ((1 << self.parent.width) - 1)) \
                if inner else 0
        else:
            pos = self.level_pos[level]
            out = 0
            for m, model in enumerate(self.models):
                if (model >> pos) & 1:
                    out |= 1 << m
        self._level_masks[level] = out
        return out


class _TooMany(Exception):
    pass


def _enumerate_models(store: BddStore, u: int, levels: list[int],
                      cap: int) -> list[int] | None:
    """Satisfying assignments over exactly ``levels`` (sorted) as bit
    vectors indexed by position in ``levels``; None when there are more
    than ``cap``. The support of u must lie inside ``levels``."""
    out: list[int] = []

    def walk(node: int, i: int, acc: int):
        if node == 0:
            return
        if i == len(levels):
            if node == 1:
                if len(out) >= cap:
                    raise _TooMany()
                out.append(acc)
            return
        if node == 1 or store.level[node] > levels[i]:
            walk(node, i + 1, acc)
            walk(node, i + 1, acc | (1 << i))
        else:
            walk(store.lo[node], i + 1, acc)
            walk(store.hi[node], i + 1, acc | (1 << i))

    try:
        walk(u, 0, 0)
    except _TooMany:
        return None
    return out


def _models_to_bdd(store: BddStore, models: list[int], mask: int, levels: list[int]) -> int:
    """OR of the model cubes selected by ``mask``, built level by level."""
    chosen = [m for i, m in enumerate(models) if (mask >> i) & 1]

    def build(group: list[int], i: int) -> int:
        if i == len(levels):
            return 1 if group else 0
        if not group:
            return 0
        lows = [m for m in group if not (m >> i) & 1]
        highs = [m for m in group if (m >> i) & 1]
        return store.mk(levels[i], build(lows, i + 1), build(highs, i + 1))

    return build(chosen, 0)


def model_check(
    st: FiniteStructure,
    formula: Formula,
    env: dict[str, object] | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> bool:
    """Does the structure satisfy the formula under the given assignment?

    ``env`` binds free variables: integers (0-based positions) for
    first-order variables, iterables of integers for set variables.
    """
    st.check_signature(formula)
    if st.size > budget.max_domain:
        raise BudgetExceededError(
            f"structure of size {st.size} exceeds the model-check cap {budget.max_domain}")

    env = dict(env or {})
    f = rename_bound(formula)
    free_fo, free_so = free_variables(f)
    missing = (free_fo | free_so) - env.keys()
    if missing:
        raise SignatureError(f"unbound free variables: {sorted(missing)}")
    const_sets = {v: frozenset(env[v]) for v in free_so}
    for v in free_fo:
        if not isinstance(env[v], int):
            raise SignatureError(f"first-order variable {v} must be bound to a position")

    n = st.size
    slots = {name: i for i, name in enumerate(_collect_bound_sets(f))}
    nslots = max(1, len(slots))
    store = BddStore(n * nslots, max_nodes=budget.max_bdd_nodes)
    fo_table = _fo_var_table(f)
    so_table = _so_table(f)
    memo: dict[tuple, int] = {}
    letters = st.letters

    def slot_levels(name: str) -> tuple[int, ...]:
        return tuple(d * nslots + slots[name] for d in range(n))

    # ---- bit-parallel (model-enumerated) mode -----------------------------

    def mask_ev(node: Formula, fo: dict[str, int], space: _ModelSpace) -> int:
        key = (id(node), id(space)) + tuple(fo[v] for v in fo_table[id(node)])
        got = space.memo.get(key)
        if got is not None:
            return got
        out = _mask_ev(node, fo, space)
        space.memo[key] = out
        return out

    def _mask_ev(node: Formula, fo: dict[str, int], space: _ModelSpace) -> int:
        full = space.full
        if isinstance(node, And):
            acc = full
            for a in _flat_and(node):
                acc &= mask_ev(a, fo, space)
                if not acc:
                    return 0
            return acc
        if isinstance(node, Or):
            acc = 0
            for a in node.args:
                acc |= mask_ev(a, fo, space)
                if acc == full:
                    break
            return acc
        if isinstance(node, Not):
            return full ^ mask_ev(node.body, fo, space)
        if isinstance(node, Implies):
            return (full ^ mask_ev(node.a, fo, space)) | mask_ev(node.b, fo, space)
        if isinstance(node, Iff):
            return full ^ mask_ev(node.a, fo, space) ^ mask_ev(node.b, fo, space)
        if isinstance(node, In):
            x = fo[node.x]
            slot = slots.get(node.X)
            if slot is None:
                return full if x in const_sets[node.X] else 0
            return space.level_mask(x * nslots + slot)
        if isinstance(node, Less):
            return full if st.holds_less(node.order, fo[node.x], fo[node.y]) else 0
        if isinstance(node, Eq):
            return full if fo[node.x] == fo[node.y] else 0
        if isinstance(node, LetterAt):
            return full if letters[fo[node.x]] in node.letters else 0
        if isinstance(node, (Exists, Forall)):
            existential = isinstance(node, Exists)
            if not node.set_var:
                if existential:
                    acc = 0
                    for d in range(n):
                        fo2 = dict(fo)
                        fo2[node.var] = d
                        acc |= mask_ev(node.body, fo2, space)
                        if acc == full:
                            break
                    return acc
                acc = full
                for d in range(n):
                    fo2 = dict(fo)
                    fo2[node.var] = d
                    acc &= mask_ev(node.body, fo2, space)
                    if not acc:
                        break
                return acc
            child = space.extend(slot_levels(node.var))
            x = mask_ev(node.body, fo, child)
            width = child.width
            for _ in range(n):
                width >>= 1
                x = ((x | (x >> width)) if existential else (x & (x >> width))) \
                    & ((1 << width) - 1)
            return x
        if isinstance(node, Top):
            return full
        if isinstance(node, Bottom):
            return 0
        raise TypeError(f"not a formula node: {node!r}")

    # ---- symbolic mode ----------------------------------------------------
    #
    # ev(node, fo, care) returns g with g AND care == [[node]] AND care: a
    # representative that is only trusted inside the care space. Atoms and
    # negations stay plain (plain values are valid representatives); care
    # narrows evaluation only around set-quantified subformulas, where it
    # pays. Results for subformulas without set quantifiers are computed
    # with care=1 (exact), which also maximizes memo reuse.

    def tree_and(items: list[int]) -> int:
        while len(items) > 1:
            nxt = []
            for i in range(0, len(items) - 1, 2):
                v = store.and_(items[i], items[i + 1])
                if v == 0:
                    return 0
                nxt.append(v)
            if len(items) % 2:
                nxt.append(items[-1])
            items = nxt
        return items[0] if items else 1

    def ev(node: Formula, fo: dict[str, int], care: int, scope: tuple[str, ...]):
        if not so_table[id(node)]:
            care = 1
        key = (id(node), care) + tuple(fo[v] for v in fo_table[id(node)])
        got = memo.get(key)
        if got is not None:
            return got
        out = _ev(node, fo, care, scope)
        memo[key] = out
        return out

    def _ev(node: Formula, fo: dict[str, int], care: int, scope: tuple[str, ...]) -> int:
        if isinstance(node, And):
            args = _flat_and(node)
            if not so_table[id(node)]:
                vals = []
                for a in args:
                    v = ev(a, fo, 1, scope)
                    if v == 0:
                        return 0
                    if v != 1:
                        vals.append(v)
                return tree_and(vals)
            # conjoin the quantifier-free part in one balanced pass, then
            # handle the set-quantified conjuncts with narrowing
            plain: list[int] = []
            heavy: list[Formula] = []
            for a in args:
                if so_table[id(a)]:
                    heavy.append(a)
                else:
                    v = ev(a, fo, 1, scope)
                    if v == 0:
                        return 0
                    if v != 1:
                        plain.append(v)
            acc = tree_and(plain)
            if acc == 0:
                return 0
            acc = store.and_(care, acc)
            levels = sorted(l for name in scope for l in slot_levels(name))
            for idx, a in enumerate(heavy):
                if acc == 0:
                    return 0
                # enumerate the models of what is known so far: bit-parallel
                # evaluation beats symbolic work on the quantified remainder
                if levels:
                    models = _enumerate_models(store, acc, levels, _SWITCH_MODELS)
                    if models is not None:
                        space = _ModelSpace(models, {l: i for i, l in enumerate(levels)})
                        mask = space.full
                        try:
                            for b in heavy[idx:]:
                                mask &= mask_ev(b, fo, space)
                                if not mask:
                                    return 0
                        except _MaskBail:
                            pass
                        else:
                            if mask == space.full:
                                return acc
                            return _models_to_bdd(store, models, mask, levels)
                acc = store.and_(acc, ev(a, fo, acc, scope))
            return acc
        if isinstance(node, Or):
            acc = 0
            for a in node.args:
                acc = store.or_(acc, ev(a, fo, care, scope))
                if acc == 1:
                    break
            return acc
        if isinstance(node, Not):
            return store.not_(ev(node.body, fo, care, scope))
        if isinstance(node, Implies):
            antecedent = ev(node.a, fo, care, scope)
            if antecedent == 0:
                return 1
            narrowed = store.and_(care, antecedent) if so_table[id(node.b)] else care
            consequent = ev(node.b, fo, narrowed, scope)
            return store.or_(store.not_(antecedent), consequent)
        if isinstance(node, Iff):
            a = ev(node.a, fo, care, scope)
            b = ev(node.b, fo, care, scope)
            return store.not_(store.xor_(a, b))
        if isinstance(node, In):
            x = fo[node.x]
            slot = slots.get(node.X)
            if slot is None:
                return 1 if x in const_sets[node.X] else 0
            return store.var(x * nslots + slot)
        if isinstance(node, Less):
            return 1 if st.holds_less(node.order, fo[node.x], fo[node.y]) else 0
        if isinstance(node, Eq):
            return 1 if fo[node.x] == fo[node.y] else 0
        if isinstance(node, LetterAt):
            return 1 if letters[fo[node.x]] in node.letters else 0
        if isinstance(node, Exists):
            if node.set_var:
                # abstract a whole chain of existential set quantifiers in
                # one pass (care has no bits of these slots, so it commutes)
                names = [node.var]
                body_node = node.body
                while isinstance(body_node, Exists) and body_node.set_var:
                    names.append(body_node.var)
                    body_node = body_node.body
                body = ev(body_node, fo, care, scope + tuple(names))
                levels = frozenset(l for v in names for l in slot_levels(v))
                return store.quantify(body, levels, existential=True)
            acc = 0
            for d in range(n):
                fo2 = dict(fo)
                fo2[node.var] = d
                acc = store.or_(acc, ev(node.body, fo2, care, scope))
                if acc == 1:
                    break
            return acc
        if isinstance(node, Forall):
            if node.set_var:
                names = [node.var]
                body_node = node.body
                while isinstance(body_node, Forall) and body_node.set_var:
                    names.append(body_node.var)
                    body_node = body_node.body
                body = ev(body_node, fo, care, scope + tuple(names))
                levels = frozenset(l for v in names for l in slot_levels(v))
                return store.quantify(body, levels, existential=False)
            if so_table[id(node.body)]:
                acc = care
                for d in range(n):
                    fo2 = dict(fo)
                    fo2[node.var] = d
                    acc = store.and_(acc, ev(node.body, fo2, acc, scope))
                    if acc == 0:
                        return 0
                return acc
            vals = []
            for d in range(n):
                fo2 = dict(fo)
                fo2[node.var] = d
                v = ev(node.body, fo2, 1, scope)
                if v == 0:
                    return 0
                if v != 1:
                    vals.append(v)
            return tree_and(vals)
        if isinstance(node, Top):
            return 1
        if isinstance(node, Bottom):
            return 0
        raise TypeError(f"not a formula node: {node!r}")

    init_fo = {v: env[v] for v in free_fo}
    result = ev(f, init_fo, 1, ())
    if result not in (0, 1):
        raise AssertionError("model check did not reduce to a truth value")
    return result == 1
