"""A small reduced ordered BDD store.

Nodes live in parallel lists; 0 and 1 are the terminals. Variables are
integer levels, lower level = closer to the root. This is only meant for the
model checker: tens of variables, up to a few million nodes.
"""

from __future__ import annotations

from ..errors import BudgetExceededError

_AND, _OR, _XOR = 0, 1, 2


class BddStore:
    def __init__(self, nvars: int, max_nodes: int = 4_000_000):
        self.nvars = nvars
        self.max_nodes = max_nodes
        # node 0 = false, node 1 = true; terminals sit at level nvars
        self.level = [nvars, nvars]
        self.lo = [0, 1]
        self.hi = [0, 1]
        self.unique: dict[tuple[int, int, int], int] = {}
        self.cache: dict[tuple[int, int, int], int] = {}

    def mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        found = self.unique.get(key)
        if found is not None:
            return found
        idx = len(self.level)
        if idx > self.max_nodes:
            raise BudgetExceededError("model checker BDD store overflow")
        self.level.append(level)
        self.lo.append(lo)
        self.hi.append(hi)
        self.unique[key] = idx
        return idx

    def var(self, level: int) -> int:
        return self.mk(level, 0, 1)

    def apply(self, op: int, a: int, b: int) -> int:
        level = self.level
        lo = self.lo
        hi = self.hi
        cache = self.cache
        unique = self.unique
        max_nodes = self.max_nodes

        def rec(a: int, b: int) -> int:
            if op == _AND:
                if a == 0 or b == 0:
                    return 0
                if a == 1:
                    return b
                if b == 1:
                    return a
                if a == b:
                    return a
            elif op == _OR:
                if a == 1 or b == 1:
                    return 1
                if a == 0:
                    return b
                if b == 0:
                    return a
                if a == b:
                    return a
            else:  # XOR
                if a == 0:
                    return b
                if b == 0:
                    return a
                if a == b:
                    return 0
            if a > b:
                a, b = b, a
            key = (op, a, b)
            found = cache.get(key)
            if found is not None:
                return found
            la, lb = level[a], level[b]
            if la < lb:
                top = la
                r0, r1 = rec(lo[a], b), rec(hi[a], b)
            elif lb < la:
                top = lb
                r0, r1 = rec(a, lo[b]), rec(a, hi[b])
            else:
                top = la
                r0, r1 = rec(lo[a], lo[b]), rec(hi[a], hi[b])
            if r0 == r1:
                out = r0
            else:
                ukey = (top, r0, r1)
                out = unique.get(ukey)
                if out is None:
                    out = len(level)
                    if out > max_nodes:
                        raise BudgetExceededError("model checker BDD store overflow")
                    level.append(top)
                    lo.append(r0)
                    hi.append(r1)
                    unique[ukey] = out
            cache[key] = out
            return out

        return rec(a, b)

    def and_(self, a: int, b: int) -> int:
        return self.apply(_AND, a, b)

    def or_(self, a: int, b: int) -> int:
        return self.apply(_OR, a, b)

    def not_(self, a: int) -> int:
        return self.apply(_XOR, a, 1)

    def xor_(self, a: int, b: int) -> int:
        return self.apply(_XOR, a, b)

    def implies(self, a: int, b: int) -> int:
        return self.or_(self.not_(a), b)

    def iff(self, a: int, b: int) -> int:
        return self.not_(self.apply(_XOR, a, b))

    def quantify(self, a: int, levels: frozenset[int], existential: bool) -> int:
        """Abstract the given variable levels, OR-ing (∃) or AND-ing (∀)."""
        if a < 2 or not levels:
            return a
        memo: dict[int, int] = {}
        combine = self.or_ if existential else self.and_
        last = max(levels)

        def walk(u: int) -> int:
            if u < 2 or self.level[u] > last:
                return u
            got = memo.get(u)
            if got is not None:
                return got
            lv = self.level[u]
            lo, hi = walk(self.lo[u]), walk(self.hi[u])
            out = combine(lo, hi) if lv in levels else self.mk(lv, lo, hi)
            memo[u] = out
            return out

        return walk(a)
