"""Independent brute-force oracles for cross-checking the main engine.

Everything here avoids the collector's normal-form arithmetic on purpose.
Coset enumeration builds a group's regular representation from a finite
presentation by free reduction and exhaustive relation closure over a coset
table, so multiplying via the table is an independent check on collected
products. The remaining helpers enumerate subgroups, transfers, and
automorphisms by definition over the full element set; they are meant for
groups of order at most 3^6.
"""

from __future__ import annotations

from .automorphisms import extend_by_definitions, is_automorphism
from .collector import all_elements, inv, mul
from .errors import ResourceCapError
from .presentations import FpPresentation, PcPresentation, Word


class CosetTable:
    """Todd-Coxeter coset enumeration (HLT with coincidence processing).

    Enumerates cosets of the subgroup generated by subgroup_words in the
    group presented by fp. After close(), table rows index live cosets and
    act(c, word) walks the table.
    """

    def __init__(self, fp: FpPresentation, subgroup_words=(), limit: int = 200000):
        self.fp = fp
        self.limit = limit
        self.gen_index = {g: i for i, g in enumerate(fp.generators)}
        self.width = 2 * len(fp.generators)
        self.rows: list[list] = [[None] * self.width]
        self.rep: list[int] = [0]
        self.pending: list[tuple[int, int]] = []
        self.relator_letters = [self._word_letters(w) for w in fp.relators]
        self.subgroup_letters = [self._word_letters(w) for w in subgroup_words]

    def _word_letters(self, w: Word) -> list[int]:
        cols = []
        for name, exp in w.factors:
            g = self.gen_index[name]
            col = 2 * g if exp > 0 else 2 * g + 1
            cols.extend([col] * abs(exp))
        return cols

    @staticmethod
    def _inv_col(col: int) -> int:
        return col ^ 1

    def find(self, c: int) -> int:
        while self.rep[c] != c:
            self.rep[c] = self.rep[self.rep[c]]
            c = self.rep[c]
        return c

    def _new_coset(self) -> int:
        if len(self.rows) >= self.limit:
            raise ResourceCapError("coset limit exceeded")
        self.rows.append([None] * self.width)
        self.rep.append(len(self.rows) - 1)
        return len(self.rows) - 1

    def _set(self, c: int, col: int, d: int) -> None:
        c, d = self.find(c), self.find(d)
        cur = self.rows[c][col]
        if cur is not None:
            if self.find(cur) != d:
                self._coincide(self.find(cur), d)
            return
        self.rows[c][col] = d
        inv_col = self._inv_col(col)
        cur = self.rows[d][inv_col]
        if cur is None:
            self.rows[d][inv_col] = c
        elif self.find(cur) != c:
            self._coincide(self.find(cur), c)

    def _coincide(self, a: int, b: int) -> None:
        self.pending.append((a, b))
        while self.pending:
            x, y = self.pending.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            self.rep[y] = x
            for col in range(self.width):
                t = self.rows[y][col]
                if t is None:
                    continue
                t = self.find(t)
                cur = self.rows[x][col]
                if cur is None:
                    self.rows[x][col] = t
                    back = self.rows[t][self._inv_col(col)]
                    if back is None:
                        self.rows[t][self._inv_col(col)] = x
                    elif self.find(back) != x:
                        self.pending.append((back, x))
                elif self.find(cur) != t:
                    self.pending.append((cur, t))

    def _scan_and_fill(self, c: int, letters: list[int]) -> None:
        f, b = c, c
        fi, bi = 0, len(letters)
        while True:
            while fi < bi:
                nxt = self.rows[self.find(f)][letters[fi]]
                if nxt is None:
                    break
                f = self.find(nxt)
                fi += 1
            while bi > fi:
                prev = self.rows[self.find(b)][self._inv_col(letters[bi - 1])]
                if prev is None:
                    break
                b = self.find(prev)
                bi -= 1
            if fi == bi:
                if self.find(f) != self.find(b):
                    self._coincide(self.find(f), self.find(b))
                return
            if fi == bi - 1:
                self._set(self.find(f), letters[fi], self.find(b))
                return
            d = self._new_coset()
            self._set(self.find(f), letters[fi], d)
            f = self.find(d)
            fi += 1

    def close(self) -> "CosetTable":
        for letters in self.subgroup_letters:
            self._scan_and_fill(0, letters)
        c = 0
        while c < len(self.rows):
            if self.find(c) != c:
                c += 1
                continue
            for letters in self.relator_letters:
                self._scan_and_fill(c, letters)
                if self.find(c) != c:
                    break
            if self.find(c) != c:
                c += 1
                continue
            for col in range(self.width):
                if self.find(c) == c and self.rows[c][col] is None:
                    d = self._new_coset()
                    self._set(c, col, d)
            c += 1
        self._compress()
        self._verify()
        return self

    def _verify(self) -> None:
        for c in range(len(self.rows)):
            for col in range(self.width):
                d = self.rows[c][col]
                assert d is not None, "table not closed"
                assert self.rows[d][self._inv_col(col)] == c, "inverse mismatch"
            for letters in self.relator_letters:
                t = c
                for col in letters:
                    t = self.rows[t][col]
                assert t == c, "relator does not close"
        for letters in self.subgroup_letters:
            t = 0
            for col in letters:
                t = self.rows[t][col]
            assert t == 0, "subgroup word leaves coset 0"

    def _compress(self) -> None:
        live = sorted({self.find(c) for c in range(len(self.rows))})
        remap = {old: new for new, old in enumerate(live)}
        rows = []
        for old in live:
            rows.append([remap[self.find(x)] for x in self.rows[old]])
        self.rows = rows
        self.rep = list(range(len(rows)))

    @property
    def size(self) -> int:
        return len(self.rows)

    def act(self, c: int, word: Word) -> int:
        for col in self._word_letters(word):
            c = self.rows[c][col]
        return c


def group_order_by_enumeration(fp: FpPresentation, limit: int = 200000) -> int:
    return CosetTable(fp, (), limit).close().size


def regular_representation(pc: PcPresentation, limit: int = 200000) -> CosetTable:
    """Coset table of the trivial subgroup for a pc group's own relations."""
    fp = FpPresentation(pc.names, pc.relations_as_words())
    return CosetTable(fp, (), limit).close()


def table_element(table: CosetTable, pc: PcPresentation, elem) -> int:
    """Coset reached from the identity by the normal word of elem."""
    c = 0
    for i, v in enumerate(elem):
        if v:
            c = table.act(c, Word.of([(pc.names[i], v)]))
    return c


# ---------------------------------------------------------------------------
# Exhaustive oracles over the full element set (order <= 3^6 territory)


def exhaustive_subgroup(pc: PcPresentation, gens) -> frozenset:
    """Closure of gens under multiplication, by plain worklist."""
    seen = {tuple(g) for g in gens}
    seen.add(tuple(0 for _ in range(pc.n)))
    frontier = list(seen)
    while frontier:
        a = frontier.pop()
        for g in list(seen):
            for prod in (mul(pc, a, g), mul(pc, g, a)):
                if prod not in seen:
                    seen.add(prod)
                    frontier.append(prod)
        ainv = inv(pc, a)
        if ainv not in seen:
            seen.add(ainv)
            frontier.append(ainv)
    return frozenset(seen)


def transfer_by_definition(pc: PcPresentation, subgroup: frozenset, transversal, g):
    """Transfer of g into the subgroup, computed from the definition.

    transversal lists right coset representatives r_i with G the disjoint
    union of (subgroup * r_i). Returns the product of the h_i with
    r_i g = h_i r_{pi(i)}, taken in transversal order; well defined in
    H/H' and compared there by callers.
    """
    out = tuple(0 for _ in range(pc.n))
    for r in transversal:
        rg = mul(pc, r, g)
        hit = None
        for rp in transversal:
            h = mul(pc, rg, inv(pc, rp))
            if h in subgroup:
                hit = h
                break
        assert hit is not None, "transversal does not cover the group"
        out = mul(pc, out, hit)
    return out


def bruteforce_automorphisms(pc: PcPresentation, count_only: bool = True):
    """All automorphisms by exhaustive choice of weight-1 images.

    Candidate image tuples for the weight-1 generators are extended through
    the definitions and kept when they preserve every relation and are
    bijective. Requires order at most 3^6 to stay tractable.
    """
    if pc.n > 6:
        raise ResourceCapError("brute force automorphism search needs order <= 3^6")
    w1 = [i for i in range(pc.n) if pc.weights[i] == 1]
    elements = [tuple(e) for e in all_elements(pc)]
    found = []
    total = 0

    def rec(k, chosen):
        nonlocal total
        if k == len(w1):
            imgs = extend_by_definitions(pc, dict(zip(w1, chosen)))
            if is_automorphism(pc, imgs):
                total += 1
                if not count_only:
                    found.append(imgs)
            return
        for e in elements:
            rec(k + 1, chosen + [e])

    rec(0, [])
    return total if count_only else found
