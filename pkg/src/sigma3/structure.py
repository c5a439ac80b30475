"""Subgroups of a pc group through induced generating sequences.

A subgroup is held as its canonical generating sequence: elements with
strictly increasing leading depth, leading coefficient 1, and a zero entry
at the leading depth of every other row. The sequence is closed under p-th
powers and commutators, so membership reduces to sifting, and canonicity
makes subgroup equality a tuple comparison.

Series (lower central, derived, exponent-p central) are iterated normal
closures of commutator and power generators. Abelianized factors are read
off from induced integer relation matrices, which also drive the maximal
subgroup layers and their type invariants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd

from . import gf3
from .abelian import AbelianType, abelian_type_from_matrix, cyclic_decomposition
from .collector import (comm, conjugate, elem_pow, generator, identity, mul)
from .presentations import PcPresentation


def depth(elem) -> int | None:
    """Index of the first nonzero coordinate; None for the identity."""
    for i, v in enumerate(elem):
        if v:
            return i
    return None


def _normalized(pc: PcPresentation, v):
    """Scale v so the leading coefficient becomes 1 (squaring flips a 2)."""
    if v[depth(v)] == 1:
        return v
    return elem_pow(pc, v, 2)


def _sift(pc: PcPresentation, by_depth: dict, v, coeffs=None, index=None):
    """Strip v against rows keyed by leading depth; return the residue.

    When coeffs/index are supplied, the exponent used at each row is
    recorded; reduction proceeds strictly downward, so every row fires at
    most once and in depth order.
    """
    while True:
        d = depth(v)
        if d is None or d not in by_depth:
            return v
        c = v[d]
        if coeffs is not None:
            coeffs[index[d]] = c
        v = mul(pc, elem_pow(pc, by_depth[d], -c), v)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup held by its canonical induced generating sequence."""

    pc: PcPresentation
    rows: tuple

    @property
    def order_exp(self) -> int:
        return len(self.rows)

    @property
    def order(self) -> int:
        return self.pc.p ** len(self.rows)

    @property
    def index_exp(self) -> int:
        return self.pc.n - len(self.rows)

    @cached_property
    def leading_depths(self) -> tuple:
        return tuple(depth(r) for r in self.rows)

    @cached_property
    def _by_depth(self) -> dict:
        return {depth(r): r for r in self.rows}

    @cached_property
    def _row_index(self) -> dict:
        return {depth(r): i for i, r in enumerate(self.rows)}

    def sift(self, elem):
        return _sift(self.pc, self._by_depth, tuple(elem))

    def contains(self, elem) -> bool:
        return depth(self.sift(elem)) is None

    def decompose(self, elem):
        """Exponents (e_1, ..., e_k) with elem = prod rows[i]^e_i, or None."""
        coeffs = [0] * len(self.rows)
        res = _sift(self.pc, self._by_depth, tuple(elem), coeffs, self._row_index)
        if depth(res) is not None:
            return None
        return tuple(coeffs)

    def coset_residue(self, elem):
        """The unique member of (self * elem) with zeros at all leading depths."""
        v = tuple(elem)
        for r in self.rows:
            c = v[depth(r)]
            if c:
                v = mul(self.pc, elem_pow(self.pc, r, -c), v)
        return v

    def is_normal(self) -> bool:
        for u in self.rows:
            for i in range(self.pc.n):
                if not self.contains(conjugate(self.pc, u, generator(self.pc, i))):
                    return False
        return True

    def elements(self):
        """All members, as products over the sequence. Small orders only."""
        pc = self.pc
        for exps in itertools.product(range(pc.p), repeat=len(self.rows)):
            v = identity(pc)
            for r, e in zip(self.rows, exps):
                if e:
                    v = mul(pc, v, elem_pow(pc, r, e))
            yield v


def _canonical_rows(pc: PcPresentation, by_depth: dict) -> tuple:
    """Back-reduce an echelon dict into the canonical sequence."""
    depths = sorted(by_depth)
    rows = []
    for d in depths:
        v = by_depth[d]
        for d2 in depths:
            if d2 > d and v[d2]:
                v = mul(pc, v, elem_pow(pc, by_depth[d2], -v[d2]))
        rows.append(v)
    return tuple(rows)


def subgroup_closure(pc: PcPresentation, gens, *, normal: bool = False) -> Subgroup:
    """Smallest subgroup containing gens; normal=True takes the normal closure.

    Worklist sifting: every new echelon row enqueues its p-th power, its
    commutators with the other rows, and (for normal closures) its
    commutators with all pc generators.
    """
    by_depth: dict = {}
    work = [tuple(g) for g in gens]
    while work:
        v = _sift(pc, by_depth, work.pop())
        if depth(v) is None:
            continue
        v = _normalized(pc, v)
        by_depth[depth(v)] = v
        work.append(elem_pow(pc, v, pc.p))
        for u in by_depth.values():
            if u is not v:
                work.append(comm(pc, v, u))
                work.append(comm(pc, u, v))
        if normal:
            for i in range(pc.n):
                work.append(comm(pc, v, generator(pc, i)))
    return Subgroup(pc, _canonical_rows(pc, by_depth))


def normal_closure(pc: PcPresentation, gens) -> Subgroup:
    return subgroup_closure(pc, gens, normal=True)


def full_group(pc: PcPresentation) -> Subgroup:
    return Subgroup(pc, tuple(generator(pc, i) for i in range(pc.n)))


def trivial_subgroup(pc: PcPresentation) -> Subgroup:
    return Subgroup(pc, ())


# ---------------------------------------------------------------------------
# Abelianized factors through induced relation matrices


def _relation_matrix(pc: PcPresentation, sub: Subgroup, kill: Subgroup | None = None):
    """Integer rows presenting the abelianization of sub (modulo kill).

    Generators are the sequence rows; relations are p*row_i minus the
    decomposition of row_i^p, the decompositions of all pairwise
    commutators, and the decompositions of kill's rows.
    """
    k = len(sub.rows)
    out = []
    for i, u in enumerate(sub.rows):
        c = sub.decompose(elem_pow(pc, u, pc.p))
        assert c is not None, "sequence not closed under powers"
        out.append([pc.p * (j == i) - c[j] for j in range(k)])
    for j in range(k):
        for i in range(j):
            c = sub.decompose(comm(pc, sub.rows[j], sub.rows[i]))
            assert c is not None, "sequence not closed under commutators"
            out.append(list(c))
    if kill is not None:
        for b in kill.rows:
            c = sub.decompose(b)
            if c is None:
                raise ValueError("quotient kill set is not inside the subgroup")
            out.append(list(c))
    return out


def factor_type(pc: PcPresentation, sub: Subgroup, kill: Subgroup | None = None) -> AbelianType:
    """Abelian type invariants of sub modulo (kill and the derived part).

    For a normal kill with abelian factor this is the type of sub/kill; in
    general it is the type of the abelianization of that factor.
    """
    if not sub.rows:
        return AbelianType.of()
    return abelian_type_from_matrix(_relation_matrix(pc, sub, kill), pc.p, len(sub.rows))


def abelian_quotient_type(pc: PcPresentation) -> AbelianType:
    """Type of G/G', straight from the presentation's relation matrix."""
    return factor_type(pc, full_group(pc))


# ---------------------------------------------------------------------------
# Series


@dataclass(frozen=True)
class SeriesData:
    """A descending normal series with abelianized factor types."""

    kind: str
    groups: tuple
    factors: tuple

    @property
    def length(self) -> int:
        return len(self.groups) - 1


def _commutator_gens(pc: PcPresentation, sub: Subgroup):
    return [comm(pc, u, generator(pc, i)) for u in sub.rows for i in range(pc.n)]


def series(pc: PcPresentation, kind: str) -> SeriesData:
    """kind is one of lower_central, derived, exponent_p_central."""
    groups = [full_group(pc)]
    while groups[-1].rows:
        cur = groups[-1]
        if kind == "lower_central":
            gens = _commutator_gens(pc, cur)
        elif kind == "derived":
            gens = [comm(pc, u, v) for u in cur.rows for v in cur.rows]
        elif kind == "exponent_p_central":
            gens = _commutator_gens(pc, cur)
            gens += [elem_pow(pc, u, pc.p) for u in cur.rows]
        else:
            raise ValueError(f"unknown series kind {kind!r}")
        nxt = normal_closure(pc, gens)
        assert nxt.order_exp < cur.order_exp, "series failed to descend"
        groups.append(nxt)
    factors = tuple(factor_type(pc, groups[i], groups[i + 1])
                    for i in range(len(groups) - 1))
    return SeriesData(kind, tuple(groups), factors)


@dataclass(frozen=True)
class Classification:
    """Class, derived length, p-class, and the cyclic-factor verdict."""

    cl: int
    sl: int
    pclass: int
    bcf: bool
    lower_central: SeriesData
    derived: SeriesData
    p_central: SeriesData

    @property
    def cf(self) -> bool:
        return not self.bcf


def classify(pc: PcPresentation) -> Classification:
    lcs = series(pc, "lower_central")
    der = series(pc, "derived")
    pcs = series(pc, "exponent_p_central")
    # a group has bicyclic (rather than all-cyclic) lower central factors
    # exactly when some factor from the third on is not cyclic
    bcf = any(t.rank >= 2 for t in lcs.factors[2:])
    return Classification(lcs.length, der.length, pcs.length, bcf, lcs, der, pcs)


# ---------------------------------------------------------------------------
# Quotient presentations on coset representatives


@dataclass(frozen=True)
class QuotientData:
    """A pc presentation of G/N on the generators outside N's depths."""

    pc: PcPresentation
    kernel: Subgroup
    survivors: tuple
    parent: PcPresentation

    def project(self, elem):
        res = self.kernel.coset_residue(elem)
        return tuple(res[i] for i in self.survivors)


def quotient_pc(pc: PcPresentation, nsub: Subgroup) -> QuotientData:
    """Present G/N on the surviving generators via coset residues."""
    if not nsub.is_normal():
        raise ValueError("quotient requires a normal subgroup")
    lead = set(nsub.leading_depths)
    survivors = tuple(i for i in range(pc.n) if i not in lead)
    pos = {g: q for q, g in enumerate(survivors)}
    m = len(survivors)

    def push(elem):
        res = nsub.coset_residue(elem)
        row = [0] * m
        for i, v in enumerate(res):
            if v:
                row[pos[i]] = v
        return tuple(row) if any(row) else None

    power = tuple(push(elem_pow(pc, generator(pc, i), pc.p)) for i in survivors)
    cm = tuple(tuple(push(comm(pc, generator(pc, j), generator(pc, i)))
                     for i in survivors[:qj])
               for qj, j in enumerate(survivors))

    def keep_def(i):
        d = pc.definitions[i]
        if d is None:
            return None
        if d[0] == "p":
            if d[1] not in pos:
                return None
            row = power[pos[d[1]]]
            nd = ("p", pos[d[1]])
        else:
            if d[1] not in pos or d[2] not in pos:
                return None
            row = cm[pos[d[1]]][pos[d[2]]]
            nd = ("c", pos[d[1]], pos[d[2]])
        q = pos[i]
        if row is None or row[q] != 1 or any(row[t] for t in range(q + 1, m)):
            return None
        return nd

    child = PcPresentation(
        pc.p,
        tuple(pc.names[i] for i in survivors),
        tuple(pc.weights[i] for i in survivors),
        tuple(keep_def(i) for i in survivors),
        power,
        cm,
    )
    return QuotientData(child, nsub, survivors, pc)


# ---------------------------------------------------------------------------
# Maximal subgroup layers


def adapted_complement(pc: PcPresentation, big: Subgroup, small: Subgroup):
    """Rows completing small's sequence to an echelon sequence of big.

    Valid because the combined normal-form set has the same size as big.
    Returns (complement rows, coordinate function); the coordinate function
    maps members of big to their GF(p) coordinates in big/small when that
    factor is elementary abelian.
    """
    by_depth = dict(small._by_depth)
    t_rows = []
    for r in big.rows:
        res = _sift(pc, by_depth, r)
        if depth(res) is None:
            continue
        res = _normalized(pc, res)
        by_depth[depth(res)] = res
        t_rows.append(res)
    assert len(by_depth) == big.order_exp, "small is not inside big"
    t_rows.sort(key=depth)
    index = {depth(r): i for i, r in enumerate(sorted(by_depth.values(), key=depth))}
    t_positions = {depth(r): i for i, r in enumerate(t_rows)}

    def coords(elem):
        coeffs = [0] * len(by_depth)
        res = _sift(pc, by_depth, tuple(elem), coeffs, index)
        assert depth(res) is None, "element outside the subgroup"
        out = [0] * len(t_rows)
        for d, i in t_positions.items():
            out[i] = coeffs[index[d]]
        return tuple(out)

    return t_rows, coords


def frattini_subgroup(pc: PcPresentation, sub: Subgroup) -> Subgroup:
    """Powers and commutators of the rows, closed under conjugation."""
    gens = [elem_pow(pc, u, pc.p) for u in sub.rows]
    gens += [comm(pc, u, v) for u, v in itertools.combinations(sub.rows, 2)]
    return normal_closure(pc, gens)


def index_p_subgroups(pc: PcPresentation, sub: Subgroup):
    """All subgroups of index p in sub, as preimages of hyperplanes."""
    phi = frattini_subgroup(pc, sub)
    t_rows, _ = adapted_complement(pc, sub, phi)
    d = len(t_rows)
    out = []
    for hyp in gf3.subspaces(d, d - 1):
        gens = list(phi.rows)
        for w in hyp:
            v = identity(pc)
            for t, c in zip(t_rows, w):
                if c:
                    v = mul(pc, v, elem_pow(pc, t, int(c)))
            gens.append(v)
        s = subgroup_closure(pc, gens)
        assert s.order_exp == sub.order_exp - 1
        out.append(s)
    assert len(out) == gf3.gaussian_binomial(d, d - 1)
    return out


@dataclass(frozen=True)
class MaximalLayers:
    """The four maximal subgroups and their index-3 layers.

    layer1 is ordered (H1, H2, H3, H4).  When G/G' is (3^e, 3) with e >= 2,
    exactly one of the four index-3 subgroups of G/G' is non-cyclic, namely
    the one spanned by y and x^3; its preimage differs in kind from the
    other three and is the punctured component H4.  H1, H2, H3 are the
    preimages of the cyclic subgroups generated by x, xy, xy^2 in that
    order; punctured records whether this indexing is the intended one.
    """

    punctured: bool
    e: int
    x_elem: tuple
    y_elem: tuple
    derived: Subgroup
    layer1: tuple
    layer1_types: tuple
    layer2: tuple | None
    layer2_types: tuple | None

    @property
    def rho(self) -> tuple:
        return tuple(t.rank for t in self.layer1_types)


def _log3(v: int) -> int:
    e = 0
    while v > 1:
        assert v % 3 == 0
        v //= 3
        e += 1
    return e


def distinguished_pair(pc: PcPresentation):
    """Elements x, y with G = <x, y>, x of maximal order in G/G', y of order p.

    x is taken among the weight-1 generators (first one on ties), y is a
    weight-1 generator corrected by a power of x so its abelianized order
    drops to p. Requires generator rank 2.
    """
    matrix = _relation_matrix(pc, full_group(pc))
    moduli, to_coords = cyclic_decomposition(matrix, pc.p)
    if len(moduli) != 2:
        raise ValueError("two-generated group required")
    d1, d2 = moduli
    e = _log3(d1)

    def ab_order(elem):
        c1, c2 = to_coords(list(elem))
        o1 = d1 // gcd(d1, c1)
        o2 = d2 // gcd(d2, c2)
        return max(o1, o2)

    w1 = [i for i in range(pc.n) if pc.weights[i] == 1]
    best = max(w1, key=lambda i: (ab_order(generator(pc, i)), -i))
    x_elem = generator(pc, best)
    a1, a2 = to_coords(list(x_elem))
    if e >= 2:
        assert a1 % 3 != 0, "distinguished element must hit the large factor"

    y_elem = None
    for t in w1:
        if t == best:
            continue
        b1, b2 = to_coords(list(generator(pc, t)))
        if (a1 * b2 - a2 * b1) % 3 != 0:
            k = 0
            if e >= 2:
                k = (b1 * pow(a1, -1, 3 ** (e - 1))) % (3 ** (e - 1))
            y_elem = mul(pc, generator(pc, t), elem_pow(pc, x_elem, -k))
            break
    assert y_elem is not None, "no complementary weight-1 generator"
    if d2 == pc.p:
        assert ab_order(y_elem) == pc.p
    return x_elem, y_elem, e, d2, to_coords


def maximal_layers(pc: PcPresentation, depth: int = 2) -> MaximalLayers:
    """The punctured quartet of maximal subgroups with its layers typed.

    depth 2 also types the thirteen (or four) index-3 subgroups of every
    maximal subgroup; that enumeration dominates the cost on larger groups,
    so callers that only need the quartet itself pass depth 1 and receive
    None in the layer2 slots.
    """
    x_elem, y_elem, e, d2, _ = distinguished_pair(pc)
    punctured = (e >= 2 and d2 == pc.p)
    pairs = [comm(pc, generator(pc, i), generator(pc, j))
             for i in range(pc.n) for j in range(i)]
    derived = normal_closure(pc, pairs)
    x3 = elem_pow(pc, x_elem, pc.p)
    fronts = [
        [x_elem],
        [mul(pc, x_elem, y_elem)],
        [mul(pc, x_elem, elem_pow(pc, y_elem, 2))],
        [y_elem, x3],
    ]
    layer1 = []
    for front in fronts:
        h = subgroup_closure(pc, front + list(derived.rows))
        assert h.index_exp == 1, "maximal subgroup has wrong index"
        layer1.append(h)
    assert len({h.rows for h in layer1}) == 4, "maximal subgroups collide"
    layer1_types = tuple(factor_type(pc, h) for h in layer1)
    layer2 = layer2_types = None
    if depth >= 2:
        layer2 = tuple(tuple(index_p_subgroups(pc, h)) for h in layer1)
        layer2_types = tuple(tuple(factor_type(pc, s) for s in subs)
                             for subs in layer2)
    return MaximalLayers(punctured, e, x_elem, y_elem, derived,
                         tuple(layer1), layer1_types, layer2, layer2_types)
