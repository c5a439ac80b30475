"""p-covering groups and the p-quotient algorithm.

The covering group of a consistent pc presentation is built the classical
way: a new central generator (a tail) is appended to every relation that is
not a definition, the overlap conditions of the enlarged table are evaluated,
and the resulting linear conditions over GF(p) on the tails are echelonized
and substituted away. What survives is the p-covering group; its new top
layer is the p-multiplicator, the quotient of the covering group one step
beyond the p-class of the input is the nucleus.

The p-quotient algorithm iterates this construction against an fp-group:
evaluate the relators in the covering group of the class-c quotient, quotient
by the subspace of the multiplicator they span, and repeat until the relators
exhaust the multiplicator. Automorphisms are carried up the tower on request:
every automorphism of the quotient lifts through the covering group, and the
kernel of restriction is spanned by central twists of the new layer, so a
generating set stays a generating set step by step.

All tail bookkeeping is deterministic: tails are laid out in relation order
(powers first, then commutators row by row), conditions are echelonized with
first-nonzero pivoting, and surviving generators are renamed by their final
position. Two runs on the same input produce identical tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf3
from .automorphisms import (
    AutGroup,
    Images,
    assert_automorphism,
    aut_inverse,
    compose,
    extend_by_definitions,
    gl3_base_autgroup,
    is_automorphism,
)
from .collector import (
    check_consistency,
    evaluate_word,
    generator,
    mul,
)
from .errors import ConsistencyError, ResourceCapError
from .presentations import FpPresentation, PcPresentation
from .structure import QuotientData, quotient_pc, series

DEFAULT_CLASS_CAP = 24


# ---------------------------------------------------------------------------
# The extended table: one tail per non-definition relation


def _extended(pc: PcPresentation):
    """Append one central elementary tail to every non-definition relation.

    Returns the enlarged presentation together with the list of relation tags
    ('p', i) / ('c', j, i) the tails are attached to, in tail order. The tag
    doubles as the definition of the tail, which keeps the enlarged table
    extendable by definitions.
    """
    n = pc.n
    top = max(pc.weights) + 1 if n else 1
    defined_pow = set()
    defined_comm = set()
    for d in pc.definitions:
        if d is None:
            continue
        if d[0] == "p":
            defined_pow.add(d[1])
        else:
            defined_comm.add((d[1], d[2]))
    tags = [("p", i) for i in range(n) if i not in defined_pow]
    tags += [("c", j, i) for j in range(n) for i in range(j)
             if (j, i) not in defined_comm]
    m = len(tags)
    total = n + m
    slot = {tag: n + k for k, tag in enumerate(tags)}

    def widen(row, tag):
        out = list(row) + [0] * m if row is not None else [0] * total
        t = slot.get(tag)
        if t is not None:
            out[t] = 1
        return tuple(out) if any(out) else None

    power = [widen(pc.power[i], ("p", i)) for i in range(n)] + [None] * m
    comm = []
    for j in range(total):
        if j < n:
            comm.append(tuple(widen(pc.comm[j][i], ("c", j, i)) for i in range(j)))
        else:
            comm.append((None,) * j)
    names = pc.names + tuple(_fresh_name(pc.names, n + k) for k in range(m))
    ext = PcPresentation(
        p=pc.p,
        names=names,
        weights=pc.weights + (top,) * m,
        definitions=pc.definitions + tuple(tags),
        power=tuple(power),
        comm=tuple(comm),
    )
    return ext, tags


def _fresh_name(taken, pos: int) -> str:
    name = f"g{pos + 1}"
    while name in taken:
        name += "_"
    return name


def _overlap_rows(ext: PcPresentation, core_n: int):
    """Tail parts of the overlap mismatches, one GF(p) row per violation.

    The core parts of each violation must agree; if they do not, the input
    presentation was inconsistent to begin with.
    """
    rows = []
    for kind, idx, lhs, rhs in check_consistency(ext, top=core_n):
        if lhs[:core_n] != rhs[:core_n]:
            raise ConsistencyError(
                "input presentation is inconsistent",
                [(kind, idx, lhs[:core_n], rhs[:core_n])],
            )
        rows.append(tuple((a - b) % ext.p for a, b in zip(lhs[core_n:], rhs[core_n:])))
    return rows


def cover_quotient(ext: PcPresentation, core_n: int, kill_rows):
    """Quotient the tail block of an extended table by the span of kill_rows.

    Pivot tails are substituted by their expression in the surviving tails
    and dropped; survivors are renumbered and renamed by final position.
    Returns the new presentation and a function rewriting any exponent vector
    of the extended table into the quotient.
    """
    m = ext.n - core_n
    reduced, pivots = gf3.rref(gf3.mat(kill_rows, cols=m))
    pivot_set = set(pivots)
    survivors = [q for q in range(m) if q not in pivot_set]
    m2 = len(survivors)
    subst = {}
    for r, q in zip(reduced, pivots):
        subst[q] = tuple((-int(r[s])) % ext.p for s in survivors)

    def rewrite(vec):
        out = [vec[core_n + q] % ext.p for q in survivors]
        for q, srow in subst.items():
            c = vec[core_n + q] % ext.p
            if c:
                for k in range(m2):
                    out[k] = (out[k] + c * srow[k]) % ext.p
        return tuple(vec[:core_n]) + tuple(out)

    def convert(row):
        if row is None:
            return None
        new = rewrite(row)
        return new if any(new) else None

    names = list(ext.names[:core_n])
    for k in range(m2):
        names.append(_fresh_name(names, core_n + k))
    power = [convert(ext.power[i]) for i in range(core_n)] + [None] * m2
    comm = []
    for j in range(core_n + m2):
        if j < core_n:
            comm.append(tuple(convert(ext.comm[j][i]) for i in range(j)))
        else:
            comm.append((None,) * j)
    pc = PcPresentation(
        p=ext.p,
        names=tuple(names),
        weights=ext.weights[:core_n] + tuple(ext.weights[core_n + q] for q in survivors),
        definitions=ext.definitions[:core_n]
        + tuple(ext.definitions[core_n + q] for q in survivors),
        power=tuple(power),
        comm=tuple(comm),
    )
    for k, q in enumerate(survivors):
        tag = ext.definitions[core_n + q]
        row = pc.power[tag[1]] if tag[0] == "p" else pc.comm[tag[1]][tag[2]]
        idx = core_n + k
        assert row is not None and row[idx] == 1 and not any(row[idx + 1:]), \
            "surviving tail lost its defining relation"
    return pc, rewrite


# ---------------------------------------------------------------------------
# The covering group


@dataclass(frozen=True)
class CoverData:
    """The p-covering group of a consistent pc presentation.

    The multiplicator is the span of the last multiplicator_rank generators
    of the cover; it is central and elementary abelian by construction. The
    nucleus is its intersection with the term of the lower exponent-p central
    series of the cover one step beyond the p-class of the input, given as
    pure-tail exponent vectors of the cover. pclass records the p-class of
    the input, recomputed from the cover rather than read off the labels.
    """

    core: PcPresentation
    cover: PcPresentation
    multiplicator_rank: int
    nucleus: tuple
    pclass: int

    @property
    def nuclear_rank(self) -> int:
        return len(self.nucleus)

    @property
    def relation_rank(self) -> int:
        return self.multiplicator_rank

    @property
    def generator_rank(self) -> int:
        return sum(1 for w in self.core.weights if w == 1)

    @property
    def is_terminal(self) -> bool:
        return self.nuclear_rank == 0

    def nucleus_tail_rows(self):
        n = self.core.n
        return [row[n:] for row in self.nucleus]


def p_cover(pc: PcPresentation) -> CoverData:
    """Covering group, multiplicator rank, and nucleus of a consistent pc."""
    n = pc.n
    ext, _ = _extended(pc)
    cover, _ = cover_quotient(ext, n, _overlap_rows(ext, n))
    m = cover.n - n
    for q in range(n, cover.n):
        assert cover.power[q] is None and not any(
            row is not None for row in cover.comm[q]
        ), "multiplicator generator carries a nontrivial relation"
    pser = series(cover, "exponent_p_central")
    cls = next(
        k for k, grp in enumerate(pser.groups)
        if all(not any(r[:n]) for r in grp.rows)
    )
    nucleus = pser.groups[cls].rows if cls < len(pser.groups) else ()
    for r in nucleus:
        assert not any(r[:n]), "nucleus escaped the multiplicator"
    return CoverData(core=pc, cover=cover, multiplicator_rank=m,
                     nucleus=tuple(nucleus), pclass=cls)


# ---------------------------------------------------------------------------
# Lifting automorphisms through the cover


def aut_action_matrix(cov: CoverData, imgs: Images):
    """Lift an automorphism of the core to the cover; return its action on
    the multiplicator (rows = images of tails) and the lifted image tuple."""
    n = cov.core.n
    m = cov.multiplicator_rank
    pad = (0,) * m
    w1 = {i: tuple(imgs[i]) + pad for i in range(n) if cov.core.weights[i] == 1}
    star = extend_by_definitions(cov.cover, w1)
    rows = []
    for k in range(m):
        v = star[n + k]
        assert not any(v[:n]), "lifted automorphism moved the multiplicator"
        rows.append(v[n:])
    return gf3.mat(rows, cols=m), star


def action_pairs(cov: CoverData, auts: AutGroup):
    """(image tuple, multiplicator action matrix) for each generator."""
    return [(a, aut_action_matrix(cov, a)[0]) for a in auts.gens]


def subspace_stabilizer(pc: PcPresentation, pairs, rows, width: int,
                        *, orbit_cap: int = 200000):
    """Orbit-stabilizer for a row space under automorphism action.

    pairs are (image tuple, action matrix) for the acting generators; the
    matrices act on row vectors from the right. Returns the Schreier
    generators of the stabilizer of the row space of rows, again as
    (images, matrix) pairs, together with the orbit length. Transversal
    bookkeeping composes image tuples, so the returned generators really are
    automorphisms of pc fixing the subspace setwise.
    """
    ident = tuple(generator(pc, i) for i in range(pc.n))
    start = gf3.subspace_key(gf3.mat(rows, cols=width), width)
    eye = np.eye(width, dtype=np.int8)
    transversal = {start: (ident, eye)}
    inverses = {}
    frontier = [start]
    stab = {}

    def inverse_at(key):
        if key not in inverses:
            d_imgs, d_mat = transversal[key]
            inverses[key] = (aut_inverse(pc, d_imgs), _matrix_inverse(d_mat))
        return inverses[key]

    while frontier:
        nxt = []
        for key in frontier:
            t_imgs, t_mat = transversal[key]
            base = gf3.key_to_rows(key, width)
            for a_imgs, a_mat in pairs:
                moved = (base.astype(np.int16) @ a_mat.astype(np.int16)) % 3 \
                    if base.size else base
                dest = gf3.subspace_key(moved.astype(np.int8), width)
                if dest not in transversal:
                    transversal[dest] = (
                        compose(pc, a_imgs, t_imgs),
                        (t_mat.astype(np.int16) @ a_mat.astype(np.int16) % 3).astype(np.int8),
                    )
                    nxt.append(dest)
                    if len(transversal) > orbit_cap:
                        raise ResourceCapError("subspace orbit exceeded cap")
                else:
                    d_inv_imgs, d_inv_mat = inverse_at(dest)
                    s = compose(pc, d_inv_imgs, compose(pc, a_imgs, t_imgs))
                    if s != ident and s not in stab:
                        s_mat = (t_mat.astype(np.int16) @ a_mat.astype(np.int16)
                                 @ d_inv_mat.astype(np.int16)) % 3
                        stab[s] = s_mat.astype(np.int8)
        frontier = nxt
    if len(transversal) == 1:
        return list(pairs), 1
    return [(imgs, m) for imgs, m in stab.items()], len(transversal)


def _matrix_inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n, dtype=np.int8)]).astype(np.int8)
    r, piv = gf3.rref(aug)
    assert piv == list(range(n)), "action matrix is singular"
    return r[:, n:]


def descend_auts(cov: CoverData, child: PcPresentation, rewrite,
                 pairs, *, complete: bool, verify: bool = True) -> AutGroup:
    """Carry automorphisms of the core down to the quotient cover/U.

    Every pair must already stabilize U (run subspace_stabilizer first); the
    kernel of the restriction map Aut(child) -> Aut(core) is spanned by the
    central twists of the new top layer, so stabilizer generators plus twists
    generate Aut(child) in full whenever the input generated Aut(core).
    """
    n = cov.core.n
    m = cov.multiplicator_rank
    m2 = child.n - n
    pad = (0,) * m
    w1_idx = [i for i in range(n) if cov.core.weights[i] == 1]
    ident = tuple(generator(child, i) for i in range(child.n))
    seen = {ident}
    gens = []

    def keep(imgs):
        if imgs not in seen:
            seen.add(imgs)
            if verify:
                assert is_automorphism(child, imgs)
            gens.append(imgs)

    for a_imgs, _ in pairs:
        w1 = {i: rewrite(tuple(a_imgs[i]) + pad) for i in w1_idx}
        keep(extend_by_definitions(child, w1))
    for i in w1_idx:
        for q in range(m2):
            w1 = {s: ident[s] for s in w1_idx}
            w1[i] = mul(child, ident[i], ident[n + q])
            keep(extend_by_definitions(child, w1))
    return AutGroup(child, tuple(gens), complete=complete, order=None)


# ---------------------------------------------------------------------------
# The p-quotient algorithm


@dataclass(frozen=True)
class PQResult:
    """Outcome of a p-quotient run.

    images are the images of the fp generators in pc, in generator order.
    stabilized reports whether the tower stopped of its own accord (the
    relators exhausted the multiplicator) rather than at class_bound or at
    the hard cap. auts generates Aut(pc) when automorphism carrying was
    requested and the fp input did not restrict it; None otherwise.
    """

    pc: PcPresentation
    images: tuple
    fp: FpPresentation
    reached_class: int
    stabilized: bool
    auts: AutGroup | None


def class1_quotient(fp: FpPresentation):
    """Largest elementary abelian quotient, with generator images."""
    ngen = len(fp.generators)
    col = {name: j for j, name in enumerate(fp.generators)}
    rows = []
    for w in fp.relators:
        v = [0] * ngen
        for name, e in w.factors:
            v[col[name]] += e
        rows.append([x % 3 for x in v])
    reduced, pivots = gf3.rref(gf3.mat(rows, cols=ngen))
    free = [j for j in range(ngen) if j not in set(pivots)]
    d = len(free)
    slot = {j: k for k, j in enumerate(free)}
    pc = PcPresentation(
        p=3,
        names=tuple(fp.generators[j] for j in free),
        weights=(1,) * d,
        definitions=(None,) * d,
        power=(None,) * d,
        comm=tuple((None,) * j for j in range(d)),
    )
    images = []
    for j in range(ngen):
        if j in slot:
            images.append(tuple(1 if k == slot[j] else 0 for k in range(d)))
        else:
            r = reduced[pivots.index(j)]
            images.append(tuple((-int(r[q])) % 3 for q in free))
    return pc, tuple(images)


def _image_corrections(fp: FpPresentation, values: np.ndarray) -> np.ndarray:
    """Central corrections to the generator images, one row per fp generator.

    The image of a generator in the next quotient is only determined up to a
    multiplicator element m_j, and a relator w then evaluates to its value at
    the old images times prod m_j^(exponent sum of x_j in w). Reducing the
    value matrix by the column space of the exponent-sum matrix therefore
    yields the smallest achievable span, and the reducing coefficients are
    the corrections. With a minimal generating set every exponent sum is 0
    mod p and this is a no-op; redundant generators (a pc presentation fed
    back through its own relations, say) need it to pin their images to the
    relations instead of collapsing the tower early.
    """
    ngen = len(fp.generators)
    col = {name: j for j, name in enumerate(fp.generators)}
    esum = []
    for w in fp.relators:
        row = [0] * ngen
        for name, e in w.factors:
            row[col[name]] += e
        esum.append([x % 3 for x in row])
    e = gf3.mat(esum, cols=ngen)
    m = values.shape[1]
    corrections = np.zeros((ngen, m), dtype=np.int8)
    if not e.any() or not values.any():
        return corrections
    basis, piv = gf3.rref(e.T)
    for t in range(m):
        v = values[:, t].astype(np.int16)
        for i, pcol in enumerate(piv):
            c = v[pcol] % 3
            if c:
                v = (v - c * basis[i].astype(np.int16)) % 3
        landed = (values[:, t].astype(np.int16) - v) % 3
        a = gf3.solve(e.T, landed.astype(np.int8))
        assert a is not None, "column reduction left the column space"
        values[:, t] = v.astype(np.int8)
        corrections[:, t] = (-a.astype(np.int16)) % 3
    return corrections


def pq_step(pc: PcPresentation, images, fp: FpPresentation,
            auts: AutGroup | None):
    """One class-raising step. Returns (child, images, auts), or None when
    the relators already exhaust the multiplicator (the tower stabilized)."""
    cov = p_cover(pc)
    m = cov.multiplicator_rank
    if m == 0:
        return None
    pad = (0,) * m
    bound = {name: img + pad for name, img in zip(fp.generators, images)}
    rows = []
    for w in fp.relators:
        v = evaluate_word(cov.cover, w, bound)
        assert not any(v[:pc.n]), "relator image escaped the multiplicator"
        rows.append(v[pc.n:])
    values = gf3.mat(rows, cols=m)
    corrections = _image_corrections(fp, values)
    u, _ = gf3.rref(values)
    if len(u) == m:
        return None
    stacked = np.vstack([u, gf3.mat(cov.nucleus_tail_rows(), cols=m)])
    assert gf3.rank(stacked) == m, \
        "relator span plus nucleus fails to fill the multiplicator"
    u_rows = [tuple(map(int, r)) for r in u]
    child, rewrite = cover_quotient(cov.cover, pc.n, u_rows)
    child_images = tuple(
        rewrite(images[j] + tuple(int(x) for x in corrections[j]))
        for j in range(len(fp.generators))
    )
    child_auts = None
    if auts is not None:
        pairs = action_pairs(cov, auts)
        stab, _ = subspace_stabilizer(pc, pairs, u_rows, m)
        child_auts = descend_auts(cov, child, rewrite, stab,
                                  complete=auts.complete, verify=False)
    return child, child_images, child_auts


def p_quotient(fp: FpPresentation, p: int = 3, class_bound: int | None = None,
               *, carry_auts: bool = False,
               class_cap: int = DEFAULT_CLASS_CAP) -> PQResult:
    """pc presentation of the largest quotient of the fp-group whose exponent-p
    class is at most class_bound (None: iterate until the tower stabilizes).

    The result is consistent by construction and its weights realize the
    lower exponent-p central series. If the tower neither stabilizes nor hits
    class_bound before the hard class_cap, the partial result is returned
    with stabilized=False.
    """
    if p != 3:
        raise ValueError("only p = 3 is supported")
    if class_bound is not None and class_bound < 1:
        raise ValueError("class_bound must be at least 1")
    pc, images = class1_quotient(fp)
    auts = gl3_base_autgroup(pc) if carry_auts else None
    cls = 1
    stabilized = False
    while True:
        if class_bound is not None and cls >= class_bound:
            break
        if cls >= class_cap:
            break
        step = pq_step(pc, images, fp, auts)
        if step is None:
            stabilized = True
            break
        pc, images, auts = step
        cls += 1
    return PQResult(pc=pc, images=images, fp=fp, reached_class=cls,
                    stabilized=stabilized, auts=auts)


def standardize(pc: PcPresentation, *, carry_auts: bool = True,
                class_cap: int | None = None) -> PQResult:
    """Rebuild a pc group through the p-quotient of its own relations.

    The returned presentation generates the same group with weights realized
    honestly, and carries a generating set of its full automorphism group
    when carry_auts is set. The main use is seeding descendant computations
    from hand-built presentations.
    """
    fp = FpPresentation(pc.names, pc.relations_as_words())
    cap = class_cap if class_cap is not None else max(DEFAULT_CLASS_CAP, pc.pclass + 1)
    res = p_quotient(fp, 3, None, carry_auts=carry_auts, class_cap=cap)
    assert res.stabilized and res.pc.order_exp == pc.order_exp, \
        "standardization changed the group"
    if res.auts is not None:
        for a in res.auts.gens:
            assert_automorphism(res.pc, a)
    return res


def p_parent(pc: PcPresentation) -> QuotientData:
    """Quotient by the last nontrivial term of the lower exponent-p central
    series: the parent in the descendant tree."""
    pser = series(pc, "exponent_p_central")
    return quotient_pc(pc, pser.groups[-2])
