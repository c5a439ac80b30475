"""Descendant trees of finite 3-groups.

The covering group of a group G of p-class c compresses every one-step
extension: the groups of p-class c + 1 whose class-c quotient is G are
exactly the quotients of the cover by subgroups U of the multiplicator M
that fill it together with the nucleus N.  Isomorphic children correspond
to orbits of such subgroups under the automorphism action, so descendants
are enumerated orbitwise, each child carrying its own automorphism group
down from the parent, and the construction iterates into a rooted tree.

Tree coordinates <order,index>-#s;k name a root and a hop sequence (step
size s, child number k).  A small registry realizes the named roots used
on the command line; their identities were pinned by invariant
fingerprints, so the registry never depends on reproducing the child
numbering of any external catalogue, and indices in walked path segments
refer to this package's own deterministic numbering.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass

import numpy as np

from . import gf3
from .artin import kappa
from .automorphisms import AutGroup, gl3_base_autgroup
from .errors import FormatError, ResourceCapError
from .presentations import PcPresentation, family_fp, instantiate_family
from .quotients import (CoverData, action_pairs, cover_quotient, descend_auts,
                        p_cover, p_parent, p_quotient, standardize,
                        subspace_stabilizer)
from .structure import abelian_quotient_type, maximal_layers

__all__ = [
    "Child", "DescendantReport", "Fingerprint", "TreePath",
    "allowable_count", "allowable_subgroups", "fingerprint",
    "format_tree_path", "immediate_descendants", "lift_child_auts",
    "parse_tree_path", "registry_aliases", "resolve_path",
]


# ---------------------------------------------------------------------------
# Allowable subgroups of the multiplicator


def allowable_count(m: int, nu: int, s: int) -> int:
    """Number of codimension-s subgroups U <= M with U + N = M."""
    return gf3.gaussian_binomial(nu, s) * 3 ** (s * (m - nu))


def allowable_subgroups(cov: CoverData, s: int):
    """Iterate canonical keys of the allowable subgroups for step size s.

    U is allowable when it has codimension s in the multiplicator and fills
    it together with the nucleus; the quotient of the cover by U is then one
    class deeper and its parent quotient is the core again.  Such U is
    determined by W = U cap N, a subgroup of codimension s in the nucleus,
    together with a lift of M/N into M taken modulo a complement of W, so
    the enumeration emits exactly [nu choose s]_3 * 3^(s*(m - nu)) keys with
    no rejection filtering.
    """
    m = cov.multiplicator_rank
    nu = cov.nuclear_rank
    if not 1 <= s <= nu:
        raise ValueError(f"step size {s} outside 1..{nu}")
    n_mat, n_piv = gf3.rref(gf3.mat(cov.nucleus_tail_rows(), cols=m))
    assert len(n_piv) == nu
    lifts = [j for j in range(m) if j not in set(n_piv)]
    wide = n_mat.astype(np.int16)
    for w_key in gf3.subspaces(nu, nu - s):
        w_co = gf3.key_to_rows(w_key, nu)
        if w_co.size:
            w_rows = [tuple(int(x) for x in r)
                      for r in (w_co.astype(np.int16) @ wide) % 3]
            w_piv = {int(np.argmax(r != 0)) for r in w_co}
        else:
            w_rows = []
            w_piv = set()
        comp = [t for t in range(nu) if t not in w_piv]
        assert len(comp) == s
        for coeffs in itertools.product(range(3), repeat=s * len(lifts)):
            rows = list(w_rows)
            flat = iter(coeffs)
            for j in lifts:
                v = np.zeros(m, dtype=np.int16)
                v[j] = 1
                for t in comp:
                    c = next(flat)
                    if c:
                        v = (v + c * wide[t]) % 3
                rows.append(tuple(int(x) for x in v))
            yield gf3.subspace_key(gf3.mat(rows, cols=m), m)


def _orbit_partition(keys, mats, width: int):
    """Orbits of the subgroup action on a closed key set.

    Returns (least member, size) per orbit; the action matrices must map
    the key set into itself, which holds for lifted automorphisms because
    the nucleus is invariant.
    """
    index = set(keys)
    seen = set()
    orbits = []
    for start in keys:
        if start in seen:
            continue
        members = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for key in frontier:
                base = gf3.key_to_rows(key, width).astype(np.int16)
                for mt in mats:
                    moved = (base @ mt) % 3 if base.size else base
                    dest = gf3.subspace_key(moved.astype(np.int8), width)
                    if dest not in members:
                        assert dest in index, "action left the allowable set"
                        members.add(dest)
                        nxt.append(dest)
            frontier = nxt
        seen |= members
        orbits.append((min(members), len(members)))
    return orbits


# ---------------------------------------------------------------------------
# Immediate descendants


@dataclass
class Child:
    """One isomorphism class of immediate descendants.

    key is the least allowable-subgroup key in the class's orbit; children
    are numbered by it, so the ordering is reproducible run to run.  nu is
    the child's own nuclear rank when it was requested, None otherwise.
    """

    pc: PcPresentation
    auts: AutGroup | None
    orbit_size: int
    key: tuple
    nu: int | None = None

    @property
    def capable(self) -> bool | None:
        return None if self.nu is None else self.nu > 0


@dataclass(frozen=True)
class DescendantReport:
    """Immediate descendants of one vertex at one step size.

    total counts isomorphism classes, capable those with descendants of
    their own (None when nuclear ranks were not computed), and allowable
    the subgroups that the orbits partition, so the orbit sizes of the
    children sum to it.
    """

    step: int
    total: int
    capable: int | None
    allowable: int
    children: tuple

    def __post_init__(self):
        assert sum(c.orbit_size for c in self.children) == self.allowable
        if self.capable is not None:
            assert self.capable <= self.total


def immediate_descendants(pc: PcPresentation, auts: AutGroup, s: int, *,
                          with_nu: bool = True, verify: bool = True,
                          lift_auts: bool = True,
                          allowable_cap: int = 2_000_000,
                          orbit_cap: int = 200_000) -> DescendantReport:
    """Isomorphism classes of descendants with |child| = |G| * 3^s.

    auts must generate the full automorphism group for the classes to be
    exact; an incomplete generating set still covers every class but may
    split orbits.  Raises ValueError when s exceeds the nuclear rank (a
    terminal group has no descendants at all) and ResourceCapError when the
    allowable subgroups outnumber allowable_cap.  With verify on, each
    child's lifted automorphisms are checked against its relations and its
    parent quotient is checked to reproduce the input table.  Callers that
    only inspect the children's invariants can pass lift_auts=False to skip
    the per-orbit stabilizer and descent work; the children then carry
    auts=None and cannot seed further descents.
    """
    cov = p_cover(pc)
    m, nu = cov.multiplicator_rank, cov.nuclear_rank
    if s < 1 or s > nu:
        raise ValueError(
            f"no descendants at step size {s}: nuclear rank is {nu}")
    count = allowable_count(m, nu, s)
    if count > allowable_cap:
        raise ResourceCapError(
            f"{count} allowable subgroups exceed the cap of {allowable_cap}")
    keys = list(allowable_subgroups(cov, s))
    assert len(set(keys)) == count, "allowable enumeration miscounted"
    pairs = action_pairs(cov, auts)
    mats = [mt.astype(np.int16) for _, mt in pairs]
    orbits = sorted(_orbit_partition(keys, mats, m))
    children = []
    for rep, size in orbits:
        u_rows = [tuple(int(x) for x in row) for row in rep]
        child, rewrite = cover_quotient(cov.cover, pc.n, u_rows)
        kid_auts = None
        if lift_auts:
            stab, orbit_len = subspace_stabilizer(
                pc, pairs, gf3.key_to_rows(rep, m), m, orbit_cap=orbit_cap)
            assert orbit_len == size, "orbit walks disagree"
            kid_auts = descend_auts(cov, child, rewrite, stab,
                                    complete=auts.complete, verify=verify)
        if verify:
            assert _parent_tables_match(child, pc), \
                "child's parent quotient drifted from the input"
        kid_nu = p_cover(child).nuclear_rank if with_nu else None
        children.append(Child(child, kid_auts, size, rep, kid_nu))
    cap = None
    if with_nu:
        cap = sum(1 for c in children if c.nu)
    return DescendantReport(s, len(children), cap, count, tuple(children))


def _parent_tables_match(child: PcPresentation, pc: PcPresentation) -> bool:
    q = p_parent(child).pc
    return (q.n == pc.n and q.weights == pc.weights and q.power == pc.power
            and q.comm == pc.comm and q.definitions == pc.definitions)


def lift_child_auts(pc: PcPresentation, auts: AutGroup, child: Child, *,
                    verify: bool = True, orbit_cap: int = 200_000) -> Child:
    """The same child with its automorphism group filled in.

    Recovers what lift_auts=True would have produced for one chosen child of
    a report generated without lifting, so bulk enumerations can stay cheap
    and only the classes actually continued pay for the stabilizer walk.
    """
    if child.auts is not None:
        return child
    cov = p_cover(pc)
    m = cov.multiplicator_rank
    u_rows = [tuple(int(x) for x in row) for row in child.key]
    rebuilt, rewrite = cover_quotient(cov.cover, pc.n, u_rows)
    assert (rebuilt.power, rebuilt.comm) == (child.pc.power, child.pc.comm), \
        "rebuilt child drifted from the reported one"
    pairs = action_pairs(cov, auts)
    stab, orbit_len = subspace_stabilizer(
        pc, pairs, gf3.key_to_rows(child.key, m), m, orbit_cap=orbit_cap)
    assert orbit_len == child.orbit_size, "orbit walks disagree"
    kid_auts = descend_auts(cov, rebuilt, rewrite, stab,
                            complete=auts.complete, verify=verify)
    return Child(child.pc, kid_auts, child.orbit_size, child.key, child.nu)


# ---------------------------------------------------------------------------
# Vertex fingerprints


@dataclass(frozen=True)
class Fingerprint:
    """Isomorphism-invariant summary for locating tree vertices by content.

    kappa is the canonical kernel quartet (None when the commutator
    quotient has the wrong shape for one) and alpha1 the first-layer types,
    the three unpunctured ones sorted; nu is the nuclear rank.
    """

    lo: int
    ab: tuple
    kappa: str | None
    alpha1: tuple
    nu: int


def fingerprint(pc: PcPresentation, *, nu: int | None = None) -> Fingerprint:
    if nu is None:
        nu = p_cover(pc).nuclear_rank
    try:
        kap = kappa(pc).canonicalize().render()
        layers = maximal_layers(pc, 1)
        types = [t.render() for t in layers.layer1_types]
        a1 = tuple(sorted(types[:3])) + (types[3],)
    except ValueError:
        kap = None
        a1 = ()
    return Fingerprint(pc.n, abelian_quotient_type(pc).logs, kap, a1, nu)


# ---------------------------------------------------------------------------
# Tree coordinates


@dataclass(frozen=True)
class TreePath:
    """A root label <order,index> and a sequence of (step, child) hops."""

    root: tuple
    steps: tuple = ()

    def __str__(self) -> str:
        return format_tree_path(self)


_ROOT_RE = re.compile(r"[⟨<](\d+),(\d+)[⟩>]")
_STEP_RE = re.compile(r"[-−]#(\d+);(\d+)")
_REPEAT_RE = re.compile(r"\[[-−]#(\d+);(\d+)\]\^(?:\{(\d+)\}|(\d+))")


def parse_tree_path(text: str) -> TreePath:
    """Parse <order,index>(-#s;k)* coordinates.

    Both bracket styles and both dash characters are accepted, as is the
    repetition shorthand [-#s;k]^m with a plain or braced count.
    """
    flat = "".join(text.split())
    head = _ROOT_RE.match(flat)
    if not head:
        raise FormatError(f"tree path must open with <order,index>: {text!r}")
    root = (int(head.group(1)), int(head.group(2)))
    steps = []
    pos = head.end()
    while pos < len(flat):
        rep = _REPEAT_RE.match(flat, pos)
        if rep:
            times = int(rep.group(3) or rep.group(4))
            steps.extend([(int(rep.group(1)), int(rep.group(2)))] * times)
            pos = rep.end()
            continue
        hop = _STEP_RE.match(flat, pos)
        if hop:
            steps.append((int(hop.group(1)), int(hop.group(2))))
            pos = hop.end()
            continue
        raise FormatError(f"unrecognized tree path syntax at {flat[pos:]!r}")
    if root[0] < 2 or root[1] < 1:
        raise FormatError(f"implausible root label {root}")
    if any(s < 1 or k < 1 for s, k in steps):
        raise FormatError("step sizes and child numbers start at 1")
    return TreePath(root, tuple(steps))


def format_tree_path(path: TreePath) -> str:
    """Canonical rendering: unicode brackets, ASCII dashes, hops expanded."""
    return (f"⟨{path.root[0]},{path.root[1]}⟩"
            + "".join(f"-#{s};{k}" for s, k in path.steps))


# ---------------------------------------------------------------------------
# The root registry


def _elementary_rank2():
    pc = PcPresentation(
        p=3, names=("x", "y"), weights=(1, 1), definitions=(None, None),
        power=(None, None), comm=((), (None,)))
    return pc, gl3_base_autgroup(pc)


def _quotient_vertex(family: str, e: int, bound: int):
    res = p_quotient(family_fp(family, e), 3, class_bound=bound,
                     carry_auts=True)
    assert res.auts is not None and res.auts.complete
    return res.pc, res.auts


def _family_vertex(family: str, e: int):
    res = standardize(instantiate_family(family, e), carry_auts=True)
    assert res.auts is not None and res.auts.complete
    return res.pc, res.auts


_REGISTRY = {
    "⟨9,2⟩": _elementary_rank2,
    "⟨81,3⟩": lambda: _quotient_vertex("bifurcation", 4, 2),
    "⟨2187,3⟩": lambda: _quotient_vertex("bifurcation", 4, 3),
    "⟨729,10⟩": lambda: _quotient_vertex("bifurcation", 2, 3),
    "⟨6561,165⟩": lambda: _family_vertex("bifurcation", 2),
    "⟨729,10⟩-#2;2": lambda: _family_vertex("bifurcation", 2),
    "⟨2187,3⟩-#2;10": lambda: _family_vertex("bifurcation", 3),
    "⟨2187,3⟩-#3;2": lambda: _family_vertex("bifurcation", 4),
}


def registry_aliases() -> tuple:
    """The tree coordinates the registry can realize directly."""
    return tuple(_REGISTRY)


@functools.lru_cache(maxsize=None)
def _registry_vertex(key: str):
    return _REGISTRY[key]()


def resolve_path(path) -> tuple:
    """Realize a tree coordinate as (pc, auts) with complete automorphisms.

    The longest alias prefix known to the registry seeds the walk; any
    remaining hops are taken with this package's own child numbering, which
    is deterministic but not that of other systems.
    """
    if isinstance(path, str):
        path = parse_tree_path(path)
    for j in range(len(path.steps), -1, -1):
        key = format_tree_path(TreePath(path.root, path.steps[:j]))
        if key not in _REGISTRY:
            continue
        pc, auts = _registry_vertex(key)
        for s, k in path.steps[j:]:
            report = immediate_descendants(pc, auts, s, with_nu=False)
            if k > report.total:
                raise ValueError(
                    f"child number {k} exceeds the {report.total} classes "
                    f"at step size {s} below {key}")
            child = report.children[k - 1]
            pc, auts = child.pc, child.auts
            key = f"{key}-#{s};{k}"
        return pc, auts
    raise ValueError(
        f"unknown root {format_tree_path(TreePath(path.root))!r}; the "
        f"registry knows {', '.join(sorted(_REGISTRY))}")
