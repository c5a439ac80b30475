"""Automorphisms of pc groups as generator-image tuples.

An automorphism is stored as the tuple of images of all pc generators. Images
of generators of weight 2 and higher are always recomputed from the weight-1
images through the definition tags, which keeps every stored map consistent
with the presentation's structure and makes composition and inversion cheap.

Inversion solves layer by layer: an automorphism acts on each elementary
quotient P_{w-1}/P_w by an invertible GF(3) matrix, so a preimage is
assembled one weight at a time by linear solves. This also serves as the
bijectivity check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf3
from .collector import (apply_images, comm, elem_pow, generator, identity,
                        inv, mul)
from .errors import FormatError, ResourceCapError
from .presentations import PcPresentation

Images = tuple


@dataclass(eq=False)
class AutGroup:
    """A generating set for (a subgroup of) Aut(G).

    complete records whether the generators are known to generate the full
    automorphism group. order is filled in lazily for small groups via
    closure; None means not computed.
    """

    pc: PcPresentation
    gens: tuple[Images, ...]
    complete: bool = True
    order: int | None = None


def identity_images(pc: PcPresentation) -> Images:
    return tuple(generator(pc, i) for i in range(pc.n))


def extend_by_definitions(pc: PcPresentation, w1_images: dict) -> Images:
    """Extend images of the weight-1 generators to all generators.

    w1_images maps weight-1 generator indices to elements. Generators of
    higher weight must carry a definition tag whose defining relation has the
    defined generator as its last letter with exponent 1; both hold for every
    presentation this package constructs.
    """
    n = pc.n
    imgs: list = [None] * n
    for i in range(n):
        if pc.weights[i] == 1:
            imgs[i] = tuple(w1_images[i])
            continue
        d = pc.definitions[i]
        if d is None:
            raise FormatError(f"generator g{i + 1} has no definition")
        if d[0] == "p":
            j = d[1]
            row = pc.power[j]
            head = elem_pow(pc, imgs[j], pc.p)
        else:
            j, k = d[1], d[2]
            row = pc.comm[j][k]
            head = comm(pc, imgs[j], imgs[k])
        if row is None or row[i] != 1 or any(row[t] for t in range(i + 1, n)):
            raise FormatError(f"definition relation of g{i + 1} is not in defining shape")
        rest = list(row)
        rest[i] = 0
        w = apply_images(pc, imgs, rest)
        imgs[i] = mul(pc, inv(pc, w), head)
    return tuple(imgs)


def apply_aut(pc: PcPresentation, imgs: Images, elem) -> tuple:
    return apply_images(pc, imgs, elem)


def compose(pc: PcPresentation, a: Images, b: Images) -> Images:
    """(a o b)(g) = a(b(g))."""
    return tuple(apply_images(pc, a, bi) for bi in b)


def preserves_relations(pc: PcPresentation, imgs: Images) -> bool:
    n = pc.n
    zero = identity(pc)
    for i in range(n):
        want = zero if pc.power[i] is None else apply_images(pc, imgs, pc.power[i])
        if elem_pow(pc, imgs[i], pc.p) != want:
            return False
    for j in range(n):
        row = pc.comm[j]
        for i in range(j):
            want = zero if row[i] is None else apply_images(pc, imgs, row[i])
            if comm(pc, imgs[j], imgs[i]) != want:
                return False
    return True


def _layer_indices(pc: PcPresentation) -> dict:
    layers: dict[int, list[int]] = {}
    for i, w in enumerate(pc.weights):
        layers.setdefault(w, []).append(i)
    return layers


def _layer_matrices(pc: PcPresentation, imgs: Images) -> dict:
    """For each weight w, the matrix of the action on P_{w-1}/P_w.

    Row for generator j (of weight w) holds the weight-w coordinates of
    imgs[j]. Invertibility of every layer matrix is equivalent to
    bijectivity for a relation-preserving map.
    """
    layers = _layer_indices(pc)
    mats = {}
    for w, idxs in layers.items():
        rows = [[imgs[j][t] for t in idxs] for j in idxs]
        mats[w] = gf3.mat(rows)
    return mats


def is_automorphism(pc: PcPresentation, imgs: Images) -> bool:
    if not preserves_relations(pc, imgs):
        return False
    for w, m in _layer_matrices(pc, imgs).items():
        if gf3.rank(m) != m.shape[0]:
            return False
    return True


def assert_automorphism(pc: PcPresentation, imgs: Images) -> None:
    if not is_automorphism(pc, imgs):
        raise ValueError("image tuple is not an automorphism")


def aut_inverse(pc: PcPresentation, imgs: Images) -> Images:
    """Inverse automorphism via layered preimage solves."""
    layers = _layer_indices(pc)
    mats = _layer_matrices(pc, imgs)
    cmax = pc.pclass
    out = []
    for t in range(pc.n):
        target = generator(pc, t)
        x = identity(pc)
        for w in range(1, cmax + 1):
            val = apply_images(pc, imgs, x)
            r = mul(pc, inv(pc, val), target)
            idxs = layers.get(w, [])
            if not idxs:
                continue
            b = np.array([r[j] for j in idxs], dtype=np.int8)
            if not b.any():
                continue
            c = gf3.solve(mats[w], b)
            if c is None:
                raise ValueError("not an automorphism: layer solve failed")
            step = identity(pc)
            for j, cj in zip(idxs, c):
                if cj:
                    step = mul(pc, step, elem_pow(pc, generator(pc, j), int(cj)))
            x = mul(pc, x, step)
        if apply_images(pc, imgs, x) != target:
            raise ValueError("not an automorphism: preimage check failed")
        out.append(x)
    return tuple(out)


def aut_order_via_closure(pc: PcPresentation, gens, cap: int = 200000) -> int:
    """Order of the group generated by image tuples, by plain closure."""
    ident = identity_images(pc)
    seen = {ident}
    frontier = [ident]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = compose(pc, g, a)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if len(seen) > cap:
                        raise ResourceCapError("automorphism closure exceeded cap")
        frontier = nxt
    return len(seen)


# ---------------------------------------------------------------------------
# The base of the lifting tower: GL(d, 3) on an elementary group


def gl3_order(d: int) -> int:
    out = 1
    for i in range(d):
        out *= 3**d - 3**i
    return out


def gl3_generator_matrices(d: int) -> list[list[list[int]]]:
    """Generators of GL(d,3): n-cycle permutation, diag(-1,1,..), transvection."""
    if d == 1:
        return [[[2]]]
    cyc = [[1 if j == (i + 1) % d else 0 for j in range(d)] for i in range(d)]
    diag = [[(2 if i == 0 else 1) if i == j else 0 for j in range(d)] for i in range(d)]
    trans = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    trans[0][1] = 1
    return [cyc, diag, trans]


def gl3_base_autgroup(pc: PcPresentation) -> AutGroup:
    """Aut of an elementary abelian pc group (all weights 1, no relations)."""
    d = pc.n
    assert all(w == 1 for w in pc.weights)
    gens = []
    for m in gl3_generator_matrices(d):
        gens.append(tuple(tuple(row) for row in m))
    return AutGroup(pc, tuple(gens), complete=True, order=gl3_order(d))
