"""Automorphisms as image tuples: extension through definitions, composition,
layered inversion, and closure orders against the brute-force oracle."""

import random

import pytest

from conftest import abelian_93, elementary, heisenberg
from sigma3.automorphisms import (aut_inverse, aut_order_via_closure, compose,
                                  extend_by_definitions, gl3_base_autgroup,
                                  gl3_generator_matrices, gl3_order,
                                  identity_images, is_automorphism,
                                  preserves_relations)
from sigma3.collector import (apply_images, conjugate, elem_pow,
                              from_exponents, generator, identity, mul)
from sigma3.errors import FormatError
from sigma3.oracle import bruteforce_automorphisms
from sigma3.presentations import instantiate_family, make_pc


def lift_matrix(pc, m):
    """Extend a matrix on the weight-1 generators to an image tuple."""
    w1 = [i for i in range(pc.n) if pc.weights[i] == 1]
    imgs = {}
    for r, i in enumerate(w1):
        v = [0] * pc.n
        for c, j in enumerate(w1):
            v[j] = m[r][c]
        imgs[i] = from_exponents(pc, v)
    return extend_by_definitions(pc, imgs)


def conjugation(pc, g):
    return tuple(conjugate(pc, generator(pc, i), g) for i in range(pc.n))


def test_identity_images():
    for pc in (heisenberg(), instantiate_family("bifurcation", 2)):
        e = identity_images(pc)
        assert is_automorphism(pc, e)
        assert compose(pc, e, e) == e


def test_swap_on_heisenberg():
    pc = heisenberg()
    x, y, z = (generator(pc, i) for i in range(3))
    a = extend_by_definitions(pc, {0: y, 1: x})
    assert is_automorphism(pc, a)
    # z = [y, x] goes to [x, y] = z^-1
    assert a[2] == elem_pow(pc, z, 2)
    # the swap is an involution
    assert compose(pc, a, a) == identity_images(pc)


def test_non_bijective_endomorphism_rejected():
    pc = heisenberg()
    x = generator(pc, 0)
    a = extend_by_definitions(pc, {0: x, 1: x})
    # collapsing y onto x preserves every relation but kills the center
    assert preserves_relations(pc, a)
    assert not is_automorphism(pc, a)


def test_missing_definition_raises():
    pc = make_pc(3, {
        "gens": [("x", 1, None), ("y", 1, None), ("x2", 2, None)],
        "pow": {"x": [("x2", 1)]},
        "comm": {},
    })
    with pytest.raises(FormatError):
        extend_by_definitions(pc, {0: generator(pc, 0), 1: generator(pc, 1)})


def test_conjugation_and_inverse_roundtrip():
    pc = instantiate_family("bifurcation", 2)
    rng = random.Random(19)
    e = identity_images(pc)
    assert aut_inverse(pc, e) == e
    for _ in range(4):
        g = from_exponents(pc, [rng.randrange(3) for _ in range(pc.n)])
        a = conjugation(pc, g)
        assert is_automorphism(pc, a)
        b = aut_inverse(pc, a)
        assert compose(pc, a, b) == e
        assert compose(pc, b, a) == e


def test_compose_is_associative_and_pointwise():
    pc = instantiate_family("bifurcation", 2)
    rng = random.Random(23)
    auts = [conjugation(pc, from_exponents(pc, [rng.randrange(3) for _ in range(pc.n)]))
            for _ in range(3)]
    a, b, c = auts
    assert compose(pc, a, compose(pc, b, c)) == compose(pc, compose(pc, a, b), c)
    for _ in range(10):
        v = from_exponents(pc, [rng.randrange(3) for _ in range(pc.n)])
        assert apply_images(pc, compose(pc, a, b), v) == \
            apply_images(pc, a, apply_images(pc, b, v))


def test_inverse_of_matrix_lift():
    pc = heisenberg()
    a = lift_matrix(pc, [[1, 1], [0, 1]])
    assert is_automorphism(pc, a)
    b = aut_inverse(pc, a)
    assert compose(pc, a, b) == identity_images(pc)


def test_heisenberg_automorphism_group_order():
    # |Aut| = |GL(2,3)| * |Inn| = 48 * 9 for the exponent-3 extraspecial group
    pc = heisenberg()
    assert bruteforce_automorphisms(pc) == 432
    gens = [lift_matrix(pc, m) for m in gl3_generator_matrices(2)]
    gens.append(conjugation(pc, generator(pc, 0)))
    gens.append(conjugation(pc, generator(pc, 1)))
    assert aut_order_via_closure(pc, gens) == 432


def test_aut_of_rank_two_elementary_is_48():
    pc = elementary(2)
    ag = gl3_base_autgroup(pc)
    assert ag.complete and ag.order == 48 == gl3_order(2)
    for g in ag.gens:
        assert is_automorphism(pc, g)
    assert aut_order_via_closure(pc, ag.gens) == 48
    assert bruteforce_automorphisms(pc) == 48


def test_gl3_orders():
    assert gl3_order(1) == 2
    assert gl3_order(2) == 48
    assert gl3_order(3) == 11232
    pc = elementary(1)
    ag = gl3_base_autgroup(pc)
    assert aut_order_via_closure(pc, ag.gens) == 2


def test_abelian_93_brute_count():
    # Aut(C9 x C3): order 108
    pc = abelian_93()
    count = bruteforce_automorphisms(pc)
    assert count == 108
    hits = bruteforce_automorphisms(pc, count_only=False)
    assert len(hits) == count
    for imgs in hits[:6]:
        assert is_automorphism(pc, imgs)
