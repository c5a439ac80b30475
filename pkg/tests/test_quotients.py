"""Covering groups and the p-quotient tower.

Oracles: exhaustive consistency checks on the finished covers, explicit
epimorphism/kernel verification against the input group, brute-force
automorphism counts for the carried generating sets, and cross-route
equality between hand-built family presentations and the quotient tower
run on their own relators.
"""

import random

import pytest

from sigma3.automorphisms import aut_order_via_closure, is_automorphism
from sigma3.collector import (
    comm,
    elem_pow,
    evaluate_word,
    generator,
    identity,
    is_consistent,
    mul,
)
from sigma3.presentations import FpPresentation, Word, family_fp, instantiate_family
from sigma3.quotients import (
    class1_quotient,
    cover_quotient,
    p_cover,
    p_parent,
    p_quotient,
    standardize,
)
from sigma3.structure import abelian_quotient_type, classify, maximal_layers, series

from conftest import abelian_93, elementary, heisenberg


def drop_tails(elem, n):
    return elem[:n]


# ---------------------------------------------------------------------------
# Covers


def test_cover_of_rank_two_elementary():
    pc = elementary(2)
    cov = p_cover(pc)
    assert cov.generator_rank == 2
    assert cov.multiplicator_rank == 3
    assert cov.relation_rank == 3
    assert cov.cover.n == 5
    assert cov.pclass == 1
    # every tail survives: the enlarged table is already consistent,
    # independently confirmed over the full overlap set
    assert is_consistent(cov.cover)
    # the free-est class-2 object on two generators: exponent 9, derived
    # subgroup of order 3
    x = generator(cov.cover, 0)
    assert any(elem_pow(cov.cover, x, 3)), "x^3 must survive in the cover"
    assert not any(elem_pow(cov.cover, x, 9))
    # nothing above the class of the input is lost: nucleus is everything
    assert cov.nuclear_rank == 3


def test_cover_of_9_3():
    cov = p_cover(abelian_93())
    assert cov.generator_rank == 2
    assert cov.multiplicator_rank == 3
    assert cov.relation_rank == 3
    assert cov.pclass == 2
    assert cov.nuclear_rank == 1
    assert is_consistent(cov.cover)
    # d < r: the group cannot have a balanced presentation
    assert cov.generator_rank < cov.relation_rank


def test_cover_epimorphism_and_kernel():
    pc = abelian_93()
    cov = p_cover(pc)
    n, m = pc.n, cov.multiplicator_rank
    rng = random.Random(11)
    for _ in range(40):
        a = tuple(rng.randrange(3) for _ in range(cov.cover.n))
        b = tuple(rng.randrange(3) for _ in range(cov.cover.n))
        left = drop_tails(mul(cov.cover, a, b), n)
        right = mul(pc, drop_tails(a, n), drop_tails(b, n))
        assert left == right
    # kernel basis: the tails; each is central of order 3
    for k in range(m):
        t = generator(cov.cover, n + k)
        assert not any(elem_pow(cov.cover, t, 3))
        for i in range(cov.cover.n):
            assert comm(cov.cover, t, generator(cov.cover, i)) == identity(cov.cover)


def test_cover_of_chain_six_is_capable():
    cov = p_cover(instantiate_family("metabelian-chain", 6))
    assert cov.nuclear_rank >= 1
    assert not cov.is_terminal
    assert cov.generator_rank == 2


def test_nucleus_inside_multiplicator():
    for pc in (elementary(2), abelian_93(), heisenberg()):
        cov = p_cover(pc)
        for row in cov.nucleus:
            assert not any(row[:pc.n])
        assert 0 <= cov.nuclear_rank <= cov.multiplicator_rank


def test_generator_rank_matches_frattini_quotient():
    for pc in (elementary(3), abelian_93(), heisenberg(),
               instantiate_family("bifurcation", 2)):
        cov = p_cover(pc)
        assert cov.generator_rank == abelian_quotient_type(pc).rank


def test_cover_quotient_by_whole_multiplicator_restores_group():
    pc = elementary(2)
    cov = p_cover(pc)
    m = cov.multiplicator_rank
    kill = [tuple(1 if j == k else 0 for j in range(m)) for k in range(m)]
    child, rewrite = cover_quotient(cov.cover, pc.n, kill)
    assert child.n == pc.n
    assert child.names == pc.names
    assert child.power == pc.power
    assert child.comm == pc.comm
    assert rewrite((1, 2, 1, 1, 1)) == (1, 2)


def test_cover_quotient_map_is_homomorphism():
    pc = heisenberg()
    cov = p_cover(pc)
    m = cov.multiplicator_rank
    assert m >= 2
    kill = [tuple(1 if j == 0 else 0 for j in range(m))]
    child, rewrite = cover_quotient(cov.cover, pc.n, kill)
    assert is_consistent(child)
    rng = random.Random(13)
    for _ in range(40):
        a = tuple(rng.randrange(3) for _ in range(cov.cover.n))
        b = tuple(rng.randrange(3) for _ in range(cov.cover.n))
        assert rewrite(mul(cov.cover, a, b)) == mul(child, rewrite(a), rewrite(b))


# ---------------------------------------------------------------------------
# The p-quotient tower


def test_class_one_of_free_group():
    res = p_quotient(FpPresentation(("x", "y"), ()), 3, 1)
    assert res.pc.n == 2
    assert res.reached_class == 1
    assert res.pc.names == ("x", "y")
    assert abelian_quotient_type(res.pc).logs == (1, 1)
    assert res.images == ((1, 0), (0, 1))


def test_class_one_solves_redundant_generators():
    fp = FpPresentation(("x", "y"), (Word.gen("x") * Word.gen("y", -1),))
    pc, images = class1_quotient(fp)
    assert pc.n == 1
    assert images == ((1,), (1,))


def test_abelian_fp_stabilizes_at_9_3():
    fp = FpPresentation(
        ("x", "y"),
        (Word.gen("x", 9), Word.gen("y", 3),
         Word.gen("y").commutator(Word.gen("x"))),
    )
    res = p_quotient(fp)
    assert res.stabilized
    assert res.reached_class == 2
    assert res.pc.n == 3
    assert abelian_quotient_type(res.pc).logs == (2, 1)
    assert is_consistent(res.pc)
    # the epimorphism satisfies the relators
    bound = dict(zip(fp.generators, res.images))
    for w in fp.relators:
        assert evaluate_word(res.pc, w, bound) == identity(res.pc)


def test_redundant_generator_image_is_recomputed():
    hz = heisenberg()
    fp = FpPresentation(hz.names, hz.relations_as_words())
    res = p_quotient(fp)
    assert res.stabilized
    assert res.pc.n == 3
    assert res.reached_class == 2
    # the third fp generator was redundant; its image must equal the
    # commutator of the first two, not collapse to the identity
    x, y, z = res.images
    assert z == comm(res.pc, y, x)
    assert any(z)


def test_bifurcation_cross_route():
    direct = instantiate_family("bifurcation", 2)
    res = p_quotient(family_fp("bifurcation", 2), 3, 4)
    assert res.pc.order_exp == direct.order_exp == 8
    for pc in (res.pc, direct):
        assert is_consistent(pc)
    assert abelian_quotient_type(res.pc).logs == abelian_quotient_type(direct).logs
    ca, cb = classify(res.pc), classify(direct)
    assert (ca.cl, ca.sl, ca.pclass, ca.bcf) == (cb.cl, cb.sl, cb.pclass, cb.bcf)
    sa = series(res.pc, "lower_central")
    sb = series(direct, "lower_central")
    assert [f.logs for f in sa.factors] == [f.logs for f in sb.factors]
    assert maximal_layers(res.pc).rho == maximal_layers(direct).rho


def test_quotient_tower_idempotent():
    fp = family_fp("bifurcation", 2)
    direct = p_quotient(fp, 3, 3)
    deeper = p_quotient(fp, 3, 4)
    refed = p_quotient(
        FpPresentation(deeper.pc.names, deeper.pc.relations_as_words()), 3, 3)
    assert direct.pc.names == refed.pc.names
    assert direct.pc.weights == refed.pc.weights
    assert direct.pc.power == refed.pc.power
    assert direct.pc.comm == refed.pc.comm


def test_weights_realize_the_descending_filtration():
    res = p_quotient(family_fp("bifurcation", 2), 3, 4)
    pser = series(res.pc, "exponent_p_central")
    assert pser.length == 4
    for k in range(pser.length):
        depth_set = {i for i in range(res.pc.n) if res.pc.weights[i] > k}
        assert pser.groups[k].order_exp == len(depth_set)


def test_free_tower_hits_the_cap_with_flag():
    res = p_quotient(FpPresentation(("x", "y"), ()), 3, None, class_cap=3)
    assert not res.stabilized
    assert res.reached_class == 3
    assert res.pc.pclass == 3


def test_argument_validation():
    fp = FpPresentation(("x",), ())
    with pytest.raises(ValueError):
        p_quotient(fp, 2)
    with pytest.raises(ValueError):
        p_quotient(fp, 3, 0)


# ---------------------------------------------------------------------------
# Automorphism carrying


def test_standardize_carries_full_automorphism_group():
    res = standardize(heisenberg())
    assert res.stabilized and res.auts.complete
    assert aut_order_via_closure(res.pc, res.auts.gens) == 432
    res2 = standardize(abelian_93())
    assert aut_order_via_closure(res2.pc, res2.auts.gens) == 108
    res3 = standardize(elementary(2))
    assert aut_order_via_closure(res3.pc, res3.auts.gens) == 48


def test_carried_generators_are_automorphisms():
    res = p_quotient(family_fp("bifurcation", 2), 3, 3, carry_auts=True)
    assert res.auts is not None and res.auts.complete
    for a in res.auts.gens:
        assert is_automorphism(res.pc, a)


# ---------------------------------------------------------------------------
# Parents


def test_parent_of_heisenberg_is_elementary():
    q = p_parent(heisenberg())
    assert q.pc.n == 2
    assert all(w == 1 for w in q.pc.weights)


def test_parent_chain_of_bifurcation():
    pc = instantiate_family("bifurcation", 4)
    orders = [pc.order_exp]
    while pc.order_exp > 2:
        pc = p_parent(pc).pc
        orders.append(pc.order_exp)
    assert orders == [10, 7, 4, 2]
    assert all(r is None for r in pc.power)
