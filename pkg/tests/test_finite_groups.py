import itertools
import random
from fractions import Fraction

import pytest

from heckelab import linalg
from heckelab.finite_groups import (
    FinGroup,
    HeckeFunc,
    InducedRep,
    Rep,
    Subgroup,
    convolve,
    decompose_two,
    double_cosets,
    hecke_end_transport,
    hecke_func_from_end,
    induce,
    intertwiner_space,
    normalized_generator,
    q_parameter,
)
from heckelab.scalars import NotInTowerError, ScalarContext, default_coeffplus_rule, scalar_sqrt

F = Fraction
RULE = default_coeffplus_rule()


def s4_s3():
    s4 = FinGroup.symmetric(4)
    fix_last = [i for i, p in enumerate(s4.labels) if p[3] == 3]
    return s4, Subgroup(s4, tuple(fix_last))


def gl2_with_borel(q):
    g = FinGroup.gl2(q)
    borel = [i for i, m in enumerate(g.labels) if m[2] == 0]
    return g, Subgroup(g, tuple(borel))


def test_group_constructors():
    assert FinGroup.cyclic(5).n == 5
    assert FinGroup.dihedral(4).n == 8
    assert FinGroup.symmetric(4).n == 24
    assert FinGroup.symmetric(6).n == 720
    assert FinGroup.gl2(2).n == 6
    assert FinGroup.gl2(3).n == 48
    assert FinGroup.gl2(4).n == 180
    assert FinGroup.gl2(5).n == 480
    assert FinGroup.sl2(3).n == 24
    assert FinGroup.direct_product(FinGroup.cyclic(2), FinGroup.cyclic(3)).n == 6


def test_bad_table_rejected():
    with pytest.raises(ValueError):
        FinGroup.from_table([[0, 1], [1, 1]])


def test_subgroup_from_generators():
    s4 = FinGroup.symmetric(4)
    transposition = s4.labels.index((1, 0, 2, 3))
    cycle = s4.labels.index((1, 2, 3, 0))
    assert s4.subgroup([transposition, cycle]).order == 24
    assert s4.subgroup([transposition]).order == 2
    with pytest.raises(ValueError):
        Subgroup(s4, (0, transposition, cycle))


def test_double_cosets():
    s4, s3 = s4_s3()
    assert len(double_cosets(s4, s3, s3)) == 2
    full = s4.all_elements_subgroup()
    assert len(double_cosets(s4, full, full)) == 1
    g2, b2 = gl2_with_borel(2)
    assert len(double_cosets(g2, b2, b2)) == 2


def test_induce_dimensions():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    ind = induce(Rep.trivial(ctx, s3))
    assert ind.dim == 4
    full = s4.all_elements_subgroup()
    triv_full = Rep.trivial(ctx, full)
    assert induce(triv_full).dim == 1
    g3, b3 = gl2_with_borel(3)
    assert induce(Rep.trivial(ctx, b3)).dim == 4


def test_induced_rep_is_homomorphism():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    ind = induce(Rep.trivial(ctx, s3))
    rng = random.Random(1)
    for _ in range(12):
        a, b = rng.randrange(s4.n), rng.randrange(s4.n)
        assert linalg.mat_eq(
            ind.matrix(s4.mul(a, b)), linalg.mat_mul(ind.matrix(b), ind.matrix(a))
        ) or linalg.mat_eq(
            ind.matrix(s4.mul(a, b)), linalg.mat_mul(ind.matrix(a), ind.matrix(b))
        )


def test_intertwiner_space_dims():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    swap34 = s4.labels.index((0, 1, 3, 2))
    basis = intertwiner_space(s4, s3, Rep.trivial(ctx, s3), swap34)
    assert len(basis) == 1
    assert len(intertwiner_space(s4, s3, Rep.trivial(ctx, s3), s4.e)) == 1
    # a nontrivial character of a cyclic subgroup with mismatched conjugate
    c4 = FinGroup.dihedral(4)
    rot = c4.labels.index((1, 0))
    flip = c4.labels.index((0, 1))
    rot_sub = c4.subgroup([rot])
    ctx4 = ScalarContext(n=4)
    chi = Rep.character(
        ctx4,
        rot_sub,
        {g: ctx4.zeta() ** c4.labels[g][0] for g in rot_sub.elements},
    )
    assert intertwiner_space(c4, rot_sub, chi, flip) == []


def test_convolution_unit_law_and_support():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    rho = Rep.trivial(ctx, s3)
    unit = HeckeFunc.unit(s4, s3, rho)
    swap34 = s4.labels.index((0, 1, 3, 2))
    t = intertwiner_space(s4, s3, rho, swap34)[0]
    gen = HeckeFunc.from_coset(s4, s3, rho, swap34, t)
    gen.validate()
    assert convolve(unit, gen) == gen
    assert convolve(gen, unit) == gen
    sq = convolve(gen, gen)
    allowed = set()
    for a in s3.elements:
        for b in s3.elements:
            allowed.add(s4.mul(s4.mul(a, swap34), b))
    allowed |= set(s3.elements)
    assert set(sq.support()) <= allowed


def test_convolution_associativity_random():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    rho = Rep.trivial(ctx, s3)
    unit = HeckeFunc.unit(s4, s3, rho)
    swap34 = s4.labels.index((0, 1, 3, 2))
    t = intertwiner_space(s4, s3, rho, swap34)[0]
    gen = HeckeFunc.from_coset(s4, s3, rho, swap34, t)
    elems = [unit, gen, convolve(gen, gen), unit.scale(ctx.scalar(F(2, 3)))]
    rng = random.Random(0)
    for _ in range(6):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))


def test_transport_is_algebra_isomorphism():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    rho = Rep.trivial(ctx, s3)
    ind = induce(rho)
    unit = HeckeFunc.unit(s4, s3, rho)
    assert linalg.mat_eq(
        hecke_end_transport(unit, ind), linalg.identity(ind.dim, ctx.one, ctx.zero)
    )
    swap34 = s4.labels.index((0, 1, 3, 2))
    t = intertwiner_space(s4, s3, rho, swap34)[0]
    gen = HeckeFunc.from_coset(s4, s3, rho, swap34, t)
    for phi1, phi2 in [(gen, gen), (unit, gen), (gen, unit)]:
        lhs = hecke_end_transport(convolve(phi1, phi2), ind)
        rhs = linalg.mat_mul(hecke_end_transport(phi1, ind), hecke_end_transport(phi2, ind))
        assert linalg.mat_eq(lhs, rhs)
    # round trip
    back = hecke_func_from_end(hecke_end_transport(gen, ind), ind)
    assert back == gen
    # support correspondence: transported unit maps V into block 0
    assert set(back.support()) == set(gen.support())


def test_decompose_two_dims():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    dec = decompose_two(s4, s3, Rep.trivial(ctx, s3))
    assert sorted(dec.dims) == [1, 3]
    p1, p2 = dec.projections
    ident = linalg.identity(4, ctx.one, ctx.zero)
    assert linalg.mat_eq(linalg.mat_add(p1, p2), ident)
    assert linalg.mat_eq(linalg.mat_mul(p1, p1), p1)
    assert linalg.mat_eq(linalg.mat_mul(p2, p2), p2)
    zero = linalg.zeros(4, 4, ctx.zero)
    assert linalg.mat_eq(linalg.mat_mul(p1, p2), zero)

    g2, b2 = gl2_with_borel(2)
    assert sorted(decompose_two(g2, b2, Rep.trivial(ctx, b2)).dims) == [1, 2]
    g3, b3 = gl2_with_borel(3)
    assert sorted(decompose_two(g3, b3, Rep.trivial(ctx, b3)).dims) == [1, 3]


def test_decompose_two_character_cross_check():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    # oracle: the trivial constituent has character identically one
    dec = decompose_two(s4, s3, Rep.trivial(ctx, s3), character_oracle=lambda g: ctx.one)
    assert sorted(dec.dims) == [1, 3]


def test_decompose_two_rejects_large_end():
    ctx = ScalarContext()
    s4 = FinGroup.symmetric(4)
    small = s4.subgroup([s4.labels.index((1, 0, 2, 3))])
    with pytest.raises(ValueError):
        decompose_two(s4, small, Rep.trivial(ctx, small))


def test_q_parameters():
    ctx = ScalarContext()
    s4, s3 = s4_s3()
    swap34 = s4.labels.index((0, 1, 3, 2))
    assert q_parameter(s4, s3, Rep.trivial(ctx, s3), swap34, RULE) == 3
    g2, b2 = gl2_with_borel(2)
    w2 = g2.labels.index((0, 1, 1, 0))
    assert q_parameter(g2, b2, Rep.trivial(ctx, b2), w2, RULE) == 2
    g3, b3 = gl2_with_borel(3)
    w3 = g3.labels.index((0, 1, 1, 0))
    assert q_parameter(g3, b3, Rep.trivial(ctx, b3), w3, RULE) == 3
    # q is constant along the double coset
    other = s4.mul(s4.labels.index((1, 0, 2, 3)), swap34)
    assert q_parameter(s4, s3, Rep.trivial(ctx, s3), other, RULE) == 3


def test_normalized_generator_quadratic():
    ctx = ScalarContext()
    cases = [(*s4_s3(), 3, (0, 1, 3, 2)), (*gl2_with_borel(2), 2, (0, 1, 1, 0)), (*gl2_with_borel(3), 3, (0, 1, 1, 0))]
    for h, k, q, wlabel in cases:
        rho = Rep.trivial(ctx, k)
        w = h.labels.index(wlabel)
        phi = normalized_generator(h, k, rho, w, RULE)
        unit = HeckeFunc.unit(h, k, rho)
        sq = convolve(phi, phi)
        assert sq == phi.scale(ctx.scalar(q - 1)).add(unit.scale(ctx.scalar(q)))
    with pytest.raises(ValueError):
        normalized_generator(s4_s3()[0], s4_s3()[1], Rep.trivial(ctx, s4_s3()[1]), 0, RULE)


def test_normalized_generator_a_zero_branch():
    """Synthetic 2-dim algebra: generator squares to b * unit with a = 0."""
    ctx = ScalarContext(n=4)
    z4 = FinGroup.cyclic(4)
    sub = z4.subgroup([2])  # {0, 2}
    chi = Rep.character(ctx, sub, {0: ctx.one, 2: ctx.scalar(-1)})
    # End(ind) is 2-dim: double cosets {0,2}, {1,3}; the generator at 1 squares
    # into the identity coset with zero gen-coefficient since chi(2) = -1
    phi = normalized_generator(z4, sub, chi, 1, RULE)
    sq = convolve(phi, phi)
    unit = HeckeFunc.unit(z4, sub, chi)
    # the branch forces (d phi)^2 = -unit
    assert sq == unit.scale(ctx.scalar(-1))


def test_rep_from_generator_images_and_validation():
    ctx = ScalarContext()
    s3 = FinGroup.symmetric(3)
    full = s3.all_elements_subgroup()
    swap = s3.labels.index((1, 0, 2))
    cyc = s3.labels.index((1, 2, 0))
    images = {
        swap: ((ctx.zero, ctx.one), (ctx.one, ctx.zero)),
        cyc: ((ctx.zero, ctx.scalar(-1)), (ctx.one, ctx.scalar(-1))),
    }
    rep = Rep.from_generator_images(ctx, full, images)
    assert rep.dim == 2
    bad = {swap: ((ctx.one, ctx.zero), (ctx.zero, ctx.one)), cyc: images[cyc]}
    # identity image for a transposition conflicts with the group law
    with pytest.raises(ValueError):
        Rep.from_generator_images(ctx, full, bad)
