import random
from itertools import combinations_with_replacement

import pytest

from torsionkit._linalg import EchelonLattice
from torsionkit.abelian import AbelianGroup
from torsionkit.detform import MultiPoly
from torsionkit.errors import ContextMismatchError, NotFreeError, TorsionKitError
from torsionkit.groupring import (
    GroupRingElement,
    build_truncation_context,
    in_ideal_power,
    matrix_determinant,
    q_map,
    q_r_map,
    truncate,
    truncation_context,
)


def _g(group, free=(), torsion=()):
    return GroupRingElement.from_group_element(group.element(free, torsion))


@pytest.fixture
def z1():
    return AbelianGroup(1)


def test_group_ring_arithmetic(z1):
    h = _g(z1, (1,))
    h_inverse = _g(z1, (-1,))
    assert h * h_inverse == 1
    assert (h - 1) * (h + 1) == _g(z1, (2,)) - 1
    assert (h - 1).augmentation() == 0


def test_mixed_groups_are_rejected(z1):
    other = AbelianGroup(2)
    with pytest.raises(ContextMismatchError):
        _g(z1, (1,)) + _g(other, (1, 0))
    with pytest.raises(ContextMismatchError):
        GroupRingElement.one(z1) + GroupRingElement.one(z1, 3)


def test_power_expansion_in_z(z1):
    ctx = truncation_context(z1, 3)
    x = ctx.variable(0)
    assert truncate(_g(z1, (2,)), ctx) == 1 + 2 * x + x * x
    assert truncate(_g(z1, (-1,)), ctx) == 1 - x + x * x
    assert truncate(_g(z1, (2,)) * _g(z1, (-2,)), ctx) == 1


@pytest.mark.parametrize("d", [2, 3, 4])
def test_torsion_multiple_vanishes_mod_i2(d):
    group = AbelianGroup(0, (d,))
    ctx = truncation_context(group, 2)
    assert truncate((_g(group, (), (1,)) - 1) * d, ctx).is_zero()


def test_z2_square_relation_at_degree_three():
    group = AbelianGroup(0, (2,))
    ctx = truncation_context(group, 3)
    y = ctx.variable(0)
    twice = truncate((_g(group, (), (1,)) - 1) * 2, ctx)
    assert twice == y * y
    assert twice.lowest_degree() == 2
    assert truncate((_g(group, (), (1,)) - 1) * 4, ctx).is_zero()


def test_degree_one_truncation_keeps_augmentation():
    group = AbelianGroup(2, (3,))
    ctx = truncation_context(group, 1)
    element = _g(group, (1, 2), (1,)) * 5 - _g(group, (0, -1))
    assert truncate(element, ctx) == 4


def test_truncation_is_a_ring_homomorphism():
    group = AbelianGroup(2, (2,))
    ctx = truncation_context(group, 3)
    rng = random.Random(7)

    def sample():
        terms = {}
        for _ in range(3):
            h = group.element((rng.randint(-2, 2), rng.randint(-2, 2)), (rng.randint(0, 1),))
            terms[h] = terms.get(h, 0) + rng.randint(-3, 3)
        return GroupRingElement(group, terms)

    for _ in range(15):
        a, b = sample(), sample()
        assert truncate(a * b, ctx) == truncate(a, ctx) * truncate(b, ctx)
        assert truncate(a + b, ctx) == truncate(a, ctx) + truncate(b, ctx)


def test_mod_r_truncation():
    group = AbelianGroup(1)
    ctx = truncation_context(group, 2, 3)
    x = ctx.variable(0)
    assert truncate(_g(group, (1,)).with_modulus(3) * 4, ctx) == 1 + x
    with pytest.raises(ContextMismatchError):
        truncate(_g(group, (1,)), ctx)


def test_ideal_membership():
    group = AbelianGroup(2)
    ctx = truncation_context(group, 4)
    a = _g(group, (1, 0)) - 1
    b = _g(group, (0, 1)) - 1
    assert in_ideal_power(a * b, 2, ctx)
    assert not in_ideal_power(a + a * b, 2, ctx)
    assert in_ideal_power(a * a * b, 3, ctx)
    with pytest.raises(TorsionKitError):
        in_ideal_power(a, 4, ctx)


def test_truncation_degree_must_be_positive():
    with pytest.raises(TorsionKitError):
        truncation_context(AbelianGroup(1), 0)


def test_q_map_scales_by_torsion_order():
    group = AbelianGroup(2, (3,))
    ctx = truncation_context(group, 3)
    poly = MultiPoly.variable(0, 2) * MultiPoly.variable(1, 2)
    expected = ctx.variable(0) * ctx.variable(1) * 3
    assert q_map(poly, ctx) == expected
    assert q_map(MultiPoly.constant(2, 1), ctx) == 3


def test_q_map_rejects_low_truncation_and_mixed_degrees():
    group = AbelianGroup(2)
    ctx = truncation_context(group, 2)
    with pytest.raises(TorsionKitError):
        q_map(MultiPoly.variable(0, 2) ** 2, ctx)
    with pytest.raises(TorsionKitError):
        q_map(MultiPoly.variable(0, 2) + 1, truncation_context(group, 3))


def test_q_r_map_independent_of_lift():
    group = AbelianGroup(1, (4,))
    ctx = truncation_context(group, 3, 2)
    poly = MultiPoly.variable(0, 2, 2) * MultiPoly.variable(1, 2, 2)
    default = q_r_map(poly, ctx)
    h, g = group.free_generator(0), group.torsion_generator(0)
    shifted = q_r_map(poly, ctx, [h + 2 * g, 3 * g])
    assert default == shifted
    assert default.lowest_degree() == 2


def test_q_r_map_needs_free_quotient():
    group = AbelianGroup(1, (2,))
    ctx = truncation_context(group, 2, 4)
    with pytest.raises(NotFreeError):
        q_r_map(MultiPoly.variable(0, 1, 4), ctx)


def test_matrix_determinant():
    group = AbelianGroup(2)
    h1, h2 = _g(group, (1, 0)), _g(group, (0, 1))
    matrix = [[h1, h2], [h2, h1]]
    assert matrix_determinant(matrix) == h1 * h1 - h2 * h2
    assert matrix_determinant([], group) == 1
    with pytest.raises(TorsionKitError):
        matrix_determinant([])
    with pytest.raises(TorsionKitError):
        matrix_determinant([[h1, h2]])


def test_context_construction(z1):
    fresh = build_truncation_context(z1, 3)
    assert fresh is not build_truncation_context(z1, 3)
    assert truncation_context(z1, 3) is truncation_context(z1, 3)
    assert truncate(_g(z1, (1,)), fresh) == 1 + fresh.variable(0)
    with pytest.raises(TorsionKitError):
        build_truncation_context(z1, 0)


def _coefficients(x, elements):
    terms = x.terms
    return [terms.get(g, 0) for g in elements]


def _ideal_power_lattice(group, elements, power, modulus):
    """``I^power`` in group-element coordinates, spanned by products of ``g - 1``."""
    lattice = EchelonLattice(len(elements), modulus)
    differences = [GroupRingElement.from_group_element(g, modulus=modulus) - 1 for g in elements]
    for factors in combinations_with_replacement(differences, power):
        product = GroupRingElement.one(group, modulus)
        for factor in factors:
            product = product * factor
        lattice.add(_coefficients(product, elements))
    return lattice


def _in_lattice(lattice, x, elements):
    return not any(lattice.reduce(_coefficients(x, elements)))


def _random_element(rng, elements, depth, modulus):
    """Sum of a few terms ``c g (g_1 - 1)...(g_j - 1)`` with ``j`` drawn from ``depth``."""
    total = GroupRingElement.zero(elements[0].group, modulus)
    for _ in range(3):
        term = GroupRingElement.from_group_element(rng.choice(elements), rng.randint(-3, 3), modulus)
        for _ in range(rng.choice(depth)):
            term = term * (GroupRingElement.from_group_element(rng.choice(elements), modulus=modulus) - 1)
        total = total + term
    return total


@pytest.mark.parametrize(
    "orders, modulus",
    [((3,), None), ((4,), None), ((2, 2), None), ((2, 4), None), ((2, 2, 2), None), ((3,), 3), ((4,), 2), ((2, 4), 2)],
)
def test_truncation_matches_brute_force_lattice(orders, modulus):
    rng = random.Random(97 * sum(orders) + len(orders) + (modulus or 0))
    group = AbelianGroup(0, orders)
    elements = list(group.elements())
    lattices = {power: _ideal_power_lattice(group, elements, power, modulus) for power in range(1, 5)}
    for k in (2, 3, 4):
        context = truncation_context(group, k, modulus)
        for _ in range(25):
            x = _random_element(rng, elements, range(k + 1), modulus)
            assert truncate(x, context).is_zero() == _in_lattice(lattices[k], x, elements)
            for power in range(1, k):
                assert in_ideal_power(x, power, context) == _in_lattice(lattices[power], x, elements)
            shifted = x + _random_element(rng, elements, [k], modulus)
            assert truncate(shifted, context) == truncate(x, context)
