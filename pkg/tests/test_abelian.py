from fractions import Fraction

import pytest
from sympy import Matrix

from torsionkit.abelian import (
    AbelianGroup,
    LinkingForm,
    dot_pairing,
    is_nondegenerate,
    is_pseudo_basis,
    iter_pseudo_bases,
    prime_power,
    primary_part,
    smith_form_with_moves,
    smith_normal_form,
)
from torsionkit.errors import DegenerateFormError, TorsionKitError


@pytest.mark.parametrize(
    "matrix, diagonal",
    [
        ([[2, 4], [6, 8]], [2, 4]),
        ([[0, 0, 2], [0, 0, 0]], [2, 0]),
        ([[4, 6]], [2]),
        ([[2, 0, 0], [0, 3, 0], [0, 0, 4]], [1, 2, 12]),
    ],
)
def test_smith_diagonal(matrix, diagonal):
    form = smith_form_with_moves(matrix)
    assert form.diagonal == diagonal
    for small, big in zip(diagonal, diagonal[1:]):
        if big:
            assert big % small == 0


def test_smith_normal_form_factorization():
    a = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    u, d, v = smith_normal_form(a)
    assert u * Matrix(a) * v == d
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    assert [d[i, i] for i in range(3)] == [2, 6, 12]


def test_from_orders_is_canonical():
    assert AbelianGroup.from_orders(1, [2, 4, 3]) == AbelianGroup(1, (2, 12))
    assert AbelianGroup.from_orders(2, [1, 1]) == AbelianGroup(2)


def test_group_validation():
    with pytest.raises(TorsionKitError):
        AbelianGroup(0, (2, 3))
    with pytest.raises(TorsionKitError):
        AbelianGroup(-1)
    with pytest.raises(TorsionKitError):
        AbelianGroup(0, (1,))


def test_from_relations_images_generate():
    group, images = AbelianGroup.from_relations([[0, 0, 2], [0, 0, 0]], 3)
    assert group == AbelianGroup(2, (2,))
    assert images[2].order() == 2
    assert images[0].order() is None


def test_element_arithmetic():
    group = AbelianGroup(1, (4,))
    g = group.torsion_generator(0)
    assert (4 * g).is_identity
    assert (2 * g).order() == 2
    assert (g + group.free_generator(0)).order() is None
    assert (g - g) == group.identity()


def test_mod_r_rank():
    group = AbelianGroup(2, (2, 4))
    assert group.is_free_mod(2)
    assert group.rank_mod(2) == 4
    assert not group.is_free_mod(4)
    assert AbelianGroup(1, (3,)).rank_mod(2) == 1


@pytest.mark.parametrize("r, expected", [(2, (2, 1)), (8, (2, 3)), (9, (3, 2)), (7, (7, 1))])
def test_prime_power(r, expected):
    assert prime_power(r) == expected


@pytest.mark.parametrize("r", [1, 6, 12, 0])
def test_prime_power_rejects(r):
    with pytest.raises(TorsionKitError):
        prime_power(r)


def test_primary_part_orders():
    group = AbelianGroup(1, (6, 36))
    two, basis = primary_part(group, 2)
    assert basis.orders == (2, 4)
    assert two == AbelianGroup(0, (2, 4))
    _, basis3 = primary_part(group, 3)
    assert basis3.orders == (3, 9)
    assert is_pseudo_basis(group, 3, basis3.elements)


def test_iter_pseudo_bases_of_klein_group():
    group = AbelianGroup(0, (2, 2))
    bases = list(iter_pseudo_bases(group, 2))
    assert len(bases) == 6
    assert all(is_pseudo_basis(group, 2, b) for b in bases)


def test_pseudo_basis_rejects_dependent_elements():
    group = AbelianGroup(0, (2, 2))
    g = group.torsion_generator(0)
    assert not is_pseudo_basis(group, 2, (g, g))


def _cyclic_form(order, value):
    group = AbelianGroup(0, (order,))
    return LinkingForm(group, group, ((Fraction(value),),))


def test_dot_pairing_values():
    form = _cyclic_form(4, Fraction(1, 4))
    g = form.left.torsion_generator(0)
    assert dot_pairing(form, g, g, 4) == 1
    assert dot_pairing(form, 3 * g, g, 4) == 3
    assert dot_pairing(form, form.left.identity(), g, 4) == 0


def test_dot_pairing_half():
    form = _cyclic_form(2, Fraction(1, 2))
    g = form.left.torsion_generator(0)
    assert dot_pairing(form, g, g, 2) == 1


def test_dot_pairing_needs_large_order():
    form = _cyclic_form(2, Fraction(1, 2))
    g = form.left.torsion_generator(0)
    with pytest.raises(TorsionKitError):
        dot_pairing(form, g, g, 4)


def test_linking_values_must_be_killed_by_orders():
    group = AbelianGroup(0, (2,))
    with pytest.raises(TorsionKitError):
        LinkingForm(group, group, ((Fraction(1, 4),),))


def test_nondegeneracy():
    assert is_nondegenerate(_cyclic_form(4, Fraction(1, 4)))
    assert not is_nondegenerate(_cyclic_form(4, Fraction(1, 2)))
    small = AbelianGroup(0, (2,))
    big = AbelianGroup(0, (4,))
    with pytest.raises(DegenerateFormError):
        is_nondegenerate(LinkingForm(small, big, ((Fraction(1, 2),),)))
