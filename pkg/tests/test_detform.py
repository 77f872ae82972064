import pytest

from torsionkit.detform import (
    AlternatingForm,
    ChangeOfBasis,
    MasseyForm,
    MultiPoly,
    beta_matrix,
    change_of_basis,
    dual_inverse_substitution,
    dual_substitution,
    form_determinant,
    massey_change_of_basis,
    massey_determinant,
    massey_theta_matrix,
    sign_refine,
    theta_matrix,
)
from torsionkit.errors import DivisionError, FormError


def a(index, n, modulus=None):
    return MultiPoly.variable(index, n, modulus)


def test_theta_of_rank_two_form():
    form = AlternatingForm.from_entries(2, {(0, 0, 1): 5})
    theta = theta_matrix(form)
    assert theta == [[a(1, 2) * -5, a(0, 2) * 5]]
    assert form_determinant(form) == -5


def test_zero_form_has_zero_determinant():
    form = AlternatingForm.from_entries(3, {})
    assert form_determinant(form).is_zero()


def test_beta_rows_sum_to_zero(sampler):
    for n in (2, 3, 4):
        form = sampler.alternating_form(n)
        for row in beta_matrix(form):
            assert sum(row, MultiPoly.zero(n)).is_zero()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_determinant_is_homogeneous_and_strike_free(sampler, n):
    for _ in range(67):
        form = sampler.alternating_form(n)
        d = form_determinant(form)
        assert d.is_zero() or d.degree() == n - 2
        for strike in range(1, n + 1):
            assert form_determinant(form, strike) == d


@pytest.mark.parametrize("n", [2, 3, 4])
def test_change_of_basis_law(sampler, n):
    for _ in range(17):
        form = sampler.alternating_form(n)
        ca = sampler.change_of_basis(n)
        cb = sampler.change_of_basis(n - 1)
        moved = change_of_basis(form, ca, cb)
        expected = form_determinant(form).substitute(dual_substitution(ca)) * (ca.det * cb.det)
        assert form_determinant(moved) == expected


def test_change_of_basis_law_mod_r(sampler):
    for r in (3, 5, 9):
        form = sampler.alternating_form(3, r)
        ca = sampler.change_of_basis(3, r)
        cb = sampler.change_of_basis(2, r)
        moved = change_of_basis(form, ca, cb)
        expected = form_determinant(form).substitute(dual_substitution(ca)) * (ca.det * cb.det)
        assert form_determinant(moved) == expected


def test_swapping_l_basis_negates():
    form = AlternatingForm.from_entries(3, {(0, 0, 1): 1, (1, 1, 2): 1})
    swap = ChangeOfBasis(((0, 1), (1, 0)))
    identity = ChangeOfBasis(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert form_determinant(change_of_basis(form, identity, swap)) == -form_determinant(form)


def test_dual_substitutions_are_inverse(sampler):
    change = sampler.change_of_basis(3)
    poly = a(0, 3) * a(1, 3) + a(2, 3) * 4
    there = poly.substitute(dual_substitution(change))
    assert there.substitute(dual_inverse_substitution(change)) == poly


def test_form_validation():
    with pytest.raises(FormError):
        AlternatingForm(2, (((0, 1), (1, 0)),))
    with pytest.raises(FormError):
        AlternatingForm(3, (((0, 1, 0), (-1, 0, 0), (0, 0, 0)),))
    with pytest.raises(FormError):
        AlternatingForm.from_entries(1, {})
    with pytest.raises(FormError):
        ChangeOfBasis(((2, 0), (0, 1)))


def test_divide_by_variable():
    p = a(0, 2) * a(1, 2) * 3
    assert p.divide_by_variable(1) == a(0, 2) * 3
    with pytest.raises(DivisionError):
        (p + a(1, 2)).divide_by_variable(0)


def test_even_r_diagonal_term():
    form = AlternatingForm.from_entries(3, {(0, 0, 1): 1, (1, 2, 2): 1}, 2)
    assert form.diagonal_support() == frozenset({2})
    assert form_determinant(form) == a(2, 3, 2)
    with pytest.raises(DivisionError):
        form_determinant(form, strike=3)


def test_sign_refine():
    d = a(0, 2) * 3
    assert sign_refine(d, -1) == -d
    with pytest.raises(FormError):
        sign_refine(d, 2)


def test_massey_from_alternating_matches_cup(sampler):
    for n in (2, 3, 4):
        form = sampler.alternating_form(n)
        massey = MasseyForm.from_alternating(form)
        assert massey_theta_matrix(massey) == theta_matrix(form)
        assert massey_determinant(massey) == form_determinant(form)


def test_massey_rejects_nonvanishing_f0():
    with pytest.raises(FormError):
        MasseyForm.from_mapping(2, 1, {(0, 0, (0,)): 1})
    with pytest.raises(FormError):
        MasseyForm.from_mapping(2, 2, {(0, 0, (1,)): 1})


@pytest.mark.parametrize("n, order, trials", [(2, 2, 50), (3, 2, 50), (2, 3, 5)])
def test_massey_determinant_degree_and_strikes(sampler, n, order, trials):
    for _ in range(trials):
        form = sampler.massey_form(n, order)
        d = massey_determinant(form)
        assert d.is_zero() or d.degree() == order * (n - 1) - 1
        for strike in range(1, n + 1):
            assert massey_determinant(form, strike) == d


def test_massey_change_of_basis_law(sampler):
    for n in (2, 3) * 5:
        form = sampler.massey_form(n, 2)
        ca = sampler.change_of_basis(n)
        cb = sampler.change_of_basis(n - 1)
        moved = massey_change_of_basis(form, ca, cb)
        expected = massey_determinant(form).substitute(dual_substitution(ca)) * (ca.det * cb.det)
        assert massey_determinant(moved) == expected
