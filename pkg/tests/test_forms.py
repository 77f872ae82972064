import pytest

from torsionkit.detform import MasseyForm
from torsionkit.errors import PreconditionError
from torsionkit.fox import CommutatorExpansion, FreeWord
from torsionkit.pipeline import (
    check_fox_cup_congruence,
    congruence_failures,
    cup_form_from_expansions,
    massey_form_from_higher_fox,
    massey_vanishing_order,
    mod_r_cup_form,
    mod_r_rank,
    parse_presentation,
)

W = FreeWord.parse


def test_hopf_cup_form(hopf):
    form = cup_form_from_expansions(hopf)
    assert form.value(0, 0, 1) == 1
    assert form.value(0, 1, 0) == -1


def test_repeated_pair_gives_zero_form():
    pres = parse_presentation(
        "generators 2\nrank 2\nrelator 1\nexpansion 1: pairs=[(x1 x2, x1 x2)] powers=[] exponent=0\n"
    )
    form = cup_form_from_expansions(pres)
    assert all(x == 0 for block in form.table for row in block for x in row)


def test_integral_form_needs_rank_two():
    with pytest.raises(PreconditionError):
        cup_form_from_expansions(parse_presentation("generators 1\nrank 1\n"))


def test_integral_form_rederives_power_expansions():
    text = (
        "generators 2\nrank 2\nrelator x1 x2 x1 x2 X1 X2 X1 X2\n"
        "expansion 1: pairs=[] powers=[x1 x2; X1 X2] exponent=2\n"
    )
    pres = parse_presentation(text)
    assert pres.expansions[0].power_words
    assert not pres.expansion(1).power_words
    assert cup_form_from_expansions(pres).value(0, 0, 1) == 2


def test_even_r_form(even_r_presentation):
    assert mod_r_rank(even_r_presentation, 2) == 3
    form = mod_r_cup_form(even_r_presentation, 2)
    assert form.value(0, 0, 1) == 1
    assert form.value(1, 2, 2) == 1
    bare = mod_r_cup_form(even_r_presentation, 2, include_even_term=False)
    assert bare.value(1, 2, 2) == 0


def test_odd_r_power_blocks_drop_out():
    pres = parse_presentation(
        "generators 3\nrank 2\nrelator x1 x2 X1 X2\nrelator x3^3\n"
        "expansion 2: pairs=[] powers=[x3] exponent=3\n"
    )
    form = mod_r_cup_form(pres, 3)
    assert form.value(0, 0, 1) == 1
    assert all(x == 0 for row in form.table[1] for x in row)


def test_mod_r_rank_needs_free_quotient(even_r_presentation):
    with pytest.raises(PreconditionError):
        mod_r_rank(even_r_presentation, 4)


def test_massey_order_one_is_the_cup_form(hopf, sampler):
    assert massey_form_from_higher_fox(hopf, 1) == MasseyForm.from_alternating(cup_form_from_expansions(hopf))
    for _ in range(5):
        pres = sampler.integral(3, sampler.rng.choice(((), (2,))))
        massey = massey_form_from_higher_fox(pres, 1)
        assert massey == MasseyForm.from_alternating(cup_form_from_expansions(pres))


def test_massey_vanishing_order():
    w = W("x1 x2 X1 X2")
    assert massey_vanishing_order(w, 2, 1)
    assert not massey_vanishing_order(w, 2, 2)
    assert not massey_vanishing_order(W("x1"), 1, 1)


def test_massey_needs_vanishing_derivatives(hopf):
    with pytest.raises(PreconditionError):
        massey_form_from_higher_fox(hopf, 2)


def test_borromean_massey_entries(borromean):
    form = massey_form_from_higher_fox(borromean, 2)
    values = set(form.as_dict().values())
    assert values and values <= {1, -1}


def test_congruence_on_commutator():
    expansion = CommutatorExpansion(((W("x1"), W("x2")),))
    assert check_fox_cup_congruence(expansion, 1, 2)
    assert check_fox_cup_congruence(expansion, 2, 2)
    assert check_fox_cup_congruence(CommutatorExpansion(), 1, 3)


def test_congruence_even_term():
    expansion = CommutatorExpansion((), (W("x1"),), 2)
    assert check_fox_cup_congruence(expansion, 1, 1, 2)
    assert not check_fox_cup_congruence(expansion, 1, 1, 2, include_even_term=False)


@pytest.mark.parametrize("modulus", [None, 2, 3, 4, 5, 8, 9])
def test_congruence_on_random_expansions(sampler, modulus):
    generators = [1, 2, 3, 4]
    for _ in range(30):
        pairs = sampler.commutator_pairs(generators)
        if modulus is None:
            expansion = CommutatorExpansion(pairs)
        else:
            powers = tuple(sampler.word(generators) for _ in range(sampler.rng.randint(0, 2)))
            expansion = CommutatorExpansion(pairs, powers, modulus if powers else 0)
        for j in generators:
            assert check_fox_cup_congruence(expansion, j, 4, modulus)


def test_no_congruence_failures(hopf, borromean, even_r_presentation):
    assert congruence_failures(hopf) == []
    assert congruence_failures(borromean) == []
    assert congruence_failures(even_r_presentation, 2) == []
    assert congruence_failures(even_r_presentation, 2, include_even_term=False) == [(2, 3)]
