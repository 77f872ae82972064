import random

import pytest

from torsionkit.abelian import AbelianGroup
from torsionkit.errors import ExpansionError, PresentationError, RankError
from torsionkit.fox import (
    CommutatorExpansion,
    FreeWord,
    Presentation,
    WordCombination,
    abelianize,
    alexander_matrix,
    augmented_fox_derivative,
    commutator,
    commutator_expansion,
    fox_derivative,
    higher_fox_derivative,
    magnus_expansion,
    nielsen_normalize,
)
from torsionkit.groupring import GroupRingElement

W = FreeWord.parse


def _random_word(rng, generators, length):
    return FreeWord(tuple(rng.choice(generators) * rng.choice((1, -1)) for _ in range(length)))


def test_parse_tokens():
    assert W("x1 X2 x3^2").letters == (1, -2, 3, 3)
    assert W("x3^-2").letters == (-3, -3)
    assert W("1").letters == ()
    assert str(W("x1 X2")) == "x1 X2"


@pytest.mark.parametrize("token", ["y1", "x0", "x1^a"])
def test_parse_rejects_bad_tokens(token):
    with pytest.raises(PresentationError):
        W(token)


def test_free_reduction():
    w = W("x1 x2 X2 X1 x3")
    assert w.reduced().letters == (3,)
    assert commutator(W("x1"), W("x1")).is_trivial()
    assert w.equals(W("x3"))


def test_fox_derivative_of_commutator():
    r = W("x1 x2 X1 X2")
    assert fox_derivative(r, 2) == WordCombination({W("x1"): 1, W("x1 x2 X1 X2"): -1})
    assert fox_derivative(W("x1"), 1) == WordCombination.of(FreeWord())
    assert fox_derivative(W("X1"), 1) == WordCombination.of(W("X1"), -1)


def test_fundamental_formula():
    rng = random.Random(3)
    generators = [1, 2, 3]
    for _ in range(25):
        w = _random_word(rng, generators, rng.randint(0, 8))
        total = WordCombination()
        for j in generators:
            x_minus_one = WordCombination({W(f"x{j}"): 1, FreeWord(): -1})
            total = total + fox_derivative(w, j) * x_minus_one
        assert total == WordCombination({w: 1, FreeWord(): -1})


def test_magnus_matches_augmented_derivatives():
    rng = random.Random(11)
    generators = [1, 2, 3]
    for _ in range(15):
        w = _random_word(rng, generators, rng.randint(1, 7))
        series = magnus_expansion(w, 3)
        for length in (1, 2, 3):
            for _ in range(4):
                seq = tuple(rng.choice(generators) for _ in range(length))
                assert series.get(tuple(reversed(seq)), 0) == augmented_fox_derivative(w, seq)


def test_higher_derivative_applies_first_index_first():
    w = W("x1 x2 X1 X2")
    assert higher_fox_derivative(w, (1, 2)) == fox_derivative(fox_derivative(w, 1), 2)
    assert augmented_fox_derivative(w, (1, 2)) == -1
    assert augmented_fox_derivative(w, (2, 1)) == 1


def test_abelianize_commutator_derivative():
    group = AbelianGroup(2)
    assignment = group.generators()
    image = abelianize(fox_derivative(W("x1 x2 X1 X2"), 2), group, assignment)
    h1 = GroupRingElement.from_group_element(group.free_generator(0))
    assert image == h1 - 1


def test_alexander_matrix_of_hopf_relator():
    pres = Presentation(2, (W("x1 x2 X1 X2"),))
    group, assignment = pres.abelianization()
    row = alexander_matrix(pres, group, assignment)[0]
    h1, h2 = (GroupRingElement.from_group_element(h) for h in assignment)
    assert row == [1 - h2, h1 - 1]


@pytest.mark.parametrize(
    "text",
    ["x1 x2 X1 X2", "x1 x2 x3 X1 X2 X3", "x2 x1 x1 X2 X1 X1", "x3 X1 X3 x2 x1 X2"],
)
def test_commutator_expansion_reproduces_word(text):
    w = W(text)
    expansion = commutator_expansion(w)
    assert expansion.expand().equals(w)
    assert not expansion.power_words


def test_commutator_expansion_with_power_block():
    w = (W("x1 x2 X1 X2") * W("x3 x1") ** 4).reduced()
    expansion = commutator_expansion(w, 4)
    assert expansion.exponent == 4
    assert expansion.expand().equals(w)
    assert [g.exponent_vector(3) for g in expansion.power_words] == [[1, 0, 1]]


def test_commutator_expansion_rejects_non_commutators():
    with pytest.raises(ExpansionError):
        commutator_expansion(W("x1 x2"))
    with pytest.raises(ExpansionError):
        commutator_expansion(W("x1 x1 x1"), 2)


def test_power_blocks_need_exponent():
    with pytest.raises(ExpansionError):
        CommutatorExpansion((), (W("x1"),), 1)


def test_expansion_verify_reports_line():
    expansion = CommutatorExpansion(((W("x1"), W("x2")),))
    with pytest.raises(ExpansionError, match="line 7"):
        expansion.verify(W("x2 x1 X2 X1"), 7)


def test_nielsen_normalize_block_form():
    pres = Presentation(3, (W("x3 x3 x1 x2 X1 X2"), W("x2 x3 X2 X3")))
    normalized, substitution = nielsen_normalize(pres)
    matrix = normalized.relator_matrix()
    assert matrix[0] == [0, 0, 0]
    assert matrix[1][:2] == [0, 0]
    assert abs(matrix[1][2]) == 2
    for i, word in enumerate(substitution.old_in_new, start=1):
        back = word.substitute({j + 1: w for j, w in enumerate(substitution.new_in_old)})
        assert back.equals(W(f"x{i}"))


def test_nielsen_normalize_mixes_generators():
    pres = Presentation(2, (W("x1 x1 x2"),))
    normalized, substitution = nielsen_normalize(pres)
    assert normalized.relator_matrix()[0][0] == 0
    group, _ = normalized.abelianization()
    assert group == AbelianGroup(1)
    for i, word in enumerate(substitution.old_in_new, start=1):
        back = word.substitute({j + 1: w for j, w in enumerate(substitution.new_in_old)})
        assert back.equals(W(f"x{i}"))


def test_nielsen_normalize_rank_checks():
    with pytest.raises(RankError):
        nielsen_normalize(Presentation(2, ()))
    with pytest.raises(RankError):
        nielsen_normalize(Presentation(2, (W("x1 x2 X1 X2"),), rank=1))
