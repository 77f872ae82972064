from math import prod

import pytest

from torsionkit.abelian import AbelianGroup
from torsionkit.errors import PreconditionError, TorsionKitError
from torsionkit.groupring import GroupRingElement, truncation_context
from torsionkit.pipeline import (
    EQUAL,
    EQUAL_UP_TO_SIGN,
    UNEQUAL,
    check_integral_theorem,
    check_massey_theorem,
    check_mod_r_theorem,
    compare,
    parse_presentation,
    tau_zero,
    torsion_numerator,
    truncated_numerator,
)


def test_hopf_integral(hopf):
    report = check_integral_theorem(hopf)
    assert report.verdict == EQUAL
    assert report.truncation_degree == 2
    assert report.left.leading_terms() == {"x1": -1}
    data = report.to_json()
    assert data["left"] == data["right"]
    assert data["details"]["tau_zero"] == 1


def test_hopf_integral_other_strike(hopf):
    report = check_integral_theorem(hopf, strike=2)
    assert report.verdict == EQUAL
    assert report.left.leading_terms() == {"x2": -1}


def test_hopf_torsion_numerators(hopf):
    group = hopf.group
    h1, h2 = (GroupRingElement.from_group_element(h) for h in hopf.assignment)
    assert torsion_numerator(hopf, 1) == -(h1 - 1)
    assert torsion_numerator(hopf, 2) == 1 - h2
    assert (h1 - 1) * torsion_numerator(hopf, 2) == (h2 - 1) * torsion_numerator(hopf, 1)
    assert torsion_numerator(hopf, 1).group == group


def test_strike_outside_rank(hopf):
    with pytest.raises(PreconditionError):
        check_integral_theorem(hopf, strike=3)


def test_numerator_is_defined_up_to_group_elements(hopf):
    context = truncation_context(hopf.group, 2)
    left = truncated_numerator(hopf, 1, context)
    shift = context.group_element(hopf.assignment[1])
    assert left * shift == left


def test_compare_verdicts():
    context = truncation_context(AbelianGroup(1), 2)
    x = context.variable(0)
    assert compare(x, x) == EQUAL
    assert compare(x, -x) == EQUAL_UP_TO_SIGN
    assert compare(x, 2 * x) == UNEQUAL


def test_hopf_mod_r(hopf):
    for r in (2, 3, 5):
        report = check_mod_r_theorem(hopf, r)
        assert report.verdict == EQUAL
        assert report.details["mod_r_rank"] == 2


def test_mod_r_rejects_bad_moduli(even_r_presentation):
    with pytest.raises(TorsionKitError):
        check_mod_r_theorem(even_r_presentation, 6)
    with pytest.raises(TorsionKitError):
        check_mod_r_theorem(even_r_presentation, 4)


def test_even_r_term_is_needed(even_r_presentation):
    report = check_mod_r_theorem(even_r_presentation, 2)
    assert report.verdict == EQUAL
    assert report.details["p_orders"] == [2]
    assert not report.left.is_zero()
    bare = check_mod_r_theorem(even_r_presentation, 2, include_even_term=False)
    assert bare.verdict == UNEQUAL
    assert bare.right.is_zero()


def test_borromean_massey(borromean):
    report = check_massey_theorem(borromean, 2)
    assert report.verdict == EQUAL
    assert report.truncation_degree == 5
    assert report.right.lowest_degree() == 4
    assert report.details["entries_in_ideal_power"]
    assert report.details["numerator_in_ideal_power"]


def test_borromean_integral_is_trivial(borromean):
    report = check_integral_theorem(borromean)
    assert report.verdict == EQUAL
    assert report.left.is_zero()


def test_massey_order_must_be_positive(hopf):
    with pytest.raises(TorsionKitError):
        check_massey_theorem(hopf, 0)


def test_tau_zero_signs(sampler):
    pres = sampler.integral(2, (3,))
    assert tau_zero(pres) == -pres.torsion_sign


def _collect_nontrivial(draw, check, wanted, attempts):
    """Check fresh samples until ``wanted`` of them have a nonzero torsion side."""
    found = 0
    for _ in range(attempts):
        report = check(draw())
        assert report.verdict == EQUAL, report.summary()
        if report.left.is_zero():
            continue
        assert report.left.lowest_degree() == report.truncation_degree - 1
        assert report.right.lowest_degree() == report.truncation_degree - 1
        found += 1
        if found == wanted:
            return
    pytest.fail(f"only {found} of {attempts} samples had a nonzero torsion side")


def _integral_and_massey_one(pres):
    reports = [check_integral_theorem(pres, strike) for strike in range(1, pres.rank + 1)]
    assert all(report.verdict == EQUAL for report in reports)
    massey = check_massey_theorem(pres, 1)
    assert massey.verdict == EQUAL
    assert massey.left == reports[0].left
    return reports[0]


@pytest.mark.parametrize("n, orders", [(2, ()), (3, ()), (2, (2,)), (3, (3,)), (2, (2, 2)), (2, (4,))])
def test_integral_on_samples(sampler, n, orders):
    _collect_nontrivial(lambda: sampler.integral(n, orders), _integral_and_massey_one, 9, 120)


@pytest.mark.parametrize(
    "r, p_count, coprime",
    [(2, 0, ()), (2, 1, ()), (3, 1, ()), (4, 1, ()), (5, 1, ()), (4, 0, (3,)), (5, 0, (2,)), (3, 0, (2,))],
)
def test_mod_r_on_samples(sampler, r, p_count, coprime):
    def check(pres):
        report = check_mod_r_theorem(pres, r)
        assert report.details["prime_to_p_order"] == prod(coprime)
        assert report.details["linking_dot"] == (1 if p_count else None)
        return report

    _collect_nontrivial(lambda: sampler.mod_r(2, r, p_count, coprime), check, 4, 60)


@pytest.mark.parametrize("orders", [(), (2,)])
def test_massey_on_samples(sampler, orders):
    _collect_nontrivial(lambda: sampler.massey(2, orders), lambda pres: check_massey_theorem(pres, 2), 10, 150)


TWO_P_SUMMANDS = """
name two-summands
generators 4
rank 2
relator x1 x2 X1 X2
relator x3 x3
relator x4 x4
expansion 1: pairs=[(x1, x2)] powers=[] exponent=0
expansion 2: pairs=[] powers=[x3] exponent=2
expansion 3: pairs=[] powers=[x4] exponent=2
"""


def test_mod_r_factor_is_the_prime_to_p_order():
    pres = parse_presentation(TWO_P_SUMMANDS)
    report = check_mod_r_theorem(pres, 2)
    assert report.verdict == EQUAL
    assert report.details["p_orders"] == [2, 2]
    assert report.details["prime_to_p_order"] == 1
    assert report.left.lowest_degree() == 3
    # |Tors| / r = 2 is zero mod 2
    assert pres.torsion_order // 2 == 2
    assert (report.right * (pres.torsion_order // 2)).is_zero()
